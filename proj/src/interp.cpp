#include "gmg/interp.hpp"

#include "gmg/geometry.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

namespace gmg {

namespace {

bool contains_point(const SimplicialMesh& mesh, int cell, const Eigen::VectorXd& p,
                    Eigen::VectorXd* bc_out = nullptr) {
  Eigen::VectorXd bc = barycentric(mesh.cell_coords(cell), p);
  if (bc_out) *bc_out = bc;
  return bc.minCoeff() >= -1e-12;
}

// Among all cells, the one minimizing the distance to p; among near-ties
// (relative 1e-12) the lowest index wins. Order-independent, shared by the
// BFS fallback and the brute-force oracle so the two builds agree.
int nearest_cell(const SimplicialMesh& mesh, const Eigen::VectorXd& p) {
  const int nc = mesh.num_cells();
  Eigen::VectorXd d2(nc);
  for (int c = 0; c < nc; ++c) {
    Eigen::VectorXd q = closest_point_simplex(mesh.cell_coords(c), p);
    d2(c) = (q - p).squaredNorm();
  }
  double dmin = d2.minCoeff();
  double tol = 1e-12 * dmin + 1e-300;
  for (int c = 0; c < nc; ++c)
    if (d2(c) <= dmin + tol) return c;
  return -1;
}

// All containing cells sharing the feature p sits on are vertex-sharing
// neighbors of any one of them; picking the lowest containing index keeps the
// result independent of the walk that found it.
int lowest_containing_near(const SimplicialMesh& mesh, int cell,
                           const Eigen::VectorXd& p) {
  int best = cell;
  for (int n : mesh.cell_neighbors[cell])
    if (n < best && contains_point(mesh, n, p)) best = n;
  return best;
}

}  // namespace

LocateResult locate_by_bfs(const SimplicialMesh& coarse, int start_cell,
                           const Eigen::VectorXd& point, double search_radius) {
  LocateResult res;
  std::vector<char> visited(coarse.num_cells(), 0);
  // Distance-ordered frontier: the containing cell has box distance zero and
  // is popped almost immediately, keeping the step counts near one.
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      queue;
  queue.push({0.0, start_cell});
  visited[start_cell] = 1;
  while (!queue.empty()) {
    int c = queue.top().second;
    queue.pop();
    ++res.steps;
    if (contains_point(coarse, c, point)) {
      res.cell = lowest_containing_near(coarse, c, point);
      res.kind = LocationKind::kInside;
      return res;
    }
    for (int n : coarse.cell_neighbors[c]) {
      if (visited[n]) continue;
      Eigen::MatrixXd verts = coarse.cell_coords(n);
      double d2 = 0.0;
      for (int d = 0; d < coarse.dim; ++d) {
        double lo = verts.col(d).minCoeff(), hi = verts.col(d).maxCoeff();
        double e = point(d) < lo ? lo - point(d) : (point(d) > hi ? point(d) - hi : 0.0);
        d2 += e * e;
      }
      if (d2 > search_radius * search_radius) continue;
      visited[n] = 1;
      queue.push({d2, n});
    }
  }
  // Radius exhausted without containment: nearest-cell mode. steps keeps
  // counting frontier pops only; the exhaustive scan is not a traversal.
  res.cell = nearest_cell(coarse, point);
  res.kind = LocationKind::kProjected;
  return res;
}

Eigen::VectorXd ProlongationOperator::prolongate(const Eigen::VectorXd& coarse_vec) const {
  if (coarse_vec.size() != matrix.cols()) throw std::invalid_argument("dimension mismatch");
  return matrix * coarse_vec;
}

Eigen::VectorXd ProlongationOperator::restrict_vec(const Eigen::VectorXd& fine_vec) const {
  if (fine_vec.size() != matrix.rows()) throw std::invalid_argument("dimension mismatch");
  return matrix.transpose() * fine_vec;
}

namespace {

using Coord = std::array<double, 3>;

Coord coord_key(const Eigen::MatrixXd& verts, int v) {
  Coord key{0.0, 0.0, 0.0};
  for (int d = 0; d < verts.cols(); ++d) key[d] = verts(v, d);
  return key;
}

// Shared vertices are matched bitwise; node nesting preserves coordinates.
std::vector<int> shared_vertex_map(const SimplicialMesh& fine,
                                   const SimplicialMesh& coarse) {
  std::map<Coord, int> coarse_of;
  for (int v = 0; v < coarse.num_vertices(); ++v)
    coarse_of[coord_key(coarse.vertices, v)] = v;
  std::vector<int> shared(fine.num_vertices(), -1);
  for (int v = 0; v < fine.num_vertices(); ++v) {
    auto it = coarse_of.find(coord_key(fine.vertices, v));
    if (it != coarse_of.end()) shared[v] = it->second;
  }
  return shared;
}

void emit_row(std::vector<Eigen::Triplet<double>>& triplets,
              std::vector<RowLocation>& rows, const SimplicialMesh& coarse,
              int fine_vertex, int cell, LocationKind kind,
              const Eigen::VectorXd& point) {
  Eigen::MatrixXd verts = coarse.cell_coords(cell);
  Eigen::VectorXd x = point;
  if (kind == LocationKind::kProjected) x = closest_point_simplex(verts, point);
  Eigen::VectorXd bc = barycentric(verts, x);
  for (int i = 0; i <= coarse.dim; ++i)
    triplets.emplace_back(fine_vertex, coarse.cells(cell, i), bc(i));
  rows[fine_vertex] = {cell, kind};
}

}  // namespace

ProlongationOperator build_prolongation(const SimplicialMesh& fine,
                                        const SimplicialMesh& coarse) {
  ProlongationOperator op;
  op.rows.assign(fine.num_vertices(), {});
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> shared = shared_vertex_map(fine, coarse);

  Eigen::VectorXd h_coarse(coarse.num_cells());
  for (int c = 0; c < coarse.num_cells(); ++c)
    h_coarse(c) = longest_edge(coarse, c);

  // Seed the outer traversal at fine cells touching a shared vertex.
  std::vector<int> cell_hint(fine.num_cells(), -1);
  std::vector<char> queued(fine.num_cells(), 0);
  std::deque<int> queue;
  for (int v = 0; v < fine.num_vertices(); ++v) {
    if (shared[v] < 0) continue;
    int hint = coarse.vertex_cells[shared[v]].front();
    for (int c : fine.vertex_cells[v])
      if (!queued[c]) {
        queued[c] = 1;
        cell_hint[c] = hint;
        queue.push_back(c);
      }
  }
  if (queue.empty() && fine.num_cells() > 0)
    throw std::runtime_error("traversal could not cover mesh");

  std::vector<int> cell_loc(fine.num_cells(), -1);
  std::vector<char> vertex_done(fine.num_vertices(), 0);
  int covered = 0;
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    Eigen::MatrixXd verts = fine.cell_coords(c);
    double h_f = simplex_longest_edge(verts);
    Eigen::VectorXd bary = verts.colwise().mean().transpose();
    double radius = h_f + h_coarse(cell_hint[c]);
    LocateResult loc = locate_by_bfs(coarse, cell_hint[c], bary, radius);
    op.total_steps += loc.steps;
    ++op.queries;
    cell_loc[c] = loc.cell;
    ++covered;

    // Inner loop: the cell's own nodal points, seeded from its resolution.
    for (int i = 0; i <= fine.dim; ++i) {
      int v = fine.cells(c, i);
      if (vertex_done[v]) continue;
      vertex_done[v] = 1;
      if (shared[v] >= 0) {
        triplets.emplace_back(v, shared[v], 1.0);
        op.rows[v] = {coarse.vertex_cells[shared[v]].front(), LocationKind::kInside};
        continue;
      }
      Eigen::VectorXd p = fine.vertex(v);
      LocateResult vloc =
          locate_by_bfs(coarse, loc.cell, p, h_f + h_coarse(loc.cell));
      op.total_steps += vloc.steps;
      ++op.queries;
      emit_row(triplets, op.rows, coarse, v, vloc.cell, vloc.kind, p);
    }
    for (int n : fine.cell_neighbors[c])
      if (!queued[n]) {
        queued[n] = 1;
        cell_hint[n] = loc.cell;
        queue.push_back(n);
      }
  }
  if (covered < fine.num_cells())
    throw std::runtime_error("traversal could not cover mesh");

  op.matrix.resize(fine.num_vertices(), coarse.num_vertices());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

ProlongationOperator build_prolongation_bruteforce(const SimplicialMesh& fine,
                                                   const SimplicialMesh& coarse) {
  ProlongationOperator op;
  op.rows.assign(fine.num_vertices(), {});
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> shared = shared_vertex_map(fine, coarse);

  for (int v = 0; v < fine.num_vertices(); ++v) {
    if (shared[v] >= 0) {
      triplets.emplace_back(v, shared[v], 1.0);
      op.rows[v] = {coarse.vertex_cells[shared[v]].front(), LocationKind::kInside};
      continue;
    }
    Eigen::VectorXd p = fine.vertex(v);
    int inside = -1;
    for (int c = 0; c < coarse.num_cells() && inside < 0; ++c)
      if (contains_point(coarse, c, p)) inside = c;
    if (inside >= 0) {
      emit_row(triplets, op.rows, coarse, v, inside, LocationKind::kInside, p);
    } else {
      emit_row(triplets, op.rows, coarse, v, nearest_cell(coarse, p),
               LocationKind::kProjected, p);
    }
    ++op.queries;
  }
  op.matrix.resize(fine.num_vertices(), coarse.num_vertices());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

void write_operator(const ProlongationOperator& op, std::ostream& out) {
  out << op.matrix.rows() << ' ' << op.matrix.cols() << ' ' << op.matrix.nonZeros()
      << '\n';
  out.precision(17);
  for (int k = 0; k < op.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.matrix, k);
         it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace gmg

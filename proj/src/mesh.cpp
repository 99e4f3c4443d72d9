#include "gmg/mesh.hpp"

#include "gmg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gmg {

Eigen::MatrixXd SimplicialMesh::cell_coords(int c) const {
  Eigen::MatrixXd out(dim + 1, dim);
  for (int i = 0; i <= dim; ++i) out.row(i) = vertices.row(cells(c, i));
  return out;
}

void SimplicialMesh::finalize() {
  const int nv = num_vertices();
  const int nc = num_cells();
  if (dim != 2 && dim != 3) throw std::runtime_error("mesh dimension must be 2 or 3");
  if (vertices.cols() != dim) throw std::runtime_error("coordinate dimension mismatch");
  if (cells.cols() != dim + 1) throw std::runtime_error("cell arity mismatch");
  if (boundary_markers.size() != nv) boundary_markers = Eigen::VectorXi::Zero(nv);

  vertex_cells.assign(nv, {});
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i <= dim; ++i) {
      int v = cells(c, i);
      if (v < 0 || v >= nv) throw std::runtime_error("cell vertex index out of range");
      vertex_cells[v].push_back(c);
    }
    if (cell_measure(*this, c) <= 0.0)
      throw std::runtime_error("cell " + std::to_string(c) + " is not positively oriented");
  }

  std::set<std::pair<int, int>> edge_set;
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j) {
        int a = cells(c, i), b = cells(c, j);
        edge_set.insert({std::min(a, b), std::max(a, b)});
      }
  edges.assign(edge_set.begin(), edge_set.end());

  cell_neighbors.assign(nc, {});
  std::vector<int> mark(nc, -1);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i <= dim; ++i)
      for (int other : vertex_cells[cells(c, i)])
        if (other != c && mark[other] != c) {
          mark[other] = c;
          cell_neighbors[c].push_back(other);
        }
    std::sort(cell_neighbors[c].begin(), cell_neighbors[c].end());
  }
}

std::vector<BoundaryFacet> SimplicialMesh::boundary_facets() const {
  std::map<std::array<int, 3>, std::pair<int, int>> count;  // sorted facet -> (count, cell)
  for (int c = 0; c < num_cells(); ++c) {
    for (int skip = 0; skip <= dim; ++skip) {
      std::array<int, 3> f = {-1, -1, -1};
      int k = 0;
      for (int i = 0; i <= dim; ++i)
        if (i != skip) f[k++] = cells(c, i);
      std::sort(f.begin(), f.begin() + dim);
      auto it = count.find(f);
      if (it == count.end())
        count[f] = {1, c};
      else
        it->second.first++;
    }
  }
  std::vector<BoundaryFacet> out;
  for (const auto& [f, cc] : count)
    if (cc.first == 1) out.push_back({f, cc.second});
  return out;
}

double cell_measure(const SimplicialMesh& mesh, int cell) {
  if (mesh.dim == 2) {
    return 0.5 * orient2d(mesh.vertices.row(mesh.cells(cell, 0)),
                          mesh.vertices.row(mesh.cells(cell, 1)),
                          mesh.vertices.row(mesh.cells(cell, 2)));
  }
  return orient3d(mesh.vertices.row(mesh.cells(cell, 0)),
                  mesh.vertices.row(mesh.cells(cell, 1)),
                  mesh.vertices.row(mesh.cells(cell, 2)),
                  mesh.vertices.row(mesh.cells(cell, 3))) / 6.0;
}

double longest_edge(const SimplicialMesh& mesh, int cell) {
  double h = 0.0;
  for (int i = 0; i <= mesh.dim; ++i)
    for (int j = i + 1; j <= mesh.dim; ++j)
      h = std::max(h, (mesh.vertices.row(mesh.cells(cell, i)) -
                       mesh.vertices.row(mesh.cells(cell, j))).norm());
  return h;
}

double inradius(const SimplicialMesh& mesh, int cell) {
  double measure = cell_measure(mesh, cell);
  if (mesh.dim == 2) {
    double per = 0.0;
    for (int i = 0; i < 3; ++i)
      per += (mesh.vertices.row(mesh.cells(cell, i)) -
              mesh.vertices.row(mesh.cells(cell, (i + 1) % 3))).norm();
    return 2.0 * measure / per;
  }
  static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  double area = 0.0;
  for (const auto& f : faces) {
    Vector3d u = (mesh.vertices.row(mesh.cells(cell, f[1])) -
                  mesh.vertices.row(mesh.cells(cell, f[0]))).transpose();
    Vector3d v = (mesh.vertices.row(mesh.cells(cell, f[2])) -
                  mesh.vertices.row(mesh.cells(cell, f[0]))).transpose();
    area += 0.5 * u.cross(v).norm();
  }
  return 3.0 * measure / area;
}

double aspect_ratio(const SimplicialMesh& mesh, int cell) {
  double h = longest_edge(mesh, cell);
  double measure = cell_measure(mesh, cell);
  double scale = std::pow(h, mesh.dim);
  if (!(measure > 1e-14 * scale)) throw std::runtime_error("degenerate cell");
  if (mesh.dim == 2) return h / (2.0 * inradius(mesh, cell));
  return h / inradius(mesh, cell);
}

QualityReport quality_report(const SimplicialMesh& mesh) {
  QualityReport r;
  r.cell_count = mesh.num_cells();
  r.vertex_count = mesh.num_vertices();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double ar = aspect_ratio(mesh, c);
    if (ar > r.max_aspect_ratio) {
      r.max_aspect_ratio = ar;
      r.worst_cell = c;
    }
  }
  return r;
}

Eigen::VectorXd spacing_function(const SimplicialMesh& mesh) {
  const int nv = mesh.num_vertices();
  Eigen::VectorXd sp = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::infinity());
  for (const auto& [a, b] : mesh.edges) {
    double len = (mesh.vertices.row(a) - mesh.vertices.row(b)).norm();
    sp(a) = std::min(sp(a), len);
    sp(b) = std::min(sp(b), len);
  }
  for (int v = 0; v < nv; ++v)
    if (!std::isfinite(sp(v)))
      throw std::runtime_error("isolated vertex " + std::to_string(v));
  return sp;
}

namespace {

void detect_features_2d(SimplicialMesh& mesh, double threshold) {
  const int nv = mesh.num_vertices();
  mesh.boundary_markers = Eigen::VectorXi::Zero(nv);
  // Two boundary neighbors per boundary vertex on a manifold boundary.
  std::vector<std::vector<int>> bnbr(nv);
  for (const auto& f : mesh.boundary_facets()) {
    bnbr[f.verts[0]].push_back(f.verts[1]);
    bnbr[f.verts[1]].push_back(f.verts[0]);
    mesh.boundary_markers(f.verts[0]) = kBoundary;
    mesh.boundary_markers(f.verts[1]) = kBoundary;
  }
  for (int v = 0; v < nv; ++v) {
    if (bnbr[v].empty()) continue;
    if (bnbr[v].size() != 2) throw std::runtime_error("non-manifold boundary");
    Eigen::Vector2d u1 = (mesh.vertices.row(v) - mesh.vertices.row(bnbr[v][0])).transpose();
    Eigen::Vector2d u2 = (mesh.vertices.row(bnbr[v][1]) - mesh.vertices.row(v)).transpose();
    double dev = std::atan2(std::abs(u1.x() * u2.y() - u1.y() * u2.x()), u1.dot(u2));
    if (dev > threshold) mesh.boundary_markers(v) = kCorner;
  }
}

void detect_features_3d(SimplicialMesh& mesh, double threshold) {
  const int nv = mesh.num_vertices();
  mesh.boundary_markers = Eigen::VectorXi::Zero(nv);
  mesh.ridge_edges.clear();
  auto facets = mesh.boundary_facets();

  // Orient each boundary facet outward and collect edge -> facet incidence.
  std::vector<Vector3d> normals(facets.size());
  std::map<std::pair<int, int>, std::vector<int>> edge_facets;
  for (size_t fi = 0; fi < facets.size(); ++fi) {
    const auto& f = facets[fi];
    for (int v : f.verts) mesh.boundary_markers(v) = kBoundary;
    Vector3d a = mesh.vertices.row(f.verts[0]).transpose();
    Vector3d b = mesh.vertices.row(f.verts[1]).transpose();
    Vector3d c = mesh.vertices.row(f.verts[2]).transpose();
    Vector3d n = (b - a).cross(c - a).normalized();
    // Point away from the opposite vertex of the incident cell.
    int opp = -1;
    for (int i = 0; i < 4; ++i) {
      int v = mesh.cells(f.cell, i);
      if (v != f.verts[0] && v != f.verts[1] && v != f.verts[2]) opp = v;
    }
    Vector3d inward = mesh.vertices.row(opp).transpose() - (a + b + c) / 3.0;
    if (n.dot(inward) > 0) n = -n;
    normals[fi] = n;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        int p = std::min(f.verts[i], f.verts[j]);
        int q = std::max(f.verts[i], f.verts[j]);
        edge_facets[{p, q}].push_back(static_cast<int>(fi));
      }
  }

  // Ridge edges from the dihedral deviation between the two incident facets.
  for (const auto& [e, fs] : edge_facets) {
    if (fs.size() != 2) throw std::runtime_error("non-manifold boundary");
    double dev = std::acos(std::clamp(normals[fs[0]].dot(normals[fs[1]]), -1.0, 1.0));
    if (dev > threshold) mesh.ridge_edges.insert(e);
  }
  std::vector<std::vector<int>> ridge_nbr(nv);
  for (const auto& [a, b] : mesh.ridge_edges) {
    ridge_nbr[a].push_back(b);
    ridge_nbr[b].push_back(a);
    mesh.boundary_markers(a) = std::max(mesh.boundary_markers(a), int(kRidge));
    mesh.boundary_markers(b) = std::max(mesh.boundary_markers(b), int(kRidge));
  }

  // Corners from the angle defect 2*pi - sum of tangent facet angles.
  Eigen::VectorXd angle_sum = Eigen::VectorXd::Zero(nv);
  for (const auto& f : facets) {
    for (int i = 0; i < 3; ++i) {
      int v = f.verts[i];
      Vector3d u1 = (mesh.vertices.row(f.verts[(i + 1) % 3]) - mesh.vertices.row(v)).transpose();
      Vector3d u2 = (mesh.vertices.row(f.verts[(i + 2) % 3]) - mesh.vertices.row(v)).transpose();
      angle_sum(v) += std::atan2(u1.cross(u2).norm(), u1.dot(u2));
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (mesh.boundary_markers(v) == kInterior) continue;
    if (std::abs(2.0 * M_PI - angle_sum(v)) > threshold) mesh.boundary_markers(v) = kCorner;
  }
  // Ridge endpoints where the ridge terminates, branches, or turns sharply.
  for (int v = 0; v < nv; ++v) {
    const auto& rn = ridge_nbr[v];
    if (rn.empty()) continue;
    if (rn.size() != 2) {
      mesh.boundary_markers(v) = kCorner;
      continue;
    }
    Vector3d u1 = (mesh.vertices.row(v) - mesh.vertices.row(rn[0])).transpose();
    Vector3d u2 = (mesh.vertices.row(rn[1]) - mesh.vertices.row(v)).transpose();
    double dev = std::atan2(u1.cross(u2).norm(), u1.dot(u2));
    if (dev > threshold) mesh.boundary_markers(v) = kCorner;
  }
}

}  // namespace

void detect_features(SimplicialMesh& mesh, double curvature_threshold) {
  if (mesh.dim == 2)
    detect_features_2d(mesh, curvature_threshold);
  else
    detect_features_3d(mesh, curvature_threshold);
}

SimplicialMesh read_mesh(std::istream& in) {
  auto next_token = [&in]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error("unexpected end of mesh stream");
  };
  auto next_int = [&]() { return std::stoi(next_token()); };
  auto next_double = [&]() { return std::stod(next_token()); };

  SimplicialMesh m;
  m.dim = next_int();
  int nv = next_int(), nc = next_int();
  m.vertices.resize(nv, m.dim);
  for (int v = 0; v < nv; ++v)
    for (int d = 0; d < m.dim; ++d) m.vertices(v, d) = next_double();
  m.cells.resize(nc, m.dim + 1);
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i <= m.dim; ++i) m.cells(c, i) = next_int();
  m.boundary_markers.resize(nv);
  for (int v = 0; v < nv; ++v) m.boundary_markers(v) = next_int();
  m.finalize();
  return m;
}

SimplicialMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(in);
}

void write_mesh(const SimplicialMesh& mesh, std::ostream& out) {
  out << mesh.dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  out << std::setprecision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int d = 0; d < mesh.dim; ++d) out << (d ? " " : "") << mesh.vertices(v, d);
    out << '\n';
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i <= mesh.dim; ++i) out << (i ? " " : "") << mesh.cells(c, i);
    out << '\n';
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) out << mesh.boundary_markers(v) << '\n';
}

void write_mesh_file(const SimplicialMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_mesh(mesh, out);
}

}  // namespace gmg

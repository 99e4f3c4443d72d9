#include "gmg/coarsen.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gmg {

CoarseningState::CoarseningState(const Eigen::MatrixXd& coords,
                                 const std::vector<std::pair<int, int>>& edges,
                                 Eigen::VectorXd spacing, double beta)
    : coords_(coords), spacing_(std::move(spacing)), beta_(beta) {
  if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
  const int nv = static_cast<int>(coords.rows());
  graph_.assign(nv, {});
  status_.assign(nv, VertexStatus::kUnknown);
  for (const auto& [a, b] : edges) {
    graph_[a].insert(b);
    graph_[b].insert(a);
  }
  stats_.initial_edges = static_cast<long>(edges.size());
}

bool CoarseningState::spacing_violated(int a, int b) const {
  double dist = (coords_.row(a) - coords_.row(b)).norm();
  return beta_ * (spacing_(a) + spacing_(b)) >= dist;
}

void CoarseningState::visit(int v) {
  if (status_[v] == VertexStatus::kExcluded)
    throw std::logic_error("visit on excluded vertex");
  status_[v] = VertexStatus::kIncluded;

  std::vector<int> pending(graph_[v].begin(), graph_[v].end());
  while (!pending.empty()) {
    int u = pending.back();
    pending.pop_back();
    if (!graph_[v].count(u)) continue;  // already contracted away
    if (status_[u] == VertexStatus::kExcluded) continue;
    ++stats_.distance_tests;
    if (!spacing_violated(v, u)) continue;
    if (status_[u] != VertexStatus::kUnknown) continue;  // included stays, edge stays
    // Contract u onto v: u leaves the graph, its neighbors attach to v.
    status_[u] = VertexStatus::kExcluded;
    for (int w : graph_[u]) {
      graph_[w].erase(u);
      // Edges are not inherited onto included vertices: their status is
      // final, so such an edge can never trigger a contraction, and it
      // would let a violating included pair survive in the graph.
      if (w == v || status_[w] == VertexStatus::kIncluded) continue;
      if (graph_[v].insert(w).second) {
        graph_[w].insert(v);
        ++stats_.edges_created;
        pending.push_back(w);
      }
    }
    graph_[u].clear();
  }
}

void CoarseningState::run_stage(const std::vector<int>& forced,
                                const std::vector<int>& candidates) {
  // Pin forced vertices first so no earlier visit can exclude them.
  for (int v : forced) status_[v] = VertexStatus::kIncluded;
  for (int v : forced) visit(v);
  for (int v : candidates) {
    if (status_[v] == VertexStatus::kExcluded) continue;
    visit(v);
  }
}

void CoarseningState::reset_to_unknown(const std::vector<int>& verts) {
  for (int v : verts)
    if (status_[v] == VertexStatus::kIncluded) status_[v] = VertexStatus::kUnknown;
}

std::vector<int> CoarseningState::included() const {
  std::vector<int> out;
  for (size_t v = 0; v < status_.size(); ++v)
    if (status_[v] == VertexStatus::kIncluded) out.push_back(static_cast<int>(v));
  return out;
}

namespace {

void warn_beta(double beta, int dim) {
  double beta0 = dim == 2 ? std::sqrt(2.0) : std::sqrt(3.0);
  if (beta <= beta0)
    std::fprintf(stderr,
                 "warning: beta = %g does not exceed beta_0 = %g for dim %d; "
                 "coarsening may be slow to decrease\n",
                 beta, beta0, dim);
}

}  // namespace

std::vector<int> select_coarse_vertices(const SimplicialMesh& mesh, double beta,
                                        const std::vector<int>& forced,
                                        CoarsenStats* stats) {
  warn_beta(beta, mesh.dim);
  CoarseningState state(mesh.vertices, mesh.edges,
                        kCoarseSpacingScale * spacing_function(mesh), beta);
  std::vector<char> is_forced(mesh.num_vertices(), 0);
  for (int v : forced) is_forced[v] = 1;
  std::vector<int> candidates;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!is_forced[v]) candidates.push_back(v);
  state.run_stage(forced, candidates);
  if (stats) *stats = state.stats();
  return state.included();
}

std::vector<int> staged_coarsen(const SimplicialMesh& mesh, double beta,
                                CoarsenStats* stats) {
  warn_beta(beta, mesh.dim);
  CoarseningState state(mesh.vertices, mesh.edges,
                        kCoarseSpacingScale * spacing_function(mesh), beta);
  const int nv = mesh.num_vertices();
  auto with_marker = [&](int lo) {
    std::vector<int> out;
    for (int v = 0; v < nv; ++v)
      if (mesh.boundary_markers(v) == lo) out.push_back(v);
    return out;
  };
  auto marker_at_least = [&](int lo) {
    std::vector<int> out;
    for (int v = 0; v < nv; ++v)
      if (mesh.boundary_markers(v) >= lo) out.push_back(v);
    return out;
  };

  // Interior stage: every boundary vertex is forced.
  state.run_stage(marker_at_least(kBoundary), with_marker(kInterior));
  // Boundary stage: ridges and corners forced, plain boundary reselected.
  auto plain = with_marker(kBoundary);
  state.reset_to_unknown(plain);
  state.run_stage(marker_at_least(kRidge), plain);
  if (mesh.dim == 3) {
    auto ridge = with_marker(kRidge);
    state.reset_to_unknown(ridge);
    state.run_stage(with_marker(kCorner), ridge);
  }
  if (stats) *stats = state.stats();
  return state.included();
}

}  // namespace gmg

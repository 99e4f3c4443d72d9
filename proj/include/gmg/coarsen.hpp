#pragma once

#include "gmg/mesh.hpp"

#include <vector>

namespace gmg {

enum class VertexStatus : char { kUnknown, kIncluded, kExcluded };

// Fraction of the local spacing fed into the coarsening condition. Half the
// shortest incident edge is the natural per-vertex radius (the condition sums
// the two endpoint radii); slightly under one half slows the per-level vertex
// decrease toward the 2:1 structured pattern on graded meshes.
inline constexpr double kCoarseSpacingScale = 0.49;

struct CoarsenStats {
  long distance_tests = 0;   // spacing-condition evaluations
  long edges_created = 0;    // contraction edges added on top of the initial set
  long initial_edges = 0;
};

// Mutable coarsening graph over the vertices of a mesh. The graph starts as
// the mesh edges and is progressively contracted; excluded vertices end up
// with no incident edges. Supports staged runs where previously forced
// vertices are reopened for a later stage.
class CoarseningState {
 public:
  CoarseningState(const Eigen::MatrixXd& coords,
                  const std::vector<std::pair<int, int>>& edges,
                  Eigen::VectorXd spacing, double beta);

  // True when beta * (Sp(a) + Sp(b)) >= dist(a, b).
  bool spacing_violated(int a, int b) const;

  // Marks v included and contracts every violating unknown neighbor onto it.
  void visit(int v);

  // Forced vertices are included and visited first, then candidates in the
  // given order; candidates already excluded are skipped.
  void run_stage(const std::vector<int>& forced, const std::vector<int>& candidates);

  // Reopens included vertices for a later stage.
  void reset_to_unknown(const std::vector<int>& verts);

  VertexStatus status(int v) const { return status_[v]; }
  std::vector<int> included() const;
  const std::set<int>& neighbors(int v) const { return graph_[v]; }
  const CoarsenStats& stats() const { return stats_; }
  double beta() const { return beta_; }

 private:
  const Eigen::MatrixXd& coords_;
  Eigen::VectorXd spacing_;
  double beta_;
  std::vector<std::set<int>> graph_;
  std::vector<VertexStatus> status_;
  CoarsenStats stats_;
};

// One full coarsening pass over the mesh graph; forced vertices are included
// automatically and visited first, the rest in ascending index order.
// Sp enters the condition as a feature-size radius (half the shortest
// incident edge), so beta slightly above beta_0 reproduces structured 2:1
// coarsening.
std::vector<int> select_coarse_vertices(const SimplicialMesh& mesh, double beta,
                                        const std::vector<int>& forced,
                                        CoarsenStats* stats = nullptr);

// Interior / boundary (/ ridge in 3D) staged selection; corner vertices are
// always retained. Requires boundary_markers from detect_features.
std::vector<int> staged_coarsen(const SimplicialMesh& mesh, double beta,
                                CoarsenStats* stats = nullptr);

}  // namespace gmg

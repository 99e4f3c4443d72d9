#pragma once

#include "gmg/mesh.hpp"

#include <array>
#include <optional>
#include <set>
#include <vector>

namespace gmg {

struct RemeshConfig {
  double c_ar = 60.0;     // aspect-ratio cap for 3D contractions
  double c_ar_2d = 20.0;  // safety cap for 2D fallback contractions
};

struct RemeshStats {
  int removed = 0;
  int retained = 0;       // left in place after exhausting retries
  long candidate_evals = 0;
  long ear_tests = 0;
};

// What a single removal did; consumed by the Delaunay / quality oracles.
struct RemovalRecord {
  std::vector<int> link;                    // link vertices before removal
  std::vector<std::array<int, 4>> new_cells;  // [3] == -1 in 2D
};

// In-place vertex removal over a working copy of a mesh. Vertex indices and
// coordinates stay those of the source mesh until extract() compacts them.
class MeshEditor {
 public:
  explicit MeshEditor(const SimplicialMesh& mesh, RemeshConfig cfg = {});

  // Dispatches on dimension and boundary marker; false when the vertex had to
  // be retained.
  bool remove_vertex(int v, RemovalRecord* record = nullptr);

  // Delaunay-preserving star retriangulation of an interior 2D vertex.
  bool remove_interior_2d(int v, RemovalRecord* record = nullptr);

  // Quality-conserving edge contraction (3D, and 2D boundary/fallback).
  bool contract_vertex(int v, RemovalRecord* record = nullptr);

  bool vertex_alive(int v) const { return vertex_alive_[v]; }
  std::vector<int> vertex_link(int v) const;
  const RemeshStats& stats() const { return stats_; }

  // Compacted mesh of the surviving vertices; coordinates are preserved
  // bitwise. old_of_new maps new vertex indices to source indices.
  SimplicialMesh extract(bool legalize_2d, std::vector<int>* old_of_new = nullptr) const;

 private:
  int dim_;
  RemeshConfig cfg_;
  Eigen::MatrixXd coords_;
  Eigen::VectorXi markers_;
  std::set<std::pair<int, int>> ridge_edges_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<char> cell_alive_;
  std::vector<std::set<int>> v2c_;
  std::vector<char> vertex_alive_;
  RemeshStats stats_;

  bool edge_on_boundary(int a, int b) const;
  bool edge_on_ridge(int a, int b) const;
  std::vector<int> contraction_candidates(int v) const;
  friend struct MeshEditorTestAccess;
};

// Removes all vertices outside keep (corners are always kept), with a retry
// queue for vertices whose link changes. Surviving coordinates are bitwise
// those of the input mesh.
SimplicialMesh remesh(const SimplicialMesh& mesh, const std::vector<int>& keep,
                      const RemeshConfig& cfg = {}, RemeshStats* stats = nullptr,
                      std::vector<int>* old_of_new = nullptr);

// Single-vertex convenience wrappers.
SimplicialMesh remove_vertex_2d(const SimplicialMesh& mesh, int v);
std::optional<SimplicialMesh> remove_vertex_contract(const SimplicialMesh& mesh, int v,
                                                     const RemeshConfig& cfg = {});

}  // namespace gmg

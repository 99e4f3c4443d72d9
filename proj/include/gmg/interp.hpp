#pragma once

#include "gmg/mesh.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

namespace gmg {

enum class LocationKind : char { kInside, kProjected };

struct RowLocation {
  int cell = -1;
  LocationKind kind = LocationKind::kInside;
};

struct LocateResult {
  int cell = -1;
  LocationKind kind = LocationKind::kInside;
  int steps = 0;  // cells popped from the BFS frontier
};

// Coarse-to-fine nodal P1 interpolation. Row i holds the coarse barycentric
// weights of fine vertex i in its resolved coarse cell.
struct ProlongationOperator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  std::vector<RowLocation> rows;

  // Instrumentation from the build traversal.
  long total_steps = 0;
  long queries = 0;

  Eigen::VectorXd prolongate(const Eigen::VectorXd& coarse_vec) const;
  Eigen::VectorXd restrict_vec(const Eigen::VectorXd& fine_vec) const;
};

// Breadth-first walk over cell neighbor adjacency from start_cell. Returns
// the first visited cell containing the point; past the search radius it
// switches to nearest-cell mode over an exhaustive flood, with ties broken
// toward the lowest cell index.
LocateResult locate_by_bfs(const SimplicialMesh& coarse, int start_cell,
                           const Eigen::VectorXd& point, double search_radius);

// Tandem traversal: outer loop resolves fine-cell barycenters (seeded from
// shared vertices, hints propagated to neighbors), inner loop resolves each
// fine vertex from its cell's resolution.
ProlongationOperator build_prolongation(const SimplicialMesh& fine,
                                        const SimplicialMesh& coarse);

// Brute-force global-location reference; test oracle for build_prolongation.
ProlongationOperator build_prolongation_bruteforce(const SimplicialMesh& fine,
                                                   const SimplicialMesh& coarse);

// Text dump: header `rows cols nnz`, then `row col value` triplets.
void write_operator(const ProlongationOperator& op, std::ostream& out);

}  // namespace gmg

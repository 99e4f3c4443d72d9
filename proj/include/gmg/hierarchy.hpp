#pragma once

#include "gmg/mesh.hpp"
#include "gmg/remesh.hpp"

#include <iosfwd>
#include <vector>

namespace gmg {

struct LevelMetrics {
  int cells = 0;
  int vertices = 0;
  double max_ar = 0.0;
  int max_overlap = 1;              // sup over coarse cells of |S_tau|
  double max_lengthscale_ratio = 1.0;
  int location_failures = 0;        // samples excluded from the ratio max
};

// Coarse-to-fine nested mesh hierarchy; level 0 is the finest. metrics[k]
// compares level k against level k-1 (metrics[0] describes level 0 alone).
struct MeshHierarchy {
  std::vector<SimplicialMesh> levels;
  std::vector<LevelMetrics> metrics;

  int num_levels() const { return static_cast<int>(levels.size()); }
};

struct HierarchyConfig {
  double beta = 1.5;
  RemeshConfig remesh;
  int min_vertices = 200;
  int max_levels = 32;
  double c_m = 2.0;          // sufficient-decrease factor between levels
  bool compute_metrics = true;
};

// Repeated staged coarsening + remeshing. Stops at the vertex floor, the
// level cap, or when a new level fails sufficient decrease (that level is
// dropped). Throws when level 0 cannot be coarsened at all.
MeshHierarchy build_hierarchy(const SimplicialMesh& mesh, const HierarchyConfig& config);

// (max_overlap, max_lengthscale_ratio) of a fine/coarse pair; failures counts
// sample points that could not be located even with projection.
void overlap_metrics(const SimplicialMesh& fine, const SimplicialMesh& coarse,
                     int* max_overlap, double* max_ratio, int* failures = nullptr);

// Brute-force all-pairs reference for the overlap count; test oracle.
int max_overlap_bruteforce(const SimplicialMesh& fine, const SimplicialMesh& coarse);

void write_quality_table(const MeshHierarchy& h, std::ostream& out);
void write_quality_csv(const MeshHierarchy& h, std::ostream& out);

}  // namespace gmg

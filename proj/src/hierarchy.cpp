#include "gmg/hierarchy.hpp"

#include "gmg/coarsen.hpp"
#include "gmg/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gmg {

namespace {

// Uniform bin grid over cell bounding boxes; prefilter for pairwise simplex
// tests and point location.
class CellGrid {
 public:
  explicit CellGrid(const SimplicialMesh& mesh) : dim_(mesh.dim) {
    const int nc = mesh.num_cells();
    lo_ = mesh.vertices.colwise().minCoeff().transpose();
    Eigen::VectorXd hi = mesh.vertices.colwise().maxCoeff().transpose();
    int per_dim = std::max(1, static_cast<int>(std::floor(
                                   std::pow(static_cast<double>(nc), 1.0 / dim_))));
    per_dim = std::min(per_dim, 256);
    n_.fill(1);
    width_.fill(1.0);
    for (int d = 0; d < dim_; ++d) {
      n_[d] = per_dim;
      double span = std::max(hi(d) - lo_(d), 1e-300);
      width_[d] = span / per_dim * (1.0 + 1e-12);
    }
    bins_.resize(static_cast<size_t>(n_[0]) * n_[1] * n_[2]);
    cell_lo_.resize(nc, dim_);
    cell_hi_.resize(nc, dim_);
    for (int c = 0; c < nc; ++c) {
      Eigen::MatrixXd verts = mesh.cell_coords(c);
      cell_lo_.row(c) = verts.colwise().minCoeff();
      cell_hi_.row(c) = verts.colwise().maxCoeff();
      for_bins(cell_lo_.row(c), cell_hi_.row(c),
               [&](size_t b) { bins_[b].push_back(c); });
    }
  }

  // Cells whose bbox bins intersect the query box, deduplicated via a stamp.
  std::vector<int> box_candidates(const Eigen::RowVectorXd& qlo,
                                  const Eigen::RowVectorXd& qhi) const {
    std::vector<int> out;
    if (stamp_.size() != static_cast<size_t>(cell_lo_.rows())) {
      stamp_.assign(cell_lo_.rows(), 0);
      epoch_ = 0;
    }
    ++epoch_;
    for_bins(qlo, qhi, [&](size_t b) {
      for (int c : bins_[b])
        if (stamp_[c] != epoch_) {
          stamp_[c] = epoch_;
          out.push_back(c);
        }
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> point_candidates(const Eigen::VectorXd& p, int ring) const {
    Eigen::RowVectorXd lo(dim_), hi(dim_);
    for (int d = 0; d < dim_; ++d) {
      lo(d) = p(d) - ring * width_[d];
      hi(d) = p(d) + ring * width_[d];
    }
    return box_candidates(lo, hi);
  }

  double bbox_dist2(int c, const Eigen::VectorXd& p) const {
    double d2 = 0.0;
    for (int d = 0; d < dim_; ++d) {
      double lo = cell_lo_(c, d), hi = cell_hi_(c, d);
      double e = p(d) < lo ? lo - p(d) : (p(d) > hi ? p(d) - hi : 0.0);
      d2 += e * e;
    }
    return d2;
  }

 private:
  template <class F>
  void for_bins(const Eigen::RowVectorXd& lo, const Eigen::RowVectorXd& hi,
                F&& f) const {
    std::array<int, 3> b0{0, 0, 0}, b1{0, 0, 0};
    for (int d = 0; d < dim_; ++d) {
      b0[d] = std::clamp(static_cast<int>((lo(d) - lo_(d)) / width_[d]), 0, n_[d] - 1);
      b1[d] = std::clamp(static_cast<int>((hi(d) - lo_(d)) / width_[d]), 0, n_[d] - 1);
    }
    for (int i = b0[0]; i <= b1[0]; ++i)
      for (int j = b0[1]; j <= b1[1]; ++j)
        for (int k = b0[2]; k <= b1[2]; ++k)
          f((static_cast<size_t>(i) * n_[1] + j) * n_[2] + k);
  }

  int dim_;
  Eigen::VectorXd lo_;
  std::array<int, 3> n_;
  std::array<double, 3> width_;
  std::vector<std::vector<int>> bins_;
  Eigen::MatrixXd cell_lo_, cell_hi_;
  mutable std::vector<long> stamp_;
  mutable long epoch_ = 0;
};

// Containing cell (barycentric >= -1e-12), else nearest cell by closest
// point, else -1. Deterministic: lowest index among ties.
int locate_point(const SimplicialMesh& mesh, const CellGrid& grid,
                 const Eigen::VectorXd& p) {
  for (int ring : {0, 1}) {
    for (int c : grid.point_candidates(p, ring)) {
      Eigen::VectorXd bc = barycentric(mesh.cell_coords(c), p);
      if (bc.minCoeff() >= -1e-12) return c;
    }
  }
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (grid.bbox_dist2(c, p) >= best_d2) continue;
    Eigen::VectorXd q = closest_point_simplex(mesh.cell_coords(c), p);
    double d2 = (q - p).squaredNorm();
    if (d2 < best_d2 - 1e-30) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

}  // namespace

void overlap_metrics(const SimplicialMesh& fine, const SimplicialMesh& coarse,
                     int* max_overlap, double* max_ratio, int* failures) {
  CellGrid fine_grid(fine);
  CellGrid coarse_grid(coarse);

  int overlap = 1;
  for (int tc = 0; tc < coarse.num_cells(); ++tc) {
    Eigen::MatrixXd tv = coarse.cell_coords(tc);
    Eigen::RowVectorXd lo = tv.colwise().minCoeff();
    Eigen::RowVectorXd hi = tv.colwise().maxCoeff();
    int count = 0;
    for (int fc : fine_grid.box_candidates(lo, hi))
      if (simplex_overlap(fine.cell_coords(fc), tv)) ++count;
    overlap = std::max(overlap, count);
  }

  Eigen::VectorXd h_fine(fine.num_cells()), h_coarse(coarse.num_cells());
  for (int c = 0; c < fine.num_cells(); ++c) h_fine(c) = longest_edge(fine, c);
  for (int c = 0; c < coarse.num_cells(); ++c) h_coarse(c) = longest_edge(coarse, c);

  double ratio = 0.0;
  int fail = 0;
  auto sample = [&](const Eigen::VectorXd& x, double hf) {
    int cc = locate_point(coarse, coarse_grid, x);
    if (cc < 0) {
      ++fail;
      return;
    }
    ratio = std::max(ratio, h_coarse(cc) / hf);
  };
  for (int c = 0; c < fine.num_cells(); ++c) {
    Eigen::MatrixXd verts = fine.cell_coords(c);
    Eigen::VectorXd bary = verts.colwise().mean().transpose();
    sample(bary, h_fine(c));
  }
  for (int v = 0; v < fine.num_vertices(); ++v) {
    if (fine.vertex_cells[v].empty()) continue;
    sample(fine.vertex(v), h_fine(fine.vertex_cells[v].front()));
  }

  if (max_overlap) *max_overlap = overlap;
  if (max_ratio) *max_ratio = ratio;
  if (failures) *failures = fail;
}

int max_overlap_bruteforce(const SimplicialMesh& fine, const SimplicialMesh& coarse) {
  int overlap = 1;
  for (int tc = 0; tc < coarse.num_cells(); ++tc) {
    Eigen::MatrixXd tv = coarse.cell_coords(tc);
    int count = 0;
    for (int fc = 0; fc < fine.num_cells(); ++fc)
      if (simplex_overlap(fine.cell_coords(fc), tv)) ++count;
    overlap = std::max(overlap, count);
  }
  return overlap;
}

MeshHierarchy build_hierarchy(const SimplicialMesh& mesh, const HierarchyConfig& config) {
  if (config.min_vertices < mesh.dim + 2)
    throw std::invalid_argument("min_vertices too small");
  MeshHierarchy h;
  h.levels.push_back(mesh);

  while (h.num_levels() < config.max_levels &&
         h.levels.back().num_vertices() > config.min_vertices) {
    const SimplicialMesh& fine = h.levels.back();
    std::vector<int> keep = staged_coarsen(fine, config.beta);
    if (static_cast<int>(keep.size()) >= fine.num_vertices()) {
      if (h.num_levels() == 1)
        throw std::runtime_error("mesh not coarsenable at this beta");
      break;
    }
    SimplicialMesh coarse = remesh(fine, keep, config.remesh);
    if (static_cast<double>(fine.num_cells()) <=
        config.c_m * static_cast<double>(coarse.num_cells())) {
      if (h.num_levels() == 1)
        throw std::runtime_error("mesh not coarsenable at this beta");
      break;  // insufficient decrease, drop the new level
    }
    h.levels.push_back(std::move(coarse));
  }

  h.metrics.resize(h.num_levels());
  for (int k = 0; k < h.num_levels(); ++k) {
    LevelMetrics& m = h.metrics[k];
    QualityReport q = quality_report(h.levels[k]);
    m.cells = q.cell_count;
    m.vertices = q.vertex_count;
    m.max_ar = q.max_aspect_ratio;
    if (k > 0 && config.compute_metrics)
      overlap_metrics(h.levels[k - 1], h.levels[k], &m.max_overlap,
                      &m.max_lengthscale_ratio, &m.location_failures);
  }
  return h;
}

void write_quality_table(const MeshHierarchy& h, std::ostream& out) {
  out << std::setw(5) << "level" << std::setw(10) << "cells" << std::setw(10)
      << "vertices" << std::setw(10) << "max_ar" << std::setw(12) << "max_overlap"
      << std::setw(11) << "max_ratio" << '\n';
  for (int k = 0; k < h.num_levels(); ++k) {
    const LevelMetrics& m = h.metrics[k];
    out << std::setw(5) << k << std::setw(10) << m.cells << std::setw(10)
        << m.vertices << std::setw(10) << std::fixed << std::setprecision(2)
        << m.max_ar << std::defaultfloat << std::setw(12)
        << (k > 0 ? std::to_string(m.max_overlap) : std::string("-")) << std::setw(11);
    if (k > 0)
      out << std::fixed << std::setprecision(2) << m.max_lengthscale_ratio
          << std::defaultfloat;
    else
      out << "-";
    out << '\n';
  }
}

void write_quality_csv(const MeshHierarchy& h, std::ostream& out) {
  out << "level,cells,vertices,max_ar,max_overlap,max_ratio\n";
  for (int k = 0; k < h.num_levels(); ++k) {
    const LevelMetrics& m = h.metrics[k];
    out << k << ',' << m.cells << ',' << m.vertices << ',' << m.max_ar << ','
        << m.max_overlap << ',' << m.max_lengthscale_ratio << '\n';
  }
}

}  // namespace gmg

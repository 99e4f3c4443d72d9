#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmg/delaunay.hpp"
#include "gmg/hierarchy.hpp"
#include "gmg/meshgen.hpp"

#include <cmath>
#include <sstream>

using namespace gmg;

namespace {

SimplicialMesh structured_grid(int n) {
  SimplicialMesh m;
  m.dim = 2;
  m.vertices.resize((n + 1) * (n + 1), 2);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.row(vid(i, j)) << static_cast<double>(i) / n, static_cast<double>(j) / n;
  m.cells.resize(2 * n * n, 3);
  int c = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.cells.row(c++) << v00, v10, v11;
      m.cells.row(c++) << v00, v11, v01;
    }
  m.finalize();
  detect_features(m);
  return m;
}

}  // namespace

TEST_CASE("overlap metrics of identical meshes") {
  SimplicialMesh m = structured_grid(5);
  int overlap = 0, failures = 0;
  double ratio = 0.0;
  overlap_metrics(m, m, &overlap, &ratio, &failures);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(failures == 0);
  // Interior cell of a uniform right-triangle grid touches 13 cells
  // (including itself); verified against the all-pairs reference.
  CHECK(overlap == 13);
  CHECK(overlap == max_overlap_bruteforce(m, m));
}

TEST_CASE("structured 2:1 pair has ratio exactly two") {
  SimplicialMesh fine = structured_grid(8);
  SimplicialMesh coarse = structured_grid(4);
  int overlap = 0;
  double ratio = 0.0;
  overlap_metrics(fine, coarse, &overlap, &ratio);
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(overlap == max_overlap_bruteforce(fine, coarse));
}

TEST_CASE("pacman hierarchy quality") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 8000);
  HierarchyConfig cfg;
  MeshHierarchy h = build_hierarchy(m, cfg);
  REQUIRE(h.num_levels() >= 4);
  for (int k = 0; k < h.num_levels(); ++k) {
    CHECK(h.metrics[k].max_ar <= 10.0);
    CHECK(h.metrics[k].cells == h.levels[k].num_cells());
    CHECK(h.metrics[k].vertices == h.levels[k].num_vertices());
    if (k > 0) {
      double decrease = static_cast<double>(h.metrics[k - 1].vertices) /
                        h.metrics[k].vertices;
      CHECK(decrease >= 2.4);
      CHECK(h.metrics[k].max_overlap <= 30);
      CHECK(h.metrics[k].max_lengthscale_ratio <= 12.0);
      CHECK(h.metrics[k].max_lengthscale_ratio > 1.0);
    }
  }
  // Quality plateau: deeper levels never blow past the first coarsening.
  double base = std::max(h.metrics[0].max_ar, h.metrics[1].max_ar);
  for (int k = 2; k < h.num_levels(); ++k)
    CHECK(h.metrics[k].max_ar <= 1.5 * base);
  // Metrics of small adjacent pairs match the brute-force reference.
  for (int k = 1; k < h.num_levels(); ++k) {
    if (h.levels[k - 1].num_cells() >= 500) continue;
    CHECK(h.metrics[k].max_overlap ==
          max_overlap_bruteforce(h.levels[k - 1], h.levels[k]));
  }
  // Node nesting across levels: every coarse vertex exists bitwise on the
  // next finer level.
  for (int k = 1; k < h.num_levels(); ++k) {
    const auto& fine = h.levels[k - 1];
    const auto& coarse = h.levels[k];
    std::set<std::pair<double, double>> fine_pts;
    for (int v = 0; v < fine.num_vertices(); ++v)
      fine_pts.insert({fine.vertices(v, 0), fine.vertices(v, 1)});
    for (int v = 0; v < coarse.num_vertices(); ++v)
      CHECK(fine_pts.count({coarse.vertices(v, 0), coarse.vertices(v, 1)}) == 1);
  }
}

TEST_CASE("already-minimal mesh yields a single level") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 500);
  HierarchyConfig cfg;
  cfg.min_vertices = 2 * m.num_vertices();
  MeshHierarchy h = build_hierarchy(m, cfg);
  CHECK(h.num_levels() == 1);
}

TEST_CASE("uncoarsenable mesh raises at level zero") {
  // Gear-shaped fan: every boundary vertex turns sharply (all corners, always
  // forced) and the hub is too far from the short-edged rim to violate the
  // spacing condition, so coarsening cannot shrink the mesh.
  const int n = 40;
  SimplicialMesh m;
  m.dim = 2;
  m.vertices.resize(n + 1, 2);
  for (int k = 0; k < n; ++k) {
    double r = (k % 2 == 0) ? 1.0 : 0.8;
    double th = 2.0 * M_PI * k / n;
    m.vertices.row(k) << r * std::cos(th), r * std::sin(th);
  }
  m.vertices.row(n) << 0.0, 0.0;
  m.cells.resize(n, 3);
  for (int k = 0; k < n; ++k) m.cells.row(k) << n, k, (k + 1) % n;
  m.finalize();
  detect_features(m);
  for (int k = 0; k < n; ++k) REQUIRE(m.boundary_markers(k) == kCorner);

  HierarchyConfig cfg;
  cfg.min_vertices = 10;
  CHECK_THROWS_WITH(build_hierarchy(m, cfg), doctest::Contains("not coarsenable"));
}

TEST_CASE("quality table and csv formats") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 900);
  HierarchyConfig cfg;
  cfg.min_vertices = 60;
  MeshHierarchy h = build_hierarchy(m, cfg);
  REQUIRE(h.num_levels() >= 2);

  std::ostringstream csv;
  write_quality_csv(h, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "level,cells,vertices,max_ar,max_overlap,max_ratio");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == h.num_levels());

  std::ostringstream table;
  write_quality_table(h, table);
  CHECK(table.str().find("max_overlap") != std::string::npos);
}

TEST_CASE("sufficient decrease stopping rule") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 2000);
  HierarchyConfig cfg;
  cfg.min_vertices = 20;  // floor low enough that the decrease rule can bind
  MeshHierarchy h = build_hierarchy(m, cfg);
  for (int k = 1; k < h.num_levels(); ++k)
    CHECK(h.metrics[k - 1].cells > 2 * h.metrics[k].cells);
}

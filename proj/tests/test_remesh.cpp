#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmg/coarsen.hpp"
#include "gmg/delaunay.hpp"
#include "gmg/geometry.hpp"
#include "gmg/meshgen.hpp"
#include "gmg/remesh.hpp"

#include <cmath>
#include <random>
#include <set>

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

SimplicialMesh star_mesh(const Eigen::MatrixXd& link, const Eigen::Vector2d& center) {
  const int n = static_cast<int>(link.rows());
  SimplicialMesh m;
  m.dim = 2;
  m.vertices.resize(n + 1, 2);
  m.vertices.topRows(n) = link;
  m.vertices.row(n) = center.transpose();
  m.cells.resize(n, 3);
  for (int k = 0; k < n; ++k) m.cells.row(k) << n, k, (k + 1) % n;
  m.finalize();
  detect_features(m);
  return m;
}

// No mesh point strictly inside any triangle's circumcircle.
bool empty_circumcircles(const SimplicialMesh& m) {
  for (int c = 0; c < m.num_cells(); ++c) {
    Vector2d a = m.vertices.row(m.cells(c, 0)).transpose();
    Vector2d b = m.vertices.row(m.cells(c, 1)).transpose();
    Vector2d cc = m.vertices.row(m.cells(c, 2)).transpose();
    for (int v = 0; v < m.num_vertices(); ++v) {
      if (v == m.cells(c, 0) || v == m.cells(c, 1) || v == m.cells(c, 2)) continue;
      if (in_circumcircle(a, b, cc, m.vertices.row(v).transpose(), 1e-9)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("degree-3 interior vertex becomes a single ear") {
  Eigen::MatrixXd link(3, 2);
  link << 0.0, 0.0, 4.0, 0.0, 1.0, 3.0;
  SimplicialMesh m = star_mesh(link, {1.4, 1.0});
  SimplicialMesh out = remove_vertex_2d(m, 3);
  REQUIRE(out.num_cells() == 1);
  CHECK(out.num_vertices() == 3);
  std::set<int> tri{out.cells(0, 0), out.cells(0, 1), out.cells(0, 2)};
  CHECK(tri == std::set<int>({0, 1, 2}));
}

TEST_CASE("hexagon center removal yields four Delaunay triangles") {
  Eigen::MatrixXd link(6, 2);
  for (int k = 0; k < 6; ++k) {
    double th = M_PI * k / 3.0;
    link.row(k) << std::cos(th), std::sin(th);
  }
  SimplicialMesh m = star_mesh(link, {0.0, 0.0});
  SimplicialMesh out = remove_vertex_2d(m, 6);
  CHECK(out.num_cells() == 4);
  CHECK(empty_circumcircles(out));
}

TEST_CASE("random Delaunay deletions stay Delaunay") {
  std::mt19937 rng(31);
  for (unsigned seed : {2u, 7u, 19u}) {
    SimplicialMesh m = jittered_grid_delaunay(12, seed);
    REQUIRE(is_delaunay(m));
    for (int round = 0; round < 12; ++round) {
      std::vector<int> interior;
      for (int v = 0; v < m.num_vertices(); ++v)
        if (m.boundary_markers(v) == kInterior) interior.push_back(v);
      int v = interior[rng() % interior.size()];
      m = remove_vertex_2d(m, v);
      CHECK(is_delaunay(m));
      CHECK(empty_circumcircles(m));
    }
  }
}

TEST_CASE("contraction picks the exhaustive argmin neighbor") {
  SimplicialMesh m = jittered_grid_delaunay(7, 13);
  int checked = 0;
  for (int v = 0; v < m.num_vertices() && checked < 10; ++v) {
    if (m.boundary_markers(v) != kInterior) continue;
    MeshEditor ed(m);
    std::vector<int> link = ed.vertex_link(v);
    // Exhaustive candidate evaluation over the link.
    double best = 1e300;
    for (int n : link) {
      double worst = 0.0;
      bool ok = true;
      for (int c : m.vertex_cells[v]) {
        bool has_n = false;
        for (int i = 0; i < 3; ++i) has_n |= m.cells(c, i) == n;
        if (has_n) continue;
        Eigen::MatrixXd verts = m.cell_coords(c);
        for (int i = 0; i < 3; ++i)
          if (m.cells(c, i) == v) verts.row(i) = m.vertices.row(n);
        double h = simplex_longest_edge(verts);
        if (simplex_measure(verts) <= 1e-12 * h * h) {
          ok = false;
          break;
        }
        double ar = simplex_aspect_ratio(verts);
        if (ar >= 20.0) ok = false;
        worst = std::max(worst, ar);
      }
      if (ok) best = std::min(best, worst);
    }
    RemovalRecord rec;
    bool done = ed.contract_vertex(v, &rec);
    REQUIRE(done == (best < 1e300));
    if (!done) continue;
    double got = 0.0;
    for (const auto& cell : rec.new_cells) {
      Eigen::MatrixXd verts(3, 2);
      for (int i = 0; i < 3; ++i) verts.row(i) = m.vertices.row(cell[i]);
      got = std::max(got, simplex_aspect_ratio(verts));
    }
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("contraction that always inverts is retained") {
  // Pinwheel star: three far tips and three tangentially skewed notches; no
  // link vertex lies in the kernel of the link polygon, so every contraction
  // inverts some cell.
  Eigen::MatrixXd link(6, 2);
  for (int k = 0; k < 3; ++k) {
    double tip = 2.0 * M_PI * k / 3.0;
    double notch = tip + 115.0 * M_PI / 180.0;
    link.row(2 * k) << 2.0 * std::cos(tip), 2.0 * std::sin(tip);
    link.row(2 * k + 1) << 0.15 * std::cos(notch), 0.15 * std::sin(notch);
  }
  SimplicialMesh m = star_mesh(link, {0.0, 0.0});
  CHECK_FALSE(remove_vertex_contract(m, 6).has_value());
  MeshEditor ed(m);
  CHECK_FALSE(ed.contract_vertex(6));
  CHECK(ed.vertex_alive(6));
}

TEST_CASE("keeping every vertex returns the identical mesh") {
  SimplicialMesh m = jittered_grid_delaunay(6, 17);
  std::vector<int> keep(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) keep[v] = v;
  SimplicialMesh out = remesh(m, keep);
  REQUIRE(out.num_vertices() == m.num_vertices());
  REQUIRE(out.num_cells() == m.num_cells());
  CHECK((out.vertices.array() == m.vertices.array()).all());
}

TEST_CASE("structured 2:1 coarsening quarters the cell count") {
  SimplicialMesh m = structured_grid(16);
  std::vector<int> keep;
  for (int j = 0; j <= 16; j += 2)
    for (int i = 0; i <= 16; i += 2) keep.push_back(j * 17 + i);
  RemeshStats stats;
  std::vector<int> old_of_new;
  SimplicialMesh out = remesh(m, keep, {}, &stats, &old_of_new);
  double ratio = static_cast<double>(m.num_cells()) / out.num_cells();
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
  // Node nesting: surviving coordinates bitwise equal to the fine mesh.
  for (int v = 0; v < out.num_vertices(); ++v)
    CHECK((out.vertices.row(v).array() == m.vertices.row(old_of_new[v]).array()).all());
  // Cost counters stay linear in the number of removals.
  long removals = stats.removed + stats.retained;
  CHECK(stats.ear_tests + stats.candidate_evals <= 400 * (removals + 1));
  // Boundary is still manifold.
  CHECK_NOTHROW(detect_features(out));
}

TEST_CASE("pacman coarsen and remesh keeps quality and nesting") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 3000);
  auto keep = staged_coarsen(m, 1.5);
  RemeshStats stats;
  std::vector<int> old_of_new;
  SimplicialMesh out = remesh(m, keep, {}, &stats, &old_of_new);
  CHECK(is_delaunay(out));
  CHECK(quality_report(out).max_aspect_ratio < 10.0);
  for (int v = 0; v < out.num_vertices(); ++v)
    CHECK((out.vertices.row(v).array() == m.vertices.row(old_of_new[v]).array()).all());
  CHECK_NOTHROW(detect_features(out));
  int removed_target = m.num_vertices() - static_cast<int>(keep.size());
  CHECK(stats.retained <= std::max(1, removed_target / 20));
}

TEST_CASE("fichera contraction respects ridges and quality") {
  GradingSpec g;
  g.mu = 2.0 / 3.0;
  SimplicialMesh m = generate_fichera(g, 2000);
  auto keep = staged_coarsen(m, 1.8);
  RemeshStats stats;
  std::vector<int> old_of_new;
  SimplicialMesh out = remesh(m, keep, {}, &stats, &old_of_new);
  // Quality-conserving contraction: every output cell positive and under the
  // cap (finalize() already rejects inverted cells).
  CHECK(quality_report(out).max_aspect_ratio < 60.0);
  // Node nesting.
  for (int v = 0; v < out.num_vertices(); ++v)
    CHECK((out.vertices.row(v).array() == m.vertices.row(old_of_new[v]).array()).all());
  // Retained-infeasible vertices stay a small fraction of the removal set.
  int removed_target = m.num_vertices() - static_cast<int>(keep.size());
  CHECK(stats.retained <= std::max(1, removed_target / 20));
  // Reentrant ridge chains stay connected: surviving vertices on the positive
  // z axis are joined consecutively by ridge edges.
  detect_features(out);
  std::vector<std::pair<double, int>> axis;
  for (int v = 0; v < out.num_vertices(); ++v)
    if (std::abs(out.vertices(v, 0)) < 1e-12 && std::abs(out.vertices(v, 1)) < 1e-12 &&
        out.vertices(v, 2) > -1e-12)
      axis.push_back({out.vertices(v, 2), v});
  std::sort(axis.begin(), axis.end());
  REQUIRE(axis.size() >= 3);
  for (size_t k = 0; k + 1 < axis.size(); ++k) {
    int a = std::min(axis[k].second, axis[k + 1].second);
    int b = std::max(axis[k].second, axis[k + 1].second);
    CHECK(out.ridge_edges.count({a, b}) == 1);
  }
}

TEST_CASE("single ridge vertex contracts along its ridge") {
  GradingSpec g;
  g.mu = 1.0;
  SimplicialMesh m = generate_fichera(g, 400);  // m = 3, axis step 1/3
  int v = -1;
  for (int u = 0; u < m.num_vertices(); ++u)
    if (m.boundary_markers(u) == kRidge && std::abs(m.vertices(u, 0)) < 1e-12 &&
        std::abs(m.vertices(u, 1)) < 1e-12 && m.vertices(u, 2) > 0.0)
      v = u;
  REQUIRE(v >= 0);
  auto out = remove_vertex_contract(m, v);
  REQUIRE(out.has_value());
  CHECK(out->num_vertices() == m.num_vertices() - 1);
  CHECK(quality_report(*out).max_aspect_ratio < 60.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmg/delaunay.hpp"
#include "gmg/fem.hpp"
#include "gmg/meshgen.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

using namespace gmg;

namespace {

Eigen::VectorXd solve_direct(const LinearSystem& sys) {
  Eigen::SparseMatrix<double> a = sys.matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  return lu.solve(sys.rhs);
}

}  // namespace

TEST_CASE("reference triangle stiffness") {
  Eigen::MatrixXd verts(3, 2);
  verts << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  Eigen::MatrixXd k = element_stiffness(verts);
  Eigen::MatrixXd ref(3, 3);
  ref << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  ref *= 0.5;
  CHECK((k - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("element stiffness rows sum to zero") {
  Eigen::MatrixXd tri(3, 2);
  tri << 0.2, 0.1, 1.3, 0.4, 0.3, 1.7;
  CHECK(element_stiffness(tri).rowwise().sum().cwiseAbs().maxCoeff() < 1e-13);
  Eigen::MatrixXd tet(4, 3);
  tet << 0, 0, 0, 1, 0.1, 0, 0.2, 1.1, 0, 0.1, 0.2, 0.9;
  CHECK(element_stiffness(tet).rowwise().sum().cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("exact pacman values") {
  Eigen::Vector2d origin(0.0, 0.0);
  CHECK(exact_pacman(origin) == 0.0);
  // theta = 3 pi / 4 gives sin(pi / 2) = 1.
  double th = 0.75 * M_PI;
  Eigen::Vector2d p1(std::cos(th), std::sin(th));
  CHECK(exact_pacman(p1) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::Vector2d p2 = 0.5 * p1;
  CHECK(exact_pacman(p2) == doctest::Approx(std::pow(0.5, 2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("constant Dirichlet data gives the constant solution") {
  SimplicialMesh m = jittered_grid_delaunay(8, 3);
  auto problem = ModelProblem::pacman_with([](const Eigen::VectorXd&) { return 2.5; });
  LinearSystem sys = assemble(m, problem);
  Eigen::VectorXd u = solve_direct(sys);
  CHECK((u.array() - 2.5).abs().maxCoeff() < 1e-10);
}

TEST_CASE("linear patch test") {
  SimplicialMesh m = jittered_grid_delaunay(9, 7);
  auto lin = [](const Eigen::VectorXd& p) { return 1.2 * p(0) - 0.4 * p(1) + 0.3; };
  LinearSystem sys = assemble(m, ModelProblem::pacman_with(lin));
  Eigen::VectorXd u = solve_direct(sys);
  for (int v = 0; v < m.num_vertices(); ++v)
    CHECK(u(v) == doctest::Approx(lin(m.vertex(v))).epsilon(1e-10));
  // And l2_error against the same linear is at machine precision.
  CHECK(l2_error(m, u, lin) < 1e-10);
}

TEST_CASE("assembled pacman system structure") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 600);
  LinearSystem sys = assemble(m, ModelProblem::pacman());
  REQUIRE(sys.matrix.rows() == m.num_vertices());

  std::vector<char> constrained(m.num_vertices(), 0);
  for (int d : sys.dirichlet_dofs) constrained[d] = 1;
  Eigen::MatrixXd dense(sys.matrix);
  // Symmetry.
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (constrained[v]) {
      // Identity rows on the Dirichlet block.
      CHECK(dense(v, v) == doctest::Approx(1.0));
      CHECK(dense.row(v).sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(m.boundary_markers(v) >= kBoundary);
    } else {
      // Rows untouched by the constraint elimination sum to zero; rows next
      // to a Dirichlet vertex lost those column entries to the rhs.
      bool touches_dirichlet = false;
      for (const auto& [a, b] : m.edges)
        if ((a == v && constrained[b]) || (b == v && constrained[a]))
          touches_dirichlet = true;
      if (!touches_dirichlet) CHECK(std::abs(dense.row(v).sum()) < 1e-12);
    }
  }
  // SPD on the unconstrained block.
  std::vector<int> free;
  for (int v = 0; v < m.num_vertices(); ++v)
    if (!constrained[v]) free.push_back(v);
  Eigen::MatrixXd sub(free.size(), free.size());
  for (size_t i = 0; i < free.size(); ++i)
    for (size_t j = 0; j < free.size(); ++j) sub(i, j) = dense(free[i], free[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("discrete maximum principle on a Delaunay mesh") {
  SimplicialMesh m = jittered_grid_delaunay(10, 23);
  auto g = [](const Eigen::VectorXd& p) {
    return 0.5 + 0.5 * std::sin(3.0 * p(0)) * std::cos(2.0 * p(1));
  };
  LinearSystem sys = assemble(m, ModelProblem::pacman_with(g));
  Eigen::VectorXd u = solve_direct(sys);
  CHECK(u.minCoeff() >= -1e-8);
  CHECK(u.maxCoeff() <= 1.0 + 1e-8);
}

TEST_CASE("zero solution error equals the exact L2 norm") {
  GradingSpec g;
  g.mu = mu_for_angle(kPacmanAngle);
  SimplicialMesh m = generate_pacman(g, 2000);
  double err = l2_error(m, Eigen::VectorXd::Zero(m.num_vertices()), exact_pacman);
  double norm = l2_norm(m, exact_pacman);
  CHECK(err == doctest::Approx(norm).epsilon(1e-12));
  // Independent coarse estimate: refine each cell 4x and use midpoint values.
  double acc = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    Eigen::MatrixXd v = m.cell_coords(c);
    Eigen::MatrixXd mid(3, 2);
    mid.row(0) = 0.5 * (v.row(0) + v.row(1));
    mid.row(1) = 0.5 * (v.row(1) + v.row(2));
    mid.row(2) = 0.5 * (v.row(2) + v.row(0));
    double area4 = cell_measure(m, c) / 4.0;
    auto sq = [](double x) { return x * x; };
    // Midpoint rule per subtriangle: the centroid of each subtriangle.
    Eigen::Vector2d c0 = (v.row(0).transpose() + mid.row(0).transpose() + mid.row(2).transpose()) / 3.0;
    Eigen::Vector2d c1 = (v.row(1).transpose() + mid.row(0).transpose() + mid.row(1).transpose()) / 3.0;
    Eigen::Vector2d c2 = (v.row(2).transpose() + mid.row(1).transpose() + mid.row(2).transpose()) / 3.0;
    Eigen::Vector2d c3 = (mid.row(0).transpose() + mid.row(1).transpose() + mid.row(2).transpose()) / 3.0;
    acc += area4 * (sq(exact_pacman(c0)) + sq(exact_pacman(c1)) + sq(exact_pacman(c2)) +
                    sq(exact_pacman(c3)));
  }
  CHECK(norm == doctest::Approx(std::sqrt(acc)).epsilon(2e-3));
}

TEST_CASE("fichera assembly classifies every facet") {
  GradingSpec g;
  g.mu = 2.0 / 3.0;
  SimplicialMesh m = generate_fichera(g, 700);
  LinearSystem sys = assemble(m, ModelProblem::fichera());
  REQUIRE(sys.matrix.rows() == m.num_vertices());
  // Dirichlet dofs are exactly the vertices of the three inner faces.
  std::vector<char> constrained(m.num_vertices(), 0);
  for (size_t i = 0; i < sys.dirichlet_dofs.size(); ++i) {
    constrained[sys.dirichlet_dofs[i]] = 1;
    CHECK(sys.dirichlet_values(static_cast<int>(i)) == 0.0);
  }
  for (int v = 0; v < m.num_vertices(); ++v) {
    const auto& p = m.vertices.row(v);
    bool inner = false;
    for (int ax = 0; ax < 3; ++ax)
      if (std::abs(p(ax)) < 1e-12 && p((ax + 1) % 3) >= -1e-12 &&
          p((ax + 2) % 3) >= -1e-12)
        inner = true;
    if (constrained[v]) CHECK(inner);
  }
  // The Neumann data loads the rhs somewhere on the outer boundary.
  CHECK(sys.rhs.cwiseAbs().maxCoeff() > 0.0);
  Eigen::MatrixXd dense(sys.matrix);
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("graded errors decrease and beat uniform meshes") {
  GradingSpec graded;
  graded.mu = mu_for_angle(kPacmanAngle);
  double prev = 1e300;
  for (int target : {1000, 2000, 4000}) {
    SimplicialMesh m = generate_pacman(graded, target);
    LinearSystem sys = assemble(m, ModelProblem::pacman());
    double err = l2_error(m, solve_direct(sys), exact_pacman);
    CHECK(err < prev);
    prev = err;
  }
  GradingSpec uniform;
  uniform.mu = 1.0;
  SimplicialMesh gm = generate_pacman(graded, 3900);
  SimplicialMesh um = generate_pacman(uniform, gm.num_vertices());
  double ge = l2_error(gm, solve_direct(assemble(gm, ModelProblem::pacman())), exact_pacman);
  double ue = l2_error(um, solve_direct(assemble(um, ModelProblem::pacman())), exact_pacman);
  CHECK(ge * 3.0 <= ue);
}

TEST_CASE("system dump round trip") {
  SimplicialMesh m = jittered_grid_delaunay(5, 41);
  LinearSystem sys = assemble(m, ModelProblem::pacman_with([](const Eigen::VectorXd& p) {
    return p(0) + 2.0 * p(1);
  }));
  std::ostringstream out;
  write_system(sys, out);
  std::istringstream in(out.str());
  LinearSystem back = read_system(in);
  REQUIRE(back.matrix.rows() == sys.matrix.rows());
  CHECK((Eigen::MatrixXd(back.matrix) - Eigen::MatrixXd(sys.matrix)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((back.rhs - sys.rhs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.dirichlet_dofs == sys.dirichlet_dofs);
}

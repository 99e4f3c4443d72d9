#include "gmg/fem.hpp"

#include "gmg/geometry.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace gmg {

double exact_pacman(const Eigen::VectorXd& point) {
  double r = point.norm();
  if (r == 0.0) return 0.0;
  double theta = std::atan2(point(1), point(0));
  if (theta < 0.0) theta += 2.0 * M_PI;
  return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * theta / 3.0);
}

namespace {

// One coordinate-plane term of the Fichera Neumann data:
// r^(2/3) cos(theta) with (r, theta) polar in the (a, b) plane.
double fichera_plane_term(double a, double b) {
  double r = std::hypot(a, b);
  if (r == 0.0) return 0.0;
  return std::pow(r, 2.0 / 3.0) * (a / r);
}

double fichera_g(const Eigen::VectorXd& p) {
  return fichera_plane_term(p(0), p(1)) + fichera_plane_term(p(1), p(2)) +
         fichera_plane_term(p(2), p(0));
}

// True when the facet lies in a reentrant face: one coordinate zero, the
// remaining ones in [0, 1].
bool on_inner_face(const Eigen::MatrixXd& verts) {
  const double tol = 1e-12;
  for (int d = 0; d < 3; ++d) {
    if (verts.col(d).cwiseAbs().maxCoeff() > tol) continue;
    bool inside = true;
    for (int e = 0; e < 3 && inside; ++e) {
      if (e == d) continue;
      inside = verts.col(e).minCoeff() >= -tol && verts.col(e).maxCoeff() <= 1.0 + tol;
    }
    if (inside) return true;
  }
  return false;
}

bool on_outer_face(const Eigen::MatrixXd& verts) {
  const double tol = 1e-12;
  for (int d = 0; d < static_cast<int>(verts.cols()); ++d)
    for (double s : {-1.0, 1.0})
      if ((verts.col(d).array() - s).abs().maxCoeff() <= tol) return true;
  return false;
}

}  // namespace

ModelProblem ModelProblem::pacman() {
  ModelProblem p;
  p.domain = Domain::kPacman;
  p.dirichlet = exact_pacman;
  return p;
}

ModelProblem ModelProblem::pacman_with(std::function<double(const Eigen::VectorXd&)> g) {
  ModelProblem p;
  p.domain = Domain::kPacman;
  p.dirichlet = std::move(g);
  return p;
}

ModelProblem ModelProblem::fichera() {
  ModelProblem p;
  p.domain = Domain::kFichera;
  p.dirichlet = [](const Eigen::VectorXd&) { return 0.0; };
  p.neumann = fichera_g;
  return p;
}

Eigen::MatrixXd element_stiffness(const Eigen::MatrixXd& verts) {
  const int dim = static_cast<int>(verts.cols());
  Eigen::MatrixXd d(dim, dim);
  for (int j = 0; j < dim; ++j)
    d.col(j) = (verts.row(j + 1) - verts.row(0)).transpose();
  Eigen::MatrixXd grads(dim, dim + 1);
  grads.rightCols(dim) = d.inverse().transpose();
  grads.col(0) = -grads.rightCols(dim).rowwise().sum();
  double measure = simplex_measure(verts);
  return measure * grads.transpose() * grads;
}

LinearSystem assemble(const SimplicialMesh& mesh, const ModelProblem& problem) {
  const int n = mesh.num_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_cells()) * (mesh.dim + 1) *
                   (mesh.dim + 1));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::MatrixXd k = element_stiffness(mesh.cell_coords(c));
    for (int i = 0; i <= mesh.dim; ++i)
      for (int j = 0; j <= mesh.dim; ++j)
        triplets.emplace_back(mesh.cells(c, i), mesh.cells(c, j), k(i, j));
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<char> is_dirichlet(n, 0);

  if (problem.domain == Domain::kPacman) {
    for (int v = 0; v < n; ++v)
      if (mesh.boundary_markers(v) >= kBoundary) is_dirichlet[v] = 1;
  } else {
    for (const BoundaryFacet& f : mesh.boundary_facets()) {
      const int nfv = mesh.dim;  // facet vertex count
      Eigen::MatrixXd fv(nfv, mesh.dim);
      for (int i = 0; i < nfv; ++i) fv.row(i) = mesh.vertices.row(f.verts[i]);
      if (on_inner_face(fv)) {
        for (int i = 0; i < nfv; ++i) is_dirichlet[f.verts[i]] = 1;
      } else if (on_outer_face(fv)) {
        // Neumann facet: edge-midpoint quadrature on the triangle, exact for
        // quadratics; basis value is 1/2 at the two adjacent midpoints.
        Eigen::Vector3d u = (fv.row(1) - fv.row(0)).transpose();
        Eigen::Vector3d w = (fv.row(2) - fv.row(0)).transpose();
        double area = 0.5 * u.cross(w).norm();
        for (int e = 0; e < 3; ++e) {
          Eigen::VectorXd mid =
              0.5 * (fv.row(e) + fv.row((e + 1) % 3)).transpose();
          double contrib = (area / 3.0) * problem.neumann(mid);
          rhs(f.verts[e]) += 0.5 * contrib;
          rhs(f.verts[(e + 1) % 3]) += 0.5 * contrib;
        }
      } else {
        throw std::runtime_error("unclassified boundary facet");
      }
    }
    // A vertex on both parts is constrained; Dirichlet wins.
  }

  LinearSystem sys;
  sys.rhs = rhs;
  Eigen::VectorXd dval = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < n; ++v)
    if (is_dirichlet[v]) {
      dval(v) = problem.dirichlet(mesh.vertex(v));
      sys.dirichlet_dofs.push_back(v);
    }
  sys.dirichlet_values.resize(static_cast<int>(sys.dirichlet_dofs.size()));
  for (size_t i = 0; i < sys.dirichlet_dofs.size(); ++i)
    sys.dirichlet_values(static_cast<int>(i)) = dval(sys.dirichlet_dofs[i]);

  // Symmetric elimination: move known values to the rhs, leave identity rows.
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (is_dirichlet[t.row()]) continue;
    if (is_dirichlet[t.col()]) {
      sys.rhs(t.row()) -= t.value() * dval(t.col());
      continue;
    }
    kept.push_back(t);
  }
  for (int v : sys.dirichlet_dofs) {
    kept.emplace_back(v, v, 1.0);
    sys.rhs(v) = dval(v);
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(kept.begin(), kept.end());
  sys.matrix.makeCompressed();
  return sys;
}

namespace {

// Six-point degree-4 triangle rule (barycentric orbits of two points).
struct QuadRule {
  double w;
  double a;
};
constexpr QuadRule kDunavant4[2] = {{0.223381589678011, 0.445948490915965},
                                    {0.109951743655322, 0.091576213509771}};

template <class F>
double integrate_sq(const SimplicialMesh& mesh, const F& diff) {
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::MatrixXd verts = mesh.cell_coords(c);
    double area = simplex_measure(verts);
    for (const QuadRule& q : kDunavant4) {
      for (int perm = 0; perm < 3; ++perm) {
        Eigen::Vector3d lam(q.a, q.a, q.a);
        lam(perm) = 1.0 - 2.0 * q.a;
        Eigen::VectorXd x = verts.transpose() * lam;
        double d = diff(c, lam, x);
        total += area * q.w * d * d;
      }
    }
  }
  return std::sqrt(total);
}

}  // namespace

double l2_error(const SimplicialMesh& mesh, const Eigen::VectorXd& solution,
                const std::function<double(const Eigen::VectorXd&)>& exact) {
  if (mesh.dim != 2) throw std::invalid_argument("l2_error is 2D only");
  return integrate_sq(mesh, [&](int c, const Eigen::Vector3d& lam,
                                const Eigen::VectorXd& x) {
    double uh = 0.0;
    for (int i = 0; i < 3; ++i) uh += lam(i) * solution(mesh.cells(c, i));
    return uh - exact(x);
  });
}

double l2_norm(const SimplicialMesh& mesh,
               const std::function<double(const Eigen::VectorXd&)>& f) {
  if (mesh.dim != 2) throw std::invalid_argument("l2_norm is 2D only");
  return integrate_sq(
      mesh, [&](int, const Eigen::Vector3d&, const Eigen::VectorXd& x) { return f(x); });
}

void write_system(const LinearSystem& system, std::ostream& out) {
  out.precision(17);
  out << system.matrix.rows() << ' ' << system.matrix.nonZeros() << '\n';
  for (int k = 0; k < system.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(system.matrix, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  out << system.rhs.size() << '\n';
  for (int i = 0; i < system.rhs.size(); ++i) out << system.rhs(i) << '\n';
  out << system.dirichlet_dofs.size() << '\n';
  for (size_t i = 0; i < system.dirichlet_dofs.size(); ++i)
    out << system.dirichlet_dofs[i] << ' ' << system.dirichlet_values(static_cast<int>(i))
        << '\n';
}

LinearSystem read_system(std::istream& in) {
  LinearSystem sys;
  int n = 0;
  long nnz = 0;
  in >> n >> nnz;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  for (long k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    triplets.emplace_back(i, j, v);
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  int nr = 0;
  in >> nr;
  sys.rhs.resize(nr);
  for (int i = 0; i < nr; ++i) in >> sys.rhs(i);
  size_t nd = 0;
  in >> nd;
  sys.dirichlet_values.resize(static_cast<int>(nd));
  for (size_t i = 0; i < nd; ++i) {
    int dof;
    in >> dof >> sys.dirichlet_values(static_cast<int>(i));
    sys.dirichlet_dofs.push_back(dof);
  }
  if (!in) throw std::runtime_error("malformed system dump");
  return sys;
}

}  // namespace gmg

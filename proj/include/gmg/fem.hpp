#pragma once

#include "gmg/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <vector>

namespace gmg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LinearSystem {
  SparseMatrix matrix;           // symmetric, constrained rows are identity
  Eigen::VectorXd rhs;
  std::vector<int> dirichlet_dofs;
  Eigen::VectorXd dirichlet_values;  // aligned with dirichlet_dofs
};

enum class Domain { kPacman, kFichera };

// Model Laplace problem: Pacman is all-Dirichlet with the corner-singular
// exact solution; Fichera mixes homogeneous Dirichlet on the reentrant faces
// with Neumann data on the outer boundary.
struct ModelProblem {
  Domain domain = Domain::kPacman;
  std::function<double(const Eigen::VectorXd&)> dirichlet;
  std::function<double(const Eigen::VectorXd&)> neumann;  // null when absent

  static ModelProblem pacman();
  static ModelProblem fichera();
  // Pacman with arbitrary Dirichlet data; test hook.
  static ModelProblem pacman_with(std::function<double(const Eigen::VectorXd&)> g);
};

// u(r, theta) = r^(2/3) sin(2 theta / 3), theta in [0, 9 pi / 5] measured
// from the lower straight edge of the wedge.
double exact_pacman(const Eigen::VectorXd& point);

LinearSystem assemble(const SimplicialMesh& mesh, const ModelProblem& problem);

// Local P1 stiffness matrix of one cell; exposed for the unit oracle.
Eigen::MatrixXd element_stiffness(const Eigen::MatrixXd& verts);

// Degree-4 elementwise quadrature of (u_h - u)^2; 2D only.
double l2_error(const SimplicialMesh& mesh, const Eigen::VectorXd& solution,
                const std::function<double(const Eigen::VectorXd&)>& exact);
double l2_norm(const SimplicialMesh& mesh,
               const std::function<double(const Eigen::VectorXd&)>& f);

// Coordinate text dump of the system matrix and rhs.
void write_system(const LinearSystem& system, std::ostream& out);
LinearSystem read_system(std::istream& in);

}  // namespace gmg

#pragma once

#include "gmg/fem.hpp"
#include "gmg/hierarchy.hpp"
#include "gmg/interp.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <vector>

namespace gmg {

// Incomplete LU with zero fill on the sparsity of A, natural ordering.
class Ilu0 {
 public:
  void factor(const SparseMatrix& a);
  Eigen::VectorXd apply(const Eigen::VectorXd& b) const;  // solves L U x = b

 private:
  SparseMatrix lu_;
  std::vector<int> diag_;
};

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // relative true residuals
};

using Preconditioner = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Restarted GMRES, right-preconditioned so the monitored residual is the true
// one. Pass a null preconditioner for the unpreconditioned iteration.
GmresResult gmres(const SparseMatrix& a, const Eigen::VectorXd& b,
                  const Preconditioner& precond, double rtol, int restart,
                  int max_iters);

// V-cycle multigrid preconditioner: rediscretized systems per level, ILU(0)
// smoothing, dense LU on the coarsest level.
class MgPreconditioner {
 public:
  MgPreconditioner(const MeshHierarchy& hierarchy, const ModelProblem& problem,
                   int pre_smooths = 3, int post_smooths = 3);

  Eigen::VectorXd vcycle(const Eigen::VectorXd& residual) const;
  Preconditioner as_preconditioner() const;

  int num_levels() const { return static_cast<int>(systems_.size()); }
  const LinearSystem& system(int level) const { return systems_[level]; }

 private:
  Eigen::VectorXd cycle_at(int level, const Eigen::VectorXd& rhs) const;
  void zero_dirichlet(int level, Eigen::VectorXd& v) const;

  std::vector<LinearSystem> systems_;
  std::vector<ProlongationOperator> prolongations_;  // [k]: level k+1 -> k
  std::vector<Ilu0> smoothers_;
  Eigen::PartialPivLU<Eigen::MatrixXd> coarse_lu_;
  int pre_smooths_, post_smooths_;
};

void write_convergence_csv(const GmresResult& result, double seconds, std::ostream& out);

}  // namespace gmg

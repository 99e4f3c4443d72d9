#include "gmg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gmg {

void Ilu0::factor(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ILU(0) needs a square matrix");
  lu_ = a;
  lu_.makeCompressed();
  const int n = static_cast<int>(lu_.rows());
  const int* outer = lu_.outerIndexPtr();
  const int* inner = lu_.innerIndexPtr();
  double* vals = lu_.valuePtr();

  diag_.assign(n, -1);
  std::vector<int> pos(n, -1);  // column -> slot in the current row
  for (int i = 0; i < n; ++i) {
    for (int s = outer[i]; s < outer[i + 1]; ++s) {
      pos[inner[s]] = s;
      if (inner[s] == i) diag_[i] = s;
    }
    for (int s = outer[i]; s < outer[i + 1]; ++s) {
      int k = inner[s];
      if (k >= i) break;
      if (diag_[k] < 0 || vals[diag_[k]] == 0.0)
        throw std::runtime_error("zero pivot in ILU(0) at row " + std::to_string(k));
      double lik = vals[s] / vals[diag_[k]];
      vals[s] = lik;
      for (int t = diag_[k] + 1; t < outer[k + 1]; ++t) {
        int p = pos[inner[t]];
        if (p >= 0) vals[p] -= lik * vals[t];
      }
    }
    if (diag_[i] < 0 || vals[diag_[i]] == 0.0)
      throw std::runtime_error("zero pivot in ILU(0) at row " + std::to_string(i));
    for (int s = outer[i]; s < outer[i + 1]; ++s) pos[inner[s]] = -1;
  }
}

Eigen::VectorXd Ilu0::apply(const Eigen::VectorXd& b) const {
  const int n = static_cast<int>(lu_.rows());
  const int* outer = lu_.outerIndexPtr();
  const int* inner = lu_.innerIndexPtr();
  const double* vals = lu_.valuePtr();
  Eigen::VectorXd x = b;
  for (int i = 0; i < n; ++i) {
    double s = x(i);
    for (int t = outer[i]; t < diag_[i]; ++t) s -= vals[t] * x(inner[t]);
    x(i) = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x(i);
    for (int t = diag_[i] + 1; t < outer[i + 1]; ++t) s -= vals[t] * x(inner[t]);
    x(i) = s / vals[diag_[i]];
  }
  return x;
}

GmresResult gmres(const SparseMatrix& a, const Eigen::VectorXd& b,
                  const Preconditioner& precond, double rtol, int restart,
                  int max_iters) {
  if (!(rtol > 0.0)) throw std::invalid_argument("rtol must be positive");
  const int n = static_cast<int>(a.rows());
  GmresResult res;
  res.x = Eigen::VectorXd::Zero(n);
  double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  auto apply_m = [&](const Eigen::VectorXd& v) { return precond ? precond(v) : v; };

  Eigen::MatrixXd v(n, restart + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(restart + 1, restart);
  Eigen::VectorXd cs(restart), sn(restart), g(restart + 1);

  while (res.iterations < max_iters) {
    Eigen::VectorXd r = b - a * res.x;
    double beta = r.norm();
    if (beta / bnorm <= rtol) {
      res.converged = true;
      return res;
    }
    v.col(0) = r / beta;
    g.setZero();
    g(0) = beta;

    int m = 0;
    for (int j = 0; j < restart && res.iterations < max_iters; ++j) {
      Eigen::VectorXd w = a * apply_m(v.col(j));
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v.col(i));
        w -= h(i, j) * v.col(i);
      }
      h(j + 1, j) = w.norm();
      ++res.iterations;
      m = j + 1;
      bool breakdown = h(j + 1, j) < 1e-300;
      if (!breakdown) v.col(j + 1) = w / h(j + 1, j);

      for (int i = 0; i < j; ++i) {
        double t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      double denom = std::hypot(h(j, j), h(j + 1, j));
      cs(j) = denom == 0.0 ? 1.0 : h(j, j) / denom;
      sn(j) = denom == 0.0 ? 0.0 : h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      res.residual_history.push_back(std::abs(g(j + 1)) / bnorm);
      if (std::abs(g(j + 1)) / bnorm <= rtol || breakdown) break;
    }
    Eigen::VectorXd y =
        h.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(g.head(m));
    res.x += apply_m(v.leftCols(m) * y);

    double true_res = (b - a * res.x).norm() / bnorm;
    if (!res.residual_history.empty()) res.residual_history.back() = true_res;
    if (true_res <= rtol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

MgPreconditioner::MgPreconditioner(const MeshHierarchy& hierarchy,
                                   const ModelProblem& problem, int pre_smooths,
                                   int post_smooths)
    : pre_smooths_(pre_smooths), post_smooths_(post_smooths) {
  const int nl = hierarchy.num_levels();
  if (nl < 1) throw std::invalid_argument("empty hierarchy");
  for (int k = 0; k < nl; ++k)
    systems_.push_back(assemble(hierarchy.levels[k], problem));
  for (int k = 0; k + 1 < nl; ++k)
    prolongations_.push_back(
        build_prolongation(hierarchy.levels[k], hierarchy.levels[k + 1]));
  smoothers_.resize(nl - 1);
  for (int k = 0; k + 1 < nl; ++k) smoothers_[k].factor(systems_[k].matrix);
  coarse_lu_.compute(Eigen::MatrixXd(systems_.back().matrix));
}

void MgPreconditioner::zero_dirichlet(int level, Eigen::VectorXd& vec) const {
  for (int dof : systems_[level].dirichlet_dofs) vec(dof) = 0.0;
}

Eigen::VectorXd MgPreconditioner::cycle_at(int level, const Eigen::VectorXd& rhs) const {
  if (level + 1 == num_levels()) return coarse_lu_.solve(rhs);
  const SparseMatrix& a = systems_[level].matrix;
  const Ilu0& smoother = smoothers_[level];
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  for (int s = 0; s < pre_smooths_; ++s) x += smoother.apply(rhs - a * x);
  Eigen::VectorXd coarse_rhs = prolongations_[level].restrict_vec(rhs - a * x);
  zero_dirichlet(level + 1, coarse_rhs);
  Eigen::VectorXd correction =
      prolongations_[level].prolongate(cycle_at(level + 1, coarse_rhs));
  zero_dirichlet(level, correction);
  x += correction;
  for (int s = 0; s < post_smooths_; ++s) x += smoother.apply(rhs - a * x);
  return x;
}

Eigen::VectorXd MgPreconditioner::vcycle(const Eigen::VectorXd& residual) const {
  if (residual.size() != systems_[0].matrix.rows())
    throw std::invalid_argument("level dimension mismatch");
  Eigen::VectorXd interior = residual;
  zero_dirichlet(0, interior);
  Eigen::VectorXd x = cycle_at(0, interior);
  // The constrained rows are identity; pass their residual through unchanged.
  for (int dof : systems_[0].dirichlet_dofs) x(dof) = residual(dof);
  return x;
}

Preconditioner MgPreconditioner::as_preconditioner() const {
  return [this](const Eigen::VectorXd& r) { return vcycle(r); };
}

void write_convergence_csv(const GmresResult& result, double seconds, std::ostream& out) {
  out << "iteration,relative_residual,wall_time\n";
  const size_t n = result.residual_history.size();
  for (size_t i = 0; i < n; ++i)
    out << i + 1 << ',' << result.residual_history[i] << ','
        << seconds * static_cast<double>(i + 1) / static_cast<double>(n) << '\n';
}

}  // namespace gmg

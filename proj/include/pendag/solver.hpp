#pragma once
// Weighted l1-penalized least squares by cyclic coordinate descent.
//
// Objective:  n^{-1} ||y - X theta||^2 + lambda * sum_j w_j |theta_j|
//
// Optimality (KKT), with G_j(theta) = -2 n^{-1} x_j^T (y - X theta):
//   theta_j != 0  =>  G_j = -sign(theta_j) w_j lambda
//   theta_j == 0  =>  |G_j| <= w_j lambda
// kkt_check evaluates exactly these conditions, and the solver declares
// convergence only when they hold.

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace pendag {

inline constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

// Non-owning views of the design and response; the caller keeps them alive.
// Weights lie in [1, +inf]; an infinite weight pins the coefficient at zero.
struct LassoProblem {
  Eigen::Ref<const Eigen::MatrixXd> design;
  Eigen::Ref<const Eigen::VectorXd> response;
  std::vector<double> weights;
  double lambda;

  std::size_t samples() const noexcept { return static_cast<std::size_t>(design.rows()); }
  std::size_t features() const noexcept { return static_cast<std::size_t>(design.cols()); }
  // Throws DimensionMismatch or DomainError.
  void validate() const;
};

struct SolverOptions {
  double tol = 1e-7;
  int max_sweeps = 10000;
  // Record the objective after every sweep into LassoSolution::objective_trace.
  bool record_objective = false;
};

struct LassoSolution {
  Eigen::VectorXd coefficients;
  int iterations = 0;  // coordinate sweeps, full and active-set
  bool converged = false;
  double objective = 0.0;
  double kkt_violation = 0.0;  // worst KKT slack at return
  std::vector<double> objective_trace;
};

struct KktReport {
  bool pass = false;
  double worst = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> slack;     // per-coordinate violation, 0 when satisfied
  std::vector<double> gradient;  // G_j
};

// sign(z) * max(|z| - t, 0)
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lasso_objective(const LassoProblem& prob, const Eigen::VectorXd& coefficients);

// Smallest lambda with an all-zero solution: max_j |2 n^{-1} x_j^T y| / w_j.
double null_lambda(const LassoProblem& prob);

KktReport kkt_check(const LassoProblem& prob, const Eigen::VectorXd& coefficients, double tol);

// Throws DimensionMismatch/DomainError on invalid input. Non-convergence is
// reported through LassoSolution::converged with the last iterate.
LassoSolution solve_weighted_lasso(const LassoProblem& prob, const SolverOptions& opts = {},
                                   std::optional<std::span<const double>> warm_start = std::nullopt);

// n^{-1} ||x_j||^2 == 1 and mean 0 for every column, to `tol`.
bool is_standardized(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol = 1e-8);

}  // namespace pendag

#include "pendag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pendag/errors.hpp"
#include "pendag/kernels.hpp"

namespace pendag {

namespace {

// 10x the coefficient tolerance, the gate used before declaring convergence.
constexpr double kKktFactor = 10.0;

struct Workspace {
  const LassoProblem& prob;
  const kernels::KernelTable& k;
  std::size_t n;
  double inv_n;
  std::vector<double> col_sq;     // n^{-1} ||x_j||^2
  std::vector<double> threshold;  // lambda w_j / 2
  std::vector<char> eligible;
  Eigen::VectorXd theta;
  Eigen::VectorXd residual;

  const double* col(std::size_t j) const { return prob.design.col(static_cast<Eigen::Index>(j)).data(); }

  // One pass over `idx`; returns the largest absolute coefficient change.
  double sweep(const std::vector<std::size_t>& idx) {
    double max_change = 0.0;
    for (std::size_t j : idx) {
      const double old = theta[static_cast<Eigen::Index>(j)];
      const double c = k.dot(col(j), residual.data(), n) * inv_n + col_sq[j] * old;
      const double updated = soft_threshold(c, threshold[j]) / col_sq[j];
      if (updated != old) {
        k.axpy(old - updated, col(j), residual.data(), n);
        theta[static_cast<Eigen::Index>(j)] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    return max_change;
  }

  double objective() const {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j)
      if (theta[j] != 0.0) pen += prob.weights[static_cast<std::size_t>(j)] * std::abs(theta[j]);
    return residual.squaredNorm() * inv_n + prob.lambda * pen;
  }
};

}  // namespace

void LassoProblem::validate() const {
  if (response.size() != design.rows())
    throw DimensionMismatch("response length " + std::to_string(response.size()) +
                            " does not match design rows " + std::to_string(design.rows()));
  if (weights.size() != features())
    throw DimensionMismatch("weights length " + std::to_string(weights.size()) +
                            " does not match design columns " + std::to_string(design.cols()));
  if (design.rows() == 0) throw DimensionMismatch("design has no rows");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
  for (double w : weights)
    if (!(w >= 1.0)) throw DomainError("weights must lie in [1, +inf]");
}

double lasso_objective(const LassoProblem& prob, const Eigen::VectorXd& coefficients) {
  prob.validate();
  if (static_cast<std::size_t>(coefficients.size()) != prob.features())
    throw DimensionMismatch("coefficient length does not match design columns");
  const Eigen::VectorXd r = prob.response - prob.design * coefficients;
  double pen = 0.0;
  for (std::size_t j = 0; j < prob.features(); ++j) {
    const double b = coefficients[static_cast<Eigen::Index>(j)];
    if (b != 0.0) pen += prob.weights[j] * std::abs(b);
  }
  return r.squaredNorm() / static_cast<double>(prob.samples()) + prob.lambda * pen;
}

double null_lambda(const LassoProblem& prob) {
  prob.validate();
  const double n = static_cast<double>(prob.samples());
  double out = 0.0;
  for (std::size_t j = 0; j < prob.features(); ++j) {
    if (std::isinf(prob.weights[j])) continue;
    const double g = 2.0 * prob.design.col(static_cast<Eigen::Index>(j)).dot(prob.response) / n;
    out = std::max(out, std::abs(g) / prob.weights[j]);
  }
  return out;
}

KktReport kkt_check(const LassoProblem& prob, const Eigen::VectorXd& coefficients, double tol) {
  prob.validate();
  if (static_cast<std::size_t>(coefficients.size()) != prob.features())
    throw DimensionMismatch("coefficient length does not match design columns");
  const std::size_t k = prob.features();
  const double n = static_cast<double>(prob.samples());
  const Eigen::VectorXd r = prob.response - prob.design * coefficients;

  KktReport rep;
  rep.slack.assign(k, 0.0);
  rep.gradient.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double g = -2.0 * prob.design.col(jj).dot(r) / n;
    const double b = coefficients[jj];
    const double w = prob.weights[j];
    rep.gradient[j] = g;
    double s = 0.0;
    if (std::isinf(w)) {
      s = b == 0.0 ? 0.0 : kInfiniteWeight;
    } else if (b != 0.0) {
      s = std::abs(g + std::copysign(w * prob.lambda, b));
    } else {
      s = std::max(0.0, std::abs(g) - w * prob.lambda);
    }
    rep.slack[j] = s;
    if (s > rep.worst) {
      rep.worst = s;
      rep.worst_index = j;
    }
  }
  rep.pass = rep.worst <= tol;
  return rep;
}

LassoSolution solve_weighted_lasso(const LassoProblem& prob, const SolverOptions& opts,
                                   std::optional<std::span<const double>> warm_start) {
  prob.validate();
  if (!(opts.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (opts.max_sweeps < 1) throw DomainError("max_sweeps must be at least 1");
  const std::size_t n = prob.samples();
  const std::size_t kdim = prob.features();

  Workspace ws{prob, kernels::active(), n, 1.0 / static_cast<double>(n), {}, {}, {}, {}, {}};
  ws.col_sq.resize(kdim);
  ws.threshold.resize(kdim);
  ws.eligible.assign(kdim, 0);
  ws.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kdim));

  if (warm_start) {
    if (warm_start->size() != kdim) throw DimensionMismatch("warm start length does not match design columns");
    for (std::size_t j = 0; j < kdim; ++j) ws.theta[static_cast<Eigen::Index>(j)] = (*warm_start)[j];
  }

  std::vector<std::size_t> all;
  for (std::size_t j = 0; j < kdim; ++j) {
    ws.col_sq[j] = ws.k.dot(ws.col(j), ws.col(j), n) * ws.inv_n;
    // Infinite weights and all-zero columns never move off zero.
    if (std::isinf(prob.weights[j]) || ws.col_sq[j] == 0.0) {
      ws.theta[static_cast<Eigen::Index>(j)] = 0.0;
      continue;
    }
    ws.threshold[j] = 0.5 * prob.lambda * prob.weights[j];
    ws.eligible[j] = 1;
    all.push_back(j);
  }

  ws.residual = prob.response;
  for (std::size_t j = 0; j < kdim; ++j) {
    const double b = ws.theta[static_cast<Eigen::Index>(j)];
    if (b != 0.0) ws.k.axpy(-b, ws.col(j), ws.residual.data(), n);
  }

  LassoSolution sol;
  auto record = [&] {
    ++sol.iterations;
    if (opts.record_objective) sol.objective_trace.push_back(ws.objective());
  };

  std::vector<std::size_t> active;
  while (sol.iterations < opts.max_sweeps) {
    const double full_change = ws.sweep(all);
    record();
    if (full_change < opts.tol) {
      const KktReport rep = kkt_check(prob, ws.theta, kKktFactor * opts.tol);
      if (rep.pass) {
        sol.converged = true;
        break;
      }
    }
    active.clear();
    for (std::size_t j : all)
      if (ws.theta[static_cast<Eigen::Index>(j)] != 0.0) active.push_back(j);
    while (!active.empty() && sol.iterations < opts.max_sweeps) {
      const double change = ws.sweep(active);
      record();
      if (change < opts.tol) break;
    }
  }

  sol.coefficients = std::move(ws.theta);
  sol.objective = lasso_objective(prob, sol.coefficients);
  sol.kkt_violation = kkt_check(prob, sol.coefficients, opts.tol).worst;
  return sol;
}

bool is_standardized(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol) {
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (std::abs(m.col(j).sum() / n) > tol) return false;
    if (std::abs(m.col(j).squaredNorm() / n - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace pendag

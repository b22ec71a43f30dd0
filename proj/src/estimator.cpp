#include "pendag/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "pendag/errors.hpp"
#include "pendag/kernels.hpp"

namespace pendag {

namespace {

// Weights for one row, or nullptr for unit weights.
using WeightMatrix = const Eigen::MatrixXd*;

struct RowOutcome {
  Eigen::VectorXd coefficients;
  RowDiagnostics diag;
};

RowOutcome solve_row(const Eigen::MatrixXd& z, std::size_t i, double alpha, WeightMatrix weights,
                     const EstimationConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(z.rows());
  const std::size_t p = static_cast<std::size_t>(z.cols());
  const auto k = static_cast<Eigen::Index>(i);

  std::vector<double> w(i, 1.0);
  if (weights != nullptr)
    for (std::size_t j = 0; j < i; ++j) w[j] = (*weights)(k, static_cast<Eigen::Index>(j));

  LassoProblem prob{z.leftCols(k), z.col(k), std::move(w), lambda_for_row(i + 1, p, n, alpha)};
  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.max_sweeps = cfg.max_sweeps;
  LassoSolution sol = solve_weighted_lasso(prob, opts);

  RowOutcome out;
  out.diag = {i, prob.lambda, sol.iterations, sol.converged, sol.kkt_violation};
  out.coefficients = std::move(sol.coefficients);
  return out;
}

// Rows 1..p-1 (0-based) solved independently; row 0 has no predecessors.
// Results land in disjoint rows, so the output does not depend on threading.
std::pair<AdjacencyMatrix, std::vector<RowDiagnostics>> solve_all_rows(const Eigen::MatrixXd& z, double alpha,
                                                                       WeightMatrix weights,
                                                                       const EstimationConfig& cfg) {
  const std::size_t p = static_cast<std::size_t>(z.cols());
  std::vector<RowOutcome> outcomes(p);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < p; i += stride) outcomes[i] = solve_row(z, i, alpha, weights, cfg);
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, p > 1 ? p - 1 : 1);
  if (threads == 1) {
    work(1, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(1 + t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  std::vector<RowDiagnostics> diags;
  for (std::size_t i = 1; i < p; ++i) {
    a.row(static_cast<Eigen::Index>(i)).head(static_cast<Eigen::Index>(i)) = outcomes[i].coefficients.transpose();
    diags.push_back(outcomes[i].diag);
  }
  return {AdjacencyMatrix(std::move(a)), std::move(diags)};
}

bool any_unconverged(const std::vector<RowDiagnostics>& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const RowDiagnostics& d) { return !d.converged; });
}

void check_shape(const DataMatrix& x) {
  if (x.rows() < 2) throw DomainError("estimation needs at least two observations");
  if (x.cols() < 2) throw DomainError("estimation needs at least two variables");
}

}  // namespace

std::string penalty_name(Penalty p) { return p == Penalty::lasso ? "lasso" : "alasso"; }

Penalty parse_penalty(const std::string& s) {
  if (s == "lasso") return Penalty::lasso;
  if (s == "alasso" || s == "adaptive_lasso") return Penalty::adaptive_lasso;
  throw DomainError("unknown penalty '" + s + "' (expected lasso or alasso)");
}

void EstimationConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw DomainError("alpha0 must lie in (0, 1)");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_sweeps < 1) throw DomainError("max_sweeps must be at least 1");
  if (!(edge_threshold >= 0.0)) throw DomainError("edge threshold must be nonnegative");
}

Standardized standardize(const DataMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 2) throw DomainError("standardization needs at least two observations");
  const auto& k = kernels::active();
  Standardized out{x, Eigen::VectorXd(static_cast<Eigen::Index>(p)), Eigen::VectorXd(static_cast<Eigen::Index>(p))};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j) {
    double* col = out.data.column(j).data();
    const double mean = k.sum(col, n) * inv_n;
    k.shift_scale(col, mean, 1.0, n);
    const double scale = std::sqrt(k.dot(col, col, n) * inv_n);
    if (!(scale > 1e-13 * std::max(1.0, std::abs(mean)))) throw ConstantColumn(j, x.names[j]);
    k.shift_scale(col, 0.0, 1.0 / scale, n);
    out.means[static_cast<Eigen::Index>(j)] = mean;
    out.scales[static_cast<Eigen::Index>(j)] = scale;
  }
  return out;
}

double lambda_for_row(std::size_t row, std::size_t p, std::size_t n, double alpha) {
  if (row < 2 || row > p) throw DomainError("row index must lie in [2, p]");
  if (n == 0) throw DomainError("sample size must be positive");
  const double q = alpha / (2.0 * static_cast<double>(p) * static_cast<double>(row - 1));
  if (!(q > 0.0 && q <= 0.5))
    throw DomainError("alpha / (2 p (i - 1)) = " + format_double(q) + " falls outside (0, 0.5]");
  return 2.0 / std::sqrt(static_cast<double>(n)) * normal_upper_quantile(q);
}

Eigen::MatrixXd adaptive_weights(const AdjacencyMatrix& initial, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const auto p = static_cast<Eigen::Index>(initial.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(p, p, kInfiniteWeight);
  for (Eigen::Index i = 1; i < p; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double b = std::abs(initial.matrix()(i, j));
      if (b != 0.0) w(i, j) = std::max(1.0, std::pow(b, -gamma));
    }
  }
  return w;
}

EstimateResult estimate_lasso(const DataMatrix& x, const EstimationConfig& cfg) {
  cfg.validate();
  check_shape(x);
  Standardized s = standardize(x);
  auto [a, rows] = solve_all_rows(s.data.values, cfg.alpha, nullptr, cfg);
  EstimateResult r;
  r.adjacency = std::move(a);
  r.rows = std::move(rows);
  r.config = cfg;
  r.config.penalty = Penalty::lasso;
  r.partial = any_unconverged(r.rows);
  r.means = std::move(s.means);
  r.scales = std::move(s.scales);
  return r;
}

EstimateResult estimate_adaptive_lasso(const DataMatrix& x, const EstimationConfig& cfg) {
  cfg.validate();
  check_shape(x);
  Standardized s = standardize(x);
  auto [initial, initial_rows] = solve_all_rows(s.data.values, cfg.alpha0, nullptr, cfg);
  const Eigen::MatrixXd w = adaptive_weights(initial, cfg.gamma);
  auto [a, rows] = solve_all_rows(s.data.values, cfg.alpha, &w, cfg);

  EstimateResult r;
  r.adjacency = std::move(a);
  r.rows = std::move(rows);
  r.config = cfg;
  r.config.penalty = Penalty::adaptive_lasso;
  r.partial = any_unconverged(r.rows) || any_unconverged(initial_rows);
  r.means = std::move(s.means);
  r.scales = std::move(s.scales);
  r.initial = std::move(initial);
  r.initial_rows = std::move(initial_rows);
  return r;
}

EstimateResult estimate(const DataMatrix& x, const EstimationConfig& cfg) {
  return cfg.penalty == Penalty::lasso ? estimate_lasso(x, cfg) : estimate_adaptive_lasso(x, cfg);
}

AdjacencyMatrix to_original_scale(const EstimateResult& r) {
  Eigen::MatrixXd a = r.adjacency.matrix();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) *= r.scales[i] / r.scales[j];
  return AdjacencyMatrix(std::move(a));
}

KktAudit kkt_audit(const DataMatrix& x, const EstimateResult& r, double tol) {
  const Standardized s = standardize(x);
  const Eigen::MatrixXd& z = s.data.values;
  const std::size_t p = x.cols();
  if (r.adjacency.size() != p) throw DimensionMismatch("estimate size does not match data");
  std::optional<Eigen::MatrixXd> w;
  if (r.config.penalty == Penalty::adaptive_lasso) {
    if (!r.initial) throw DomainError("adaptive estimate lacks its initial fit");
    w = adaptive_weights(*r.initial, r.config.gamma);
  }

  KktAudit audit;
  auto check_rows = [&](const std::vector<RowDiagnostics>& rows, const AdjacencyMatrix& a,
                        const Eigen::MatrixXd* weights) {
    for (const RowDiagnostics& d : rows) {
      const auto k = static_cast<Eigen::Index>(d.row);
      std::vector<double> wk(d.row, 1.0);
      if (weights != nullptr)
        for (std::size_t j = 0; j < d.row; ++j) wk[j] = (*weights)(k, static_cast<Eigen::Index>(j));
      LassoProblem prob{z.leftCols(k), z.col(k), std::move(wk), d.lambda};
      const Eigen::VectorXd theta = a.matrix().row(k).head(k).transpose();
      const KktReport rep = kkt_check(prob, theta, tol);
      if (rep.worst > audit.worst) {
        audit.worst = rep.worst;
        audit.worst_row = d.row;
      }
    }
  };
  check_rows(r.rows, r.adjacency, w ? &*w : nullptr);
  if (r.initial) check_rows(r.initial_rows, *r.initial, nullptr);
  audit.pass = audit.worst <= tol;
  return audit;
}

}  // namespace pendag

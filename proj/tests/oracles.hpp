#pragma once
// Independent reference computations the library is checked against. None
// of these call into the code under test except for plain data types.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

// Upper normal quantile by bisection on the complementary error function.
inline double upper_quantile(double q) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// sum_{k=0}^{p-1} A^k; A is nilpotent so the series is finite.
inline Eigen::MatrixXd power_series(const Eigen::MatrixXd& a) {
  const auto p = a.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd total = term;
  for (Eigen::Index k = 1; k < p; ++k) {
    term = term * a;
    total += term;
  }
  return total;
}

// reach(u, v): directed path u -> ... -> v of length >= 0.
inline std::vector<std::vector<bool>> reachability(const Eigen::MatrixXd& a, double thr) {
  const auto p = static_cast<std::size_t>(a.rows());
  std::vector<std::vector<bool>> r(p, std::vector<bool>(p, false));
  for (std::size_t i = 0; i < p; ++i) {
    r[i][i] = true;
    for (std::size_t j = 0; j < p; ++j)
      if (std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > thr) r[j][i] = true;
  }
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t u = 0; u < p; ++u)
      for (std::size_t v = 0; v < p; ++v)
        if (r[u][k] && r[k][v]) r[u][v] = true;
  return r;
}

inline std::vector<std::size_t> ancestral_set(const Eigen::MatrixXd& a, std::size_t i, double thr) {
  const auto r = reachability(a, thr);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (j == i) continue;
    bool related = r[i][j] || r[j][i];
    for (std::size_t k = 0; k < r.size() && !related; ++k) related = r[k][i] && r[k][j];
    if (related) out.push_back(j);
  }
  return out;
}

struct LassoOracle {
  Eigen::VectorXd coefficients;
  double objective = std::numeric_limits<double>::infinity();
};

// Exact weighted lasso for small k: enumerate every support and sign
// pattern, solve the stationarity equations on the support, and keep the
// candidates that satisfy the optimality conditions off the support.
inline LassoOracle exact_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<double>& w,
                               double lambda) {
  const auto k = x.cols();
  const double n = static_cast<double>(x.rows());
  const Eigen::MatrixXd g = x.transpose() * x / n;
  const Eigen::VectorXd b = x.transpose() * y / n;
  auto objective = [&](const Eigen::VectorXd& t) {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (t[j] != 0.0) pen += w[static_cast<std::size_t>(j)] * std::abs(t[j]);
    return (y - x * t).squaredNorm() / n + lambda * pen;
  };

  LassoOracle best;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<Eigen::Index> s;
    bool allowed = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!(mask & (1u << j))) continue;
      if (std::isinf(w[static_cast<std::size_t>(j)])) allowed = false;
      s.push_back(j);
    }
    if (!allowed) continue;
    const auto m = static_cast<Eigen::Index>(s.size());
    for (unsigned signs = 0; signs < (1u << m); ++signs) {
      Eigen::MatrixXd gs(m, m);
      Eigen::VectorXd rhs(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        const double sg = (signs & (1u << a)) ? -1.0 : 1.0;
        rhs[a] = b[s[a]] - 0.5 * lambda * w[static_cast<std::size_t>(s[a])] * sg;
        for (Eigen::Index c = 0; c < m; ++c) gs(a, c) = g(s[a], s[c]);
      }
      Eigen::VectorXd ts = Eigen::VectorXd::Zero(m);
      if (m > 0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gs);
        if (!lu.isInvertible()) continue;
        ts = lu.solve(rhs);
      }
      bool ok = true;
      for (Eigen::Index a = 0; a < m && ok; ++a) {
        const double sg = (signs & (1u << a)) ? -1.0 : 1.0;
        ok = ts[a] * sg > 0.0;
      }
      if (!ok) continue;
      Eigen::VectorXd t = Eigen::VectorXd::Zero(k);
      for (Eigen::Index a = 0; a < m; ++a) t[s[a]] = ts[a];
      const Eigen::VectorXd grad = 2.0 * (g * t - b);
      for (Eigen::Index j = 0; j < k && ok; ++j) {
        if (t[j] != 0.0) continue;
        const double wj = w[static_cast<std::size_t>(j)];
        if (std::isinf(wj)) continue;
        ok = std::abs(grad[j]) <= wj * lambda * (1.0 + 1e-12);
      }
      if (!ok) continue;
      const double f = objective(t);
      if (f < best.objective) best = {t, f};
    }
  }
  return best;
}

}  // namespace oracle

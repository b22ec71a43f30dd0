#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "pendag/errors.hpp"
#include "pendag/estimator.hpp"
#include "pendag/metrics.hpp"
#include "pendag/synth.hpp"

using namespace pendag;
using testing_support::audited_estimate;
using testing_support::chain;

namespace {

DataMatrix chain_data(std::size_t n, std::uint64_t seed) {
  return sample_data({chain(3, 0.8), Eigen::VectorXd::Ones(3)}, n, NoiseSpec::gaussian(), seed);
}

DataMatrix sparse_data(std::size_t p, std::size_t edges, std::size_t n, std::uint64_t seed) {
  const DagModel m = random_dag(DagGenSpec{p, edges, 5, 0.8, std::nullopt}, seed);
  return sample_data(m, n, NoiseSpec::gaussian(), seed + 1000);
}

EstimationConfig config(Penalty pen) {
  EstimationConfig cfg;
  cfg.penalty = pen;
  return cfg;
}

}  // namespace

TEST_CASE("standardize examples") {
  Eigen::MatrixXd v(3, 2);
  v << 1, 5, 2, 5.5, 3, 7;
  const Standardized s = standardize(DataMatrix(v));
  const double sc = std::sqrt(2.0 / 3.0);
  CHECK(s.means[0] == doctest::Approx(2.0));
  CHECK(s.scales[0] == doctest::Approx(sc));
  CHECK(s.data.values(0, 0) == doctest::Approx(-1.0 / sc));
  CHECK(s.data.values(1, 0) == doctest::Approx(0.0));
  CHECK(s.data.values(2, 0) == doctest::Approx(1.0 / sc));
  CHECK(is_standardized(s.data.values));

  const Standardized again = standardize(s.data);
  CHECK((again.data.values - s.data.values).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(again.means.cwiseAbs().maxCoeff() < 1e-15);
  CHECK((again.scales.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("constant columns are reported by position and name") {
  Eigen::MatrixXd v(4, 3);
  v << 1, 2, 3, 2, 2, 1, 3, 2, 0, 4, 2, 5;
  DataMatrix x(v, {"a", "b", "c"});
  try {
    standardize(x);
    FAIL("expected ConstantColumn");
  } catch (const ConstantColumn& e) {
    CHECK(e.column() == 1);
    CHECK(e.name() == "b");
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
  CHECK_THROWS_AS(estimate_lasso(x, EstimationConfig{}), ConstantColumn);
  CHECK_THROWS_AS(standardize(DataMatrix(Eigen::MatrixXd::Ones(1, 2))), DomainError);
}

TEST_CASE("normal quantile matches the bisection oracle") {
  CHECK(normal_upper_quantile(0.5) == 0.0);
  CHECK(normal_upper_quantile(0.025) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_upper_quantile(0.001) == doctest::Approx(3.090232306167813).epsilon(1e-13));
  for (double q : {0.4, 0.1, 1e-3, 1e-5, 1e-8, 1e-12, 1e-16})
    CHECK(normal_upper_quantile(q) == doctest::Approx(oracle::upper_quantile(q)).epsilon(1e-12));
  for (double q : {0.0, -0.1, 0.6, 1.0}) CHECK_THROWS_AS(normal_upper_quantile(q), DomainError);
}

TEST_CASE("tuning parameter") {
  CHECK(lambda_for_row(2, 50, 100, 0.1) == doctest::Approx(0.2 * oracle::upper_quantile(0.001)).epsilon(1e-12));
  CHECK(lambda_for_row(2, 50, 100, 0.1) == doctest::Approx(0.61805).epsilon(1e-5));
  for (std::size_t i = 2; i <= 50; i += 7)
    CHECK(lambda_for_row(i, 50, 400, 0.05) == doctest::Approx(0.5 * lambda_for_row(i, 50, 100, 0.05)).epsilon(1e-15));
  for (std::size_t i = 3; i <= 200; ++i) CHECK(lambda_for_row(i, 200, 100, 0.1) >= lambda_for_row(i - 1, 200, 100, 0.1));
  CHECK_THROWS_AS(lambda_for_row(1, 10, 100, 0.1), DomainError);
  CHECK_THROWS_AS(lambda_for_row(2, 10, 0, 0.1), DomainError);
  CHECK_THROWS_AS(lambda_for_row(2, 10, 100, 0.0), DomainError);
}

TEST_CASE("configuration validation") {
  EstimationConfig c;
  CHECK_NOTHROW(c.validate());
  for (auto mutate : {+[](EstimationConfig& x) { x.alpha = 1.0; }, +[](EstimationConfig& x) { x.alpha = 0.0; },
                      +[](EstimationConfig& x) { x.alpha0 = 1.2; }, +[](EstimationConfig& x) { x.gamma = 0.0; },
                      +[](EstimationConfig& x) { x.tol = -1.0; }, +[](EstimationConfig& x) { x.max_sweeps = 0; }}) {
    EstimationConfig bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }
  CHECK(parse_penalty("alasso") == Penalty::adaptive_lasso);
  CHECK(parse_penalty("adaptive_lasso") == Penalty::adaptive_lasso);
  CHECK(penalty_name(Penalty::lasso) == "lasso");
  CHECK_THROWS_AS(parse_penalty("ridge"), DomainError);
}

TEST_CASE("chain recovery") {
  int exact = 0;
  double shd_lasso = 0.0, shd_alasso = 0.0;
  const EdgeSet truth = skeleton(chain(3, 0.8), 0.0);
  const int seeds = 1000;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const DataMatrix x = chain_data(200, seed);
    const EstimateResult l = audited_estimate(x, config(Penalty::lasso));
    const EstimateResult a = audited_estimate(x, config(Penalty::adaptive_lasso));
    if (l.edges() == truth) ++exact;
    shd_lasso += static_cast<double>(evaluate(truth, l.edges(), 3).shd);
    shd_alasso += static_cast<double>(evaluate(truth, a.edges(), 3).shd);
  }
  // 95% exact recovery, less three binomial standard errors
  CHECK(static_cast<double>(exact) / seeds >= 0.95 - 3.0 * std::sqrt(0.95 * 0.05 / seeds));
  CHECK(shd_alasso <= shd_lasso);
}

TEST_CASE("independent columns rarely produce an edge") {
  int any = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    const DagModel m{AdjacencyMatrix(10), Eigen::VectorXd::Ones(10)};
    const DataMatrix x = sample_data(m, 100, NoiseSpec::gaussian(), 500 + static_cast<std::uint64_t>(r));
    if (!audited_estimate(x, config(Penalty::lasso)).edges().empty()) ++any;
  }
  // alpha plus three binomial standard errors
  CHECK(static_cast<double>(any) / runs <= 0.1 + 3.0 * std::sqrt(0.09 / runs));
}

TEST_CASE("scaled copy of a column") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  Eigen::MatrixXd v(10000, 2);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    v(i, 0) = d(rng);
    v(i, 1) = 3.0 * v(i, 0) + 2.0;
  }
  const EstimateResult r = audited_estimate(DataMatrix(v), config(Penalty::lasso));
  CHECK(r.edges().contains(0, 1));
  CHECK(r.adjacency(1, 0) > 0.95);
  CHECK(r.adjacency(1, 0) <= 1.0);
}

TEST_CASE("adaptive weights") {
  AdjacencyMatrix a(3);
  a.set(1, 0, 0.5);
  a.set(2, 0, 2.0);
  a.set(2, 1, -0.25);
  const Eigen::MatrixXd w = adaptive_weights(a, 1.0);
  CHECK(w(1, 0) == 2.0);
  CHECK(w(2, 0) == 1.0);
  CHECK(w(2, 1) == 4.0);
  CHECK(adaptive_weights(a, 2.0)(2, 1) == 16.0);
  CHECK(std::isinf(adaptive_weights(AdjacencyMatrix(3), 1.0)(2, 1)));
}

TEST_CASE("adaptive lasso support is nested in its initial fit") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DataMatrix x = sparse_data(30, 30, 100, seed);
    const EstimateResult r = audited_estimate(x, config(Penalty::adaptive_lasso));
    REQUIRE(r.initial.has_value());
    CHECK(skeleton(r.adjacency, 0.0).subset_of(skeleton(*r.initial, 0.0)));
    const EstimateResult l = audited_estimate(x, [] {
      EstimationConfig c;
      c.alpha = 0.5;
      return c;
    }());
    CHECK(l.adjacency == *r.initial);
  }
}

TEST_CASE("row i depends only on the first i columns") {
  const DataMatrix x = sparse_data(15, 15, 80, 3);
  for (Penalty pen : {Penalty::lasso, Penalty::adaptive_lasso}) {
    const EstimateResult base = audited_estimate(x, config(pen));
    for (std::size_t col : {5u, 10u, 14u}) {
      DataMatrix y = x;
      for (double& v : y.column(col)) v = v * -2.0 + std::sin(v);
      const EstimateResult r = audited_estimate(y, config(pen));
      for (std::size_t i = 0; i < col; ++i)
        CHECK(r.adjacency.matrix().row(static_cast<Eigen::Index>(i)) == base.adjacency.matrix().row(static_cast<Eigen::Index>(i)));
    }
  }
}

TEST_CASE("affine rescaling of columns leaves the standardized estimate unchanged") {
  const DataMatrix x = sparse_data(12, 12, 60, 4);
  DataMatrix y = x;
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (double& v : y.column(j)) v = v * (0.5 + static_cast<double>(j)) + 10.0 * static_cast<double>(j);
  for (Penalty pen : {Penalty::lasso, Penalty::adaptive_lasso}) {
    const EstimateResult a = audited_estimate(x, config(pen));
    const EstimateResult b = audited_estimate(y, config(pen));
    CHECK((a.adjacency.matrix() - b.adjacency.matrix()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(a.edges() == b.edges());
  }
}

TEST_CASE("estimates are deterministic and independent of the thread count") {
  const DataMatrix x = sparse_data(40, 40, 100, 5);
  for (Penalty pen : {Penalty::lasso, Penalty::adaptive_lasso}) {
    EstimationConfig cfg = config(pen);
    const EstimateResult a = audited_estimate(x, cfg);
    const EstimateResult b = audited_estimate(x, cfg);
    CHECK(a.adjacency == b.adjacency);
    cfg.threads = 4;
    const EstimateResult c = audited_estimate(x, cfg);
    CHECK(a.adjacency == c.adjacency);
  }
}

TEST_CASE("row diagnostics and original scale") {
  const DataMatrix x = sparse_data(8, 8, 50, 6);
  const EstimateResult r = audited_estimate(x, config(Penalty::lasso));
  REQUIRE(r.rows.size() == 7);
  for (const RowDiagnostics& d : r.rows) {
    CHECK(d.converged);
    CHECK(d.lambda == lambda_for_row(d.row + 1, 8, 50, 0.1));
  }
  CHECK(r.adjacency.matrix().row(0).isZero(0.0));
  const AdjacencyMatrix o = to_original_scale(r);
  for (std::size_t i = 1; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j)
      CHECK(o(i, j) == doctest::Approx(r.adjacency(i, j) * r.scales[static_cast<Eigen::Index>(i)] /
                                       r.scales[static_cast<Eigen::Index>(j)]));
}

TEST_CASE("the audit catches a tampered estimate") {
  const DataMatrix x = sparse_data(10, 10, 60, 7);
  EstimateResult r = audited_estimate(x, config(Penalty::lasso));
  Eigen::MatrixXd m = r.adjacency.matrix();
  m(5, 2) += 0.3;
  r.adjacency = AdjacencyMatrix(m);
  const KktAudit audit = kkt_audit(x, r, 1e-6);
  CHECK(!audit.pass);
  CHECK(audit.worst_row == 5);
}

TEST_CASE("a single variable is rejected") {
  Eigen::MatrixXd v(5, 1);
  v << 1, 2, 3, 4, 6;
  CHECK_THROWS_AS(estimate(DataMatrix(v), config(Penalty::adaptive_lasso)), DomainError);
}

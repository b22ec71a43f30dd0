#pragma once
// Structure estimation of a DAG with known variable ordering: each node is
// regressed on its predecessors with a (weighted) lasso penalty, one
// independent subproblem per row of the adjacency matrix.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pendag/data.hpp"
#include "pendag/graph.hpp"
#include "pendag/solver.hpp"

namespace pendag {

enum class Penalty { lasso, adaptive_lasso };

std::string penalty_name(Penalty p);       // "lasso" / "alasso"
Penalty parse_penalty(const std::string&);  // accepts lasso, alasso, adaptive_lasso

struct EstimationConfig {
  Penalty penalty = Penalty::lasso;
  double alpha = 0.10;   // error level for the tuning parameter
  double alpha0 = 0.50;  // level for the initial fit of the adaptive lasso
  double gamma = 1.0;    // adaptive weight power
  double tol = 1e-7;
  int max_sweeps = 10000;
  double edge_threshold = kDefaultEdgeThreshold;
  unsigned threads = 1;  // row subproblems solved concurrently when > 1

  void validate() const;
};

struct Standardized {
  DataMatrix data;
  Eigen::VectorXd means;
  Eigen::VectorXd scales;  // sqrt(n^{-1} sum (x - mean)^2)
};

// Each column centered and scaled to n^{-1}||x||^2 = 1.
// Throws ConstantColumn, DomainError when n < 2.
Standardized standardize(const DataMatrix& x);

// Z with Phi(Z) = 1 - q, for q in (0, 0.5]. Throws DomainError otherwise.
double normal_upper_quantile(double q);

// 2 n^{-1/2} Z*_{alpha / (2 p (row - 1))}, with `row` the 1-based index of
// the node being regressed (row >= 2, so it has row - 1 predecessors).
double lambda_for_row(std::size_t row, std::size_t p, std::size_t n, double alpha);

struct RowDiagnostics {
  std::size_t row = 0;  // 0-based node index
  double lambda = 0.0;
  int iterations = 0;
  bool converged = true;
  double kkt_worst = 0.0;
};

struct EstimateResult {
  AdjacencyMatrix adjacency{1};  // standardized scale
  std::vector<RowDiagnostics> rows;
  EstimationConfig config;
  bool partial = false;  // some row failed to converge
  Eigen::VectorXd means;
  Eigen::VectorXd scales;
  // Adaptive lasso only: the initial lasso fit that produced the weights.
  std::optional<AdjacencyMatrix> initial;
  std::vector<RowDiagnostics> initial_rows;

  EdgeSet edges() const { return skeleton(adjacency, config.edge_threshold); }
};

// w_ij = max(1, |initial_ij|^{-gamma}); +inf where initial_ij == 0.
// Entries on and above the diagonal are left at +inf.
Eigen::MatrixXd adaptive_weights(const AdjacencyMatrix& initial, double gamma);

EstimateResult estimate_lasso(const DataMatrix& x, const EstimationConfig& cfg);
EstimateResult estimate_adaptive_lasso(const DataMatrix& x, const EstimationConfig& cfg);
// Dispatches on cfg.penalty.
EstimateResult estimate(const DataMatrix& x, const EstimationConfig& cfg);

// Coefficients in the units of the original columns: A_ij * scale_i / scale_j.
AdjacencyMatrix to_original_scale(const EstimateResult& r);

struct KktAudit {
  bool pass = true;
  double worst = 0.0;
  std::size_t worst_row = 0;
};

// Re-derives every row subproblem from `x` and the lambdas/weights recorded in
// `r`, then checks the optimality conditions of the returned rows (and of
// the initial fit, for the adaptive lasso) at `tol`.
KktAudit kkt_audit(const DataMatrix& x, const EstimateResult& r, double tol);

}  // namespace pendag

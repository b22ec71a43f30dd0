#pragma once
// Simulation grids: random DAGs, sampled data, estimation and scoring for
// every cell of a parameter grid, replicated with derived seeds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pendag/estimator.hpp"
#include "pendag/metrics.hpp"
#include "pendag/synth.hpp"

namespace pendag::cli {

struct ExperimentSpec {
  std::vector<std::size_t> p{50};
  std::vector<std::size_t> n{100};
  std::vector<double> rho{0.8};
  std::vector<NoiseSpec> noise{NoiseSpec::gaussian()};
  std::vector<Penalty> penalty{Penalty::lasso, Penalty::adaptive_lasso};
  std::vector<double> alpha{0.10};
  std::vector<double> gamma{1.0};
  std::optional<std::size_t> edges;  // defaults to n
  std::size_t max_neighborhood = 5;
  double alpha0 = 0.50;
  double tol = 1e-7;
  int max_sweeps = 10000;
  double threshold = kDefaultEdgeThreshold;
  std::size_t replicates = 10;
  std::uint64_t base_seed = 1;
  bool permute_order = false;
  bool fixed_dag = false;  // one DAG per (p, edges, rho); only the data varies
  bool audit_kkt = false;  // re-check optimality of every estimate
  unsigned threads = 1;

  // Throws DomainError/InfeasibleSpec for invalid grids.
  void validate() const;
};

// Everything that determines the generated data.
struct DataCell {
  std::size_t p, n;
  double rho;
  NoiseSpec noise;
  std::size_t edges;
};

struct EstimatorCell {
  Penalty penalty;
  double alpha, gamma;
};

struct ReplicateRecord {
  std::uint64_t seed = 0;
  std::size_t true_edges = 0;
  ReplicateMetrics metrics;
  bool converged = true;
  double kkt_worst = 0.0;  // only filled when audit_kkt
};

struct CellResult {
  std::size_t index = 0;
  std::size_t data_index = 0;
  DataCell data;
  EstimatorCell estimator;
  std::vector<ReplicateRecord> replicates;
  InclusionMatrix inclusion;
  MetricsSummary summary;
  std::size_t partial_count = 0;
  std::optional<DagModel> fixed_truth;
};

std::vector<DataCell> data_cells(const ExperimentSpec& spec);
std::vector<EstimatorCell> estimator_cells(const ExperimentSpec& spec);

// Seed of replicate r in data cell c. Penalties and tuning values share it,
// so all estimators of a data cell see identical DAGs and samples.
std::uint64_t replicate_seed(std::uint64_t base, std::size_t data_cell, std::size_t replicate);

// Seed of the shared DAG when fixed_dag is set. Depends on p, edges and rho
// only, so cells that differ in n or noise use the same graph.
std::uint64_t fixed_dag_seed(std::uint64_t base, const DataCell& cell);

// Cells ordered data-cell major, estimator-cell minor.
std::vector<CellResult> run_experiment(const ExperimentSpec& spec);

}  // namespace pendag::cli

#pragma once
// Random sparse DAGs and samples from the linear latent variable model
// X_i = sum_{j in pa(i)} rho_ij X_j + sigma_i Z_i.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pendag/data.hpp"
#include "pendag/graph.hpp"

namespace pendag {

struct DagGenSpec {
  std::size_t p = 0;
  std::size_t target_edges = 0;
  std::size_t max_neighborhood = 5;
  double edge_weight = 0.8;
  // When set, weights are drawn uniformly from [low, high] instead of edge_weight.
  std::optional<std::pair<double, double>> uniform_weight;

  // Throws InfeasibleSpec or DomainError.
  void validate() const;
};

struct NoiseSpec {
  enum class Kind { gaussian, student_t, mixture };
  Kind kind = Kind::gaussian;
  int df = 4;                   // student_t only
  double normal_weight = 0.5;   // mixture only: P(draw from N(0,1)); else standardized t(3)

  static NoiseSpec gaussian() { return {}; }
  static NoiseSpec student_t(int df) { return {Kind::student_t, df, 0.5}; }
  static NoiseSpec mixture(double w = 0.5) { return {Kind::mixture, 3, w}; }

  void validate() const;
  // "gaussian", "t:DF" or "mixture:W"; round-trips with parse_noise.
  std::string to_string() const;
};

// Throws DomainError on unknown syntax.
NoiseSpec parse_noise(const std::string& text);

// splitmix64 finalizer over the combined inputs; used to derive independent
// per-cell / per-replicate streams from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Uniform edge placement over the lower triangle with a per-node degree cap.
// Places spec.target_edges edges unless the cap blocks it, in which case the
// largest placement found is returned; check adjacency.nonzeros().
DagModel random_dag(const DagGenSpec& spec, std::uint64_t seed);

// n rows from the model with unit-variance noise scaled by noise_sd.
DataMatrix sample_data(const DagModel& m, std::size_t n, const NoiseSpec& noise, std::uint64_t seed);

// Raw standardized noise draws (n x p), exposed for moment checks.
Eigen::MatrixXd sample_noise(std::size_t n, std::size_t p, const NoiseSpec& noise, std::uint64_t seed);

struct PermutedData {
  DataMatrix data;
  // data column k is original column permutation[k]
  std::vector<std::size_t> permutation;
};

PermutedData permute_columns(const DataMatrix& x, std::uint64_t seed);

}  // namespace pendag

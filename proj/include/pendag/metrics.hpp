#pragma once
// Edge-level recovery metrics over the p(p-1)/2 node pairs of a DAG with
// known ordering, and edge inclusion frequencies across replicates.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "pendag/graph.hpp"

namespace pendag {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Throws IndexOutOfRange if an edge references a node >= p.
ConfusionCounts confusion(const EdgeSet& truth, const EdgeSet& estimate, std::size_t p);

std::size_t shd(const ConfusionCounts& c);
// 0 when any factor of the denominator is 0.
double mcc(const ConfusionCounts& c);
// fp / (fp + tn), 0 when there are no negatives.
double fp_rate(const ConfusionCounts& c);
// tp / (tp + fn), 0 when there are no positives.
double tp_rate(const ConfusionCounts& c);

struct ReplicateMetrics {
  ConfusionCounts counts;
  std::size_t shd = 0;
  double mcc = 0.0;
  double fp_rate = 0.0;
  double tp_rate = 0.0;
};

ReplicateMetrics evaluate(const EdgeSet& truth, const EdgeSet& estimate, std::size_t p);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample sd (n - 1); 0 for a single value
};

MeanSd mean_sd(std::span<const double> values);

struct MetricsSummary {
  std::size_t replicates = 0;
  MeanSd shd, mcc, fp_rate, tp_rate, fp, tp;
};

// Computed only from the per-replicate rows.
MetricsSummary summarize(std::span<const ReplicateMetrics> reps);

struct InclusionMatrix {
  Eigen::MatrixXd frequency;  // strictly lower triangular, entries in [0, 1]
  std::size_t count = 0;      // number of estimates aggregated
};

// Entry (i, j) is the fraction of estimates with |A_ij| > threshold.
// Throws EmptyInput or DimensionMismatch.
InclusionMatrix inclusion_matrix(std::span<const AdjacencyMatrix> estimates,
                                 double threshold = kDefaultEdgeThreshold);

// Count-weighted average of two batches over the same p.
InclusionMatrix merge(const InclusionMatrix& a, const InclusionMatrix& b);

// An estimate made on columns reordered by `permutation` (estimate column k
// is original node permutation[k]) expressed in the original labels. Edge
// directions are dropped: each pair lands below the diagonal.
AdjacencyMatrix to_original_labels(const AdjacencyMatrix& permuted, std::span<const std::size_t> permutation);

}  // namespace pendag

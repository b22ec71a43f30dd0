#include "pendag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pendag/errors.hpp"

namespace pendag {

ConfusionCounts confusion(const EdgeSet& truth, const EdgeSet& estimate, std::size_t p) {
  for (const EdgeSet* s : {&truth, &estimate})
    for (const Edge& e : *s)
      if (e.child >= p)
        throw IndexOutOfRange("edge " + std::to_string(e.parent + 1) + "->" + std::to_string(e.child + 1) +
                              " references a node beyond p=" + std::to_string(p));
  ConfusionCounts c;
  for (const Edge& e : estimate) {
    if (truth.contains(e.parent, e.child))
      ++c.tp;
    else
      ++c.fp;
  }
  c.fn = truth.size() - c.tp;
  c.tn = p * (p - 1) / 2 - c.tp - c.fp - c.fn;
  return c;
}

std::size_t shd(const ConfusionCounts& c) { return c.fp + c.fn; }

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double fp_rate(const ConfusionCounts& c) {
  const std::size_t neg = c.fp + c.tn;
  return neg == 0 ? 0.0 : static_cast<double>(c.fp) / static_cast<double>(neg);
}

double tp_rate(const ConfusionCounts& c) {
  const std::size_t pos = c.tp + c.fn;
  return pos == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(pos);
}

ReplicateMetrics evaluate(const EdgeSet& truth, const EdgeSet& estimate, std::size_t p) {
  ReplicateMetrics m;
  m.counts = confusion(truth, estimate, p);
  m.shd = shd(m.counts);
  m.mcc = mcc(m.counts);
  m.fp_rate = fp_rate(m.counts);
  m.tp_rate = tp_rate(m.counts);
  return m;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

MetricsSummary summarize(std::span<const ReplicateMetrics> reps) {
  MetricsSummary s;
  s.replicates = reps.size();
  auto column = [&](auto get) {
    std::vector<double> v;
    v.reserve(reps.size());
    for (const auto& r : reps) v.push_back(static_cast<double>(get(r)));
    return mean_sd(v);
  };
  s.shd = column([](const ReplicateMetrics& r) { return r.shd; });
  s.mcc = column([](const ReplicateMetrics& r) { return r.mcc; });
  s.fp_rate = column([](const ReplicateMetrics& r) { return r.fp_rate; });
  s.tp_rate = column([](const ReplicateMetrics& r) { return r.tp_rate; });
  s.fp = column([](const ReplicateMetrics& r) { return r.counts.fp; });
  s.tp = column([](const ReplicateMetrics& r) { return r.counts.tp; });
  return s;
}

InclusionMatrix inclusion_matrix(std::span<const AdjacencyMatrix> estimates, double threshold) {
  if (estimates.empty()) throw EmptyInput("inclusion matrix needs at least one estimate");
  if (!(threshold >= 0.0)) throw DomainError("threshold must be nonnegative");
  const auto p = static_cast<Eigen::Index>(estimates.front().size());
  InclusionMatrix out{Eigen::MatrixXd::Zero(p, p), estimates.size()};
  for (const AdjacencyMatrix& a : estimates) {
    if (static_cast<Eigen::Index>(a.size()) != p)
      throw DimensionMismatch("estimates do not share the same node count");
    out.frequency += (a.matrix().array().abs() > threshold).cast<double>().matrix();
  }
  out.frequency /= static_cast<double>(estimates.size());
  return out;
}

InclusionMatrix merge(const InclusionMatrix& a, const InclusionMatrix& b) {
  if (a.frequency.rows() != b.frequency.rows()) throw DimensionMismatch("inclusion matrices differ in size");
  const double total = static_cast<double>(a.count + b.count);
  if (total == 0.0) throw EmptyInput("both inclusion matrices are empty");
  return {(static_cast<double>(a.count) * a.frequency + static_cast<double>(b.count) * b.frequency) / total,
          a.count + b.count};
}

AdjacencyMatrix to_original_labels(const AdjacencyMatrix& permuted, std::span<const std::size_t> permutation) {
  const std::size_t p = permuted.size();
  if (permutation.size() != p) throw DimensionMismatch("permutation length does not match node count");
  std::vector<bool> seen(p, false);
  for (std::size_t k : permutation) {
    if (k >= p || seen[k]) throw DomainError("not a permutation");
    seen[k] = true;
  }
  AdjacencyMatrix out(p);
  for (std::size_t i = 1; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double w = permuted(i, j);
      if (w == 0.0) continue;
      const std::size_t a = permutation[i];
      const std::size_t b = permutation[j];
      out.set(std::max(a, b), std::min(a, b), w);
    }
  }
  return out;
}

}  // namespace pendag

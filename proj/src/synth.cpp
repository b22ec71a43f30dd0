#include "pendag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pendag/errors.hpp"
#include "pendag/kernels.hpp"

namespace pendag {

namespace {

constexpr int kPlacementAttempts = 32;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class NoiseDraw {
 public:
  explicit NoiseDraw(const NoiseSpec& spec)
      : spec_(spec),
        t_(spec.kind == NoiseSpec::Kind::mixture ? 3.0 : static_cast<double>(spec.df)),
        t_scale_(1.0 / std::sqrt(t_.n() / (t_.n() - 2.0))),
        pick_(spec.normal_weight) {}

  double operator()(std::mt19937_64& rng) {
    switch (spec_.kind) {
      case NoiseSpec::Kind::gaussian:
        return normal_(rng);
      case NoiseSpec::Kind::student_t:
        return t_(rng) * t_scale_;
      case NoiseSpec::Kind::mixture:
        return pick_(rng) ? normal_(rng) : t_(rng) * t_scale_;
    }
    return 0.0;
  }

 private:
  NoiseSpec spec_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> t_;
  double t_scale_;
  std::bernoulli_distribution pick_;
};

}  // namespace

void DagGenSpec::validate() const {
  if (p == 0) throw DomainError("p must be positive");
  if (max_neighborhood == 0) throw DomainError("max_neighborhood must be at least 1");
  if (target_edges == 0) throw DomainError("target_edges must be positive");
  if (uniform_weight && !(uniform_weight->first <= uniform_weight->second))
    throw DomainError("uniform weight interval is empty");
  if (!std::isfinite(edge_weight)) throw DomainError("edge_weight must be finite");
  const std::size_t possible = p * (p - 1) / 2;
  if (target_edges > possible)
    throw InfeasibleSpec("target_edges " + std::to_string(target_edges) + " exceeds the " +
                         std::to_string(possible) + " possible edges for p=" + std::to_string(p));
  const std::size_t cap = p * max_neighborhood / 2;
  if (target_edges > cap)
    throw InfeasibleSpec("target_edges " + std::to_string(target_edges) +
                         " exceeds the degree-cap limit " + std::to_string(cap));
}

void NoiseSpec::validate() const {
  if (kind == Kind::student_t && df < 3)
    throw DomainError("student t noise needs df >= 3 for unit-variance scaling");
  if (kind == Kind::mixture && !(normal_weight >= 0.0 && normal_weight <= 1.0))
    throw DomainError("mixture weight must lie in [0, 1]");
}

std::string NoiseSpec::to_string() const {
  switch (kind) {
    case Kind::gaussian:
      return "gaussian";
    case Kind::student_t:
      return "t:" + std::to_string(df);
    case Kind::mixture:
      return "mixture:" + format_double(normal_weight);
  }
  return "gaussian";
}

NoiseSpec parse_noise(const std::string& text) {
  NoiseSpec out;
  if (text == "gaussian" || text == "normal") {
    out = NoiseSpec::gaussian();
  } else if (text.rfind("t:", 0) == 0) {
    std::size_t used = 0;
    int df = 0;
    try {
      df = std::stoi(text.substr(2), &used);
    } catch (const std::exception&) {
      throw DomainError("bad t noise spec '" + text + "'");
    }
    if (used != text.size() - 2) throw DomainError("bad t noise spec '" + text + "'");
    out = NoiseSpec::student_t(df);
  } else if (text == "mixture") {
    out = NoiseSpec::mixture();
  } else if (text.rfind("mixture:", 0) == 0) {
    try {
      out = NoiseSpec::mixture(parse_double(text.substr(8)));
    } catch (const ParseError&) {
      throw DomainError("bad mixture noise spec '" + text + "'");
    }
  } else {
    throw DomainError("unknown noise kind '" + text + "' (expected gaussian, t:DF or mixture:W)");
  }
  out.validate();
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

DagModel random_dag(const DagGenSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t p = spec.p;

  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (child, parent)
  slots.reserve(p * (p - 1) / 2);
  for (std::size_t i = 1; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) slots.emplace_back(i, j);

  std::mt19937_64 rng(derive_seed(seed, 0x7261ULL));
  std::vector<std::pair<std::size_t, std::size_t>> best;
  for (int attempt = 0; attempt < kPlacementAttempts && best.size() < spec.target_edges; ++attempt) {
    std::shuffle(slots.begin(), slots.end(), rng);
    std::vector<std::size_t> degree(p, 0);
    std::vector<std::pair<std::size_t, std::size_t>> placed;
    for (const auto& [child, parent] : slots) {
      if (placed.size() == spec.target_edges) break;
      if (degree[child] >= spec.max_neighborhood || degree[parent] >= spec.max_neighborhood) continue;
      ++degree[child];
      ++degree[parent];
      placed.emplace_back(child, parent);
    }
    if (placed.size() > best.size()) best = std::move(placed);
  }

  std::sort(best.begin(), best.end());
  AdjacencyMatrix a(p);
  std::uniform_real_distribution<double> weight_draw(
      spec.uniform_weight ? spec.uniform_weight->first : 0.0,
      spec.uniform_weight ? spec.uniform_weight->second : 1.0);
  for (const auto& [child, parent] : best)
    a.set(child, parent, spec.uniform_weight ? weight_draw(rng) : spec.edge_weight);

  return DagModel{std::move(a), Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p))};
}

Eigen::MatrixXd sample_noise(std::size_t n, std::size_t p, const NoiseSpec& noise, std::uint64_t seed) {
  noise.validate();
  std::mt19937_64 rng(derive_seed(seed, 0x6e6f6973ULL));
  NoiseDraw draw(noise);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = draw(rng);
  return z;
}

DataMatrix sample_data(const DagModel& m, std::size_t n, const NoiseSpec& noise, std::uint64_t seed) {
  m.validate();
  if (n == 0) throw DomainError("sample size must be positive");
  const std::size_t p = m.size();
  Eigen::MatrixXd x = sample_noise(n, p, noise, seed);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < p; ++i) {
    const auto ci = static_cast<Eigen::Index>(i);
    x.col(ci) *= m.noise_sd[ci];
    for (std::size_t j = 0; j < i; ++j) {
      const double rho = m.adjacency(i, j);
      if (rho != 0.0) k.axpy(rho, x.col(static_cast<Eigen::Index>(j)).data(), x.col(ci).data(), n);
    }
  }
  return DataMatrix(std::move(x));
}

PermutedData permute_columns(const DataMatrix& x, std::uint64_t seed) {
  std::vector<std::size_t> perm(x.cols());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, 0x7065726dULL));
  std::shuffle(perm.begin(), perm.end(), rng);
  return {reorder_columns(x, perm), std::move(perm)};
}

}  // namespace pendag

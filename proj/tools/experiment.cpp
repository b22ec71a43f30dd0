#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <thread>

#include "pendag/errors.hpp"

namespace pendag::cli {

namespace {

constexpr std::uint64_t kDagStream = 0x646167;
constexpr std::uint64_t kDataStream = 0x64617461;
constexpr std::uint64_t kPermStream = 0x7065726d;
constexpr std::uint64_t kFixedDagStream = 0x66697864;

DagGenSpec dag_spec(const ExperimentSpec& spec, const DataCell& cell) {
  DagGenSpec g;
  g.p = cell.p;
  g.target_edges = cell.edges;
  g.max_neighborhood = spec.max_neighborhood;
  g.edge_weight = cell.rho;
  return g;
}

EstimationConfig config_for(const ExperimentSpec& spec, const EstimatorCell& e) {
  EstimationConfig cfg;
  cfg.penalty = e.penalty;
  cfg.alpha = e.alpha;
  cfg.alpha0 = spec.alpha0;
  cfg.gamma = e.gamma;
  cfg.tol = spec.tol;
  cfg.max_sweeps = spec.max_sweeps;
  cfg.edge_threshold = spec.threshold;
  return cfg;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  if (p.empty() || n.empty() || rho.empty() || noise.empty() || penalty.empty() || alpha.empty() ||
      gamma.empty())
    throw DomainError("every grid dimension needs at least one value");
  for (const auto& nz : noise) nz.validate();
  for (const auto& cell : data_cells(*this)) {
    if (cell.n < 2) throw DomainError("n must be at least 2");
    if (cell.p < 2) throw DomainError("p must be at least 2");
    dag_spec(*this, cell).validate();
  }
  for (const auto& e : estimator_cells(*this)) config_for(*this, e).validate();
}

std::vector<DataCell> data_cells(const ExperimentSpec& spec) {
  std::vector<DataCell> out;
  for (std::size_t p : spec.p)
    for (std::size_t n : spec.n)
      for (double rho : spec.rho)
        for (const NoiseSpec& nz : spec.noise) out.push_back({p, n, rho, nz, spec.edges.value_or(n)});
  return out;
}

std::vector<EstimatorCell> estimator_cells(const ExperimentSpec& spec) {
  std::vector<EstimatorCell> out;
  for (Penalty pen : spec.penalty)
    for (double a : spec.alpha)
      for (double g : spec.gamma) out.push_back({pen, a, g});
  return out;
}

std::uint64_t fixed_dag_seed(std::uint64_t base, const DataCell& cell) {
  return derive_seed(derive_seed(base, kFixedDagStream, cell.p), cell.edges, std::bit_cast<std::uint64_t>(cell.rho));
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t data_cell, std::size_t replicate) {
  return derive_seed(base, data_cell, replicate);
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto dcells = data_cells(spec);
  const auto ecells = estimator_cells(spec);
  const std::size_t reps = spec.replicates;

  std::vector<CellResult> cells;
  std::vector<std::optional<DagModel>> fixed(dcells.size());
  for (std::size_t d = 0; d < dcells.size(); ++d) {
    if (spec.fixed_dag) fixed[d] = random_dag(dag_spec(spec, dcells[d]), fixed_dag_seed(spec.base_seed, dcells[d]));
    for (std::size_t e = 0; e < ecells.size(); ++e) {
      CellResult c;
      c.index = cells.size();
      c.data_index = d;
      c.data = dcells[d];
      c.estimator = ecells[e];
      c.replicates.resize(reps);
      c.fixed_truth = fixed[d];
      cells.push_back(std::move(c));
    }
  }
  // estimates[cell][replicate], in original node labels
  std::vector<std::vector<AdjacencyMatrix>> estimates(cells.size(),
                                                      std::vector<AdjacencyMatrix>(reps, AdjacencyMatrix(1)));

  auto run_job = [&](std::size_t job) {
    const std::size_t d = job / reps;
    const std::size_t r = job % reps;
    const DataCell& dc = dcells[d];
    const std::uint64_t seed = replicate_seed(spec.base_seed, d, r);
    const DagModel truth =
        spec.fixed_dag ? *fixed[d] : random_dag(dag_spec(spec, dc), derive_seed(seed, kDagStream));
    const EdgeSet true_edges = skeleton(truth.adjacency, 0.0);
    DataMatrix x = sample_data(truth, dc.n, dc.noise, derive_seed(seed, kDataStream));
    std::vector<std::size_t> perm;
    if (spec.permute_order) {
      PermutedData pd = permute_columns(x, derive_seed(seed, kPermStream));
      x = std::move(pd.data);
      perm = std::move(pd.permutation);
    }

    for (std::size_t e = 0; e < ecells.size(); ++e) {
      const std::size_t ci = d * ecells.size() + e;
      const EstimationConfig cfg = config_for(spec, ecells[e]);
      const EstimateResult est = estimate(x, cfg);
      AdjacencyMatrix a = spec.permute_order ? to_original_labels(est.adjacency, perm) : est.adjacency;

      ReplicateRecord rec;
      rec.seed = seed;
      rec.true_edges = true_edges.size();
      rec.metrics = evaluate(true_edges, skeleton(a, spec.threshold), dc.p);
      rec.converged = !est.partial;
      if (spec.audit_kkt) rec.kkt_worst = kkt_audit(x, est, 10.0 * spec.tol).worst;
      cells[ci].replicates[r] = rec;
      estimates[ci][r] = std::move(a);
    }
  };

  const std::size_t jobs = dcells.size() * reps;
  const std::size_t workers = std::clamp<std::size_t>(spec.threads, 1, jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      try {
        run_job(job);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CellResult& c = cells[ci];
    std::vector<ReplicateMetrics> m;
    for (const auto& rec : c.replicates) {
      m.push_back(rec.metrics);
      if (!rec.converged) ++c.partial_count;
    }
    c.summary = summarize(m);
    c.inclusion = inclusion_matrix(estimates[ci], spec.threshold);
  }
  return cells;
}

}  // namespace pendag::cli

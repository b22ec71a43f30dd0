#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "pendag/errors.hpp"
#include "pendag/kernels.hpp"
#include "pendag/report.hpp"

namespace pendag::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EstimatorFlags {
  std::string penalty = "lasso";
  double alpha = 0.10;
  double alpha0 = 0.50;
  double gamma = 1.0;
  double tol = 1e-7;
  int max_sweeps = 10000;
  double threshold = kDefaultEdgeThreshold;
};

void add_estimator_flags(CLI::App& cmd, EstimatorFlags& f) {
  cmd.add_option("--penalty", f.penalty, "lasso or alasso")->check(CLI::IsMember({"lasso", "alasso"}));
  cmd.add_option("--alpha", f.alpha, "error level of the tuning parameter");
  cmd.add_option("--alpha0", f.alpha0, "error level of the adaptive lasso initial fit");
  cmd.add_option("--gamma", f.gamma, "adaptive weight power");
  cmd.add_option("--tol", f.tol, "coordinate descent tolerance");
  cmd.add_option("--max-sweeps", f.max_sweeps, "coordinate descent sweep limit");
  cmd.add_option("--threshold", f.threshold, "edge inclusion threshold on |A_ij|");
}

EstimationConfig to_config(const EstimatorFlags& f) {
  EstimationConfig cfg;
  cfg.penalty = parse_penalty(f.penalty);
  cfg.alpha = f.alpha;
  cfg.alpha0 = f.alpha0;
  cfg.gamma = f.gamma;
  cfg.tol = f.tol;
  cfg.max_sweeps = f.max_sweeps;
  cfg.edge_threshold = f.threshold;
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Column order from a file of names or 1-based indices (commas or newlines).
std::vector<std::size_t> read_order(const std::string& path, const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open order file " + path);
  std::vector<std::size_t> order;
  std::string line;
  while (std::getline(in, line)) {
    for (const std::string& tok : split_csv_line(line)) {
      if (tok.empty()) continue;
      auto it = std::find(names.begin(), names.end(), tok);
      if (it != names.end()) {
        order.push_back(static_cast<std::size_t>(it - names.begin()));
        continue;
      }
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 1 || v > names.size())
        throw ParseError("order file: unknown column '" + tok + "'");
      order.push_back(v - 1);
    }
  }
  return order;
}

json manifest(const std::string& command, const std::vector<std::string>& args) {
  return {{"tool", version_string()},
          {"command", command},
          {"arguments", args},
          {"kernels", std::string(kernels::isa_name(kernels::active().isa))}};
}

int cmd_estimate(const std::string& input, const EstimatorFlags& flags, const std::string& order_file,
                 bool allow_partial, bool dense, bool original_scale, const std::string& out_dir,
                 unsigned threads, const std::vector<std::string>& args, std::ostream& out) {
  EstimationConfig cfg = to_config(flags);
  cfg.threads = threads;
  cfg.validate();
  DataMatrix x = read_csv_file(input);
  if (!order_file.empty()) x = reorder_columns(x, read_order(order_file, x.names));

  const EstimateResult r = estimate(x, cfg);
  const fs::path dir(out_dir);
  ensure_dir(dir);
  {
    auto f = open_out(dir / "edges.csv");
    // Edge decisions always come from the standardized scale.
    EdgeSet edges = r.edges();
    if (original_scale) {
      const AdjacencyMatrix orig = to_original_scale(r);
      EdgeSet rescaled;
      for (const Edge& e : edges) rescaled.insert({e.parent, e.child, orig(e.child, e.parent)});
      edges = std::move(rescaled);
    }
    write_edges_csv(f, edges, &x.names);
  }
  if (dense) {
    auto f = open_out(dir / "adjacency.csv");
    write_dense_csv(f, (original_scale ? to_original_scale(r) : r.adjacency).matrix(), x.names);
  }
  {
    json report = to_json(r, x.names);
    report["input"] = input;
    report["variables"] = x.names;
    report["n"] = x.rows();
    auto f = open_out(dir / "report.json");
    f << report.dump(2) << '\n';
  }
  {
    json m = manifest("estimate", args);
    m["config"] = to_json(cfg);
    auto f = open_out(dir / "manifest.json");
    f << m.dump(2) << '\n';
  }

  out << "estimated " << r.edges().size() << " edges over " << x.cols() << " variables ("
      << penalty_name(cfg.penalty) << ")\n";
  if (r.partial) {
    out << "warning: some row subproblems did not converge\n";
    if (!allow_partial) return kNotConverged;
  }
  return kSuccess;
}

int cmd_evaluate(const std::string& truth_file, const std::string& est_file, std::size_t p,
                 const std::string& names_file, const std::string& out_dir, std::ostream& out) {
  std::vector<std::string> names;
  if (!names_file.empty()) {
    std::ifstream in(names_file);
    if (!in) throw ParseError("cannot open " + names_file);
    std::string header;
    std::getline(in, header);
    names = split_csv_line(header);
    if (p == 0) p = names.size();
    if (names.size() != p) throw DimensionMismatch("--p does not match the header of " + names_file);
  }
  if (p < 2) throw DomainError("--p must be at least 2 (or give --names)");
  auto load = [&](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_edges_csv(in, p, names.empty() ? nullptr : &names);
  };
  const EdgeSet truth = load(truth_file);
  const EdgeSet est = load(est_file);
  const ReplicateMetrics m = evaluate(truth, est, p);
  json j = to_json(m);
  j["p"] = p;
  j["true_edges"] = truth.size();
  j["estimated_edges"] = est.size();
  out << j.dump(2) << '\n';
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto f = open_out(fs::path(out_dir) / "metrics.json");
    f << j.dump(2) << '\n';
  }
  return kSuccess;
}

std::string cell_label(const CellResult& c) {
  std::ostringstream s;
  s << "p=" << c.data.p << " n=" << c.data.n << " rho=" << format_double(c.data.rho)
    << " dist=" << c.data.noise.to_string() << " edges=" << c.data.edges << " penalty=" << penalty_name(c.estimator.penalty)
    << " alpha=" << format_double(c.estimator.alpha) << " gamma=" << format_double(c.estimator.gamma);
  return s.str();
}

json cell_params(const CellResult& c) {
  return {{"cell", c.index},
          {"p", c.data.p},
          {"n", c.data.n},
          {"rho", c.data.rho},
          {"dist", c.data.noise.to_string()},
          {"edges", c.data.edges},
          {"penalty", penalty_name(c.estimator.penalty)},
          {"alpha", c.estimator.alpha},
          {"gamma", c.estimator.gamma}};
}

int cmd_simulate(const ExperimentSpec& spec, bool allow_partial, const std::string& out_dir,
                 const std::vector<std::string>& args, std::ostream& out) {
  const fs::path dir(out_dir);
  ensure_dir(dir);
  ensure_dir(dir / "inclusion");
  const auto cells = run_experiment(spec);

  auto params_csv = [](const CellResult& c) {
    std::ostringstream s;
    s << c.index << ',' << c.data.p << ',' << c.data.n << ',' << format_double(c.data.rho) << ','
      << c.data.noise.to_string() << ',' << c.data.edges << ',' << penalty_name(c.estimator.penalty) << ','
      << format_double(c.estimator.alpha) << ',' << format_double(c.estimator.gamma);
    return s.str();
  };
  const std::string params_header = "cell,p,n,rho,dist,edges,penalty,alpha,gamma";

  {
    auto f = open_out(dir / "replicates.csv");
    f << params_header << ",replicate,seed,true_edges,tp,tn,fp,fn,shd,mcc,fp_rate,tp_rate,converged\n";
    for (const auto& c : cells) {
      for (std::size_t r = 0; r < c.replicates.size(); ++r) {
        const auto& rec = c.replicates[r];
        const auto& m = rec.metrics;
        f << params_csv(c) << ',' << r << ',' << rec.seed << ',' << rec.true_edges << ',' << m.counts.tp << ','
          << m.counts.tn << ',' << m.counts.fp << ',' << m.counts.fn << ',' << m.shd << ','
          << format_double(m.mcc) << ',' << format_double(m.fp_rate) << ',' << format_double(m.tp_rate) << ','
          << (rec.converged ? 1 : 0) << '\n';
      }
    }
  }
  {
    auto f = open_out(dir / "summary.csv");
    f << params_header
      << ",replicates,shd_mean,shd_sd,mcc_mean,mcc_sd,fp_rate_mean,fp_rate_sd,tp_rate_mean,tp_rate_sd,"
         "fp_mean,fp_sd,tp_mean,tp_sd,partial\n";
    for (const auto& c : cells) {
      const auto& s = c.summary;
      f << params_csv(c) << ',' << s.replicates;
      for (const MeanSd* v : {&s.shd, &s.mcc, &s.fp_rate, &s.tp_rate, &s.fp, &s.tp})
        f << ',' << format_double(v->mean) << ',' << format_double(v->sd);
      f << ',' << c.partial_count << '\n';
    }
  }
  {
    json j = json::array();
    for (const auto& c : cells) {
      json cell = cell_params(c);
      cell["summary"] = to_json(c.summary);
      cell["partial"] = c.partial_count;
      json reps = json::array();
      for (const auto& rec : c.replicates) {
        json rj = to_json(rec.metrics);
        rj["seed"] = rec.seed;
        rj["converged"] = rec.converged;
        reps.push_back(std::move(rj));
      }
      cell["replicates"] = std::move(reps);
      j.push_back(std::move(cell));
    }
    auto f = open_out(dir / "summary.json");
    f << j.dump(2) << '\n';
  }
  for (const auto& c : cells) {
    auto f = open_out(dir / "inclusion" / ("cell" + std::to_string(c.index) + ".csv"));
    write_dense_csv(f, c.inclusion.frequency, default_names(c.data.p));
    if (c.fixed_truth) {
      DagGenSpec g{c.data.p, c.data.edges, spec.max_neighborhood, c.data.rho, std::nullopt};
      write_dag((dir / "inclusion" / ("cell" + std::to_string(c.index) + "_truth")).string(), *c.fixed_truth,
                g, fixed_dag_seed(spec.base_seed, c.data));
    }
  }
  {
    json m = manifest("simulate", args);
    m["base_seed"] = spec.base_seed;
    m["replicates"] = spec.replicates;
    m["permute_order"] = spec.permute_order;
    m["fixed_dag"] = spec.fixed_dag;
    m["max_neighborhood"] = spec.max_neighborhood;
    m["alpha0"] = spec.alpha0;
    m["tol"] = spec.tol;
    m["max_sweeps"] = spec.max_sweeps;
    m["threshold"] = spec.threshold;
    json seeds = json::array();
    for (std::size_t d = 0; d < data_cells(spec).size(); ++d) {
      json row = json::array();
      for (std::size_t r = 0; r < spec.replicates; ++r) row.push_back(replicate_seed(spec.base_seed, d, r));
      seeds.push_back(std::move(row));
    }
    m["replicate_seeds"] = std::move(seeds);
    json grid = json::array();
    for (const auto& c : cells) grid.push_back(cell_params(c));
    m["cells"] = std::move(grid);
    auto f = open_out(dir / "manifest.json");
    f << m.dump(2) << '\n';
  }

  std::size_t partial = 0;
  for (const auto& c : cells) {
    out << cell_label(c) << "  SHD " << format_double(c.summary.shd.mean) << "  MCC "
        << format_double(c.summary.mcc.mean) << "  FP rate " << format_double(c.summary.fp_rate.mean) << '\n';
    partial += c.partial_count;
  }
  if (partial > 0) {
    out << "warning: " << partial << " estimates did not fully converge\n";
    if (!allow_partial) return kNotConverged;
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized likelihood estimation of sparse DAGs with a known variable ordering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate a DAG from a CSV whose columns follow the causal order");
  std::string input, order_file, est_out = ".";
  EstimatorFlags est_flags;
  bool est_allow_partial = false, dense = false, original_scale = false;
  unsigned est_threads = 1;
  est->add_option("input", input, "CSV file: header row, then one observation per row")->required();
  add_estimator_flags(*est, est_flags);
  est->add_option("--order", order_file, "file listing the columns (names or 1-based indices) in causal order");
  est->add_flag("--allow-partial", est_allow_partial, "exit 0 even if some rows did not converge");
  est->add_flag("--dense", dense, "also write the dense adjacency matrix");
  est->add_flag("--original-scale", original_scale, "report coefficients in the units of the input columns");
  est->add_option("--threads", est_threads, "row subproblems solved concurrently");
  est->add_option("--out", est_out, "output directory");

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "compare an estimated edge list against the true one");
  std::string truth_file, est_file, names_file, eval_out;
  std::size_t eval_p = 0;
  evl->add_option("truth", truth_file, "true edge list CSV")->required();
  evl->add_option("estimate", est_file, "estimated edge list CSV")->required();
  evl->add_option("--p", eval_p, "number of nodes");
  evl->add_option("--names", names_file, "CSV whose header gives the variable names (and p)");
  evl->add_option("--out", eval_out, "also write metrics.json into this directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a simulation grid and score the estimates");
  ExperimentSpec spec;
  std::vector<std::string> dists{"gaussian"}, penalties{"lasso", "alasso"};
  std::size_t edges = 0;
  bool sim_allow_partial = false;
  std::string sim_out;
  sim->add_option("--p", spec.p, "node counts")->delimiter(',');
  sim->add_option("--n", spec.n, "sample sizes")->delimiter(',');
  sim->add_option("--rho", spec.rho, "edge weights")->delimiter(',');
  sim->add_option("--dist", dists, "noise: gaussian, t:DF, mixture:W")->delimiter(',');
  sim->add_option("--penalty", penalties, "lasso, alasso")->delimiter(',');
  sim->add_option("--alpha", spec.alpha, "tuning parameter error levels")->delimiter(',');
  sim->add_option("--gamma", spec.gamma, "adaptive weight powers")->delimiter(',');
  sim->add_option("--alpha0", spec.alpha0, "error level of the adaptive lasso initial fit");
  sim->add_option("--tol", spec.tol, "coordinate descent tolerance");
  sim->add_option("--max-sweeps", spec.max_sweeps, "coordinate descent sweep limit");
  sim->add_option("--threshold", spec.threshold, "edge inclusion threshold");
  sim->add_option("--edges", edges, "true edges per DAG (default: n)");
  sim->add_option("--max-neighborhood", spec.max_neighborhood, "maximum node degree");
  sim->add_option("--replicates", spec.replicates, "replicates per cell");
  sim->add_option("--seed", spec.base_seed, "base seed");
  sim->add_flag("--permute-order", spec.permute_order, "shuffle columns before estimation");
  sim->add_flag("--fixed-dag", spec.fixed_dag, "one DAG per (p, edges, rho); only the data varies across replicates and sample sizes");
  sim->add_flag("--allow-partial", sim_allow_partial, "exit 0 even if some estimates did not converge");
  sim->add_option("--threads", spec.threads, "replicates run concurrently");
  sim->add_option("--out", sim_out, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*est) {
      return cmd_estimate(input, est_flags, order_file, est_allow_partial, dense, original_scale, est_out,
                          est_threads, args, out);
    }
    if (*evl) return cmd_evaluate(truth_file, est_file, eval_p, names_file, eval_out, out);
    if (*sim) {
      spec.noise.clear();
      for (const auto& d : dists) spec.noise.push_back(parse_noise(d));
      spec.penalty.clear();
      for (const auto& p : penalties) spec.penalty.push_back(parse_penalty(p));
      if (edges > 0) spec.edges = edges;
      return cmd_simulate(spec, sim_allow_partial, sim_out, args, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace pendag::cli

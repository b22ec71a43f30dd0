#include "pendag/report.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "pendag/data.hpp"
#include "pendag/errors.hpp"
#include "pendag/kernels.hpp"

namespace pendag {

namespace {

nlohmann::json diag_json(const RowDiagnostics& d) {
  return {{"row", d.row + 1},
          {"lambda", d.lambda},
          {"iterations", d.iterations},
          {"converged", d.converged},
          {"kkt_worst", d.kkt_worst}};
}

nlohmann::json edges_json(const EdgeSet& edges, const std::vector<std::string>* names) {
  auto out = nlohmann::json::array();
  for (const Edge& e : edges) {
    nlohmann::json j = {{"parent", e.parent + 1}, {"child", e.child + 1}, {"weight", e.weight}};
    if (names) {
      j["parent_name"] = (*names)[e.parent];
      j["child_name"] = (*names)[e.child];
    }
    out.push_back(std::move(j));
  }
  return out;
}

nlohmann::json mean_sd_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

std::size_t resolve_node(const std::string& field, std::size_t p, const std::vector<std::string>* names,
                         std::size_t line_no) {
  if (names) {
    for (std::size_t k = 0; k < names->size(); ++k)
      if ((*names)[k] == field) return k;
  }
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw ParseError("line " + std::to_string(line_no) + ": unknown node '" + field + "'");
  if (v < 1 || v > p)
    throw IndexOutOfRange("line " + std::to_string(line_no) + ": node index " + field + " outside 1.." +
                          std::to_string(p));
  return v - 1;
}

}  // namespace

void write_edges_csv(std::ostream& out, const EdgeSet& edges, const std::vector<std::string>* names) {
  out << "parent,child,weight\n";
  for (const Edge& e : edges) {
    if (names)
      out << (*names)[e.parent] << ',' << (*names)[e.child];
    else
      out << e.parent + 1 << ',' << e.child + 1;
    out << ',' << format_double(e.weight) << '\n';
  }
}

EdgeSet read_edges_csv(std::istream& in, std::size_t p, const std::vector<std::string>* names) {
  EdgeSet out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (fields.size() >= 2 && fields[0] == "parent" && fields[1] == "child") continue;
    }
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected parent,child[,weight]");
    const std::size_t parent = resolve_node(fields[0], p, names, line_no);
    const std::size_t child = resolve_node(fields[1], p, names, line_no);
    double w = 1.0;
    if (fields.size() == 3) {
      try {
        w = parse_double(fields[2]);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (parent >= child)
      throw DomainError("line " + std::to_string(line_no) + ": edge " + fields[0] + "->" + fields[1] +
                        " does not follow the variable ordering");
    out.insert({parent, child, w});
  }
  return out;
}

void write_dense_csv(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& names) {
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

nlohmann::json to_json(const EstimationConfig& cfg) {
  return {{"penalty", penalty_name(cfg.penalty)},
          {"alpha", cfg.alpha},
          {"alpha0", cfg.alpha0},
          {"gamma", cfg.gamma},
          {"tol", cfg.tol},
          {"max_sweeps", cfg.max_sweeps},
          {"edge_threshold", cfg.edge_threshold}};
}

nlohmann::json to_json(const EstimateResult& r, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["p"] = r.adjacency.size();
  j["partial"] = r.partial;
  j["kernels"] = std::string(kernels::isa_name(kernels::active().isa));
  auto rows = nlohmann::json::array();
  for (const auto& d : r.rows) rows.push_back(diag_json(d));
  j["rows"] = std::move(rows);
  j["edges"] = edges_json(r.edges(), &names);
  if (r.initial) {
    auto init_rows = nlohmann::json::array();
    for (const auto& d : r.initial_rows) init_rows.push_back(diag_json(d));
    j["initial"] = {{"rows", std::move(init_rows)},
                    {"edges", edges_json(skeleton(*r.initial, 0.0), &names)}};
  }
  return j;
}

nlohmann::json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

nlohmann::json to_json(const ReplicateMetrics& m) {
  return {{"counts", to_json(m.counts)},
          {"shd", m.shd},
          {"mcc", m.mcc},
          {"fp_rate", m.fp_rate},
          {"tp_rate", m.tp_rate}};
}

nlohmann::json to_json(const MetricsSummary& s) {
  return {{"replicates", s.replicates},   {"shd", mean_sd_json(s.shd)},
          {"mcc", mean_sd_json(s.mcc)},   {"fp_rate", mean_sd_json(s.fp_rate)},
          {"tp_rate", mean_sd_json(s.tp_rate)}, {"fp", mean_sd_json(s.fp)},
          {"tp", mean_sd_json(s.tp)}};
}

nlohmann::json to_json(const DagGenSpec& spec) {
  nlohmann::json j = {{"p", spec.p},
                      {"target_edges", spec.target_edges},
                      {"max_neighborhood", spec.max_neighborhood},
                      {"edge_weight", spec.edge_weight}};
  if (spec.uniform_weight) j["uniform_weight"] = {spec.uniform_weight->first, spec.uniform_weight->second};
  return j;
}

nlohmann::json to_json(const EdgeSet& edges) { return edges_json(edges, nullptr); }

nlohmann::json dag_sidecar(const DagModel& m, const DagGenSpec& spec, std::uint64_t seed) {
  std::vector<double> sd(m.noise_sd.data(), m.noise_sd.data() + m.noise_sd.size());
  return {{"p", m.size()},
          {"edges", m.adjacency.nonzeros()},
          {"noise_sd", sd},
          {"seed", seed},
          {"spec", to_json(spec)}};
}

void write_dag(const std::string& stem, const DagModel& m, const DagGenSpec& spec, std::uint64_t seed) {
  std::ofstream csv(stem + ".csv");
  std::ofstream js(stem + ".json");
  if (!csv || !js) throw Error("cannot write " + stem + ".{csv,json}");
  write_edges_csv(csv, skeleton(m.adjacency, 0.0));
  js << dag_sidecar(m, spec, seed).dump(2) << '\n';
}

std::string version_string() { return "pendag 1.0.0"; }

}  // namespace pendag

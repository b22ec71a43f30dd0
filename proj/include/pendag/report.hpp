#pragma once
// File formats: edge lists and dense matrices as CSV, structured results
// as JSON.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pendag/estimator.hpp"
#include "pendag/graph.hpp"
#include "pendag/metrics.hpp"
#include "pendag/synth.hpp"

namespace pendag {

// Header "parent,child,weight", then one 1-based edge per line. With `names`
// the endpoints are written as variable names instead of indices.
void write_edges_csv(std::ostream& out, const EdgeSet& edges,
                     const std::vector<std::string>* names = nullptr);

// Endpoints may be 1-based indices or, when `names` is given, variable names.
// The header line and the weight column are optional. Throws ParseError,
// IndexOutOfRange (index > p) or DomainError (parent after child).
EdgeSet read_edges_csv(std::istream& in, std::size_t p, const std::vector<std::string>* names = nullptr);

// Header of names, then p rows of p values.
void write_dense_csv(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& names);

nlohmann::json to_json(const EstimationConfig& cfg);
nlohmann::json to_json(const EstimateResult& r, const std::vector<std::string>& names);
nlohmann::json to_json(const ConfusionCounts& c);
nlohmann::json to_json(const ReplicateMetrics& m);
nlohmann::json to_json(const MetricsSummary& s);
nlohmann::json to_json(const DagGenSpec& spec);
nlohmann::json to_json(const EdgeSet& edges);

// Sidecar describing a generated DagModel (the edges go to a CSV).
nlohmann::json dag_sidecar(const DagModel& m, const DagGenSpec& spec, std::uint64_t seed);

// Edge list CSV plus JSON sidecar, the on-disk form of a DagModel.
void write_dag(const std::string& stem, const DagModel& m, const DagGenSpec& spec, std::uint64_t seed);

std::string version_string();

}  // namespace pendag

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "experiment.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "pendag/data.hpp"
#include "pendag/report.hpp"
#include "pendag/synth.hpp"

namespace fs = std::filesystem;
using namespace pendag;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pendag_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_chain_csv(const fs::path& path, std::uint64_t seed) {
  const DataMatrix x =
      sample_data({testing_support::chain(3, 0.8), Eigen::VectorXd::Ones(3)}, 200, NoiseSpec::gaussian(), seed);
  std::ofstream f(path);
  write_csv(f, x);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"estimate"}).code == cli::kUsage);
  CHECK(run({"estimate", "x.csv", "--penalty", "ridge"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kSuccess);
}

TEST_CASE("estimate recovers the chain") {
  const fs::path dir = scratch("estimate");
  write_chain_csv(dir / "chain.csv", 3);
  for (const char* pen : {"lasso", "alasso"}) {
    const fs::path out = dir / pen;
    const Run r = run({"estimate", (dir / "chain.csv").string(), "--penalty", pen, "--dense", "--out", out.string()});
    REQUIRE(r.code == cli::kSuccess);
    std::ifstream f(out / "edges.csv");
    const std::vector<std::string> names{"X1", "X2", "X3"};
    const EdgeSet e = read_edges_csv(f, 3, &names);
    CHECK(e.contains(0, 1));
    CHECK(e.contains(1, 2));
    CHECK(fs::exists(out / "adjacency.csv"));
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["partial"] == false);
    CHECK(nlohmann::json::parse(slurp(out / "manifest.json"))["command"] == "estimate");
  }
}

TEST_CASE("adaptive edges are a subset of the recorded initial fit") {
  const fs::path dir = scratch("nesting");
  const DagModel m = random_dag(DagGenSpec{12, 12, 5, 0.8, std::nullopt}, 2);
  {
    std::ofstream f(dir / "x.csv");
    write_csv(f, sample_data(m, 60, NoiseSpec::gaussian(), 2));
  }
  REQUIRE(run({"estimate", (dir / "x.csv").string(), "--penalty", "alasso", "--out", dir.string()}).code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  auto pairs = [](const nlohmann::json& list) {
    std::set<std::pair<std::string, std::string>> s;
    for (const auto& e : list) s.insert({e["parent"].dump(), e["child"].dump()});
    return s;
  };
  const auto final_edges = pairs(report["edges"]);
  const auto initial_edges = pairs(report["initial"]["edges"]);
  for (const auto& e : final_edges) CHECK(initial_edges.count(e) == 1);
}

TEST_CASE("estimate with an order file") {
  const fs::path dir = scratch("order");
  const DataMatrix x =
      sample_data({testing_support::chain(3, 0.8), Eigen::VectorXd::Ones(3)}, 200, NoiseSpec::gaussian(), 4);
  const std::vector<std::size_t> shuffled{2, 0, 1};
  {
    std::ofstream f(dir / "x.csv");
    write_csv(f, reorder_columns(x, shuffled));
    std::ofstream o(dir / "order.txt");
    o << "X1\nX2\nX3\n";
  }
  REQUIRE(run({"estimate", (dir / "x.csv").string(), "--order", (dir / "order.txt").string(), "--penalty", "lasso",
               "--out", dir.string()})
              .code == 0);
  CHECK(slurp(dir / "edges.csv").find("X1,X2,") != std::string::npos);
  CHECK(slurp(dir / "edges.csv").find("X2,X3,") != std::string::npos);
}

TEST_CASE("data errors exit 2 with a message") {
  const fs::path dir = scratch("errors");
  {
    std::ofstream f(dir / "const.csv");
    f << "a,b,c\n1,5,2\n2,5,1\n3,5,7\n";
  }
  const Run r = run({"estimate", (dir / "const.csv").string(), "--out", dir.string()});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("'b'") != std::string::npos);
  CHECK(run({"estimate", (dir / "missing.csv").string(), "--out", dir.string()}).code == cli::kDataError);
  CHECK(run({"estimate", (dir / "const.csv").string(), "--alpha", "1.5"}).code == cli::kDataError);
}

TEST_CASE("non-convergence exits 3 unless partial results are allowed") {
  const fs::path dir = scratch("partial");
  const DagModel m = random_dag(DagGenSpec{10, 10, 5, 0.8, std::nullopt}, 1);
  {
    std::ofstream f(dir / "x.csv");
    write_csv(f, sample_data(m, 40, NoiseSpec::gaussian(), 1));
  }
  const std::string in = (dir / "x.csv").string();
  CHECK(run({"estimate", in, "--max-sweeps", "1", "--tol", "1e-15", "--out", dir.string()}).code ==
        cli::kNotConverged);
  CHECK(run({"estimate", in, "--max-sweeps", "1", "--tol", "1e-15", "--allow-partial", "--out", dir.string()}).code ==
        cli::kSuccess);
}

TEST_CASE("evaluate") {
  const fs::path dir = scratch("evaluate");
  {
    std::ofstream t(dir / "truth.csv");
    t << "parent,child\n1,2\n2,3\n";
    std::ofstream e(dir / "empty.csv");
    e << "parent,child,weight\n";
  }
  const std::string truth = (dir / "truth.csv").string();
  const Run self = run({"evaluate", truth, truth, "--p", "4"});
  REQUIRE(self.code == 0);
  const auto j = nlohmann::json::parse(self.out);
  CHECK(j["shd"] == 0);
  CHECK(j["mcc"] == 1.0);

  const Run empty = run({"evaluate", truth, (dir / "empty.csv").string(), "--p", "4", "--out", dir.string()});
  REQUIRE(empty.code == 0);
  CHECK(nlohmann::json::parse(empty.out)["shd"] == 2);
  CHECK(fs::exists(dir / "metrics.json"));

  CHECK(run({"evaluate", truth, truth}).code == cli::kDataError);
  CHECK(run({"evaluate", truth, truth, "--p", "2"}).code == cli::kDataError);
}

TEST_CASE("simulate writes every artifact and is reproducible") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::vector<std::string> common{"simulate", "--p", "15", "--n", "40", "--edges", "15",
                                        "--replicates", "3", "--seed", "9"};
  auto with_out = [&](const fs::path& d) {
    auto args = common;
    args.insert(args.end(), {"--out", d.string()});
    return args;
  };
  REQUIRE(run(with_out(a)).code == 0);
  REQUIRE(run(with_out(b)).code == 0);
  for (const char* f : {"replicates.csv", "summary.csv", "summary.json", "inclusion/cell0.csv", "inclusion/cell1.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
  // Replicate seeds are shared by both penalties, only the arguments differ.
  const auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(ma["replicate_seeds"] == nlohmann::json::parse(slurp(b / "manifest.json"))["replicate_seeds"]);
  CHECK(ma["replicate_seeds"][0].size() == 3);

  std::istringstream summary(slurp(a / "summary.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(summary, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("simulate variants") {
  const fs::path dir = scratch("sim_variants");
  CHECK(run({"simulate", "--p", "10", "--n", "30", "--edges", "8", "--replicates", "2", "--permute-order", "--dist",
             "t:4,mixture:0.5", "--penalty", "lasso", "--out", (dir / "perm").string()})
            .code == 0);
  CHECK(run({"simulate", "--p", "10", "--n", "30", "--edges", "8", "--replicates", "2", "--fixed-dag", "--out",
             (dir / "fixed").string()})
            .code == 0);
  CHECK(fs::exists(dir / "fixed" / "inclusion" / "cell0_truth.csv"));
  CHECK(fs::exists(dir / "fixed" / "inclusion" / "cell0_truth.json"));
  CHECK(run({"simulate", "--p", "3", "--n", "30", "--edges", "5", "--out", (dir / "bad").string()}).code ==
        cli::kDataError);
  CHECK(run({"simulate", "--p", "10"}).code == cli::kUsage);
}

TEST_CASE("experiment seeds are shared across estimators of a data cell") {
  cli::ExperimentSpec spec;
  spec.p = {12};
  spec.n = {40};
  spec.edges = 10;
  spec.replicates = 4;
  spec.alpha = {0.05, 0.1};
  spec.audit_kkt = true;
  const auto cells = cli::run_experiment(spec);
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.data_index == 0);
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK(c.replicates[r].seed == cells[0].replicates[r].seed);
      CHECK(c.replicates[r].true_edges == cells[0].replicates[r].true_edges);
      CHECK(c.replicates[r].kkt_worst <= 10.0 * spec.tol);
    }
  }
  spec.threads = 3;
  const auto threaded = cli::run_experiment(spec);
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t r = 0; r < 4; ++r)
      CHECK(threaded[c].replicates[r].metrics.counts == cells[c].replicates[r].metrics.counts);
}

TEST_CASE("a fixed DAG is shared across sample sizes and noise kinds") {
  cli::ExperimentSpec spec;
  spec.p = {10};
  spec.n = {30, 60};
  spec.noise = {NoiseSpec::gaussian(), NoiseSpec::student_t(5)};
  spec.penalty = {Penalty::lasso};
  spec.edges = 8;
  spec.replicates = 2;
  spec.fixed_dag = true;
  const auto cells = cli::run_experiment(spec);
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    REQUIRE(c.fixed_truth.has_value());
    CHECK(c.fixed_truth->adjacency == cells[0].fixed_truth->adjacency);
    CHECK(c.replicates[0].true_edges == 8);
  }
  spec.p = {11};
  CHECK(!(cli::run_experiment(spec)[0].fixed_truth->adjacency.size() == 10));
}

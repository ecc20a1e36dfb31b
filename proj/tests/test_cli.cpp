#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pathint/cli.hpp"

using namespace pathint::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pathint_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kScan = R"({
  "experiment": "conjecture-scan",
  "output_dir": "out",
  "params": { "omega": 1.0, "T": 1.5707963267948966, "lambda": 1.0, "tau0": 0.1, "ratio": 0.5, "steps": 6 }
})";

const char* kPropagator = R"({
  "experiment": "propagator-identity",
  "seed": 3,
  "output_dir": "out",
  "params": { "M": 5, "N": 3, "eps": 0.1, "pairs": 4, "tolerance": 1e-10 }
})";

}  // namespace

TEST_CASE("listing and coverage name every experiment") {
  const std::string listing = list_experiments();
  std::set<std::string> names;
  for (const auto& e : experiments()) {
    CHECK(listing.find(e.name) != std::string::npos);
    names.insert(e.name);
  }
  CHECK(names.size() == experiments().size());

  const std::set<std::string> required_ops{
      "build_hamiltonian", "propagator_step", "dft_momentum_basis", "apply_time_shift", "apply_slicewise",
      "apply_action", "propagator_via_trace", "full_trace", "correlator_via_trace", "partial_trace_action",
      "verify_legendre_phase", "verify_interleaving_identity", "verify_discrete_schrodinger",
      "trotter_order_experiment", "time_ordered_correlator", "vacuum_amplitude", "thermal_correlator",
      "mode_partition_product", "mixing_matrix", "vacuum_persistence_det", "green_function",
      "classical_action_of_source", "generating_functional_discrete", "source_shift_transform",
      "feynman_propagator_closed", "frequency_integral_DF", "regularized_product", "conjecture_scan",
      "analyticity_probe"};
  std::set<std::string> ops;
  for (const auto& c : coverage()) {
    ops.insert(c.operation);
    CHECK(!c.experiments.empty());
    for (const auto& e : c.experiments) CHECK(names.count(e) == 1);
  }
  for (const auto& op : required_ops) {
    CAPTURE(op);
    CHECK(ops.count(op) == 1);
  }
}

TEST_CASE("missing parameter is a field-level config error") {
  const auto dir = scratch("missing");
  const auto r = run_config_text(R"({"experiment": "green-function", "output_dir": "out",
      "params": {"T": 1.0, "cutoff": 10, "deltas": [0.1]}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("params.omega") != std::string::npos);
}

TEST_CASE("unknown parameter and bad types are rejected") {
  const auto dir = scratch("unknown_param");
  auto r = run_config_text(R"({"experiment": "conjecture-scan", "output_dir": "out",
      "params": {"omega": 1.0, "T": 1.0, "lambda": 1.0, "lamda": 2.0}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("params.lamda") != std::string::npos);

  r = run_config_text(R"({"experiment": "conjecture-scan", "output_dir": "out",
      "params": {"omega": "one", "T": 1.0, "lambda": 1.0}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("params.omega") != std::string::npos);

  CHECK(run_config_text("{ not json", {}, dir).exit_code == kConfigError);
}

TEST_CASE("unknown experiment suggests the nearest name") {
  const auto dir = scratch("unknown_experiment");
  const auto r = run_config_text(R"({"experiment": "conjecture-scna", "params": {}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("conjecture-scan") != std::string::npos);
  CHECK(suggest_experiment("greenfunction") == "green-function");
}

TEST_CASE("source from inline samples or a file") {
  const auto dir = scratch("source");
  {
    std::ofstream f(dir / "j.txt");
    f << "0.1, 0.3\n0.2 -0.1\n";
  }
  const auto inline_run = run_config_text(R"({"experiment": "source-shift", "output_dir": "a",
      "params": {"T": 2.0, "omega": 1.0, "cutoff": 100, "slices": 64, "source_samples": [0.1, 0.3, 0.2, -0.1]}})",
                                          {}, dir);
  const auto file_run = run_config_text(R"({"experiment": "source-shift", "output_dir": "b",
      "params": {"T": 2.0, "omega": 1.0, "cutoff": 100, "slices": 64, "source_file": "j.txt"}})", {}, dir);
  REQUIRE(inline_run.exit_code == kPass);
  REQUIRE(file_run.exit_code == kPass);
  const auto a = nlohmann::json::parse(slurp(inline_run.result_file));
  const auto b = nlohmann::json::parse(slurp(file_run.result_file));
  CHECK(a["results"] == b["results"]);

  auto r = run_config_text(R"({"experiment": "source-shift", "output_dir": "c",
      "params": {"T": 2.0, "omega": 1.0, "cutoff": 100, "slices": 64}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("source_samples") != std::string::npos);

  r = run_config_text(R"({"experiment": "source-shift", "output_dir": "c",
      "params": {"T": 2.0, "omega": 1.0, "cutoff": 100, "slices": 64, "source_file": "missing.txt"}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("params.source_file") != std::string::npos);

  r = run_config_text(R"({"experiment": "source-shift", "output_dir": "c",
      "params": {"T": 2.0, "omega": 1.0, "cutoff": 100, "slices": 63, "source_samples": [0.1, 0.3]}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
}

TEST_CASE("randomized experiments need a seed") {
  const auto dir = scratch("seed");
  std::string text = kPropagator;
  text.erase(text.find("\"seed\": 3,"), std::string("\"seed\": 3,").size());
  const auto r = run_config_text(text, {}, dir);
  CHECK(r.exit_code == kConfigError);
  CHECK(r.message.find("seed") != std::string::npos);

  RunOptions opt;
  opt.seed = 3;
  CHECK(run_config_text(text, opt, dir).exit_code == kPass);
}

TEST_CASE("singular configuration exits with a config error") {
  const auto dir = scratch("singular");
  const auto r = run_config_text(R"({"experiment": "partition-product", "output_dir": "out",
      "params": {"omega": 1.0, "T": 6.283185307179586, "slices": [8], "max_odd_slices": 9}})", {}, dir);
  CHECK(r.exit_code == kConfigError);
}

TEST_CASE("identity failure exits 1") {
  const auto dir = scratch("identity_failure");
  std::string text = kPropagator;
  text.replace(text.find("1e-10"), 5, "1e-300");
  CHECK(run_config_text(text, {}, dir).exit_code == kIdentityFailure);
}

TEST_CASE("exhausted budget exits 3") {
  const auto dir = scratch("budget");
  const auto r = run_config_text(R"({"experiment": "conjecture-scan", "output_dir": "out",
      "params": {"omega": 1.0, "T": 1.5707963267948966, "lambda": 1.0, "tau0": 0.01, "ratio": 0.5,
                 "steps": 3, "max_cutoff": 100}})", {}, dir);
  CHECK(r.exit_code == kNonConvergence);
}

TEST_CASE("conjecture scan writes its table and result") {
  const auto dir = scratch("scan");
  const auto r = run_config_text(kScan, {}, dir);
  REQUIRE(r.exit_code == kPass);
  CHECK(r.result_file == dir / "out" / "result.json");
  const auto result = nlohmann::json::parse(slurp(r.result_file));
  CHECK(result["experiment"] == "conjecture-scan");
  CHECK(result["exit_code"] == 0);
  CHECK(result["config"]["params"]["steps"] == 6);
  CHECK(!result["verdicts"].empty());

  std::ifstream csv(dir / "out" / "conjecture_scan.csv");
  REQUIRE(csv.good());
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 7);
  CHECK(fs::exists(dir / "out" / "run.log"));
}

TEST_CASE("identical configs give byte-identical results for any thread count") {
  for (const char* text : {kScan, kPropagator}) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    RunOptions one, many;
    one.threads = 1;
    many.threads = 6;
    const auto ra = run_config_text(text, one, a);
    const auto rb = run_config_text(text, many, b);
    REQUIRE(ra.exit_code == kPass);
    REQUIRE(rb.exit_code == kPass);
    CHECK(slurp(ra.result_file) == slurp(rb.result_file));
    for (const auto& entry : fs::directory_iterator(a / "out")) {
      if (entry.path().extension() != ".csv") continue;
      CHECK(slurp(entry.path()) == slurp(b / "out" / entry.path().filename()));
    }
  }
}

TEST_CASE("output directory override") {
  const auto dir = scratch("override");
  RunOptions opt;
  opt.output_dir = dir / "elsewhere";
  const auto r = run_config_text(kScan, opt, dir);
  CHECK(r.exit_code == kPass);
  CHECK(fs::exists(dir / "elsewhere" / "result.json"));
}

TEST_CASE("every shipped config passes") {
  for (const auto& entry : fs::directory_iterator(PATHINT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().filename().string());
    RunOptions opt;
    opt.output_dir = scratch("shipped") / entry.path().stem();
    const auto r = run_config_file(entry.path(), opt);
    CHECK(r.exit_code == kPass);
  }
}

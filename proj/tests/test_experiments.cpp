#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiralchain/experiments.hpp"

using namespace chiralchain;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("chiralchain_" + name);
  fs::remove_all(dir);
  return dir;
}

// three atoms, one sweep-free point, five grid times: cheapest possible run
std::string tiny_config(const std::string& output_dir) {
  return R"({
    "name": "tiny",
    "zones": [{"bonds": 2, "xi": 1.9}],
    "coupling": {"D": 0.2},
    "initial_state": {"site": 2},
    "time_grid": {"t_max": 2.0, "dt": 0.5},
    "observables": ["stop_time", "total_population_at:2"],
    "output_dir": ")" + output_dir + R"(",
    "threads": 2
  })";
}

}  // namespace

TEST_CASE("parameter expressions resolve literals and named references") {
  const std::map<std::string, double> params = {{"xi2", pi / 8}};
  CHECK(ParamExpr{2.5}.resolve({}) == 2.5);
  CHECK(ParamExpr::named("xi2").resolve(params) == pi / 8);
  CHECK(ParamExpr::named("xi2").is_ref());
  CHECK_FALSE(ParamExpr{1.0}.is_ref());
  CHECK_THROWS_AS(ParamExpr::named("missing").resolve(params), std::invalid_argument);
  CHECK_THROWS_AS(ParamExpr::named(""), std::invalid_argument);
}

TEST_CASE("the time grid runs from zero to t_max inclusive in uniform steps") {
  const TimeGridConfig coarse{1.0, 0.1};
  const std::vector<double> times = coarse.grid();
  REQUIRE(times.size() == 11);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == 1.0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) CHECK(times[k + 1] > times[k]);

  CHECK(TimeGridConfig{2000.0, 0.05}.grid().size() == 40001);
}

TEST_CASE("parsing is strict about keys, types, and references") {
  CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[1, 2]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"bogus_key": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config(R"({"zones": [{"bonds": 1, "xi": 1.0, "typo": 2}],
                       "coupling": {"D": 0.1}, "initial_state": {"site": 1}})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config(R"({"zones": [{"bonds": 1, "xi": 1.0}],
                       "coupling": {"D": 0.1, "gamma_L": 0.4, "gamma_R": 0.6},
                       "initial_state": {"site": 1}})"),
      std::invalid_argument);
  // a $reference that no parameter or sweep axis satisfies fails validation
  CHECK_THROWS_AS(
      parse_config(R"({"zones": [{"bonds": 1, "xi": "$nowhere"}],
                       "coupling": {"D": 0.1}, "initial_state": {"site": 1}})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config(R"({"zones": [{"bonds": 1, "xi": 1.0}],
                       "coupling": {"D": 5.0}, "initial_state": {"site": 1}})"),
      std::invalid_argument);
}

TEST_CASE("a parsed document lands field by field in the config") {
  const ExperimentConfig cfg = parse_config(R"({
    "name": "roundtrip",
    "mode": "evolve",
    "zones": [{"bonds": 3, "xi": 3.141592653589793}, {"bonds": 3, "xi": "$xi2"}],
    "coupling": {"D": 0.2},
    "initial_state": {"type": "single_site", "site": 4},
    "time_grid": {"t_max": 10.0, "dt": 0.5},
    "parameters": {"xi2": 1.5707963267948966},
    "sweep": [{"parameter": "xi2", "values": [0.5, 1.5]}],
    "observables": ["window_averaged_transport"],
    "trapping": {"trend_threshold": 0.02},
    "write_traces": false,
    "seed": 9,
    "threads": 3
  })");
  CHECK(cfg.name == "roundtrip");
  CHECK(cfg.mode == RunMode::evolve);
  REQUIRE(cfg.zones.size() == 2);
  CHECK(cfg.zones[0].bonds == 3);
  CHECK(cfg.zones[1].xi.ref == "xi2");
  CHECK(cfg.coupling.use_directionality);
  CHECK(cfg.num_atoms() == 7);
  CHECK(cfg.initial_state.sites == std::vector<int>{4});
  CHECK(cfg.time_grid.dt == 0.5);
  CHECK(cfg.parameters.at("xi2") == doctest::Approx(pi / 2).epsilon(1e-15));
  REQUIRE(cfg.sweep.size() == 1);
  CHECK(cfg.sweep[0].parameter == "xi2");
  CHECK(cfg.observables == std::vector<std::string>{"window_averaged_transport"});
  CHECK(cfg.trapping.trend_threshold == 0.02);
  CHECK_FALSE(cfg.write_traces);
  CHECK(cfg.seed == 9);
  CHECK(cfg.threads == 3);
}

TEST_CASE("the config hash ignores presentation fields and key order") {
  const std::string base = R"({
    "name": "one",
    "zones": [{"bonds": 2, "xi": 1.9}],
    "coupling": {"D": 0.2},
    "initial_state": {"site": 2},
    "time_grid": {"t_max": 2.0, "dt": 0.5},
    "observables": ["stop_time"],
    "output_dir": "a", "threads": 1
  })";
  const std::string reordered = R"({
    "threads": 8,
    "output_dir": "b",
    "observables": ["stop_time", "total_population_at:1"],
    "time_grid": {"dt": 0.5, "t_max": 2.0},
    "initial_state": {"site": 2},
    "coupling": {"D": 0.2},
    "zones": [{"xi": 1.9, "bonds": 2}],
    "name": "two"
  })";
  const std::string hash = config_hash(parse_config(base));
  CHECK(hash.size() == 16);
  CHECK(config_hash(parse_config(reordered)) == hash);

  std::string different = base;
  different.replace(different.find("1.9"), 3, "2.0");
  CHECK(config_hash(parse_config(different)) != hash);

  // without a disorder block the seed never reaches the outputs
  std::string reseeded = base;
  reseeded.replace(reseeded.find("\"threads\": 1"), 12, "\"seed\": 123");
  CHECK(config_hash(parse_config(reseeded)) == hash);
}

TEST_CASE("a single-point run writes the trace, the sidecar, and the summary") {
  const fs::path dir = fresh_dir("tiny_run");
  const ExperimentConfig cfg = parse_config(tiny_config(dir.string()));
  const ExperimentResult result = run(cfg);

  CHECK(result.failures == 0);
  REQUIRE(result.records.size() == 1);
  const ResultRecord& rec = result.records[0];
  CHECK(rec.status == "ok");
  CHECK(rec.realization == -1);
  CHECK(rec.solver_path == "eigendecomposition");
  CHECK(rec.observables.count("stop_time") == 1);
  CHECK(rec.observables.at("total_population_at:2") > 0.0);
  CHECK(rec.flags.count("stop_time_reached") == 1);

  const std::string trace = read_file(dir / rec.trace_file);
  CHECK(trace.rfind("t,site,population\n", 0) == 0);
  CHECK(line_count(trace) == 1 + 5 * 3);  // header + grid points x sites
  CHECK(rec.trace_file == "trace_" + result.config_hash + "_000.csv");
  CHECK(fs::exists(dir / ("trace_" + result.config_hash + "_000.json")));

  const nlohmann::json summary = nlohmann::json::parse(read_file(result.summary_file));
  CHECK(summary.at("config_hash").get<std::string>() == result.config_hash);
  CHECK(summary.at("failures").get<int>() == 0);
  CHECK(summary.at("points").get<int>() == 1);
  CHECK(summary.at("records").size() == 1);
  CHECK(summary.at("records")[0].at("status").get<std::string>() == "ok");
  CHECK(summary.contains("canonical_config"));
}

TEST_CASE("sweep points enumerate the axes in row-major declaration order") {
  const fs::path dir = fresh_dir("sweep_order");
  ExperimentConfig cfg = parse_config(R"({
    "zones": [{"bonds": 2, "xi": "$xi"}],
    "coupling": {"D": "$D"},
    "initial_state": {"site": 2},
    "time_grid": {"t_max": 1.0, "dt": 0.5},
    "sweep": [{"parameter": "xi", "values": [1.0, 2.0]},
              {"parameter": "D", "values": [0.1, 0.5, 0.9]}],
    "observables": ["total_population_at:1"],
    "write_traces": false
  })");
  cfg.output_dir = dir.string();
  const ExperimentResult result = run(cfg);

  CHECK(result.failures == 0);
  REQUIRE(result.records.size() == 6);
  const std::vector<std::pair<double, double>> expected = {
      {1.0, 0.1}, {1.0, 0.5}, {1.0, 0.9}, {2.0, 0.1}, {2.0, 0.5}, {2.0, 0.9}};
  for (int k = 0; k < 6; ++k) {
    CHECK(result.records[k].point_index == k);
    CHECK(result.records[k].parameters.at("xi") == expected[k].first);
    CHECK(result.records[k].parameters.at("D") == expected[k].second);
  }

  const std::string sweep_csv = read_file(dir / "sweep_total_population_at_1.csv");
  CHECK(sweep_csv.rfind("xi,D,total_population_at_1\n", 0) == 0);
  CHECK(line_count(sweep_csv) == 7);
}

TEST_CASE("reruns of one config are byte-identical regardless of worker count") {
  const fs::path dir_a = fresh_dir("determinism_a");
  const fs::path dir_b = fresh_dir("determinism_b");
  ExperimentConfig cfg = parse_config(tiny_config(dir_a.string()));
  cfg.threads = 1;
  run(cfg);
  cfg.output_dir = dir_b.string();
  cfg.threads = 4;
  const ExperimentResult second = run(cfg);

  const std::string stem = "trace_" + second.config_hash + "_000";
  CHECK(read_file(dir_a / (stem + ".csv")) == read_file(dir_b / (stem + ".csv")));
  CHECK(read_file(dir_a / "sweep_stop_time.csv") == read_file(dir_b / "sweep_stop_time.csv"));
}

TEST_CASE("disorder ensembles run every realization and aggregate the curves") {
  const fs::path dir = fresh_dir("ensemble");
  ExperimentConfig cfg = parse_config(R"({
    "zones": [{"bonds": 3, "xi": 1.5707963267948966}],
    "coupling": {"D": 0.3},
    "initial_state": {"site": 2},
    "time_grid": {"t_max": 2.0, "dt": 0.5},
    "disorder": {"fraction": 0.01, "realizations": 4},
    "observables": ["stop_time"],
    "seed": 11
  })");
  cfg.output_dir = dir.string();
  const ExperimentResult result = run(cfg);

  CHECK(result.failures == 0);
  REQUIRE(result.records.size() == 4);
  for (int r = 0; r < 4; ++r) {
    CHECK(result.records[r].realization == r);
    CHECK(result.records[r].trace_file ==
          "trace_" + result.config_hash + "_000_r" + std::string(2, '0') + std::to_string(r) +
              ".csv");
  }

  const std::string ensemble =
      read_file(dir / ("ensemble_" + result.config_hash + "_000.csv"));
  CHECK(ensemble.rfind("t,mean,stderr\n", 0) == 0);
  CHECK(line_count(ensemble) == 6);  // header + five grid points

  const std::string sweep_csv = read_file(dir / "sweep_stop_time.csv");
  CHECK(sweep_csv.rfind("stop_time,stderr,realizations\n", 0) == 0);
  CHECK(sweep_csv.substr(sweep_csv.size() - 3) == ",4\n");
}

TEST_CASE("a failing sweep point is recorded without aborting the run") {
  const fs::path dir = fresh_dir("partial_failure");
  ExperimentConfig cfg = parse_config(R"({
    "zones": [{"bonds": 2, "xi": 1.9}],
    "coupling": {"D": "$D"},
    "initial_state": {"site": 2},
    "time_grid": {"t_max": 1.0, "dt": 0.5},
    "sweep": [{"parameter": "D", "values": [0.2, 2.0]}],
    "observables": ["total_population_at:1"],
    "write_traces": false
  })");
  cfg.output_dir = dir.string();
  const ExperimentResult result = run(cfg);

  CHECK(result.failures == 1);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].status == "ok");
  CHECK(result.records[1].status == "failed");
  CHECK_FALSE(result.records[1].error.empty());
  // the sweep table keeps the completed points only
  CHECK(line_count(read_file(dir / "sweep_total_population_at_1.csv")) == 2);
}

TEST_CASE("configs validate their cross-field requirements") {
  // an initial site beyond the chain
  CHECK_THROWS_AS(parse_config(R"({"zones": [{"bonds": 2, "xi": 1.0}],
    "coupling": {"D": 0.1}, "initial_state": {"site": 9},
    "time_grid": {"t_max": 1.0, "dt": 0.5},
    "observables": ["stop_time"]})"), std::invalid_argument);
  // zone observables need a trap_zone
  CHECK_THROWS_AS(parse_config(R"({"zones": [{"bonds": 2, "xi": 1.0}],
    "coupling": {"D": 0.1}, "initial_state": {"site": 1},
    "time_grid": {"t_max": 1.0, "dt": 0.5},
    "observables": ["zone_fraction_at:1"]})"), std::invalid_argument);
  // steady-state mode has no use for evolve-only observables
  CHECK_THROWS_AS(parse_config(R"({"mode": "steady_state",
    "zones": [{"bonds": 2, "xi": 1.0}], "coupling": {"D": 0.1},
    "observables": ["stop_time"]})"), std::invalid_argument);
  // minimal_atoms mode requires the trap cell block
  CHECK_THROWS_AS(parse_config(R"({"mode": "minimal_atoms",
    "coupling": {"D": 0.1}, "observables": ["minimal_atoms"]})"), std::invalid_argument);
  // a degenerate time grid
  CHECK_THROWS_AS(parse_config(R"({"zones": [{"bonds": 2, "xi": 1.0}],
    "coupling": {"D": 0.1}, "initial_state": {"site": 1},
    "time_grid": {"t_max": 0.0, "dt": 0.5},
    "observables": ["stop_time"]})"), std::invalid_argument);
}

TEST_CASE("ensemble averages carry the pointwise mean and standard error") {
  const EnsembleAverage avg =
      ensemble_average({0.0, 1.0}, {{1.0, 0.5}, {3.0, 1.5}});
  REQUIRE(avg.times.size() == 2);
  CHECK(avg.mean[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(avg.mean[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(avg.standard_error[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(avg.standard_error[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(ensemble_average({0.0, 1.0}, {{1.0}, {2.0, 3.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ensemble_average({0.0, 1.0}, std::vector<std::vector<double>>{}),
                  std::invalid_argument);
}

TEST_CASE("every catalogued preset produces a valid runnable config") {
  const std::vector<PresetInfo> catalog = presets();
  CHECK(catalog.size() == 25);
  std::set<std::string> names;
  for (const PresetInfo& p : catalog) {
    CHECK_FALSE(p.description.empty());
    names.insert(p.name);
    const ExperimentConfig cfg = preset_config(p.name);  // validates internally
    CHECK(config_hash(cfg).size() == 16);
  }
  CHECK(names.size() == catalog.size());
  CHECK_THROWS_AS(preset_config("fig99z"), std::invalid_argument);
}

TEST_CASE("the two-zone reflection preset carries its documented shape") {
  const ExperimentConfig cfg = preset_config("fig2a");
  CHECK(cfg.mode == RunMode::evolve);
  REQUIRE(cfg.zones.size() == 2);
  CHECK(cfg.zones[0].bonds == 3);
  CHECK(cfg.zones[1].bonds == 3);
  CHECK(cfg.num_atoms() == 7);
  CHECK(cfg.zones[1].xi.ref == "xi2");
  REQUIRE(cfg.sweep.size() == 1);
  CHECK(cfg.sweep[0].parameter == "xi2");
  CHECK(cfg.sweep[0].values.size() == 3);
  CHECK(cfg.write_traces);
  const auto& obs = cfg.observables;
  CHECK(std::find(obs.begin(), obs.end(), "window_averaged_transport") != obs.end());
  CHECK(std::find(obs.begin(), obs.end(), "stop_time") != obs.end());

  const ExperimentConfig disordered = preset_config("fig6f");
  REQUIRE(disordered.disorder.has_value());
  CHECK(disordered.disorder->realizations == 100);
  CHECK_FALSE(disordered.write_traces);
}

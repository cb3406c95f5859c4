#include "chiralchain/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace chiralchain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

// --- formatting ------------------------------------------------------------

// shortest round-trip decimal; the bit-for-bit stable CSV currency
void append_double(std::string& buf, double v) {
  char tmp[32];
  const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
  buf.append(tmp, res.ptr);
}

void append_int(std::string& buf, long long v) {
  char tmp[24];
  const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
  buf.append(tmp, res.ptr);
}

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

std::string zero_padded(int value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::string sanitize_token(const std::string& token) {
  std::string out = token;
  std::replace(out.begin(), out.end(), ':', '_');
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// --- grid helpers ------------------------------------------------------------

// couplings are 2*pi periodic; signed sweep values map onto physical spacings
double lift_spacing(double xi) {
  while (xi <= 0.0) xi += 2.0 * pi;
  return xi;
}

double value_at(const std::vector<double>& times, const std::vector<double>& values, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  if (it == times.end()) return values.back();
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? values[hi - 1] : values[hi];
}

// --- observable tokens -------------------------------------------------------

struct ObsToken {
  std::string head;
  double arg = 0.0;
  bool has_arg = false;
};

ObsToken parse_token(const std::string& token) {
  ObsToken out;
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    out.head = token;
    return out;
  }
  out.head = token.substr(0, colon);
  const std::string suffix = token.substr(colon + 1);
  const char* begin = suffix.data();
  const char* end = begin + suffix.size();
  const auto res = std::from_chars(begin, end, out.arg);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument("observable '" + token + "': malformed numeric suffix");
  out.has_arg = true;
  return out;
}

// head -> {needs numeric suffix, valid modes, needs trap_zone}
struct TokenRule {
  bool needs_arg = false;
  bool evolve_mode = true;
  bool steady_mode = false;
  bool minimal_mode = false;
  bool needs_zone = false;
};

const std::map<std::string, TokenRule>& token_rules() {
  static const std::map<std::string, TokenRule> rules = {
      {"stop_time", {false, true, false, false, false}},
      {"window_averaged_transport", {false, true, false, false, false}},
      {"transport_parameter", {false, false, true, false, false}},
      {"total_population_at", {true, true, false, false, false}},
      {"zone_fraction_at", {true, true, false, false, true}},
      {"min_zone_fraction_from", {true, true, false, false, true}},
      {"site_mean", {true, true, false, false, false}},
      {"trend", {false, true, false, false, false}},
      {"trapped", {false, true, false, false, false}},
      {"minimal_atoms", {false, false, false, true, false}},
  };
  return rules;
}

}  // namespace

// --- ParamExpr ---------------------------------------------------------------

ParamExpr ParamExpr::named(std::string name) {
  if (name.empty()) throw std::invalid_argument("ParamExpr: empty parameter name");
  ParamExpr out;
  out.ref = std::move(name);
  return out;
}

double ParamExpr::resolve(const std::map<std::string, double>& params) const {
  if (!is_ref()) return value;
  const auto it = params.find(ref);
  if (it == params.end())
    throw std::invalid_argument("unresolved parameter reference '$" + ref + "'");
  return it->second;
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::evolve: return "evolve";
    case RunMode::steady_state: return "steady_state";
    case RunMode::minimal_atoms: return "minimal_atoms";
  }
  return "unknown";
}

CouplingParams CouplingConfig::resolve(const std::map<std::string, double>& params) const {
  CouplingParams out;
  if (use_directionality) {
    out = CouplingParams::from_directionality(directionality.resolve(params));
  } else {
    out.gamma_L = gamma_left.resolve(params);
    out.gamma_R = gamma_right.resolve(params);
  }
  out.validate();
  return out;
}

std::vector<double> TimeGridConfig::grid() const {
  const long long steps = std::llround(t_max / dt);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long long k = 0; k <= steps; ++k) out.push_back(static_cast<double>(k) * dt);
  return out;
}

// --- config validation ---------------------------------------------------------

int ExperimentConfig::num_atoms() const {
  if (zones.empty()) return 0;
  int bonds = 0;
  for (const ZoneConfig& z : zones) bonds += z.bonds;
  return bonds + 1;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

  if (mode == RunMode::minimal_atoms) {
    if (!trap_cell) fail("minimal_atoms mode requires a trap_cell block");
    if (trap_cell->middle_atoms < 1) fail("trap_cell.middle_atoms must be >= 1");
    if (trap_cell->search_bound < 1) fail("trap_cell.search_bound must be >= 1");
    if (!std::isfinite(trap_cell->xi_side) || !std::isfinite(trap_cell->xi_middle))
      fail("trap_cell spacings must be finite");
  } else {
    if (zones.empty()) fail("at least one zone is required");
    for (const ZoneConfig& z : zones)
      if (z.bonds < 1) fail("zone bond count must be >= 1");
  }

  // every "$name" must resolve to a declared parameter or a sweep axis
  std::set<std::string> names;
  for (const auto& [k, v] : parameters) {
    if (!std::isfinite(v)) fail("parameter '" + k + "' must be finite");
    names.insert(k);
  }
  std::set<std::string> axis_names;
  for (const SweepAxis& axis : sweep) {
    if (axis.parameter.empty()) fail("sweep axis without a parameter name");
    if (!axis_names.insert(axis.parameter).second)
      fail("duplicate sweep axis '" + axis.parameter + "'");
    if (axis.values.empty()) fail("sweep axis '" + axis.parameter + "' has no values");
    for (double v : axis.values)
      if (!std::isfinite(v)) fail("sweep axis '" + axis.parameter + "' has a non-finite value");
    names.insert(axis.parameter);
  }
  const auto check_expr = [&](const ParamExpr& e, const std::string& where) {
    if (e.is_ref() && names.find(e.ref) == names.end())
      fail(where + " references unknown parameter '$" + e.ref + "'");
    if (!e.is_ref() && !std::isfinite(e.value)) fail(where + " must be finite");
  };
  for (std::size_t z = 0; z < zones.size(); ++z)
    check_expr(zones[z].xi, "zones[" + std::to_string(z) + "].xi");
  if (coupling.use_directionality) {
    check_expr(coupling.directionality, "coupling.D");
    if (!coupling.directionality.is_ref() &&
        (coupling.directionality.value < -1.0 || coupling.directionality.value > 1.0))
      fail("coupling.D must lie in [-1, 1]");
  } else {
    check_expr(coupling.gamma_left, "coupling.gamma_L");
    check_expr(coupling.gamma_right, "coupling.gamma_R");
  }
  check_expr(initial_state.theta, "initial_state.theta");
  check_expr(initial_state.num_sites, "initial_state.num_sites");
  if (disorder) {
    check_expr(disorder->fraction, "disorder.fraction");
    if (!disorder->fraction.is_ref() && disorder->fraction.value < 0.0)
      fail("disorder.fraction must be >= 0");
    if (disorder->realizations < 1) fail("disorder.realizations must be >= 1");
  }

  const int n = num_atoms();
  if (mode != RunMode::minimal_atoms) {
    const std::string& type = initial_state.type;
    if (mode == RunMode::evolve) {
      if (type == "single_site") {
        if (initial_state.sites.size() != 1) fail("single_site needs exactly one site");
      } else if (type == "two_site") {
        if (initial_state.sites.size() != 2) fail("two_site needs exactly two sites");
        if (initial_state.sites[0] == initial_state.sites[1]) fail("two_site sites must differ");
      } else if (type == "dicke_chain") {
        if (initial_state.first_site < 1) fail("dicke_chain.first_site must be >= 1");
        if (!initial_state.num_sites.is_ref()) {
          const int m = static_cast<int>(std::llround(initial_state.num_sites.value));
          if (m < 1) fail("dicke_chain.num_sites must be >= 1");
          if (initial_state.first_site + m - 1 > n) fail("dicke_chain extends past the last site");
        }
      } else if (type == "multi_excitation") {
        if (initial_state.sites.size() < 2) fail("multi_excitation needs at least two sites");
        std::set<int> unique(initial_state.sites.begin(), initial_state.sites.end());
        if (unique.size() != initial_state.sites.size()) fail("multi_excitation sites must be distinct");
      } else {
        fail("unknown initial_state.type '" + type + "'");
      }
      for (int s : initial_state.sites)
        if (s < 1 || s > n) fail("initial-state site " + std::to_string(s) + " outside 1.." + std::to_string(n));
      if (time_grid.t_max <= 0.0 || time_grid.dt <= 0.0 || time_grid.dt > time_grid.t_max)
        fail("time_grid needs 0 < dt <= t_max");
    }
    if (mode == RunMode::steady_state && drive != "uniform" && drive != "plane_wave")
      fail("drive must be 'uniform' or 'plane_wave'");
    if (trap_zone) {
      if (trap_zone->first < 1 || trap_zone->second > n || trap_zone->first > trap_zone->second)
        fail("trap_zone must be an increasing 1-based site range within the chain");
    }
  }

  if (trapping.early_time <= 0.0 || trapping.late_time <= trapping.early_time)
    fail("trapping reference times need 0 < early_time < late_time");

  if (observables.empty()) fail("at least one observable is required");
  for (const std::string& token : observables) {
    const ObsToken tok = parse_token(token);
    const auto it = token_rules().find(tok.head);
    if (it == token_rules().end()) fail("unknown observable '" + token + "'");
    const TokenRule& rule = it->second;
    if (rule.needs_arg != tok.has_arg)
      fail("observable '" + token + (rule.needs_arg ? "' needs a ':<value>' suffix" : "' takes no suffix"));
    const bool mode_ok = (mode == RunMode::evolve && rule.evolve_mode) ||
                         (mode == RunMode::steady_state && rule.steady_mode) ||
                         (mode == RunMode::minimal_atoms && rule.minimal_mode);
    if (!mode_ok) fail("observable '" + token + "' is not available in mode " + to_string(mode));
    if (rule.needs_zone && !trap_zone) fail("observable '" + token + "' requires a trap_zone range");
    if (tok.head == "site_mean") {
      const int s = static_cast<int>(std::llround(tok.arg));
      if (s < 1 || s > n) fail("site_mean site outside the chain");
    }
  }

  if (output_dir.empty()) fail("output_dir must not be empty");
  if (threads < 0) fail("threads must be >= 0");
  if (transport_threshold == 0.0) fail("transport_threshold must be negative (auto) or positive");
}

// --- JSON parsing ----------------------------------------------------------------

namespace {

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
  }
}

ParamExpr parse_expr(const json& j, const std::string& where) {
  if (j.is_number()) return ParamExpr(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.size() > 1 && s.front() == '$') return ParamExpr::named(s.substr(1));
  }
  throw std::invalid_argument(where + ": expected a number or a \"$name\" reference");
}

json expr_to_json(const ParamExpr& e) {
  if (e.is_ref()) return "$" + e.ref;
  return e.value;
}

double require_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw std::invalid_argument(where + ": missing numeric '" + std::string(key) + "'");
  return obj[key].get<double>();
}

int require_int(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer())
    throw std::invalid_argument(where + ": missing integer '" + std::string(key) + "'");
  return obj[key].get<int>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
  expect_keys(root, "config",
              {"name", "mode", "zones", "coupling", "initial_state", "drive", "time_grid",
               "parameters", "sweep", "observables", "disorder", "trap_cell", "trap_zone",
               "transport_threshold", "trapping", "write_traces", "write_ensemble",
               "output_dir", "seed", "threads"});

  ExperimentConfig cfg;
  if (root.contains("name")) cfg.name = root["name"].get<std::string>();
  if (root.contains("mode")) {
    const std::string m = root["mode"].get<std::string>();
    if (m == "evolve") cfg.mode = RunMode::evolve;
    else if (m == "steady_state") cfg.mode = RunMode::steady_state;
    else if (m == "minimal_atoms") cfg.mode = RunMode::minimal_atoms;
    else throw std::invalid_argument("config: unknown mode '" + m + "'");
  }

  if (root.contains("zones")) {
    if (!root["zones"].is_array()) throw std::invalid_argument("config: zones must be an array");
    for (std::size_t i = 0; i < root["zones"].size(); ++i) {
      const json& jz = root["zones"][i];
      const std::string where = "zones[" + std::to_string(i) + "]";
      expect_keys(jz, where, {"bonds", "xi"});
      ZoneConfig z;
      z.bonds = require_int(jz, where, "bonds");
      if (!jz.contains("xi")) throw std::invalid_argument(where + ": missing 'xi'");
      z.xi = parse_expr(jz["xi"], where + ".xi");
      cfg.zones.push_back(z);
    }
  }

  if (root.contains("coupling")) {
    const json& jc = root["coupling"];
    expect_keys(jc, "coupling", {"D", "gamma_L", "gamma_R"});
    if (jc.contains("D")) {
      if (jc.contains("gamma_L") || jc.contains("gamma_R"))
        throw std::invalid_argument("coupling: give either D or gamma_L/gamma_R, not both");
      cfg.coupling.use_directionality = true;
      cfg.coupling.directionality = parse_expr(jc["D"], "coupling.D");
    } else {
      if (!jc.contains("gamma_L") || !jc.contains("gamma_R"))
        throw std::invalid_argument("coupling: needs D or both gamma_L and gamma_R");
      cfg.coupling.use_directionality = false;
      cfg.coupling.gamma_left = parse_expr(jc["gamma_L"], "coupling.gamma_L");
      cfg.coupling.gamma_right = parse_expr(jc["gamma_R"], "coupling.gamma_R");
    }
  }

  if (root.contains("initial_state")) {
    const json& js = root["initial_state"];
    expect_keys(js, "initial_state", {"type", "site", "sites", "theta", "first_site", "num_sites"});
    InitialStateConfig& ist = cfg.initial_state;
    ist.type = js.contains("type") ? js["type"].get<std::string>() : "single_site";
    if (js.contains("site")) ist.sites = {require_int(js, "initial_state", "site")};
    if (js.contains("sites")) {
      if (!js["sites"].is_array()) throw std::invalid_argument("initial_state.sites must be an array");
      ist.sites.clear();
      for (const json& v : js["sites"]) ist.sites.push_back(v.get<int>());
    }
    if (js.contains("theta")) ist.theta = parse_expr(js["theta"], "initial_state.theta");
    if (js.contains("first_site")) ist.first_site = require_int(js, "initial_state", "first_site");
    if (js.contains("num_sites")) ist.num_sites = parse_expr(js["num_sites"], "initial_state.num_sites");
  }

  if (root.contains("drive")) cfg.drive = root["drive"].get<std::string>();

  if (root.contains("time_grid")) {
    const json& jt = root["time_grid"];
    expect_keys(jt, "time_grid", {"t_max", "dt"});
    cfg.time_grid.t_max = require_number(jt, "time_grid", "t_max");
    cfg.time_grid.dt = require_number(jt, "time_grid", "dt");
  }

  if (root.contains("parameters")) {
    if (!root["parameters"].is_object())
      throw std::invalid_argument("config: parameters must be an object");
    for (auto it = root["parameters"].begin(); it != root["parameters"].end(); ++it) {
      if (!it.value().is_number())
        throw std::invalid_argument("parameters." + it.key() + " must be a number");
      cfg.parameters[it.key()] = it.value().get<double>();
    }
  }

  if (root.contains("sweep")) {
    if (!root["sweep"].is_array()) throw std::invalid_argument("config: sweep must be an array");
    for (std::size_t i = 0; i < root["sweep"].size(); ++i) {
      const json& ja = root["sweep"][i];
      const std::string where = "sweep[" + std::to_string(i) + "]";
      expect_keys(ja, where, {"parameter", "values"});
      SweepAxis axis;
      if (!ja.contains("parameter")) throw std::invalid_argument(where + ": missing 'parameter'");
      axis.parameter = ja["parameter"].get<std::string>();
      if (!ja.contains("values") || !ja["values"].is_array())
        throw std::invalid_argument(where + ": missing 'values' array");
      for (const json& v : ja["values"]) axis.values.push_back(v.get<double>());
      cfg.sweep.push_back(std::move(axis));
    }
  }

  if (root.contains("observables")) {
    if (!root["observables"].is_array())
      throw std::invalid_argument("config: observables must be an array");
    for (const json& v : root["observables"]) cfg.observables.push_back(v.get<std::string>());
  }

  if (root.contains("disorder")) {
    const json& jd = root["disorder"];
    expect_keys(jd, "disorder", {"fraction", "seed", "realizations", "scale"});
    DisorderConfig d;
    if (!jd.contains("fraction")) throw std::invalid_argument("disorder: missing 'fraction'");
    d.fraction = parse_expr(jd["fraction"], "disorder.fraction");
    if (jd.contains("seed")) d.seed = jd["seed"].get<std::uint64_t>();
    if (jd.contains("realizations")) d.realizations = require_int(jd, "disorder", "realizations");
    if (jd.contains("scale")) {
      const std::string s = jd["scale"].get<std::string>();
      if (s == "wavelength") d.scale = DisorderScale::wavelength;
      else if (s == "local_spacing") d.scale = DisorderScale::local_spacing;
      else throw std::invalid_argument("disorder.scale must be 'wavelength' or 'local_spacing'");
    }
    cfg.disorder = std::move(d);
  }

  if (root.contains("trap_cell")) {
    const json& jt = root["trap_cell"];
    expect_keys(jt, "trap_cell", {"xi_side", "xi_middle", "middle_atoms", "search_bound"});
    TrapCellConfig tc;
    tc.xi_side = require_number(jt, "trap_cell", "xi_side");
    tc.xi_middle = require_number(jt, "trap_cell", "xi_middle");
    if (jt.contains("middle_atoms")) tc.middle_atoms = require_int(jt, "trap_cell", "middle_atoms");
    if (jt.contains("search_bound")) tc.search_bound = require_int(jt, "trap_cell", "search_bound");
    cfg.trap_cell = tc;
  }

  if (root.contains("trap_zone")) {
    const json& jz = root["trap_zone"];
    if (!jz.is_array() || jz.size() != 2)
      throw std::invalid_argument("trap_zone must be a [first, last] site pair");
    cfg.trap_zone = std::make_pair(jz[0].get<int>(), jz[1].get<int>());
  }

  if (root.contains("transport_threshold"))
    cfg.transport_threshold = root["transport_threshold"].get<double>();

  if (root.contains("trapping")) {
    const json& jt = root["trapping"];
    expect_keys(jt, "trapping",
                {"population_threshold", "trend_threshold", "early_time", "late_time"});
    if (jt.contains("population_threshold"))
      cfg.trapping.population_threshold = jt["population_threshold"].get<double>();
    if (jt.contains("trend_threshold"))
      cfg.trapping.trend_threshold = jt["trend_threshold"].get<double>();
    if (jt.contains("early_time")) cfg.trapping.early_time = jt["early_time"].get<double>();
    if (jt.contains("late_time")) cfg.trapping.late_time = jt["late_time"].get<double>();
  }

  if (root.contains("write_traces")) cfg.write_traces = root["write_traces"].get<bool>();
  if (root.contains("write_ensemble")) cfg.write_ensemble = root["write_ensemble"].get<bool>();
  if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();
  if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
  if (root.contains("threads")) cfg.threads = root["threads"].get<int>();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// --- canonical serialization and hash -----------------------------------------

std::string canonical_serialization(const ExperimentConfig& config) {
  // exactly the fields that determine trace content; keys sort alphabetically,
  // doubles print as shortest round-trip decimals
  json j;
  j["mode"] = to_string(config.mode);
  if (!config.zones.empty()) {
    json zones = json::array();
    for (const ZoneConfig& z : config.zones)
      zones.push_back({{"bonds", z.bonds}, {"xi", expr_to_json(z.xi)}});
    j["zones"] = std::move(zones);
  }
  if (config.coupling.use_directionality) {
    j["coupling"] = {{"D", expr_to_json(config.coupling.directionality)}};
  } else {
    j["coupling"] = {{"gamma_L", expr_to_json(config.coupling.gamma_left)},
                     {"gamma_R", expr_to_json(config.coupling.gamma_right)}};
  }
  if (config.mode == RunMode::evolve) {
    const InitialStateConfig& ist = config.initial_state;
    json init;
    init["type"] = ist.type;
    if (ist.type == "dicke_chain") {
      init["first_site"] = ist.first_site;
      init["num_sites"] = expr_to_json(ist.num_sites);
      init["theta"] = expr_to_json(ist.theta);
    } else {
      init["sites"] = ist.sites;
      if (ist.type == "two_site") init["theta"] = expr_to_json(ist.theta);
    }
    j["initial_state"] = std::move(init);
    j["time_grid"] = {{"dt", config.time_grid.dt}, {"t_max", config.time_grid.t_max}};
  }
  if (config.mode == RunMode::steady_state) j["drive"] = config.drive;
  if (!config.parameters.empty()) j["parameters"] = config.parameters;
  if (!config.sweep.empty()) {
    json sweep = json::array();
    for (const SweepAxis& axis : config.sweep)
      sweep.push_back({{"parameter", axis.parameter}, {"values", axis.values}});
    j["sweep"] = std::move(sweep);
  }
  if (config.disorder) {
    j["disorder"] = {{"fraction", expr_to_json(config.disorder->fraction)},
                     {"realizations", config.disorder->realizations},
                     {"scale", to_string(config.disorder->scale)},
                     {"seed", config.disorder->seed.value_or(config.seed)}};
  }
  if (config.trap_cell) {
    j["trap_cell"] = {{"middle_atoms", config.trap_cell->middle_atoms},
                      {"search_bound", config.trap_cell->search_bound},
                      {"xi_middle", config.trap_cell->xi_middle},
                      {"xi_side", config.trap_cell->xi_side}};
    j["trapping"] = {{"early_time", config.trapping.early_time},
                     {"late_time", config.trapping.late_time},
                     {"population_threshold", config.trapping.population_threshold},
                     {"trend_threshold", config.trapping.trend_threshold}};
  }
  return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_serialization(config))));
  return buf;
}

// --- ensemble averaging ---------------------------------------------------------

EnsembleAverage ensemble_average(const std::vector<double>& times,
                                 const std::vector<std::vector<double>>& totals) {
  if (totals.empty()) throw std::invalid_argument("ensemble_average: no realizations");
  for (const auto& t : totals)
    if (t.size() != times.size())
      throw std::invalid_argument("ensemble_average: realization grids are not congruent");

  EnsembleAverage out;
  out.times = times;
  const std::size_t k = times.size();
  const double r = static_cast<double>(totals.size());
  out.mean.assign(k, 0.0);
  out.standard_error.assign(k, 0.0);
  for (const auto& t : totals)
    for (std::size_t i = 0; i < k; ++i) out.mean[i] += t[i];
  for (double& m : out.mean) m /= r;
  if (totals.size() > 1) {
    for (const auto& t : totals)
      for (std::size_t i = 0; i < k; ++i) {
        const double d = t[i] - out.mean[i];
        out.standard_error[i] += d * d;
      }
    for (double& s : out.standard_error) s = std::sqrt(s / (r - 1.0)) / std::sqrt(r);
  }
  return out;
}

EnsembleAverage ensemble_average(const std::vector<AmplitudeTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("ensemble_average: no realizations");
  for (const AmplitudeTrace& t : traces)
    if (t.times != traces.front().times)
      throw std::invalid_argument("ensemble_average: realization grids are not congruent");
  std::vector<std::vector<double>> totals;
  totals.reserve(traces.size());
  for (const AmplitudeTrace& t : traces) totals.push_back(total_population(t));
  return ensemble_average(traces.front().times, totals);
}

// --- execution --------------------------------------------------------------------

namespace {

void write_trace_csv(const fs::path& path, const std::vector<double>& times,
                     const Eigen::MatrixXd& pops) {
  std::string buf;
  buf.reserve(24 * static_cast<std::size_t>(pops.rows()) * static_cast<std::size_t>(pops.cols()) + 32);
  buf += "t,site,population\n";
  for (Eigen::Index k = 0; k < pops.rows(); ++k) {
    for (Eigen::Index s = 0; s < pops.cols(); ++s) {
      append_double(buf, times[static_cast<std::size_t>(k)]);
      buf += ',';
      append_int(buf, s + 1);
      buf += ',';
      append_double(buf, pops(k, s));
      buf += '\n';
    }
  }
  write_file(path, buf);
}

struct TaskOutput {
  ResultRecord record;
  std::vector<double> totals;  // kept only when ensemble curves are requested
};

// one sweep point x one realization, fully independent of every other task
TaskOutput execute_task(const ExperimentConfig& cfg, const std::string& hash, int point_index,
                        int label_width, const std::map<std::string, double>& point_params,
                        int realization, bool keep_totals) {
  TaskOutput out;
  ResultRecord& rec = out.record;
  rec.point_index = point_index;
  rec.realization = realization;
  rec.parameters = point_params;
  const auto t_start = std::chrono::steady_clock::now();

  std::map<std::string, double> params = cfg.parameters;
  for (const auto& [k, v] : point_params) params[k] = v;

  const CouplingParams coupling = cfg.coupling.resolve(params);

  if (cfg.mode == RunMode::minimal_atoms) {
    const TrapCellConfig& tc = *cfg.trap_cell;
    const MinimalAtomsResult res = minimal_trapping_atoms(
        coupling, tc.xi_side, tc.xi_middle, tc.middle_atoms, tc.search_bound, cfg.trapping);
    rec.observables["minimal_atoms"] = res.found ? static_cast<double>(res.side_atoms) : -1.0;
    rec.flags["minimal_atoms_found"] = res.found;
    rec.solver_path = "trap_search";
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    return out;
  }

  std::vector<ZoneSpec> zones;
  zones.reserve(cfg.zones.size());
  for (const ZoneConfig& z : cfg.zones)
    zones.push_back({z.bonds, lift_spacing(z.xi.resolve(params))});
  LatticeGeometry lattice = build_lattice(zones);
  if (cfg.disorder) {
    DisorderSpec spec;
    spec.fraction = cfg.disorder->fraction.resolve(params);
    spec.seed = cfg.disorder->seed.value_or(cfg.seed);
    spec.realizations = cfg.disorder->realizations;
    spec.scale = cfg.disorder->scale;
    lattice = apply_disorder(lattice, spec, realization).lattice;
  }
  const int n = lattice.size();
  const SingleExcitationHamiltonian single = build_single(lattice, coupling);
  const TransportSplit split = TransportSplit::symmetric(n);

  if (cfg.mode == RunMode::steady_state) {
    const Eigen::VectorXcd drive =
        cfg.drive == "uniform" ? uniform_drive(n) : plane_wave_drive(lattice);
    const Eigen::VectorXcd a = steady_state(single.matrix, drive);
    const Eigen::VectorXd populations = a.cwiseAbs2();
    for (const std::string& token : cfg.observables) {
      const std::optional<double> tp = transport_parameter(populations, split);
      if (!tp) throw std::runtime_error("transport undefined: zero steady-state population");
      rec.observables[token] = *tp;
    }
    rec.solver_path = "linear_solve";
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    return out;
  }

  // evolve mode
  const InitialStateConfig& ist = cfg.initial_state;
  AmplitudeTrace trace;
  if (ist.type == "multi_excitation") {
    const FockBasis basis(n, static_cast<int>(ist.sites.size()));
    const Eigen::MatrixXcd gen = build_multi(single, basis);
    const Eigen::VectorXcd a0 = multi_excitation_state(basis, ist.sites);
    trace = evolve(gen, a0, cfg.time_grid.grid());
    trace.basis = basis;
  } else {
    Eigen::VectorXcd a0;
    if (ist.type == "single_site") {
      a0 = single_site_state(n, ist.sites[0]);
    } else if (ist.type == "two_site") {
      a0 = two_site_state(n, ist.sites[0], ist.sites[1], ist.theta.resolve(params));
    } else {
      const int m = static_cast<int>(std::llround(ist.num_sites.resolve(params)));
      a0 = dicke_chain_state(n, m, ist.theta.resolve(params), ist.first_site);
    }
    trace = evolve(single.matrix, a0, cfg.time_grid.grid());
  }

  const Eigen::MatrixXd pops = site_populations(trace);
  std::vector<double> totals = total_population(trace);
  const int excitations = trace.excitations();
  const double threshold =
      cfg.transport_threshold > 0.0 ? cfg.transport_threshold : 0.1 * excitations;

  std::vector<double> zone_totals;
  if (cfg.trap_zone)
    zone_totals = zone_population(trace, cfg.trap_zone->first, cfg.trap_zone->second);

  for (const std::string& token : cfg.observables) {
    const ObsToken tok = parse_token(token);
    if (tok.head == "stop_time") {
      const StopTime st = stop_time_at_threshold(trace.times, totals, threshold);
      rec.observables[token] = st.time;
      rec.flags["stop_time_reached"] = st.reached;
    } else if (tok.head == "window_averaged_transport") {
      rec.observables[token] = window_averaged_transport(trace, split, threshold);
    } else if (tok.head == "total_population_at") {
      rec.observables[token] = value_at(trace.times, totals, tok.arg);
    } else if (tok.head == "zone_fraction_at") {
      const double total = value_at(trace.times, totals, tok.arg);
      const double zone = value_at(trace.times, zone_totals, tok.arg);
      if (total <= 0.0) throw std::runtime_error("zone fraction undefined: zero total population");
      rec.observables[token] = zone / total;
    } else if (tok.head == "min_zone_fraction_from") {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < trace.times.size(); ++k)
        if (trace.times[k] >= tok.arg && totals[k] > threshold)
          best = std::min(best, zone_totals[k] / totals[k]);
      if (!std::isfinite(best))
        throw std::runtime_error("min zone fraction: no grid point in the sustained window");
      rec.observables[token] = best;
    } else if (tok.head == "site_mean") {
      const int site = static_cast<int>(std::llround(tok.arg));
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t k = 0; k < trace.times.size(); ++k)
        if (totals[k] >= threshold) {
          sum += pops(static_cast<Eigen::Index>(k), site - 1);
          ++count;
        }
      if (count == 0) throw std::runtime_error("site mean: empty sustained window");
      rec.observables[token] = sum / static_cast<double>(count);
    } else if (tok.head == "trend") {
      if (trace.times.back() < cfg.trapping.late_time)
        throw std::runtime_error("trend needs the grid to reach the late reference time");
      const TrendResult tr = trend_parameter(value_at(trace.times, totals, cfg.trapping.early_time),
                                             value_at(trace.times, totals, cfg.trapping.late_time));
      rec.observables[token] = tr.value;
      rec.flags["no_surviving_population"] = tr.no_surviving_population;
    } else if (tok.head == "trapped") {
      const bool trapped = classify_trapped(trace.times, totals, cfg.trapping);
      rec.observables[token] = trapped ? 1.0 : 0.0;
      rec.flags["trapped"] = trapped;
    }
  }

  if (cfg.write_traces) {
    std::string stem = "trace_" + hash + "_" + zero_padded(point_index, label_width);
    if (cfg.disorder) stem += "_r" + zero_padded(realization, 3);
    write_trace_csv(fs::path(cfg.output_dir) / (stem + ".csv"), trace.times, pops);
    json sidecar;
    sidecar["basis"] = {{"excitations", excitations}, {"num_sites", n}};
    sidecar["config_hash"] = hash;
    sidecar["parameters"] = point_params;
    sidecar["point"] = point_index;
    if (cfg.disorder) sidecar["realization"] = realization;
    sidecar["solver_path"] = to_string(trace.solver_path);
    write_file(fs::path(cfg.output_dir) / (stem + ".json"), sidecar.dump(2) + "\n");
    rec.trace_file = stem + ".csv";
  }

  rec.solver_path = to_string(trace.solver_path);
  if (keep_totals) out.totals = std::move(totals);
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace

ExperimentResult run(const ExperimentConfig& config) {
  config.validate();
  const std::string hash = config_hash(config);
  fs::create_directories(config.output_dir);

  // row-major Cartesian product over the declared axes
  std::vector<std::map<std::string, double>> points{{}};
  for (const SweepAxis& axis : config.sweep) {
    std::vector<std::map<std::string, double>> extended;
    extended.reserve(points.size() * axis.values.size());
    for (const auto& p : points)
      for (double v : axis.values) {
        auto q = p;
        q[axis.parameter] = v;
        extended.push_back(std::move(q));
      }
    points = std::move(extended);
  }

  const int realizations = config.disorder ? config.disorder->realizations : 1;
  const int num_points = static_cast<int>(points.size());
  const std::size_t num_tasks = points.size() * static_cast<std::size_t>(realizations);
  const int label_width = std::max<int>(3, static_cast<int>(std::to_string(num_points - 1).size()));
  const bool keep_totals =
      config.disorder && config.write_ensemble && config.mode == RunMode::evolve;

  std::vector<TaskOutput> outputs(num_tasks);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= num_tasks) return;
      const int point = static_cast<int>(task / static_cast<std::size_t>(realizations));
      const int realization =
          config.disorder ? static_cast<int>(task % static_cast<std::size_t>(realizations)) : -1;
      try {
        outputs[task] = execute_task(config, hash, point, label_width, points[point],
                                     std::max(realization, 0), keep_totals);
        outputs[task].record.realization = realization;
      } catch (const std::exception& e) {
        ResultRecord rec;
        rec.point_index = point;
        rec.realization = realization;
        rec.parameters = points[point];
        rec.status = "failed";
        rec.error = e.what();
        outputs[task].record = std::move(rec);
      }
    }
  };

  unsigned int k = config.threads > 0 ? static_cast<unsigned int>(config.threads)
                                      : std::thread::hardware_concurrency();
  if (k == 0) k = 1;
  k = std::min<unsigned int>(k, static_cast<unsigned int>(num_tasks));
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (unsigned int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  ExperimentResult result;
  result.config_hash = hash;
  result.records.reserve(num_tasks);
  for (TaskOutput& out : outputs) {
    if (out.record.status != "ok") ++result.failures;
    result.records.push_back(out.record);
  }

  // ensemble population curves, one per sweep point
  if (keep_totals) {
    for (int p = 0; p < num_points; ++p) {
      std::vector<std::vector<double>> totals;
      totals.reserve(static_cast<std::size_t>(realizations));
      for (int r = 0; r < realizations; ++r) {
        const TaskOutput& out = outputs[static_cast<std::size_t>(p) * realizations + r];
        if (out.record.status == "ok") totals.push_back(out.totals);
      }
      if (totals.empty()) continue;
      const EnsembleAverage avg = ensemble_average(config.time_grid.grid(), totals);
      std::string buf = "t,mean,stderr\n";
      for (std::size_t i = 0; i < avg.times.size(); ++i) {
        append_double(buf, avg.times[i]);
        buf += ',';
        append_double(buf, avg.mean[i]);
        buf += ',';
        append_double(buf, avg.standard_error[i]);
        buf += '\n';
      }
      write_file(fs::path(config.output_dir) /
                     ("ensemble_" + hash + "_" + zero_padded(p, label_width) + ".csv"),
                 buf);
    }
  }

  // one sweep CSV per observable: axis columns, then the scalar (ensembles
  // aggregate to mean, standard error, and the contributing count)
  for (const std::string& token : config.observables) {
    const std::string column = sanitize_token(token);
    std::string buf;
    for (const SweepAxis& axis : config.sweep) {
      buf += axis.parameter;
      buf += ',';
    }
    buf += column;
    if (config.disorder) buf += ",stderr,realizations";
    buf += '\n';
    for (int p = 0; p < num_points; ++p) {
      std::vector<double> values;
      for (int r = 0; r < realizations; ++r) {
        const ResultRecord& rec = outputs[static_cast<std::size_t>(p) * realizations + r].record;
        const auto it = rec.observables.find(token);
        if (rec.status == "ok" && it != rec.observables.end()) values.push_back(it->second);
      }
      if (values.empty()) continue;
      std::string row;
      for (const SweepAxis& axis : config.sweep) {
        append_double(row, points[p].at(axis.parameter));
        row += ',';
      }
      if (!config.disorder) {
        append_double(row, values.front());
      } else {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        const double se = values.size() > 1
                              ? std::sqrt(var / (static_cast<double>(values.size()) - 1.0)) /
                                    std::sqrt(static_cast<double>(values.size()))
                              : 0.0;
        append_double(row, mean);
        row += ',';
        append_double(row, se);
        row += ',';
        append_int(row, static_cast<long long>(values.size()));
      }
      row += '\n';
      buf += row;
    }
    write_file(fs::path(config.output_dir) / ("sweep_" + column + ".csv"), buf);
  }

  // summary.json: one record per task plus run-level metadata
  json summary;
  summary["config_hash"] = hash;
  summary["failures"] = result.failures;
  summary["mode"] = to_string(config.mode);
  summary["name"] = config.name;
  summary["observables"] = config.observables;
  summary["points"] = num_points;
  summary["realizations"] = realizations;
  if (config.disorder) summary["ensemble_size"] = realizations;
  summary["seed"] = config.seed;
  {
    json axes = json::array();
    for (const SweepAxis& axis : config.sweep) axes.push_back(axis.parameter);
    summary["sweep_axes"] = std::move(axes);
  }
  summary["canonical_config"] = json::parse(canonical_serialization(config));
  json records = json::array();
  for (const ResultRecord& rec : result.records) {
    json jr;
    jr["index"] = rec.point_index;
    if (rec.realization >= 0) jr["realization"] = rec.realization;
    jr["parameters"] = rec.parameters;
    jr["observables"] = rec.observables;
    jr["flags"] = rec.flags;
    if (!rec.trace_file.empty()) jr["trace_file"] = rec.trace_file;
    if (!rec.solver_path.empty()) jr["solver_path"] = rec.solver_path;
    jr["status"] = rec.status;
    if (!rec.error.empty()) jr["error"] = rec.error;
    jr["wall_ms"] = rec.wall_ms;
    records.push_back(std::move(jr));
  }
  summary["records"] = std::move(records);
  result.summary_file = fs::path(config.output_dir) / "summary.json";
  write_file(result.summary_file, summary.dump(2) + "\n");
  return result;
}

// --- preset catalog ----------------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

// 0.2, 0.3, ..., 0.9 as exact tenths
std::vector<double> directionality_ladder() {
  std::vector<double> out;
  for (int i = 2; i <= 9; ++i) out.push_back(static_cast<double>(i) / 10.0);
  return out;
}

ExperimentConfig seven_atom_base() {
  ExperimentConfig c;
  c.zones = {{3, pi}, {3, ParamExpr::named("xi2")}};
  c.coupling.directionality = 0.2;
  c.initial_state.type = "single_site";
  c.initial_state.sites = {1};
  c.observables = {"window_averaged_transport", "stop_time"};
  return c;
}

ExperimentConfig trap_base() {
  ExperimentConfig c;
  c.zones = {{29, pi / 2}, {40, pi}, {30, pi / 2}};
  c.coupling.directionality = 0.2;
  c.initial_state.type = "single_site";
  c.initial_state.sites = {50};
  c.time_grid = {1500.0, 0.5};
  c.trap_zone = std::make_pair(30, 70);
  c.observables = {"total_population_at:1000", "zone_fraction_at:1000",
                   "min_zone_fraction_from:200", "stop_time"};
  return c;
}

ExperimentConfig preset_fig2a() {
  ExperimentConfig c = seven_atom_base();
  c.name = "fig2a";
  c.time_grid = {2000.0, 0.05};
  c.sweep = {{"xi2", {pi, pi / 8, pi / 2}}};
  return c;
}

ExperimentConfig preset_fig2b() {
  ExperimentConfig c = seven_atom_base();
  c.name = "fig2b";
  c.time_grid = {400.0, 0.05};
  c.sweep = {{"xi2", linspace(-pi, pi, 41)}};
  c.observables = {"site_mean:4", "stop_time"};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig2c() {
  ExperimentConfig c = preset_fig2b();
  c.name = "fig2c";
  c.observables = {"site_mean:5", "stop_time"};
  return c;
}

ExperimentConfig preset_fig2d() {
  ExperimentConfig c = seven_atom_base();
  c.name = "fig2d";
  c.zones = {{3, pi}, {3, pi / 2}};
  c.time_grid = {2000.0, 0.05};
  c.observables = {"site_mean:4", "site_mean:5", "window_averaged_transport", "stop_time"};
  return c;
}

ExperimentConfig preset_fig3a() {
  ExperimentConfig c = seven_atom_base();
  c.name = "fig3a";
  c.zones = {{3, pi}, {3, pi / 8}};
  c.coupling.directionality = ParamExpr::named("D");
  c.time_grid = {400.0, 0.05};
  c.sweep = {{"D", directionality_ladder()}};
  return c;
}

ExperimentConfig preset_fig3b() {
  ExperimentConfig c = preset_fig3a();
  c.name = "fig3b";
  c.zones = {{3, pi}, {3, pi / 2}};
  return c;
}

ExperimentConfig preset_fig3c() {
  ExperimentConfig c = seven_atom_base();
  c.name = "fig3c";
  c.coupling.directionality = 0.5;
  c.time_grid = {400.0, 0.05};
  c.sweep = {{"xi2", linspace(-pi, pi, 41)}};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig3d() {
  ExperimentConfig c = preset_fig3c();
  c.name = "fig3d";
  c.coupling.directionality = 0.9;
  return c;
}

ExperimentConfig steady_map_base(double directionality) {
  ExperimentConfig c;
  c.mode = RunMode::steady_state;
  c.zones = {{11, ParamExpr::named("xi1")}, {12, ParamExpr::named("xi2")}};
  c.coupling.directionality = directionality;
  c.sweep = {{"xi1", linspace(-pi, pi, 41)}, {"xi2", linspace(-pi, pi, 41)}};
  c.observables = {"transport_parameter"};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig4a() {
  ExperimentConfig c = steady_map_base(0.2);
  c.name = "fig4a";
  return c;
}

ExperimentConfig preset_fig4b() {
  ExperimentConfig c = steady_map_base(0.5);
  c.name = "fig4b";
  return c;
}

ExperimentConfig preset_fig4c() {
  ExperimentConfig c = steady_map_base(0.9);
  c.name = "fig4c";
  return c;
}

ExperimentConfig preset_fig5a() {
  ExperimentConfig c;
  c.name = "fig5a";
  c.zones = {{11, pi}, {12, pi / 8}};
  c.coupling.directionality = 0.2;
  c.initial_state.type = "two_site";
  c.initial_state.sites = {1, 2};
  c.initial_state.theta = ParamExpr::named("theta");
  c.time_grid = {6000.0, 0.25};
  c.sweep = {{"theta", linspace(0.0, 2.0 * pi, 33)}};
  c.observables = {"window_averaged_transport", "stop_time"};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig5b() {
  ExperimentConfig c = preset_fig5a();
  c.name = "fig5b";
  c.zones = {{11, pi}, {12, pi / 4}};
  c.coupling.directionality = 0.4;
  return c;
}

ExperimentConfig preset_fig5c() {
  ExperimentConfig c;
  c.name = "fig5c";
  c.zones = {{11, pi}, {12, pi / 8}};
  c.coupling.directionality = 0.2;
  c.initial_state.type = "dicke_chain";
  c.initial_state.first_site = 1;
  c.initial_state.num_sites = ParamExpr::named("M");
  c.initial_state.theta = 0.0;
  c.time_grid = {6000.0, 0.25};
  c.sweep = {{"M", {1.0, 2.0, 3.0, 4.0}}};
  c.observables = {"window_averaged_transport", "stop_time"};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig6a() {
  ExperimentConfig c = trap_base();
  c.name = "fig6a";
  return c;
}

ExperimentConfig preset_fig6b() {
  ExperimentConfig c = trap_base();
  c.name = "fig6b";
  c.coupling.directionality = 0.5;
  return c;
}

ExperimentConfig preset_fig6c() {
  ExperimentConfig c = trap_base();
  c.name = "fig6c";
  c.zones = {{29, pi / 2}, {40, pi / 8}, {30, pi / 2}};
  c.coupling.directionality = 0.0;
  return c;
}

ExperimentConfig preset_fig6d() {
  ExperimentConfig c = trap_base();
  c.name = "fig6d";
  c.zones = {{29, pi / 2}, {40, 3.0 * pi / 4}, {30, pi / 2}};
  c.coupling.directionality = 0.0;
  c.initial_state.type = "dicke_chain";
  c.initial_state.sites = {};
  c.initial_state.first_site = 30;
  c.initial_state.num_sites = 41.0;
  c.initial_state.theta = 0.0;
  return c;
}

ExperimentConfig preset_fig6e() {
  ExperimentConfig c = trap_base();
  c.name = "fig6e";
  c.coupling.directionality = ParamExpr::named("D");
  c.sweep = {{"D", {0.2, 0.5}}};
  return c;
}

ExperimentConfig preset_fig6f() {
  ExperimentConfig c = trap_base();
  c.name = "fig6f";
  c.coupling.directionality = ParamExpr::named("D");
  c.sweep = {{"D", {0.2, 0.5}}, {"frac", {0.0, 0.01, 0.05}}};
  DisorderConfig d;
  d.fraction = ParamExpr::named("frac");
  d.realizations = 100;
  d.scale = DisorderScale::wavelength;
  c.disorder = std::move(d);
  c.time_grid = {1500.0, 2.5};
  c.observables = {"total_population_at:1000"};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig7() {
  ExperimentConfig c;
  c.name = "fig7";
  c.mode = RunMode::minimal_atoms;
  c.coupling.directionality = ParamExpr::named("D");
  c.sweep = {{"D", linspace(0.1, 0.9, 9)}};
  TrapCellConfig tc;
  tc.xi_side = pi / 2;
  tc.xi_middle = pi;
  tc.middle_atoms = 1;
  tc.search_bound = 12;
  c.trap_cell = tc;
  c.observables = {"minimal_atoms"};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig8a() {
  ExperimentConfig c;
  c.name = "fig8a";
  c.zones = {{3, pi}, {3, pi / 2}};
  c.coupling.directionality = ParamExpr::named("D");
  c.initial_state.type = "multi_excitation";
  c.initial_state.sites = {1, 2};
  c.time_grid = {60.0, 0.02};
  c.sweep = {{"D", directionality_ladder()}};
  c.observables = {"window_averaged_transport", "stop_time"};
  return c;
}

ExperimentConfig preset_fig8b() {
  ExperimentConfig c = preset_fig8a();
  c.name = "fig8b";
  c.zones = {{3, pi}, {3, ParamExpr::named("xi2")}};
  c.coupling.directionality = 0.5;
  c.sweep = {{"xi2", linspace(-pi, pi, 41)}};
  c.write_traces = false;
  return c;
}

ExperimentConfig preset_fig8c() {
  ExperimentConfig c;
  c.name = "fig8c";
  c.zones = {{9, pi / 2}, {10, pi}, {10, pi / 2}};
  c.coupling.directionality = ParamExpr::named("D");
  c.initial_state.type = "multi_excitation";
  c.initial_state.sites = {15, 16};
  c.time_grid = {1000.0, 0.25};
  c.sweep = {{"D", {0.2, 0.5}}};
  c.trap_zone = std::make_pair(10, 20);
  c.observables = {"total_population_at:1000", "zone_fraction_at:1000",
                   "min_zone_fraction_from:200", "stop_time"};
  return c;
}

ExperimentConfig preset_fig8d() {
  ExperimentConfig c = preset_fig8c();
  c.name = "fig8d";
  c.time_grid = {4000.0, 0.25};
  c.observables = {"total_population_at:1000", "zone_fraction_at:1000", "trend", "trapped"};
  c.write_traces = false;
  return c;
}

struct PresetEntry {
  const char* name;
  const char* description;
  ExperimentConfig (*build)();
};

const PresetEntry preset_table[] = {
    {"fig2a", "Per-site population traces for a single excitation launched at the left edge of a"
              " 7-atom two-zone chain, at three interface spacings", preset_fig2a},
    {"fig2b", "Probe-atom mean occupation across a signed interface-spacing sweep (7 atoms)",
     preset_fig2b},
    {"fig2c", "Mean occupation of the first right-zone atom across a signed interface-spacing"
              " sweep (7 atoms)", preset_fig2c},
    {"fig2d", "Probe repopulation dynamics at the strongly reflecting interface spacing (7 atoms)",
     preset_fig2d},
    {"fig3a", "Window-averaged transport parameter versus directionality at interface spacing"
              " pi/8 (7 atoms)", preset_fig3a},
    {"fig3b", "Window-averaged transport parameter versus directionality at interface spacing"
              " pi/2 (7 atoms)", preset_fig3b},
    {"fig3c", "Window-averaged transport parameter versus signed interface spacing at"
              " directionality 0.5 (7 atoms)", preset_fig3c},
    {"fig3d", "Window-averaged transport parameter versus signed interface spacing at"
              " directionality 0.9 (7 atoms)", preset_fig3d},
    {"fig4a", "Steady-state transport-parameter map over both zone spacings under uniform weak"
              " drive, directionality 0.2 (24 atoms)", preset_fig4a},
    {"fig4b", "Steady-state transport-parameter map over both zone spacings under uniform weak"
              " drive, directionality 0.5 (24 atoms)", preset_fig4b},
    {"fig4c", "Steady-state transport-parameter map over both zone spacings under uniform weak"
              " drive, directionality 0.9 (24 atoms)", preset_fig4c},
    {"fig5a", "Window-averaged transport versus the relative phase of a two-site excitation"
              " (24 atoms, spacings pi and pi/8, directionality 0.2)", preset_fig5a},
    {"fig5b", "Window-averaged transport versus the relative phase of a two-site excitation"
              " (24 atoms, spacings pi and pi/4, directionality 0.4)", preset_fig5b},
    {"fig5c", "Window-averaged transport for an excitation shared over M = 1..4 left-edge sites"
              " (24 atoms)", preset_fig5c},
    {"fig6a", "Three-zone trap, single excitation at the middle-zone center, directionality 0.2"
              " (100 atoms, spacings pi/2, pi, pi/2)", preset_fig6a},
    {"fig6b", "Three-zone trap, single excitation at the middle-zone center, directionality 0.5"
              " (100 atoms, spacings pi/2, pi, pi/2)", preset_fig6b},
    {"fig6c", "Three-zone chain with reciprocal coupling and middle spacing pi/8, single-site"
              " start (100 atoms)", preset_fig6c},
    {"fig6d", "Three-zone chain with reciprocal coupling and middle spacing 3pi/4, equal-weight"
              " start over the middle zone (100 atoms)", preset_fig6d},
    {"fig6e", "Trap-zone population fraction and late-time totals versus directionality for the"
              " three-zone trap", preset_fig6e},
    {"fig6f", "Position-disorder ensembles for the three-zone trap: late-time population versus"
              " fluctuation strength at two directionalities", preset_fig6f},
    {"fig7", "Minimal side-zone atom count that traps a middle-zone excitation, versus"
             " directionality", preset_fig7},
    {"fig8a", "Window-averaged transport for a double excitation on the first two sites versus"
              " directionality (7 atoms)", preset_fig8a},
    {"fig8b", "Window-averaged transport for a double excitation versus signed interface spacing"
              " at directionality 0.5 (7 atoms)", preset_fig8b},
    {"fig8c", "Three-zone trap holding a double excitation started at the middle-zone center"
              " (30 atoms)", preset_fig8c},
    {"fig8d", "Late-time totals, trap-zone fraction, and trend classification for the"
              " double-excitation trap (30 atoms)", preset_fig8d},
};

}  // namespace

std::vector<PresetInfo> presets() {
  std::vector<PresetInfo> out;
  out.reserve(std::size(preset_table));
  for (const PresetEntry& e : preset_table) out.push_back({e.name, e.description});
  return out;
}

ExperimentConfig preset_config(const std::string& name) {
  for (const PresetEntry& e : preset_table)
    if (name == e.name) {
      ExperimentConfig c = e.build();
      c.validate();
      return c;
    }
  throw std::invalid_argument("unknown preset '" + name + "'; see list-presets");
}

}  // namespace chiralchain

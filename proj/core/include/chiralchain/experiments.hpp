#pragma once
/*
 * experiments.hpp — declarative experiment runner: config files, parameter
 * sweeps, disorder ensembles, figure presets, and persistence.
 *
 * An experiment is one JSON config describing a lattice, a coupling, an
 * initial state (or a weak drive), a time grid, named parameters, sweep axes
 * over those parameters, and a list of scalar observables. Numeric fields
 * accept either a literal or a "$name" reference resolved against the
 * parameter map; sweep axes override named parameters point by point.
 *
 * Execution covers the Cartesian product of the sweep axes (row-major over
 * the declared axis order) times the disorder realizations. Points run on a
 * worker pool; each point writes its own trace file, the coordinator writes
 * summary.json, one sweep_<observable>.csv per scalar observable, and
 * ensemble_<hash>_<point>.csv population curves for disorder ensembles.
 * A failing point is captured in its record and never aborts the sweep.
 *
 * Determinism: all randomness flows through the disorder seed, outputs are
 * written with shortest round-trip decimal formatting, and the worker count
 * never changes file contents or names. The config hash covers exactly the
 * fields that determine trace content (mode, zones, coupling, initial state,
 * drive, time grid, parameters, sweep, disorder, trap cell, seed) via FNV-1a
 * over a canonical serialization (sorted keys, shortest round-trip floats),
 * so it is stable under field reordering in the config file.
 *
 * Scalar observable tokens (suffix parameters after ':'):
 *   stop_time                      first grid time with P_tot <= threshold
 *   window_averaged_transport      mean T_p over the sustained window
 *   transport_parameter            T_p of steady-state populations
 *   total_population_at:<t>        P_tot at the grid point nearest t
 *   zone_fraction_at:<t>           P_zone/P_tot at the grid point nearest t
 *   min_zone_fraction_from:<t>     min of P_zone/P_tot over the sustained window from t
 *   site_mean:<n>                  mean of P_n over the sustained window
 *   trend                          [P_tot(1000) - P_tot(4000)] / P_tot(1000)
 *   trapped                        trapping classification, 0 or 1
 *   minimal_atoms                  smallest trapped side-zone count (-1: none)
 * The sustained window is the set of grid points with P_tot >= threshold;
 * the threshold defaults to 0.1 per excitation. Zone observables read the
 * inclusive 1-based `trap_zone` site range.
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chiralchain/dynamics.hpp"
#include "chiralchain/geometry.hpp"
#include "chiralchain/hamiltonian.hpp"
#include "chiralchain/observables.hpp"

namespace chiralchain {

// literal value or "$name" reference into the resolved parameter map
struct ParamExpr {
  double value = 0.0;
  std::string ref;  // nonempty -> look up by name

  ParamExpr() = default;
  ParamExpr(double v) : value(v) {}  // NOLINT: implicit by design
  static ParamExpr named(std::string name);

  bool is_ref() const { return !ref.empty(); }
  double resolve(const std::map<std::string, double>& params) const;  // throws on unknown name
};

enum class RunMode { evolve, steady_state, minimal_atoms };
const char* to_string(RunMode mode);

struct ZoneConfig {
  int bonds = 1;
  ParamExpr xi;
};

struct CouplingConfig {
  bool use_directionality = true;
  ParamExpr directionality;  // D in [-1, 1]
  ParamExpr gamma_left{0.5};
  ParamExpr gamma_right{0.5};

  CouplingParams resolve(const std::map<std::string, double>& params) const;
};

struct InitialStateConfig {
  std::string type = "single_site";  // single_site | two_site | dicke_chain | multi_excitation
  std::vector<int> sites;            // 1-based; one site, two sites, or the occupied subset
  ParamExpr theta{0.0};              // relative phase (two_site / dicke_chain)
  int first_site = 1;                // dicke_chain anchor
  ParamExpr num_sites{1.0};          // dicke_chain width, sweepable

  int excitations() const { return type == "multi_excitation" ? static_cast<int>(sites.size()) : 1; }
};

struct TimeGridConfig {
  double t_max = 100.0;
  double dt = 0.1;

  std::vector<double> grid() const;  // 0, dt, 2 dt, ..., t_max
};

struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

struct DisorderConfig {
  ParamExpr fraction;                 // sweepable
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  int realizations = 100;
  DisorderScale scale = DisorderScale::wavelength;
};

// symmetric three-zone search cell for the minimal_atoms mode
struct TrapCellConfig {
  double xi_side = 0.0;
  double xi_middle = 0.0;
  int middle_atoms = 1;
  int search_bound = 12;
};

struct ExperimentConfig {
  std::string name;
  RunMode mode = RunMode::evolve;
  std::vector<ZoneConfig> zones;
  CouplingConfig coupling;
  InitialStateConfig initial_state;
  std::string drive = "uniform";  // steady_state: uniform | plane_wave
  TimeGridConfig time_grid;
  std::map<std::string, double> parameters;
  std::vector<SweepAxis> sweep;
  std::vector<std::string> observables;
  std::optional<DisorderConfig> disorder;
  std::optional<TrapCellConfig> trap_cell;
  std::optional<std::pair<int, int>> trap_zone;  // 1-based inclusive site range
  double transport_threshold = -1.0;  // sustained-window cut; < 0 -> 0.1 per excitation
  TrappingRule trapping;
  bool write_traces = true;
  bool write_ensemble = true;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
  int threads = 0;  // 0 -> hardware concurrency

  int num_atoms() const;  // 1 + total bond count (0 in minimal_atoms mode)
  void validate() const;  // throws std::invalid_argument
};

// strict parse: unknown keys and malformed fields throw std::invalid_argument
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& file);

// canonical serialization of the trace-determining fields (sorted keys,
// shortest round-trip floats) and its FNV-1a 64 hash as 16 hex digits
std::string canonical_serialization(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct ResultRecord {
  int point_index = 0;
  int realization = -1;  // -1: no disorder ensemble
  std::map<std::string, double> parameters;  // resolved sweep-point values
  std::map<std::string, double> observables;
  std::map<std::string, bool> flags;  // stop_time_reached, trapped, ...
  std::string trace_file;             // relative to output_dir; empty if not written
  std::string solver_path;
  std::string status = "ok";  // ok | failed
  std::string error;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<ResultRecord> records;  // point-major, realization-minor order
  int failures = 0;
  std::filesystem::path summary_file;
};

ExperimentResult run(const ExperimentConfig& config);

struct EnsembleAverage {
  std::vector<double> times;
  std::vector<double> mean;            // pointwise mean of P_tot(t)
  std::vector<double> standard_error;  // sample standard deviation / sqrt(count)
};

// pointwise mean and standard error of P_tot over realizations; grids must
// be congruent (throws std::invalid_argument otherwise)
EnsembleAverage ensemble_average(const std::vector<AmplitudeTrace>& traces);
EnsembleAverage ensemble_average(const std::vector<double>& times,
                                 const std::vector<std::vector<double>>& totals);

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> presets();
ExperimentConfig preset_config(const std::string& name);  // throws on unknown name

}  // namespace chiralchain

#include "chiralchain/observables.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace chiralchain {

TransportSplit TransportSplit::symmetric(int num_sites) {
  if (num_sites < 2)
    throw std::invalid_argument("TransportSplit: need at least two sites");
  TransportSplit split;
  if (num_sites % 2 == 0) {
    for (int s = 1; s <= num_sites / 2; ++s) split.left.push_back(s);
    for (int s = num_sites / 2 + 1; s <= num_sites; ++s) split.right.push_back(s);
  } else {
    const int probe = (num_sites + 1) / 2;
    for (int s = 1; s < probe; ++s) split.left.push_back(s);
    for (int s = probe + 1; s <= num_sites; ++s) split.right.push_back(s);
    split.excluded.push_back(probe);
  }
  return split;
}

std::optional<double> transport_parameter(const Eigen::VectorXd& populations,
                                          const TransportSplit& split) {
  const double total = populations.sum();
  if (total <= 0.0) return std::nullopt;
  double left = 0.0, right = 0.0;
  for (int s : split.left) left += populations[s - 1];
  for (int s : split.right) right += populations[s - 1];
  return (left - right) / total;
}

double window_averaged_transport(const AmplitudeTrace& trace, const TransportSplit& split,
                                 double population_threshold) {
  const Eigen::MatrixXd pops = site_populations(trace);
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index k = 0; k < pops.rows(); ++k) {
    const Eigen::VectorXd row = pops.row(k);
    if (row.sum() < population_threshold) continue;
    if (const auto tp = transport_parameter(row, split)) {
      sum += *tp;
      ++count;
    }
  }
  if (count == 0)
    throw std::invalid_argument(
        "window_averaged_transport: no grid point meets the population threshold");
  return sum / count;
}

TrendResult trend_parameter(double early_total, double late_total) {
  if (early_total < 0.0 || late_total < 0.0)
    throw std::invalid_argument("trend_parameter: populations must be nonnegative");
  if (early_total <= 0.0) return {0.0, true};
  return {(early_total - late_total) / early_total, false};
}

namespace {

double value_at(const std::vector<double>& times, const std::vector<double>& values,
                double t) {
  // exact propagation makes grids cheap; nearest grid point is enough
  std::size_t best = 0;
  double dist = std::abs(times[0] - t);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double d = std::abs(times[k] - t);
    if (d < dist) { dist = d; best = k; }
  }
  return values[best];
}

}  // namespace

bool classify_trapped(const std::vector<double>& times, const std::vector<double>& total,
                      const TrappingRule& rule) {
  if (times.size() != total.size() || times.empty())
    throw std::invalid_argument("classify_trapped: mismatched grids");
  if (times.back() < rule.late_time)
    throw std::invalid_argument(
        "classify_trapped: trace ends before the late reference time; extend the grid");
  const double early = value_at(times, total, rule.early_time);
  const double late = value_at(times, total, rule.late_time);
  if (early <= rule.population_threshold) return false;
  const TrendResult trend = trend_parameter(early, late);
  if (trend.no_surviving_population) return false;
  return trend.value <= rule.trend_threshold;
}

bool classify_trapped(const AmplitudeTrace& trace, const TrappingRule& rule) {
  return classify_trapped(trace.times, total_population(trace), rule);
}

MinimalAtomsResult minimal_trapping_atoms(const CouplingParams& coupling, double xi_side,
                                          double xi_middle, int middle_atoms,
                                          int search_bound, const TrappingRule& rule) {
  if (search_bound < 1)
    throw std::invalid_argument("minimal_trapping_atoms: search bound must be >= 1");

  const auto trapped_at = [&](int side_atoms) -> bool {
    const LatticeGeometry lattice =
        build_lattice(trap_cell_zones(side_atoms, middle_atoms, xi_side, xi_middle));
    const SingleExcitationHamiltonian gen = build_single(lattice, coupling);
    // excitation starts at the center of the middle zone
    const int site = side_atoms + (middle_atoms + 1) / 2;
    const AmplitudeTrace trace =
        evolve(gen.matrix, single_site_state(lattice.size(), site),
               {0.0, rule.early_time, rule.late_time});
    return classify_trapped(trace, rule);
  };

  std::vector<std::future<bool>> candidates;
  candidates.reserve(search_bound);
  for (int k = 1; k <= search_bound; ++k)
    candidates.push_back(std::async(std::launch::async, trapped_at, k));
  // deterministic reduction: the smallest passing side count wins
  for (int k = 1; k <= search_bound; ++k)
    if (candidates[k - 1].get()) return {k, true};
  return {0, false};
}

}  // namespace chiralchain

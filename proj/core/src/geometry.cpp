#include "chiralchain/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chiralchain {

namespace {

constexpr double near_zero_threshold = 0.05;  // rad; below this a 2*pi offset is advised

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

// uniform in (0,1): 53-bit mantissa, offset keeps log() finite
double uniform01(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// standard normal, pure function of the key (Box-Muller, one branch)
double standard_normal(std::uint64_t key) {
  const double u1 = uniform01(splitmix64(key));
  const double u2 = uniform01(splitmix64(key ^ 0xda3e39cb94b95bdbull));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

const char* to_string(DisorderScale scale) {
  return scale == DisorderScale::wavelength ? "wavelength" : "local_spacing";
}

LatticeGeometry build_lattice(const std::vector<ZoneSpec>& zones) {
  if (zones.empty()) throw std::invalid_argument("build_lattice: empty zone list");

  LatticeGeometry out;
  out.phases.push_back(0.0);
  int atom = 1;  // 1-based index of the last atom placed
  for (std::size_t z = 0; z < zones.size(); ++z) {
    const ZoneSpec& zone = zones[z];
    if (zone.bond_count < 1)
      throw std::invalid_argument("build_lattice: zone bond_count must be >= 1");
    if (!std::isfinite(zone.xi))
      throw std::invalid_argument("build_lattice: zone spacing must be finite");
    if (zone.xi < near_zero_threshold) {
      std::ostringstream msg;
      msg << "zone " << z + 1 << ": spacing " << zone.xi
          << " rad is near or below zero; couplings are 2*pi periodic, so pass xi + 2*pi*m"
          << " explicitly if a physical small spacing is intended";
      out.warnings.push_back(msg.str());
    }
    for (int b = 0; b < zone.bond_count; ++b)
      out.phases.push_back(out.phases.back() + zone.xi);
    atom += zone.bond_count;
    if (z + 1 < zones.size()) out.zone_boundaries.push_back(atom);
  }
  return out;
}

std::vector<ZoneSpec> two_zone_split(int num_atoms, double xi1, double xi2) {
  if (num_atoms < 3)
    throw std::invalid_argument("two_zone_split: need at least 3 atoms");
  if (num_atoms % 2 == 1) {
    const int k = (num_atoms - 1) / 2;
    return {{k, xi1}, {k, xi2}};
  }
  return {{num_atoms / 2 - 1, xi1}, {num_atoms / 2, xi2}};
}

std::vector<ZoneSpec> trap_cell_zones(int side_atoms, int middle_atoms,
                                      double xi_side, double xi_middle) {
  if (side_atoms < 1 || middle_atoms < 1)
    throw std::invalid_argument("trap_cell_zones: zone atom counts must be >= 1");
  // side_atoms == 1 degenerates to the homogeneous middle cell (no probes)
  if (side_atoms == 1) return {{middle_atoms + 1, xi_middle}};
  return {{side_atoms - 1, xi_side},
          {middle_atoms + 1, xi_middle},
          {side_atoms - 1, xi_side}};
}

DisorderedLattice apply_disorder(const LatticeGeometry& lattice,
                                 const DisorderSpec& spec,
                                 int realization_index) {
  if (spec.fraction < 0.0 || !std::isfinite(spec.fraction))
    throw std::invalid_argument("apply_disorder: fraction must be finite and >= 0");
  if (spec.realizations < 1)
    throw std::invalid_argument("apply_disorder: realizations must be >= 1");
  if (realization_index < 0 || realization_index >= spec.realizations)
    throw std::invalid_argument("apply_disorder: realization_index out of range");

  DisorderedLattice out{lattice, 0};
  if (spec.fraction == 0.0) return out;

  const int n = lattice.size();
  std::vector<double> sigma(n);
  for (int mu = 0; mu < n; ++mu) {
    if (spec.scale == DisorderScale::wavelength) {
      sigma[mu] = spec.fraction * 2.0 * std::numbers::pi;
    } else {
      // local spacing: the bond to the atom's left; the first atom uses its right bond
      const int b = mu == 0 ? 0 : mu - 1;
      sigma[mu] = spec.fraction * lattice.bond(b);
    }
  }

  const std::uint64_t base = mix(spec.seed, static_cast<std::uint64_t>(realization_index));
  constexpr int max_attempts = 1000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<double> phases(n);
    for (int mu = 0; mu < n; ++mu) {
      const std::uint64_t key =
          mix(mix(base, static_cast<std::uint64_t>(attempt)), static_cast<std::uint64_t>(mu));
      phases[mu] = lattice.phases[mu] + sigma[mu] * standard_normal(key);
    }
    bool ordered = true;
    for (int mu = 0; mu + 1 < n; ++mu)
      if (phases[mu + 1] <= phases[mu]) { ordered = false; break; }
    if (!ordered) { ++out.redraws; continue; }
    // re-fix the translation gauge so downstream consumers see phases[0] == 0
    const double shift = phases.front();
    for (double& p : phases) p -= shift;
    out.lattice.phases = std::move(phases);
    return out;
  }
  throw std::runtime_error(
      "apply_disorder: ordering violated in every redraw; fraction too large for this lattice");
}

}  // namespace chiralchain

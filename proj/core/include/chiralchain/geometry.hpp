#pragma once
/*
 * geometry.hpp — 1D atomic lattice construction on a waveguide axis.
 *
 * Atom positions are carried as dimensionless phases phi_mu = k_s r_mu,
 * accumulated from bond spacings xi = k_s d (radians). A chain is specified
 * zone by zone; each zone contributes `bond_count` bonds of equal spacing
 * `xi`, and the atoms at zone junctions (probe atoms) are recorded as 1-based
 * indices.
 *
 * Conventions:
 *   - phases[0] = 0 (global translation gauge; dynamics depend on differences)
 *   - coupling phases are 2*pi periodic, so any spacing is accepted as its
 *     analytic continuation: xi and xi + 2*pi*m generate identical couplings,
 *     and signed sweeps over [-pi, pi] mean the lifted spacing 2*pi - |xi|.
 *     A spacing intended to be physically "near zero" must be passed with an
 *     explicit +2*pi*m offset (a warning is recorded below 0.05 rad, which
 *     also covers zero and negative inputs)
 *   - position disorder displaces absolute positions, Gaussian per atom with
 *     sigma = fraction * reference scale; the reference scale is either the
 *     wavelength (sigma_phi = fraction * 2*pi, default) or the local bond
 *     spacing. Draws are a pure function of (seed, realization, attempt,
 *     atom); a realization that breaks the ordering is rejected and redrawn
 *     whole, never clamped.
 */

#include <cstdint>
#include <string>
#include <vector>

namespace chiralchain {

struct ZoneSpec {
  int bond_count = 0;  // inter-atomic bonds in the zone, >= 1
  double xi = 0.0;     // dimensionless spacing k_s d, finite (2*pi periodic couplings)
};

struct LatticeGeometry {
  std::vector<double> phases;         // k_s r_mu; phases[0] == 0
  std::vector<int> zone_boundaries;   // 1-based probe atom indices at zone junctions
  std::vector<std::string> warnings;  // validation notes (e.g. near-zero spacing)

  int size() const { return static_cast<int>(phases.size()); }
  // spacing of the bond between atoms mu and mu+1 (0-based bond index)
  double bond(int b) const { return phases[b + 1] - phases[b]; }
};

enum class DisorderScale {
  wavelength,     // sigma_phi = fraction * 2*pi
  local_spacing,  // sigma_phi = fraction * adjacent bond spacing (atom 1 uses its right bond)
};

const char* to_string(DisorderScale scale);

struct DisorderSpec {
  double fraction = 0.0;  // >= 0
  std::uint64_t seed = 0;
  int realizations = 1;   // >= 1
  DisorderScale scale = DisorderScale::wavelength;
};

// Concatenates the zones' bond sequences into cumulative phases.
// Throws std::invalid_argument on an empty zone list, bond_count < 1, or a
// non-finite spacing.
LatticeGeometry build_lattice(const std::vector<ZoneSpec>& zones);

// Two-zone split of `num_atoms` atoms: odd counts put (n-1)/2 bonds in each
// zone around the central probe; even counts give the second zone the extra
// bond, so the interface bond carries xi2.
std::vector<ZoneSpec> two_zone_split(int num_atoms, double xi1, double xi2);

// Symmetric three-zone trap cell: `side_atoms` atoms in each outer zone,
// `middle_atoms` atoms between the two probe atoms. Bond sequence
// (side_atoms-1) x xi_side, (middle_atoms+1) x xi_middle, (side_atoms-1) x
// xi_side; probes at side_atoms and side_atoms + middle_atoms + 1.
std::vector<ZoneSpec> trap_cell_zones(int side_atoms, int middle_atoms,
                                      double xi_side, double xi_middle);

struct DisorderedLattice {
  LatticeGeometry lattice;
  int redraws = 0;  // whole-realization redraws forced by ordering violations
};

// Displaces every atom independently; deterministic in (spec.seed,
// realization_index, atom). Throws std::invalid_argument for a bad spec or
// realization_index outside [0, spec.realizations), std::runtime_error if the
// ordering cannot be satisfied within the redraw budget.
DisorderedLattice apply_disorder(const LatticeGeometry& lattice,
                                 const DisorderSpec& spec,
                                 int realization_index);

}  // namespace chiralchain

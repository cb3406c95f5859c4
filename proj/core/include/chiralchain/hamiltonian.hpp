#pragma once
/*
 * hamiltonian.hpp — non-Hermitian generators of no-jump dynamics.
 *
 * Single excitation: amplitudes evolve as da/dt = M a with
 *   M[mu][mu] = -gamma/2
 *   M[mu][nu] = -gamma_R e^{-i(phi_mu - phi_nu)}   for nu < mu
 *   M[mu][nu] = -gamma_L e^{-i(phi_nu - phi_mu)}   for nu > mu
 * (phi = k_s r): excitation hops rightward through the right-decay channel
 * and leftward through the left one, each hop picking up the propagation
 * phase k_s |r_mu - r_nu|. The Schrodinger-convention effective Hamiltonian
 * is H_eff = i M; we store M itself to avoid the factor-of-i ambiguity.
 *
 * The paired dissipator Gamma[mu][nu] = gamma_L e^{+i d} + gamma_R e^{-i d},
 * d = phi_mu - phi_nu, satisfies Gamma = -(M + M^dag) and is positive
 * semidefinite of rank <= 2: one collective emission channel per propagation
 * direction.
 *
 * M excitations: hard-core lift over the C(N,M) site subsets in lexicographic
 * order. Diagonal -M gamma / 2; two subsets related by moving one excitation
 * nu -> mu couple with the single-excitation entry M[mu][nu]; no sign factors
 * (spin flips on distinct sites commute).
 */

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "chiralchain/geometry.hpp"

namespace chiralchain {

struct CouplingParams {
  double gamma_L = 0.5;  // left decay rate, >= 0
  double gamma_R = 0.5;  // right decay rate, >= 0

  double gamma() const { return gamma_L + gamma_R; }
  double directionality() const { return (gamma_R - gamma_L) / gamma(); }

  // gamma defaults to 1 so all times are in units of 1/gamma
  static CouplingParams from_directionality(double D, double gamma = 1.0);

  void validate() const;  // throws std::invalid_argument
};

struct SingleExcitationHamiltonian {
  Eigen::MatrixXcd matrix;  // da/dt = matrix * a
};

SingleExcitationHamiltonian build_single(const LatticeGeometry& lattice,
                                         const CouplingParams& coupling);

// Gamma = -(M + M^dag); Hermitian, PSD, rank <= 2
Eigen::MatrixXcd dissipator_matrix(const LatticeGeometry& lattice,
                                   const CouplingParams& coupling);

// Ordered basis of M-element site subsets of {1..N} (stored 0-based),
// lexicographic. Site count is capped at 64 so subsets pack into a bitmask.
class FockBasis {
 public:
  FockBasis(int num_sites, int excitations);

  int num_sites() const { return num_sites_; }
  int excitations() const { return excitations_; }
  int dimension() const { return static_cast<int>(states_.size()); }
  // strictly increasing 0-based site indices
  const std::vector<int>& state(int index) const { return states_[index]; }
  // index of a subset given as 0-based sites (any order); throws if absent
  int index_of(const std::vector<int>& sites) const;

 private:
  int num_sites_ = 0;
  int excitations_ = 0;
  std::vector<std::vector<int>> states_;
  std::unordered_map<std::uint64_t, int> index_;  // site bitmask -> position
};

Eigen::MatrixXcd build_multi(const SingleExcitationHamiltonian& single,
                             const FockBasis& basis);

}  // namespace chiralchain

#pragma once
/*
 * oracle.hpp — brute-force master-equation evolution on the full 2^N space.
 *
 * Validates the effective-Hamiltonian engine from first principles. The
 * Hermitian Hamiltonian and the two collective jump operators are built so
 * that the no-jump generator -iH - (1/2)(c_L^dag c_L + c_R^dag c_R),
 * restricted to the single-excitation sector, reproduces the amplitude
 * generator of build_single exactly:
 *
 *   H = -i (gamma_R / 2) sum_{mu > nu} (e^{-i(phi_mu - phi_nu)} sigma_mu^dag sigma_nu - h.c.)
 *       -i (gamma_L / 2) sum_{mu < nu} (e^{-i(phi_nu - phi_mu)} sigma_mu^dag sigma_nu - h.c.)
 *   c_R = sqrt(gamma_R) sum_mu e^{+i phi_mu} sigma_mu
 *   c_L = sqrt(gamma_L) sum_mu e^{-i phi_mu} sigma_mu
 *
 * dρ/dt = -i[H, ρ] + sum_d (c_d ρ c_d^dag - {c_d^dag c_d, ρ}/2).
 *
 * Evolution: exact exponentiation of the vectorized Liouvillian for small N
 * (the superoperator is dense, dimension 4^N), adaptive integration on ρ for
 * larger N. The exact-exponentiation cap defaults to N = 4 (256-dim
 * superoperator); above it, eigendecomposing the superoperator costs minutes
 * while the integrator at 1e-9 tolerance matches it far below every
 * validation gate.
 */

#include <Eigen/Dense>
#include <vector>

#include "chiralchain/geometry.hpp"
#include "chiralchain/hamiltonian.hpp"

namespace chiralchain {

struct LindbladGenerator {
  int num_atoms = 0;
  Eigen::MatrixXcd hamiltonian;  // 2^N x 2^N, Hermitian
  Eigen::MatrixXcd c_left;       // collective left-emission jump operator
  Eigen::MatrixXcd c_right;

  // d(rho)/dt
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  // -iH - (1/2)(c_L^dag c_L + c_R^dag c_R) on the full space
  Eigen::MatrixXcd no_jump_generator() const;
  // action on vec(rho), column-major; dense, so only sensible for small N
  Eigen::MatrixXcd dense_superoperator() const;
};

// capacity error above 10 atoms (the density matrix alone is 2^N x 2^N)
LindbladGenerator lindblad_generator(const LatticeGeometry& lattice,
                                     const CouplingParams& coupling);

struct OracleOptions {
  int exact_expm_max_atoms = 4;  // superoperator exponentiation cap
  double rel_tol = 1e-9;         // integrator tolerances beyond the cap
  double abs_tol = 1e-12;
  double cond_threshold = 1e12;  // superoperator eigenbasis guard
};

struct OracleTrace {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> states;  // rho at each grid time
};

OracleTrace oracle_evolve(const LindbladGenerator& generator, const Eigen::MatrixXcd& rho0,
                          std::vector<double> times, const OracleOptions& options = {});

// row k = P_n(t_k) = tr(rho(t_k) * |e><e|_n)
Eigen::MatrixXd oracle_site_populations(const OracleTrace& trace);

// embeds a single-excitation amplitude vector (or an M-excitation subset
// vector when basis is given) as a pure density matrix on the full space
Eigen::MatrixXcd density_from_amplitudes(int num_atoms, const Eigen::VectorXcd& amplitudes,
                                         const FockBasis* basis = nullptr);

}  // namespace chiralchain

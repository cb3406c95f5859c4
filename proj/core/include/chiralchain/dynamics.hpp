#pragma once
/*
 * dynamics.hpp — exact time evolution of amplitude vectors, initial-state
 * builders, and weak-drive steady states.
 *
 * a(t) = exp(t G) a0 is evaluated by eigendecomposition of the (generally
 * non-normal) generator G. A condition-number guard on the eigenvector matrix
 * catches defective cases — cascaded chains with |D| = 1 have Jordan blocks —
 * and falls back to an adaptive Dormand-Prince integrator tight enough to
 * stay within 1e-8 of the exact propagator.
 *
 * Steady state under a weak drive: G a + i Omega = 0, i.e.
 * a_ss = -G^{-1} (i Omega). A singular G means a non-decaying mode is aligned
 * with the drive; that raises NonDecayingModeError carrying the null vector.
 */

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiralchain/hamiltonian.hpp"

namespace chiralchain {

enum class SolverPath { eigendecomposition, adaptive_rk };

const char* to_string(SolverPath path);

struct EvolveOptions {
  double cond_threshold = 1e12;           // eigenvector condition-number guard
  double rel_tol = 1e-10;                 // fallback integrator tolerances
  double abs_tol = 1e-13;
  std::optional<SolverPath> force_path;   // tests pin a path to compare the two
};

struct AmplitudeTrace {
  std::vector<double> times;              // strictly increasing, times[0] = 0
  Eigen::MatrixXcd amplitudes;            // row k = amplitude vector at times[k]
  SolverPath solver_path = SolverPath::eigendecomposition;
  std::optional<FockBasis> basis;         // engaged for M >= 2 sector traces

  int excitations() const { return basis ? basis->excitations() : 1; }
};

AmplitudeTrace evolve(const Eigen::MatrixXcd& generator, const Eigen::VectorXcd& a0,
                      std::vector<double> times, const EvolveOptions& options = {});

// --- initial states (sites are 1-based) ---------------------------------

Eigen::VectorXcd single_site_state(int num_sites, int site);
// (sigma_site1 + e^{i theta} sigma_site2)/sqrt(2) on the vacuum
Eigen::VectorXcd two_site_state(int num_sites, int site1, int site2, double theta);
// equal-weight single excitation over `num_excited` consecutive sites
// starting at `first_site`, phase theta on the last of them
Eigen::VectorXcd dicke_chain_state(int num_sites, int num_excited, double theta,
                                   int first_site = 1);
// product of excitations on the given sites, expressed in the subset basis
Eigen::VectorXcd multi_excitation_state(const FockBasis& basis, std::vector<int> sites);

// --- derived observables over a trace -----------------------------------

// row k = per-site populations at times[k]; for M >= 2 a site's population is
// the summed weight of the basis states containing it (so rows sum to
// M * norm^2)
Eigen::MatrixXd site_populations(const AmplitudeTrace& trace);
std::vector<double> total_population(const AmplitudeTrace& trace);
// inclusive 1-based site range
std::vector<double> zone_population(const AmplitudeTrace& trace, int first_site,
                                    int last_site);

struct StopTime {
  double time = 0.0;
  bool reached = false;  // false: threshold never crossed on the grid
};

// first grid time with total population <= threshold
StopTime stop_time_at_threshold(const std::vector<double>& times,
                                const std::vector<double>& total, double threshold);
StopTime stop_time_at_threshold(const AmplitudeTrace& trace, double threshold);

// --- weak-drive steady state ---------------------------------------------

class NonDecayingModeError : public std::runtime_error {
 public:
  NonDecayingModeError(std::string message, Eigen::VectorXcd null_vector);
  const Eigen::VectorXcd& null_vector() const { return null_vector_; }

 private:
  Eigen::VectorXcd null_vector_;
};

Eigen::VectorXcd steady_state(const Eigen::MatrixXcd& generator,
                              const Eigen::VectorXcd& drive);

// equal amplitude, equal phase on every atom
Eigen::VectorXcd uniform_drive(int num_sites, double amplitude = 1.0);
// plane-wave option: amplitude * e^{i phi_mu} per atom
Eigen::VectorXcd plane_wave_drive(const LatticeGeometry& lattice, double amplitude = 1.0);

}  // namespace chiralchain

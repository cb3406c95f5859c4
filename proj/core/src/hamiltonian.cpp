#include "chiralchain/hamiltonian.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace chiralchain {

using std::complex;
using namespace std::complex_literals;

CouplingParams CouplingParams::from_directionality(double D, double gamma) {
  if (D < -1.0 || D > 1.0)
    throw std::invalid_argument("CouplingParams: directionality must lie in [-1, 1]");
  if (!(gamma > 0.0))
    throw std::invalid_argument("CouplingParams: gamma must be > 0");
  return {gamma * (1.0 - D) / 2.0, gamma * (1.0 + D) / 2.0};
}

void CouplingParams::validate() const {
  if (gamma_L < 0.0 || gamma_R < 0.0 || !std::isfinite(gamma_L) || !std::isfinite(gamma_R))
    throw std::invalid_argument("CouplingParams: decay rates must be finite and >= 0");
  if (!(gamma() > 0.0))
    throw std::invalid_argument("CouplingParams: gamma must be > 0");
}

SingleExcitationHamiltonian build_single(const LatticeGeometry& lattice,
                                         const CouplingParams& coupling) {
  coupling.validate();
  const int n = lattice.size();
  if (n == 0) throw std::invalid_argument("build_single: empty lattice");

  const double g = coupling.gamma();
  Eigen::MatrixXcd m(n, n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      if (mu == nu) {
        m(mu, nu) = -g / 2.0;
      } else if (nu < mu) {
        m(mu, nu) = -coupling.gamma_R *
                    std::exp(-1.0i * (lattice.phases[mu] - lattice.phases[nu]));
      } else {
        m(mu, nu) = -coupling.gamma_L *
                    std::exp(-1.0i * (lattice.phases[nu] - lattice.phases[mu]));
      }
    }
  }
  return {std::move(m)};
}

Eigen::MatrixXcd dissipator_matrix(const LatticeGeometry& lattice,
                                   const CouplingParams& coupling) {
  coupling.validate();
  const int n = lattice.size();
  if (n == 0) throw std::invalid_argument("dissipator_matrix: empty lattice");

  Eigen::MatrixXcd gamma(n, n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const double d = lattice.phases[mu] - lattice.phases[nu];
      gamma(mu, nu) = coupling.gamma_L * std::exp(1.0i * d) +
                      coupling.gamma_R * std::exp(-1.0i * d);
    }
  }
  return gamma;
}

namespace {

std::uint64_t subset_mask(const std::vector<int>& sites) {
  std::uint64_t mask = 0;
  for (int s : sites) mask |= 1ull << s;
  return mask;
}

}  // namespace

FockBasis::FockBasis(int num_sites, int excitations)
    : num_sites_(num_sites), excitations_(excitations) {
  if (num_sites < 1) throw std::invalid_argument("FockBasis: need at least one site");
  if (num_sites > 64)
    throw std::invalid_argument("FockBasis: more than 64 sites is beyond the subset encoding");
  if (excitations < 1 || excitations > num_sites)
    throw std::invalid_argument("FockBasis: excitation number must lie in [1, num_sites]");

  // lexicographic enumeration of M-subsets of {0..N-1}
  std::vector<int> current(excitations);
  for (int i = 0; i < excitations; ++i) current[i] = i;
  while (true) {
    index_.emplace(subset_mask(current), static_cast<int>(states_.size()));
    states_.push_back(current);
    int i = excitations - 1;
    while (i >= 0 && current[i] == num_sites - excitations + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < excitations; ++j) current[j] = current[j - 1] + 1;
  }
}

int FockBasis::index_of(const std::vector<int>& sites) const {
  if (static_cast<int>(sites.size()) != excitations_)
    throw std::invalid_argument("FockBasis: wrong number of sites");
  for (int s : sites)
    if (s < 0 || s >= num_sites_)
      throw std::invalid_argument("FockBasis: site index out of range");
  const auto it = index_.find(subset_mask(sites));
  if (it == index_.end())
    throw std::invalid_argument("FockBasis: repeated site in subset");
  return it->second;
}

Eigen::MatrixXcd build_multi(const SingleExcitationHamiltonian& single,
                             const FockBasis& basis) {
  const int n = static_cast<int>(single.matrix.rows());
  if (n != basis.num_sites())
    throw std::invalid_argument("build_multi: basis and generator site counts differ");
  const int m = basis.excitations();
  const int dim = basis.dimension();
  // gamma recovered from the diagonal convention M[0][0] = -gamma/2
  const double g = -2.0 * single.matrix(0, 0).real();

  Eigen::MatrixXcd lifted = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<char> occupied(n);
  std::vector<int> target;
  target.reserve(m);
  for (int col = 0; col < dim; ++col) {
    lifted(col, col) = -m * g / 2.0;
    const std::vector<int>& subset = basis.state(col);
    std::fill(occupied.begin(), occupied.end(), 0);
    for (int s : subset) occupied[s] = 1;
    for (int nu : subset) {
      for (int mu = 0; mu < n; ++mu) {
        if (occupied[mu]) continue;  // hard-core: target site must be empty
        target.clear();
        for (int s : subset)
          if (s != nu) target.push_back(s);
        target.push_back(mu);
        lifted(basis.index_of(target), col) += single.matrix(mu, nu);
      }
    }
  }
  return lifted;
}

}  // namespace chiralchain

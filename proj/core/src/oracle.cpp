#include "chiralchain/oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dopri5.hpp"

namespace chiralchain {

using std::complex;
using namespace std::complex_literals;

namespace {

// lowering operator sigma_s on the computational basis (bit s set = excited)
Eigen::MatrixXcd lowering_operator(int num_atoms, int s) {
  const int dim = 1 << num_atoms;
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
  for (int b = 0; b < dim; ++b)
    if (b & (1 << s)) op(b & ~(1 << s), b) = 1.0;
  return op;
}

}  // namespace

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const {
  const Eigen::MatrixXcd nl = c_left.adjoint() * c_left;
  const Eigen::MatrixXcd nr = c_right.adjoint() * c_right;
  return -1.0i * (hamiltonian * rho - rho * hamiltonian) -
         0.5 * (nl * rho + rho * nl) - 0.5 * (nr * rho + rho * nr) +
         c_left * rho * c_left.adjoint() + c_right * rho * c_right.adjoint();
}

Eigen::MatrixXcd LindbladGenerator::no_jump_generator() const {
  return -1.0i * hamiltonian -
         0.5 * (c_left.adjoint() * c_left + c_right.adjoint() * c_right);
}

Eigen::MatrixXcd LindbladGenerator::dense_superoperator() const {
  const Eigen::Index dim = hamiltonian.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd nl = c_left.adjoint() * c_left;
  const Eigen::MatrixXcd nr = c_right.adjoint() * c_right;

  // column-major vec: vec(A rho B) = (B^T (x) A) vec(rho)
  const auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };

  Eigen::MatrixXcd sup = -1.0i * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  sup -= 0.5 * (kron(id, nl) + kron(nl.transpose(), id));
  sup -= 0.5 * (kron(id, nr) + kron(nr.transpose(), id));
  sup += kron(c_left.conjugate(), c_left);
  sup += kron(c_right.conjugate(), c_right);
  return sup;
}

LindbladGenerator lindblad_generator(const LatticeGeometry& lattice,
                                     const CouplingParams& coupling) {
  coupling.validate();
  const int n = lattice.size();
  if (n < 1) throw std::invalid_argument("lindblad_generator: empty lattice");
  if (n > 10)
    throw std::invalid_argument(
        "lindblad_generator: beyond 10 atoms the full density matrix is out of reach");

  const int dim = 1 << n;
  std::vector<Eigen::MatrixXcd> sigma;
  sigma.reserve(n);
  for (int s = 0; s < n; ++s) sigma.push_back(lowering_operator(n, s));

  LindbladGenerator gen;
  gen.num_atoms = n;
  gen.hamiltonian = Eigen::MatrixXcd::Zero(dim, dim);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      complex<double> coef;
      if (a > b) {
        const double d = lattice.phases[a] - lattice.phases[b];
        coef = -0.5i * coupling.gamma_R * std::exp(-1.0i * d) +
               0.5i * coupling.gamma_L * std::exp(1.0i * d);
      } else {
        const double d = lattice.phases[b] - lattice.phases[a];
        coef = 0.5i * coupling.gamma_R * std::exp(1.0i * d) -
               0.5i * coupling.gamma_L * std::exp(-1.0i * d);
      }
      gen.hamiltonian += coef * (sigma[a].adjoint() * sigma[b]);
    }
  }

  gen.c_left = Eigen::MatrixXcd::Zero(dim, dim);
  gen.c_right = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < n; ++s) {
    gen.c_left += std::sqrt(coupling.gamma_L) * std::exp(-1.0i * lattice.phases[s]) * sigma[s];
    gen.c_right += std::sqrt(coupling.gamma_R) * std::exp(1.0i * lattice.phases[s]) * sigma[s];
  }
  return gen;
}

OracleTrace oracle_evolve(const LindbladGenerator& generator, const Eigen::MatrixXcd& rho0,
                          std::vector<double> times, const OracleOptions& options) {
  const Eigen::Index dim = generator.hamiltonian.rows();
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw std::invalid_argument("oracle_evolve: density matrix dimension mismatch");
  if (times.empty()) throw std::invalid_argument("oracle_evolve: empty time grid");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    if (times[k + 1] <= times[k])
      throw std::invalid_argument("oracle_evolve: time grid must be strictly increasing");

  OracleTrace trace;
  trace.times = std::move(times);
  trace.states.reserve(trace.times.size());

  bool exact = generator.num_atoms <= options.exact_expm_max_atoms;
  if (exact) {
    const Eigen::MatrixXcd sup = generator.dense_superoperator();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sup);
    bool usable = es.info() == Eigen::Success;
    if (usable) {
      const auto svd = es.eigenvectors().jacobiSvd();
      const double smin = svd.singularValues().minCoeff();
      const double smax = svd.singularValues().maxCoeff();
      usable = smin > 0.0 && smax / smin <= options.cond_threshold;
    }
    if (usable) {
      const Eigen::MatrixXcd& v = es.eigenvectors();
      const Eigen::VectorXcd& lambda = es.eigenvalues();
      const Eigen::VectorXcd rho_vec =
          Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim * dim);
      const Eigen::VectorXcd coeff = v.partialPivLu().solve(rho_vec);
      Eigen::VectorXcd scaled(dim * dim);
      for (double t : trace.times) {
        for (Eigen::Index j = 0; j < dim * dim; ++j)
          scaled[j] = std::exp(lambda[j] * t) * coeff[j];
        const Eigen::VectorXcd out = v * scaled;
        trace.states.push_back(Eigen::Map<const Eigen::MatrixXcd>(out.data(), dim, dim));
      }
      return trace;
    }
    exact = false;  // defective superoperator (cascaded limits); integrate instead
  }

  detail::Dopri5Options opt;
  opt.rel_tol = options.rel_tol;
  opt.abs_tol = options.abs_tol;
  // number operators hoisted out of the right-hand side; apply() would rebuild
  // them on every evaluation
  const Eigen::MatrixXcd nl = generator.c_left.adjoint() * generator.c_left;
  const Eigen::MatrixXcd nr = generator.c_right.adjoint() * generator.c_right;
  const auto rhs = [&generator, &nl, &nr, dim](const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    const Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), dim, dim);
    const Eigen::MatrixXcd drho =
        complex<double>(0.0, -1.0) * (generator.hamiltonian * rho - rho * generator.hamiltonian) -
        0.5 * (nl * rho + rho * nl) - 0.5 * (nr * rho + rho * nr) +
        generator.c_left * rho * generator.c_left.adjoint() +
        generator.c_right * rho * generator.c_right.adjoint();
    return Eigen::Map<const Eigen::VectorXcd>(drho.data(), dim * dim);
  };
  Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim * dim);
  double t = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    y = detail::integrate_dopri5(rhs, std::move(y), t, trace.times[k], opt);
    t = trace.times[k];
    trace.states.push_back(Eigen::Map<const Eigen::MatrixXcd>(y.data(), dim, dim));
  }
  return trace;
}

Eigen::MatrixXd oracle_site_populations(const OracleTrace& trace) {
  if (trace.states.empty()) return {};
  const Eigen::Index dim = trace.states.front().rows();
  int num_atoms = 0;
  while ((Eigen::Index(1) << num_atoms) < dim) ++num_atoms;

  Eigen::MatrixXd pops(static_cast<Eigen::Index>(trace.states.size()), num_atoms);
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    for (int s = 0; s < num_atoms; ++s) {
      double p = 0.0;
      for (Eigen::Index b = 0; b < dim; ++b)
        if (b & (Eigen::Index(1) << s)) p += trace.states[k](b, b).real();
      pops(static_cast<Eigen::Index>(k), s) = p;
    }
  }
  return pops;
}

Eigen::MatrixXcd density_from_amplitudes(int num_atoms, const Eigen::VectorXcd& amplitudes,
                                         const FockBasis* basis) {
  const int dim = 1 << num_atoms;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  if (basis == nullptr) {
    if (amplitudes.size() != num_atoms)
      throw std::invalid_argument("density_from_amplitudes: expected one amplitude per site");
    for (int s = 0; s < num_atoms; ++s) psi[1 << s] = amplitudes[s];
  } else {
    if (amplitudes.size() != basis->dimension() || basis->num_sites() != num_atoms)
      throw std::invalid_argument("density_from_amplitudes: basis mismatch");
    for (int j = 0; j < basis->dimension(); ++j) {
      int b = 0;
      for (int s : basis->state(j)) b |= 1 << s;
      psi[b] = amplitudes[j];
    }
  }
  return psi * psi.adjoint();
}

}  // namespace chiralchain

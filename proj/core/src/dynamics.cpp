#include "chiralchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "dopri5.hpp"

namespace chiralchain {

using std::complex;
using namespace std::complex_literals;

const char* to_string(SolverPath path) {
  return path == SolverPath::eigendecomposition ? "eigendecomposition" : "adaptive_rk";
}

namespace {

void check_grid(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("evolve: empty time grid");
  if (times.front() < 0.0) throw std::invalid_argument("evolve: negative start time");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    if (times[k + 1] <= times[k])
      throw std::invalid_argument("evolve: time grid must be strictly increasing");
}

double eigenvector_condition(const Eigen::MatrixXcd& v) {
  const auto svd = v.jacobiSvd();
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

AmplitudeTrace evolve(const Eigen::MatrixXcd& generator, const Eigen::VectorXcd& a0,
                      std::vector<double> times, const EvolveOptions& options) {
  const Eigen::Index n = generator.rows();
  if (generator.cols() != n) throw std::invalid_argument("evolve: generator must be square");
  if (a0.size() != n) throw std::invalid_argument("evolve: state dimension mismatch");
  check_grid(times);

  AmplitudeTrace trace;
  trace.times = std::move(times);
  trace.amplitudes.resize(static_cast<Eigen::Index>(trace.times.size()), n);

  bool use_eig = options.force_path != SolverPath::adaptive_rk;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es;
  if (use_eig) {
    es.compute(generator);
    if (es.info() != Eigen::Success) {
      use_eig = false;
    } else if (!options.force_path &&
               eigenvector_condition(es.eigenvectors()) > options.cond_threshold) {
      use_eig = false;  // defective or near-defective generator; eig coefficients untrustworthy
    }
  }

  if (use_eig) {
    trace.solver_path = SolverPath::eigendecomposition;
    const Eigen::MatrixXcd& v = es.eigenvectors();
    const Eigen::VectorXcd& lambda = es.eigenvalues();
    const Eigen::VectorXcd coeff = v.partialPivLu().solve(a0);
    Eigen::VectorXcd scaled(n);
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
      const double t = trace.times[k];
      for (Eigen::Index j = 0; j < n; ++j)
        scaled[j] = std::exp(lambda[j] * t) * coeff[j];
      trace.amplitudes.row(k) = (v * scaled).transpose();
    }
    return trace;
  }

  trace.solver_path = SolverPath::adaptive_rk;
  detail::Dopri5Options opt;
  opt.rel_tol = options.rel_tol;
  opt.abs_tol = options.abs_tol;
  const auto rhs = [&generator](const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    return generator * y;
  };
  Eigen::VectorXcd y = a0;
  double t = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    y = detail::integrate_dopri5(rhs, std::move(y), t, trace.times[k], opt);
    t = trace.times[k];
    trace.amplitudes.row(k) = y.transpose();
  }
  return trace;
}

Eigen::VectorXcd single_site_state(int num_sites, int site) {
  if (site < 1 || site > num_sites)
    throw std::invalid_argument("single_site_state: site out of range");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(num_sites);
  a[site - 1] = 1.0;
  return a;
}

Eigen::VectorXcd two_site_state(int num_sites, int site1, int site2, double theta) {
  if (site1 < 1 || site1 > num_sites || site2 < 1 || site2 > num_sites || site1 == site2)
    throw std::invalid_argument("two_site_state: sites must be distinct and in range");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(num_sites);
  a[site1 - 1] = 1.0 / std::sqrt(2.0);
  a[site2 - 1] = std::exp(1.0i * theta) / std::sqrt(2.0);
  return a;
}

Eigen::VectorXcd dicke_chain_state(int num_sites, int num_excited, double theta,
                                   int first_site) {
  const int last = first_site + num_excited - 1;
  if (num_excited < 1 || first_site < 1 || last > num_sites)
    throw std::invalid_argument("dicke_chain_state: site window out of range");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(num_sites);
  const double w = 1.0 / std::sqrt(static_cast<double>(num_excited));
  for (int s = first_site; s <= last; ++s) a[s - 1] = w;
  a[last - 1] = std::exp(1.0i * theta) * w;  // phase rides on the last excited site
  return a;
}

Eigen::VectorXcd multi_excitation_state(const FockBasis& basis, std::vector<int> sites) {
  for (int& s : sites) --s;  // to 0-based
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(basis.dimension());
  a[basis.index_of(sites)] = 1.0;
  return a;
}

Eigen::MatrixXd site_populations(const AmplitudeTrace& trace) {
  const Eigen::Index rows = trace.amplitudes.rows();
  const Eigen::MatrixXd weight = trace.amplitudes.cwiseAbs2();
  if (!trace.basis) return weight;

  const FockBasis& basis = *trace.basis;
  Eigen::MatrixXd pops = Eigen::MatrixXd::Zero(rows, basis.num_sites());
  for (int j = 0; j < basis.dimension(); ++j)
    for (int s : basis.state(j)) pops.col(s) += weight.col(j);
  return pops;
}

std::vector<double> total_population(const AmplitudeTrace& trace) {
  // sum of site populations: M * norm^2 for an M-excitation trace, so a fresh
  // M-excitation state starts at M, not 1
  const Eigen::VectorXd totals = site_populations(trace).rowwise().sum();
  return {totals.data(), totals.data() + totals.size()};
}

std::vector<double> zone_population(const AmplitudeTrace& trace, int first_site,
                                    int last_site) {
  const Eigen::MatrixXd pops = site_populations(trace);
  if (first_site < 1 || last_site > pops.cols() || first_site > last_site)
    throw std::invalid_argument("zone_population: invalid site range");
  const Eigen::VectorXd zone =
      pops.middleCols(first_site - 1, last_site - first_site + 1).rowwise().sum();
  return {zone.data(), zone.data() + zone.size()};
}

StopTime stop_time_at_threshold(const std::vector<double>& times,
                                const std::vector<double>& total, double threshold) {
  if (times.size() != total.size() || times.empty())
    throw std::invalid_argument("stop_time_at_threshold: mismatched grids");
  if (!(threshold > 0.0))
    throw std::invalid_argument("stop_time_at_threshold: threshold must be positive");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (total[k] <= threshold) return {times[k], true};
  return {times.back(), false};
}

StopTime stop_time_at_threshold(const AmplitudeTrace& trace, double threshold) {
  return stop_time_at_threshold(trace.times, total_population(trace), threshold);
}

NonDecayingModeError::NonDecayingModeError(std::string message, Eigen::VectorXcd null_vector)
    : std::runtime_error(std::move(message)), null_vector_(std::move(null_vector)) {}

Eigen::VectorXcd steady_state(const Eigen::MatrixXcd& generator,
                              const Eigen::VectorXcd& drive) {
  const Eigen::Index n = generator.rows();
  if (generator.cols() != n || drive.size() != n)
    throw std::invalid_argument("steady_state: dimension mismatch");

  const Eigen::VectorXcd rhs = -1.0i * drive;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(generator);
  Eigen::VectorXcd a = lu.solve(rhs);
  a += lu.solve(rhs - generator * a);  // one refinement step tightens the residual

  const double drive_norm = drive.norm();
  const double residual = (generator * a - rhs).norm();
  // a small residual alone does not rule out a non-decaying mode: the solve is
  // backward stable, so a generator within machine precision of singular still
  // yields a tiny residual around a meaninglessly large amplitude vector
  if (!a.allFinite() || lu.rcond() < 1e-14 ||
      residual > 1e-10 * std::max(drive_norm, 1e-300)) {
    // a non-decaying mode blocks the weak-drive limit; report its direction
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(generator, Eigen::ComputeFullV);
    const Eigen::VectorXcd null_vec = svd.matrixV().col(n - 1);
    std::ostringstream msg;
    msg << "steady_state: generator is singular or near-singular (residual " << residual
        << "); non-decaying mode [";
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i) msg << ", ";
      msg << null_vec[i].real() << (null_vec[i].imag() < 0 ? "-" : "+")
          << std::abs(null_vec[i].imag()) << "i";
    }
    msg << "]";
    throw NonDecayingModeError(msg.str(), null_vec);
  }
  return a;
}

Eigen::VectorXcd uniform_drive(int num_sites, double amplitude) {
  return Eigen::VectorXcd::Constant(num_sites, amplitude);
}

Eigen::VectorXcd plane_wave_drive(const LatticeGeometry& lattice, double amplitude) {
  Eigen::VectorXcd d(lattice.size());
  for (int mu = 0; mu < lattice.size(); ++mu)
    d[mu] = amplitude * std::exp(1.0i * lattice.phases[mu]);
  return d;
}

}  // namespace chiralchain

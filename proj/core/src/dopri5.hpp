#pragma once
/*
 * dopri5.hpp — adaptive Dormand-Prince 5(4) integrator on complex vectors.
 *
 * Internal fallback for propagating generators whose eigenvector matrix is
 * too ill-conditioned to trust (defective cascaded chains), and workhorse for
 * density-matrix evolution where exact exponentiation is too large. Embedded
 * 4th-order error estimate, PI step-size control, per-component tolerance
 * atol + rtol * |y|.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace chiralchain::detail {

struct Dopri5Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double initial_step = 1e-3;
  std::size_t max_steps = 50'000'000;
};

// integrates dy/dt = rhs(y) (autonomous) from t0 to t1, returning y(t1)
inline Eigen::VectorXcd integrate_dopri5(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& rhs,
    Eigen::VectorXcd y, double t0, double t1, const Dopri5Options& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
  (void)c2; (void)c3; (void)c4; (void)c5;  // autonomous rhs; stage times unused

  if (t1 < t0) throw std::invalid_argument("integrate_dopri5: backward integration unsupported");
  if (t1 == t0) return y;

  double t = t0;
  double h = std::min(opt.initial_step, t1 - t0);
  double error_old = 1e-4;  // PI controller memory
  Eigen::VectorXcd k1 = rhs(y);

  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (t + h > t1) h = t1 - t;

    const Eigen::VectorXcd k2 = rhs(y + h * (a21 * k1));
    const Eigen::VectorXcd k3 = rhs(y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXcd k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXcd k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXcd k6 =
        rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXcd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXcd k7 = rhs(y5);  // FSAL
    const Eigen::VectorXcd err_vec =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double r = std::abs(err_vec[i]) / scale;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(y.size()));

    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
      if (t >= t1) return y;
      const double grow =
          0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(error_old, 0.4 / 5.0);
      h *= std::clamp(grow, 0.2, 10.0);
      error_old = std::max(err, 1e-10);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
    }
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::runtime_error("integrate_dopri5: step size underflow");
  }
  throw std::runtime_error("integrate_dopri5: max step count exceeded");
}

}  // namespace chiralchain::detail

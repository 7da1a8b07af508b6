// ode.hpp: Dormand–Prince 5(4) adaptive integrator for small complex matrices.
//
// The state is an Eigen matrix with a fixed 16x16 capacity, so stepping never
// touches the heap. Used for both density matrices and unitary propagators.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "floqryd/error.hpp"

namespace floqryd::lindblad {

using Mat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, 16>;

struct OdeOptions {
  double atol = 1e-9;
  double rtol = 1e-8;
  double initial_step = 1e-3;  // µs
  double min_step = 1e-12;     // below this the problem is treated as stiff
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

/// Integrates dy/dt = f(t, y) from t0 to exactly t1. `h` is the step proposal,
/// updated on return for the next call. Steps never exceed `max_step`.
/// f has signature void(double t, const Mat& y, Mat& dy).
template <class F>
void dopri45(F&& f, double t0, double t1, Mat& y, double& h, double max_step, const OdeOptions& opt, OdeStats& stats) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t1 > t0)) return;
  const long rows = y.rows(), cols = y.cols();
  Mat k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols), k5(rows, cols), k6(rows, cols), k7(rows, cols);
  Mat tmp(rows, cols), ynew(rows, cols);

  double t = t0;
  h = std::min({h > 0.0 ? h : opt.initial_step, max_step});
  f(t, y, k1);
  ++stats.rhs_calls;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > opt.max_steps) throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted");
    double step = std::min(h, max_step);
    bool landing = false;
    if (t + step >= t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
      step = t1 - t;
      landing = true;
    }

    tmp = y + step * (a21 * k1);
    f(t + c2 * step, tmp, k2);
    tmp = y + step * (a31 * k1 + a32 * k2);
    f(t + c3 * step, tmp, k3);
    tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * step, tmp, k4);
    tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * step, tmp, k5);
    tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double t_end = landing ? t1 : t + step;
    f(t_end, tmp, k6);
    ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t_end, ynew, k7);
    stats.rhs_calls += 6;

    double err = 0.0;
    for (long j = 0; j < cols; ++j) {
      for (long i = 0; i < rows; ++i) {
        const std::complex<double> e =
            step * (e1 * k1(i, j) + e3 * k3(i, j) + e4 * k4(i, j) + e5 * k5(i, j) + e6 * k6(i, j) + e7 * k7(i, j));
        const double scale = opt.atol + opt.rtol * std::max(std::abs(y(i, j)), std::abs(ynew(i, j)));
        err = std::max(err, std::abs(e) / scale);
      }
    }
    if (!std::isfinite(err)) err = std::numeric_limits<double>::max();

    if (err <= 1.0) {
      t = t_end;
      y = ynew;
      k1 = k7;
      ++stats.accepted;
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // A step shortened only to land on t1 does not shrink the next proposal.
      h = landing ? std::max(h, step * grow) : step * grow;
    } else {
      ++stats.rejected;
      h = step * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (h < opt.min_step)
        throw Error(ErrorCode::StepSizeUnderflow, "step size " + std::to_string(h) + " us at t = " + std::to_string(t));
    }
  }
}

}  // namespace floqryd::lindblad

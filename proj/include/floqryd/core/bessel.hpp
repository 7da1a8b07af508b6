#pragma once

#include <functional>

namespace floqryd::core {

/// Bessel function of the first kind J_m(x) for integer order, via Miller's
/// downward recurrence normalized with J_0 + 2 sum J_2k = 1. Accurate to ~1e-13
/// for |x| <= 50, |m| <= 60.
double bessel_j(int m, double x);

/// The k-th positive zero (k = 1, 2, ...) of J_m, found by scanning for a sign
/// change and bisecting.
double bessel_j_zero(int m, int k);

/// Bisection for f(x) = 0 on [lo, hi]; f(lo) and f(hi) must differ in sign
/// (throws NoBracket otherwise).
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-14);

/// Scans [lo, hi] in steps of `step` and returns the k-th sign-change root of f.
double kth_root(const std::function<double(double)>& f, double lo, double hi, int k, double step = 0.01);

}  // namespace floqryd::core

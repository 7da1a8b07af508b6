#include "floqryd/core/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "floqryd/error.hpp"

namespace floqryd::core {

namespace {

// J_m(x) for m >= 0, x > 0.
double miller(int m, double x) {
  // Start well above both the order and the argument so the minimal solution
  // dominates by the time the recurrence reaches m.
  const int start = 2 * ((std::max(m, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(40.0 * std::max(m, static_cast<int>(x) + 1)))) / 2);
  double next = 0.0;   // J_{k+1}
  double curr = 1e-30;  // J_k
  double norm = 0.0;
  double result = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * curr - next;  // J_{k-1}
    next = curr;
    curr = prev;
    if (std::abs(curr) > 1e250) {
      // Rescale to stay in range; the normalization is recomputed from scratch.
      next *= 1e-250;
      curr *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
    if (k - 1 == m) result = curr;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * curr;
  }
  norm += curr;  // J_0 term
  if (m == 0) result = curr;
  return result / norm;
}

}  // namespace

double bessel_j(int m, double x) {
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  double sign = 1.0;
  if (m < 0) {
    m = -m;
    if (m % 2 != 0) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (m % 2 != 0) sign = -sign;
  }
  return sign * miller(m, x);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorCode::NoBracket, "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double kth_root(const std::function<double(double)>& f, double lo, double hi, int k, double step) {
  int found = 0;
  double a = lo;
  double fa = f(a);
  while (a < hi) {
    const double b = std::min(a + step, hi);
    const double fb = f(b);
    if (fa == 0.0 || (fa > 0.0) != (fb > 0.0)) {
      if (++found == k) return fa == 0.0 ? a : bisect(f, a, b);
    }
    a = b;
    fa = fb;
  }
  throw Error(ErrorCode::NoBracket, "fewer than " + std::to_string(k) + " roots in range");
}

double bessel_j_zero(int m, int k) {
  if (k < 1) throw Error(ErrorCode::IndexOutOfRange, "zero index starts at 1");
  // Skip the trivial zero at the origin for m > 0.
  const double lo = m == 0 ? 0.0 : 1e-3;
  return kth_root([m](double x) { return bessel_j(m, x); }, lo, 4.0 * k + 2.0 * std::abs(m) + 10.0, k);
}

}  // namespace floqryd::core

#include "floqryd/fitting/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "floqryd/core/bessel.hpp"
#include "floqryd/error.hpp"

namespace floqryd::fitting {

namespace {

constexpr double kRankTol = 1e-12;

double cost_of(const Model& model, const std::vector<double>& p, const std::vector<double>& x,
               const std::vector<double>& y, const std::vector<double>& w, Eigen::VectorXd& r) {
  const std::size_t n = x.size();
  r.resize(static_cast<Eigen::Index>(n));
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sw = std::sqrt(w[i]);
    r[static_cast<Eigen::Index>(i)] = sw * (model(p, x[i]) - y[i]);
    c += r[static_cast<Eigen::Index>(i)] * r[static_cast<Eigen::Index>(i)];
  }
  return c;
}

Eigen::MatrixXd jacobian(const Model& model, const std::vector<double>& p, const std::vector<double>& x,
                         const std::vector<double>& w, double rel_step) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto m = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd j(n, m);
  std::vector<double> lo = p, hi = p;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double h = rel_step * std::max(std::abs(p[k]), 1.0e-3);
    lo[k] = p[k] - h;
    hi[k] = p[k] + h;
    for (Eigen::Index i = 0; i < n; ++i)
      j(i, k) = std::sqrt(w[i]) * (model(hi, x[i]) - model(lo, x[i])) / (2.0 * h);
    lo[k] = hi[k] = p[k];
  }
  return j;
}

void require_same_size(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "x and y lengths differ");
}

}  // namespace

double FitResult::value(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::InvalidConfig, "no fit parameter '" + name + "'");
  return parameters[static_cast<std::size_t>(it - names.begin())];
}

double FitResult::error(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::InvalidConfig, "no fit parameter '" + name + "'");
  return uncertainties[static_cast<std::size_t>(it - names.begin())];
}

FitResult levenberg_marquardt(const Model& model, const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& weights, std::vector<double> p,
                              const std::vector<std::string>& names, const LmOptions& opt) {
  require_same_size(x, y);
  if (names.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "parameter names");
  std::vector<double> w = weights.empty() ? std::vector<double>(x.size(), 1.0) : weights;
  if (w.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "weights length");
  const auto m = static_cast<Eigen::Index>(p.size());

  Eigen::VectorXd r;
  double cost = cost_of(model, p, x, y, w, r);
  if (!std::isfinite(cost)) throw Error(ErrorCode::NoConvergence, "model is not finite at the initial guess");
  double lambda = opt.initial_lambda;
  bool converged = false;
  int it = 0;
  Eigen::MatrixXd j = jacobian(model, p, x, w, opt.jacobian_step);

  for (; it < opt.max_iterations && !converged; ++it) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    if (g.cwiseAbs().maxCoeff() <= opt.gtol * std::max(1.0, cost)) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < m; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      std::vector<double> trial = p;
      for (Eigen::Index k = 0; k < m; ++k) trial[k] += step[k];
      Eigen::VectorXd r_trial;
      const double c_trial = cost_of(model, trial, x, y, w, r_trial);
      if (std::isfinite(c_trial) && c_trial <= cost) {
        double pnorm = 0.0, snorm = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
          pnorm += p[k] * p[k];
          snorm += step[k] * step[k];
        }
        const double drop = cost - c_trial;
        p = std::move(trial);
        r = std::move(r_trial);
        cost = c_trial;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (drop <= opt.ftol * cost || std::sqrt(snorm) <= opt.xtol * (std::sqrt(pnorm) + opt.xtol) ||
            cost <= 1e-30 * static_cast<double>(x.size()))
          converged = true;
        else
          j = jacobian(model, p, x, w, opt.jacobian_step);
      } else {
        lambda *= 10.0;
        // No downhill step exists at machine precision: this is the minimum.
        if (lambda > 1e16) {
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "iteration limit reached");

  j = jacobian(model, p, x, w, opt.jacobian_step);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  // Rank check on the column-scaled normal matrix.
  Eigen::VectorXd scale(m);
  for (Eigen::Index k = 0; k < m; ++k) scale[k] = jtj(k, k) > 0.0 ? 1.0 / std::sqrt(jtj(k, k)) : 0.0;
  const Eigen::MatrixXd scaled = scale.asDiagonal() * jtj * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  const double emax = es.eigenvalues().maxCoeff();
  if (!(emax > 0.0) || es.eigenvalues().minCoeff() < kRankTol * emax || scale.minCoeff() == 0.0)
    throw Error(ErrorCode::NoConvergence, "normal matrix is rank deficient; parameters not identifiable");

  FitResult out;
  out.names = names;
  out.parameters = p;
  const auto dof = static_cast<double>(x.size()) - static_cast<double>(m);
  const double red_chi2 = dof > 0.0 ? cost / dof : 1.0;
  out.covariance = jtj.inverse() * red_chi2;
  for (Eigen::Index k = 0; k < m; ++k) out.uncertainties.push_back(std::sqrt(std::max(0.0, out.covariance(k, k))));
  out.residual_norm = std::sqrt(cost);
  out.converged = true;
  out.iterations = it;
  return out;
}

FitResult fit_damped_sinusoid(const std::vector<double>& t, const std::vector<double>& y,
                              const std::vector<double>& weights) {
  require_same_size(t, y);
  const std::size_t n = t.size();
  if (n < 8) throw Error(ErrorCode::InsufficientData, "damped sinusoid needs at least 8 points");
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw Error(ErrorCode::InsufficientData, "times must increase");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  // Discrete spectrum peak on a 4x oversampled grid up to the mean Nyquist rate.
  const double df = 1.0 / (4.0 * span);
  const double nyquist = 0.5 * static_cast<double>(n - 1) / span;
  double best_f = 0.0, best_power = -1.0;
  std::complex<double> best_s{};
  for (double f = df; f <= nyquist; f += df) {
    std::complex<double> s{};
    for (std::size_t i = 0; i < n; ++i)
      s += (y[i] - mean) * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * f * (t[i] - t.front())));
    if (std::norm(s) > best_power) {
      best_power = std::norm(s);
      best_f = f;
      best_s = s;
    }
  }
  if (best_f * span < 1.5) throw Error(ErrorCode::InsufficientData, "data span fewer than 1.5 oscillation periods");
  const double t0 = t.front();
  const double amp0 = 2.0 * std::abs(best_s) / static_cast<double>(n);
  // Phase at t = 0 from the phase at t0.
  const double phase0 = std::arg(best_s) - 2.0 * std::numbers::pi * best_f * t0;
  const Model model = [](const std::vector<double>& p, double x) {
    return p[0] * std::exp(-x / p[3]) * std::cos(2.0 * std::numbers::pi * p[1] * x + p[2]) + p[4];
  };
  auto r = levenberg_marquardt(model, t, y, weights, {amp0, best_f, std::remainder(phase0, 2.0 * std::numbers::pi), span, mean},
                               {"amplitude", "frequency", "phase", "decay_time", "offset"});
  // Canonical form: positive amplitude, phase in (−π, π].
  if (r.parameters[0] < 0.0) {
    r.parameters[0] = -r.parameters[0];
    r.parameters[2] += std::numbers::pi;
  }
  r.parameters[2] = std::remainder(r.parameters[2], 2.0 * std::numbers::pi);
  return r;
}

FitResult fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y) {
  require_same_size(t, y);
  const std::size_t n = t.size();
  if (n < 5) throw Error(ErrorCode::InsufficientData, "exponential decay needs at least 5 points");
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  const double range = *mx - *mn;
  if (!(range > 1e-12 * std::max(1.0, std::abs(*mx))))
    throw Error(ErrorCode::NoConvergence, "constant data: decay time is unbounded");

  // Log-linear regression on the data shifted below its tail.
  const double sign = y.front() >= y.back() ? 1.0 : -1.0;
  const double c0 = y.back() - sign * 0.1 * range;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = sign * (y[i] - c0);
    if (z <= 0.0) continue;
    const double lz = std::log(z);
    sx += t[i];
    sy += lz;
    sxx += t[i] * t[i];
    sxy += t[i] * lz;
    ++used;
  }
  double tau0 = t.back() - t.front(), a0 = y.front() - c0;
  if (used >= 2) {
    const double k = static_cast<double>(used);
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / k;
    if (slope < 0.0) tau0 = -1.0 / slope;
    a0 = sign * std::exp(icpt);
  }
  const Model model = [](const std::vector<double>& p, double x) { return p[0] * std::exp(-x / p[1]) + p[2]; };
  return levenberg_marquardt(model, t, y, {}, {a0, tau0, c0}, {"amplitude", "decay_time", "offset"});
}

FitResult fit_bessel_carrier(const std::vector<double>& alphas, const std::vector<double>& powers) {
  require_same_size(alphas, powers);
  if (alphas.size() < 10) throw Error(ErrorCode::InsufficientData, "Bessel carrier fit needs at least 10 points");
  const auto [lo, hi] = std::minmax_element(alphas.begin(), alphas.end());
  const double z = core::bessel_j_zero(0, 1);
  if (!(*lo < z && *hi > z)) throw Error(ErrorCode::InsufficientData, "data must cover the first J0 zero");
  const Model model = [](const std::vector<double>& p, double a) { return std::abs(core::bessel_j(0, a / p[0])); };
  return levenberg_marquardt(model, alphas, powers, {}, {1.0}, {"chi"});
}

FitResult fit_distance_calibration(const std::vector<double>& freq_spacings,
                                   const std::vector<double>& resonance_shifts, double c6_mhz_um6) {
  require_same_size(freq_spacings, resonance_shifts);
  if (freq_spacings.size() < 4) throw Error(ErrorCode::InsufficientData, "distance calibration needs at least 4 points");
  if (!(c6_mhz_um6 > 0.0)) throw Error(ErrorCode::InvalidConfig, "C6 must be positive");
  if (!(resonance_shifts.front() > 0.0 && freq_spacings.front() > 0.0))
    throw Error(ErrorCode::InsufficientData, "first point must have positive spacing and shift");
  const double kappa0 = std::pow(c6_mhz_um6 / resonance_shifts.front(), 1.0 / 6.0) / freq_spacings.front();
  const Model model = [c6_mhz_um6](const std::vector<double>& p, double f) {
    return c6_mhz_um6 / std::pow(p[0] * f, 6) + p[1];
  };
  return levenberg_marquardt(model, freq_spacings, resonance_shifts, {}, {kappa0, 0.0}, {"kappa", "delta_u"});
}

FitResult fit_tanh_efficiency(const std::vector<double>& drive, const std::vector<double>& power) {
  require_same_size(drive, power);
  const std::size_t n = drive.size();
  if (n < 8) throw Error(ErrorCode::InsufficientData, "tanh efficiency fit needs at least 8 points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return drive[a] < drive[b]; });
  const auto [mn, mx] = std::minmax_element(power.begin(), power.end());
  const double c0 = 0.5 * (*mx + *mn);
  const double a0 = 0.5 * (*mx - *mn) * (power[order.back()] >= power[order.front()] ? 1.0 : -1.0);
  double v0 = 0.5 * (drive[order.front()] + drive[order.back()]);
  for (std::size_t k = 1; k < n; ++k) {
    const double p0 = power[order[k - 1]] - c0, p1 = power[order[k]] - c0;
    if (p0 == 0.0 || p0 * p1 < 0.0) {
      const double f = p0 == 0.0 ? 0.0 : p0 / (p0 - p1);
      v0 = drive[order[k - 1]] + f * (drive[order[k]] - drive[order[k - 1]]);
      break;
    }
  }
  const double sigma0 = std::max(0.25 * (drive[order.back()] - drive[order.front()]), 1e-12);
  const Model model = [](const std::vector<double>& p, double v) { return p[0] * std::tanh((v - p[1]) / p[2]) + p[3]; };
  auto r = levenberg_marquardt(model, drive, power, {}, {a0, v0, sigma0, c0}, {"A", "V0", "sigma", "C"});
  if (r.parameters[2] < 0.0) {
    r.parameters[2] = -r.parameters[2];
    r.parameters[0] = -r.parameters[0];
  }
  return r;
}

}  // namespace floqryd::fitting

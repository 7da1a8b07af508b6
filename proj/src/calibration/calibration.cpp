#include "floqryd/calibration/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "floqryd/error.hpp"
#include "floqryd/model/units.hpp"

namespace floqryd::calibration {

using nlohmann::json;

double polynomial(const std::vector<double>& coeffs, double f, double f_ref) {
  const double x = f - f_ref;
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

void AomTransferModel::validate() const {
  if (!(f_max > f_min)) throw Error(ErrorCode::InvalidConfig, "AOM band must have f_max > f_min");
  if (amplitude.empty() || center.empty() || width.empty() || offset.empty())
    throw Error(ErrorCode::InvalidConfig, "AOM polynomials need at least one coefficient");
  constexpr int kChecks = 256;
  for (int k = 0; k <= kChecks; ++k) {
    const double f = f_min + (f_max - f_min) * k / kChecks;
    if (!(sigma(f) > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma(f) must stay positive over the band");
    if (!(pre_correction(f) > 0.0)) throw Error(ErrorCode::InvalidConfig, "pre-correction must stay positive");
  }
}

AomTransferModel AomTransferModel::flat(double f_min, double f_max, double a, double v0, double sigma, double c) {
  AomTransferModel m;
  m.f_ref = 0.5 * (f_min + f_max);
  m.f_min = f_min;
  m.f_max = f_max;
  m.amplitude = {a};
  m.center = {v0};
  m.width = {sigma};
  m.offset = {c};
  m.validate();
  return m;
}

AomTransferModel AomTransferModel::synthetic(double f_ref) {
  // Efficiency peaks near f_ref and rolls off quadratically; the knee drifts
  // linearly with frequency.
  AomTransferModel m;
  m.f_ref = f_ref;
  m.f_min = f_ref - 50.0;
  m.f_max = f_ref + 50.0;
  m.amplitude = {0.5, 1.0e-3, -4.0e-5};
  m.center = {0.45, 1.0e-3, 2.0e-5};
  m.width = {0.18, -2.0e-4, 1.0e-5};
  m.offset = {0.5, 1.0e-3, -4.0e-5};
  m.validate();
  return m;
}

AomTransferModel model_from_json(const json& doc) {
  try {
    AomTransferModel m;
    m.f_ref = doc.at("f_ref_mhz").get<double>();
    m.f_min = doc.at("band_mhz").at(0).get<double>();
    m.f_max = doc.at("band_mhz").at(1).get<double>();
    m.amplitude = doc.at("amplitude").get<std::vector<double>>();
    m.center = doc.at("center").get<std::vector<double>>();
    m.width = doc.at("width").get<std::vector<double>>();
    m.offset = doc.at("offset").get<std::vector<double>>();
    if (doc.contains("pre_correction")) {
      const auto& p = doc.at("pre_correction");
      m.pre_a = p.at("a").get<double>();
      m.pre_fc = p.at("f_c_mhz").get<double>();
      m.pre_c = p.at("c").get<double>();
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, std::string("AOM model: ") + e.what());
  }
}

json model_to_json(const AomTransferModel& m) {
  return json{{"f_ref_mhz", m.f_ref},
              {"band_mhz", {m.f_min, m.f_max}},
              {"amplitude", m.amplitude},
              {"center", m.center},
              {"width", m.width},
              {"offset", m.offset},
              {"pre_correction", {{"a", m.pre_a}, {"f_c_mhz", m.pre_fc}, {"c", m.pre_c}}}};
}

namespace {

void check_band(const AomTransferModel& m, double f) {
  if (!(f >= m.f_min && f <= m.f_max))
    throw Error(ErrorCode::FrequencyOutOfBand, "frequency " + std::to_string(f) + " MHz outside the AOM band");
}

}  // namespace

double simulated_power(const AomTransferModel& m, double f, double v) {
  check_band(m, f);
  return m.a(f) * std::tanh((v - m.v0(f)) / m.sigma(f)) + m.c(f);
}

double drive_for_power(const AomTransferModel& m, double f, double target) {
  check_band(m, f);
  const double a = m.a(f);
  const double u = (target - m.c(f)) / a;
  if (!(a != 0.0 && std::abs(u) < 1.0))
    throw Error(ErrorCode::TargetUnreachable, "target power outside the open tanh range");
  return m.v0(f) + m.sigma(f) * std::atanh(u);
}

drive::RamModel RamSpectrum::to_ram_model(bool square_root) const {
  drive::RamModel r;
  const double k = square_root ? 0.5 : 1.0;
  for (const auto& [a, b] : harmonics) r.harmonics.emplace_back(k * a, k * b);
  return r;
}

RamSpectrum ram_spectrum(const std::vector<double>& trace, double dt, double omega0, std::size_t n_harmonics) {
  if (!(dt > 0.0 && omega0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "dt and omega0 must be positive");
  const double per_period = units::kTwoPi / omega0 / dt;
  const double periods = static_cast<double>(trace.size()) / per_period;
  if (per_period < 32.0 - 1e-9) throw Error(ErrorCode::InsufficientSamples, "fewer than 32 samples per period");
  if (periods < 4.0 - 1e-9 || std::abs(periods - std::round(periods)) > 1e-6)
    throw Error(ErrorCode::InsufficientSamples, "trace must span an integer number (>= 4) of periods");

  const double n = static_cast<double>(trace.size());
  double mean = 0.0;
  for (double p : trace) mean += p;
  mean /= n;
  if (!(mean > 0.0)) throw Error(ErrorCode::InsufficientSamples, "trace mean power must be positive");

  RamSpectrum out;
  out.fundamental = omega0;
  for (std::size_t h = 1; h <= n_harmonics; ++h) {
    double s = 0.0, c = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const double ph = static_cast<double>(h) * omega0 * dt * static_cast<double>(k);
      const double r = trace[k] / mean - 1.0;
      s += r * std::sin(ph);
      c += r * std::cos(ph);
    }
    out.harmonics.emplace_back(2.0 * s / n, 2.0 * c / n);
  }
  constexpr int kGrid = 2048;
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < kGrid; ++k) {
    const double ph = units::kTwoPi * k / kGrid;
    double env = 1.0;
    for (std::size_t h = 0; h < out.harmonics.size(); ++h) {
      const double m = static_cast<double>(h + 1) * ph;
      env += out.harmonics[h].first * std::sin(m) + out.harmonics[h].second * std::cos(m);
    }
    lo = std::min(lo, env);
    hi = std::max(hi, env);
  }
  out.peak_to_peak_fraction = (hi - lo) / (hi + lo);
  return out;
}

double TraceSpec::dt() const {
  if (!(omega0 > 0.0) || samples_per_period == 0) throw Error(ErrorCode::InvalidConfig, "trace needs omega0 and samples");
  return units::kTwoPi / omega0 / static_cast<double>(samples_per_period);
}

TraceSpec TraceSpec::from_ffm(const drive::FfmParams& ffm, double carrier_mhz, double level, bool calibrated) {
  ffm.validate();
  TraceSpec s;
  s.carrier_mhz = carrier_mhz;
  s.deviation_mhz = units::angular_to_mhz(ffm.modulation_amplitude);
  s.omega0 = ffm.modulation_frequency;
  s.level = level;
  s.calibrated = calibrated;
  return s;
}

namespace {

double harmonic_factor(const std::vector<std::pair<double, double>>& h, double phase) {
  double v = 1.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double m = static_cast<double>(n + 1) * phase;
    v += h[n].first * std::sin(m) + h[n].second * std::cos(m);
  }
  return v;
}

}  // namespace

std::vector<double> simulate_power_trace(const AomTransferModel& model, const TraceSpec& spec,
                                         const std::vector<std::pair<double, double>>& compensation) {
  const double dt = spec.dt();
  const std::size_t n = spec.periods * spec.samples_per_period;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = dt * static_cast<double>(k);
    const double phase = spec.omega0 * t;
    const double f = spec.carrier_mhz + spec.deviation_mhz * std::sin(phase);
    const double base = spec.calibrated ? drive_for_power(model, f, spec.level) : spec.level;
    const double v = base * harmonic_factor(compensation, phase) * harmonic_factor(spec.distortion, phase) /
                     model.pre_correction(f);
    out[k] = simulated_power(model, f, v);
  }
  return out;
}

CompensationResult compensate_ram(const AomTransferModel& model, const TraceSpec& spec,
                                  const CompensationOptions& opt) {
  const std::size_t m = 2 * opt.n_harmonics;
  const double dt = spec.dt();
  const auto unpack = [&](const std::vector<double>& p) {
    std::vector<std::pair<double, double>> h(opt.n_harmonics);
    for (std::size_t n = 0; n < opt.n_harmonics; ++n) h[n] = {p[2 * n], p[2 * n + 1]};
    return h;
  };
  const auto objective = [&](const std::vector<double>& p) {
    return ram_spectrum(simulate_power_trace(model, spec, unpack(p)), dt, spec.omega0, opt.n_harmonics)
        .peak_to_peak_fraction;
  };

  std::vector<double> p(m, 0.0);
  double f = objective(p);
  CompensationResult out;
  out.objective_history.push_back(f);
  double step = opt.initial_step;
  int flat_iterations = 0;
  int it = 0;
  for (; it < opt.max_iterations && f > opt.target; ++it) {
    std::vector<double> g(m);
    double gnorm = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<double> hi = p, lo = p;
      hi[k] += opt.gradient_step;
      lo[k] -= opt.gradient_step;
      g[k] = (objective(hi) - objective(lo)) / (2.0 * opt.gradient_step);
      gnorm += g[k] * g[k];
    }
    gnorm = std::sqrt(gnorm);
    if (!(gnorm > 1e-14)) {
      if (it == 0) throw Error(ErrorCode::NoImprovement, "objective is flat at the starting point");
      break;
    }
    bool accepted = false;
    while (step > 1e-12) {
      std::vector<double> trial = p;
      for (std::size_t k = 0; k < m; ++k) trial[k] -= step * g[k] / gnorm;
      const double ft = objective(trial);
      if (ft < f) {
        const double rel = (f - ft) / f;
        flat_iterations = rel < 1e-5 ? flat_iterations + 1 : 0;
        p = std::move(trial);
        f = ft;
        out.objective_history.push_back(f);
        step = std::min(step * 1.5, 0.5);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || flat_iterations >= 5) break;
  }
  out.harmonics = unpack(p);
  out.achieved = ram_spectrum(simulate_power_trace(model, spec, out.harmonics), dt, spec.omega0, opt.n_harmonics);
  out.iterations = it;
  return out;
}

}  // namespace floqryd::calibration

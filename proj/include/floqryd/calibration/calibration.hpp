// calibration.hpp: simulated AOM hardware for the modulation calibration loop:
// frequency-dependent diffraction efficiency, RAM spectrum extraction from a
// power trace, and gradient-descent harmonic compensation.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <json.hpp>

#include "floqryd/drive/schedule.hpp"

namespace floqryd::calibration {

/// Polynomial c0 + c1·(f − f_ref) + c2·(f − f_ref)² + ...
double polynomial(const std::vector<double>& coeffs, double f, double f_ref);

/// P(f, v) = A(f)·tanh((v − V0(f))/σ(f)) + C(f), f in MHz, v in drive units.
struct AomTransferModel {
  double f_ref = 0.0;  // MHz
  double f_min = 0.0;  // band, MHz
  double f_max = 0.0;
  std::vector<double> amplitude{1.0};
  std::vector<double> center{0.0};
  std::vector<double> width{1.0};
  std::vector<double> offset{0.0};
  /// Quadratic pre-correction v → v / (a(f − f_c)² + c).
  double pre_a = 0.0;
  double pre_fc = 0.0;
  double pre_c = 1.0;

  double a(double f) const { return polynomial(amplitude, f, f_ref); }
  double v0(double f) const { return polynomial(center, f, f_ref); }
  double sigma(double f) const { return polynomial(width, f, f_ref); }
  double c(double f) const { return polynomial(offset, f, f_ref); }
  double pre_correction(double f) const { return pre_a * (f - pre_fc) * (f - pre_fc) + pre_c; }

  /// Throws InvalidConfig when σ(f) ≤ 0 or the pre-correction vanishes in band.
  void validate() const;

  /// Frequency-independent model over [f_min, f_max].
  static AomTransferModel flat(double f_min, double f_max, double a, double v0, double sigma, double c);
  /// Second-order synthetic model used by the calibration scenarios and tests.
  static AomTransferModel synthetic(double f_ref = 110.0);
};

AomTransferModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const AomTransferModel& model);

/// Throws FrequencyOutOfBand.
double simulated_power(const AomTransferModel& model, double f, double v);
/// Inverse of simulated_power in v. Throws TargetUnreachable when the target
/// lies outside the open interval (C − |A|, C + |A|).
double drive_for_power(const AomTransferModel& model, double f, double target);

struct RamSpectrum {
  std::vector<std::pair<double, double>> harmonics;  // (A_n, B_n), n = 1..
  double fundamental = 0.0;                          // ω0, rad/µs
  double peak_to_peak_fraction = 0.0;                // (max − min)/(max + min) of the envelope

  /// Rabi-level RAM. With `square_root` the power ripple is mapped to the field
  /// amplitude to first order (coefficients halved); otherwise used as is.
  drive::RamModel to_ram_model(bool square_root) const;
};

/// Harmonic content of P(t)/P̄ − 1 for n = 1..n_harmonics by projection onto
/// sin nω0t and cos nω0t. Samples are P(t_k) at t_k = k·dt, spanning an integer
/// number (≥ 4) of periods with ≥ 32 points per period. Throws InsufficientSamples.
RamSpectrum ram_spectrum(const std::vector<double>& trace, double dt, double omega0, std::size_t n_harmonics = 4);

/// FFM power trace set-up: RF frequency f(t) = carrier + deviation·sin(ω0t).
struct TraceSpec {
  double carrier_mhz = 110.0;
  double deviation_mhz = 0.0;
  double omega0 = 0.0;  // rad/µs
  /// Base drive amplitude, or the target power when `calibrated` is set.
  double level = 0.0;
  /// Invert the transfer model at every instantaneous frequency (drive_for_power).
  bool calibrated = false;
  /// Fractional drive-chain distortion (A_n, B_n) multiplying the RF amplitude.
  std::vector<std::pair<double, double>> distortion;
  std::size_t periods = 8;
  std::size_t samples_per_period = 64;

  double dt() const;
  /// FFM parameters give the deviation as δ/2π.
  static TraceSpec from_ffm(const drive::FfmParams& ffm, double carrier_mhz, double level, bool calibrated);
};

/// Optical power samples under compensation harmonics (a_n, b_n) added to the
/// drive as v·(1 + Σ a_n sin nω0t + b_n cos nω0t).
std::vector<double> simulate_power_trace(const AomTransferModel& model, const TraceSpec& spec,
                                         const std::vector<std::pair<double, double>>& compensation = {});

struct CompensationResult {
  std::vector<std::pair<double, double>> harmonics;  // best drive coefficients
  RamSpectrum achieved;
  std::vector<double> objective_history;             // accepted steps, non-increasing
  int iterations = 0;
};

struct CompensationOptions {
  std::size_t n_harmonics = 4;
  int max_iterations = 400;
  double initial_step = 0.02;
  double gradient_step = 1e-6;
  double target = 1e-4;  // stop once the ripple falls below this
};

/// Gradient descent with a finite-difference gradient on the 2·n_harmonics
/// drive coefficients, minimizing the peak-to-peak ripple of the simulated
/// trace. The step halves on any increase; the run ends when the relative
/// improvement stays below 1e-5 for 5 iterations. Throws NoImprovement when the
/// gradient vanishes at a nonzero ripple.
CompensationResult compensate_ram(const AomTransferModel& model, const TraceSpec& spec,
                                  const CompensationOptions& options = {});

}  // namespace floqryd::calibration

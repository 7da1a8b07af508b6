// fitting.hpp: Levenberg–Marquardt least squares and the fit families used for
// Rabi oscillations, W decay, modulation-index, AOD-distance and AOM-efficiency
// calibrations.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace floqryd::fitting {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> parameters;
  Eigen::MatrixXd covariance;       // scaled by the reduced chi-square
  std::vector<double> uncertainties;// √diag(covariance)
  double residual_norm = 0.0;       // √Σ w r²
  bool converged = false;
  int iterations = 0;

  double value(const std::string& name) const;
  double error(const std::string& name) const;
};

using Model = std::function<double(const std::vector<double>& params, double x)>;

struct LmOptions {
  int max_iterations = 500;
  double ftol = 1e-15;            // relative change of the cost
  double xtol = 1e-13;            // relative change of the parameters
  double gtol = 1e-14;            // max |gradient| scaled
  double jacobian_step = 1e-6;    // relative central-difference step
  double initial_lambda = 1e-3;
};

/// Weighted least squares of model(p, x_i) against y_i. Steps that raise the
/// cost are rejected, so the residual never increases. Throws NoConvergence
/// when the iteration limit is hit or the normal matrix is rank deficient at
/// the solution.
FitResult levenberg_marquardt(const Model& model, const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& weights, std::vector<double> initial,
                              const std::vector<std::string>& names, const LmOptions& options = {});

/// a·e^{−t/τ}·cos(2πft + φ) + c; parameters amplitude, frequency, phase,
/// decay_time, offset. Frequency starts at the discrete spectrum peak.
/// Needs ≥ 8 points spanning ≥ 1.5 periods (InsufficientData).
FitResult fit_damped_sinusoid(const std::vector<double>& t, const std::vector<double>& y,
                              const std::vector<double>& weights = {});

/// a·e^{−t/τ} + c; parameters amplitude, decay_time, offset. Needs ≥ 5 points.
/// Constant data throws NoConvergence.
FitResult fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y);

/// P(α_spec) = |J0(α_spec/χ)|; parameter chi. Needs ≥ 10 points and a J0 zero
/// inside the α range.
FitResult fit_bessel_carrier(const std::vector<double>& alphas, const std::vector<double>& powers);

/// δ'(f_r) = C6/(κ f_r)^6 + δ_u with C6 in MHz·µm^6, f_r in MHz, shifts in MHz;
/// parameters kappa (µm/MHz) and delta_u (MHz). Needs ≥ 4 points.
FitResult fit_distance_calibration(const std::vector<double>& freq_spacings,
                                   const std::vector<double>& resonance_shifts, double c6_mhz_um6);

/// P(v) = A·tanh((v − V0)/σ) + C; parameters A, V0, sigma, C. Needs ≥ 8 points.
FitResult fit_tanh_efficiency(const std::vector<double>& drive, const std::vector<double>& power);

}  // namespace floqryd::fitting

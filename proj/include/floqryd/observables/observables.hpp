// observables.hpp: populations, W-state fidelity, SPAM forward model and the
// intrinsic gate-error bound.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "floqryd/core/matrix.hpp"
#include "floqryd/lindblad/evolver.hpp"
#include "floqryd/model/system.hpp"

namespace floqryd::observables {

/// |W> = (1/√N) Σ_i e^{iφ_i} |g…e_i…g>.
struct WReference {
  std::vector<double> phases;  // rad, one per atom

  static WReference symmetric(std::size_t n_atoms) { return {std::vector<double>(n_atoms, 0.0)}; }
  /// φ_i = k·x_i along the laser axis.
  static WReference from_positions(const std::vector<model::Vec3>& positions, double k_eff);

  std::size_t atom_count() const noexcept { return phases.size(); }
  core::StateVector state() const;
};

/// Basis populations keyed by label ("gg", "ge", ...), plus "ge+eg" for two
/// atoms and "P0".."PN" (excitation-number probabilities) for three or more.
std::map<std::string, double> populations(const lindblad::DensityMatrix& rho);
/// Same aggregation from a vector of basis probabilities.
std::map<std::string, double> populations(const std::vector<double>& basis_probs, std::size_t n_atoms);

/// <W|ρ|W>, real part, clamped to [0, 1] after a 1e-9 sanity check.
double w_fidelity(const lindblad::DensityMatrix& rho, const WReference& reference);
double w_fidelity(const core::ComplexMatrix& rho, const core::StateVector& w);

/// Per-atom readout channel M[detected][true] with index 0 = g, 1 = e (Rydberg).
using SpamChannel = std::array<std::array<double, 2>, 2>;
SpamChannel spam_channel(const model::SpamModel& spam);

/// Detected (P_g, P_r) from true (P̃_g, P̃_r). Throws NotNormalized.
std::array<double, 2> apply_spam(double true_g, double true_r, const model::SpamModel& spam);
/// Joint detected basis probabilities: product channel over atoms.
/// Throws NotNormalized when the input does not sum to 1 within the trace tolerance.
std::vector<double> apply_spam(const std::vector<double>& true_basis_probs, std::size_t n_atoms,
                               const model::SpamModel& spam);

/// E_min = (3(7π)^{2/3}/8)·(V τ)^{−2/3} with V in rad/µs and τ in µs.
double gate_error_bound(double v, double tau_us);

}  // namespace floqryd::observables

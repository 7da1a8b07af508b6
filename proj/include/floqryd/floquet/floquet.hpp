// floquet.hpp: one-period propagator, quasi-energy modes, overlaps and the
// inverse participation ratio (IPR) of a reference state.

#pragma once

#include <cstddef>
#include <vector>

#include "floqryd/core/matrix.hpp"
#include "floqryd/hamiltonian/hamiltonian.hpp"
#include "floqryd/model/system.hpp"

namespace floqryd::floquet {

/// Quasi-phases closer than this are one degenerate cluster.
inline constexpr double kDegeneracyGap = 1e-8;

struct FloquetSpectrum {
  double period = 0.0;               // µs
  std::vector<double> quasi_phases;  // rad, in (−π, π], ascending
  core::ComplexMatrix modes;         // columns |φ_k(0)>
  /// Index ranges [begin, end) of degenerate clusters (quasi-phase gap below
  /// kDegeneracyGap, including across the ±π wrap).
  std::vector<std::vector<std::size_t>> clusters;

  /// Cluster weights ||P_c ψ||², one per cluster; sums to ||ψ||².
  std::vector<double> overlaps(const core::StateVector& psi) const;
};

/// U(t_start + T, t_start) with T = 2π/ω0 for a builder whose schedule holds a
/// single FFM segment over the window. `noise` must be free of dissipation.
/// Throws DissipativeScheduleUnsupported otherwise.
core::ComplexMatrix one_period_propagator(const hamiltonian::HamiltonianBuilder& h, double omega0,
                                          double t_start = 0.0, const model::NoiseModel& noise = {});

FloquetSpectrum floquet_spectrum(const core::ComplexMatrix& propagator, double period);

/// (1/Σ_k p_k²) − 1 over degenerate-cluster overlaps. Throws ZeroOverlap.
double ipr(const FloquetSpectrum& spectrum, const core::StateVector& reference);

/// IPR of the symmetric |W> (φ = 0) for two atoms with Doppler +Δ_D on atom 0
/// and −Δ_D on atom 1. Rows follow omega0_grid, columns doppler_grid (both rad/µs).
/// Uses the array, C6 and Rabi frequency of `config`; dissipation is ignored.
std::vector<std::vector<double>> ipr_map(const model::SystemConfig& config, double alpha,
                                         const std::vector<double>& doppler_grid,
                                         const std::vector<double>& omega0_grid, std::size_t threads = 1);

}  // namespace floqryd::floquet

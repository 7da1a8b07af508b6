// evolver.hpp: Lindblad master-equation integration on the N-atom density matrix.
//
//   dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k† L_k, ρ})
//
// Collapse operators per atom: L_m = √γ1|g><g| + √γ2|g><e| (intermediate-state
// scattering), L_r = √Γr|g><e| (Rydberg decay); plus one global laser-phase
// dephasing L_l = √(γl/2) ⊗_i σ_z^(i).

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "floqryd/core/matrix.hpp"
#include "floqryd/hamiltonian/hamiltonian.hpp"
#include "floqryd/lindblad/ode.hpp"
#include "floqryd/model/system.hpp"

namespace floqryd::lindblad {

inline constexpr double kTraceTol = 1e-6;
inline constexpr double kHermitianTol = 1e-8;
inline constexpr double kPositivityTol = 1e-6;

class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Throws NotHermitian / NotNormalized / PositivityViolation when the
  /// invariants fail beyond the module tolerances.
  explicit DensityMatrix(core::ComplexMatrix m);

  static DensityMatrix ground(std::size_t n_atoms);
  static DensityMatrix pure(const core::StateVector& psi);

  std::size_t dim() const noexcept { return m_.rows(); }
  const core::ComplexMatrix& matrix() const noexcept { return m_; }
  core::cplx operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  double trace() const { return m_.trace().real(); }
  double purity() const;
  double population(std::size_t basis_index) const { return m_(basis_index, basis_index).real(); }

 private:
  core::ComplexMatrix m_;
};

/// Hermiticity, trace and positivity check; throws the matching error code.
void check_density(const core::ComplexMatrix& m, double trace_tol = kTraceTol);

struct DissipatorSet {
  std::vector<core::ComplexMatrix> collapse_ops;
  std::size_t dim() const { return collapse_ops.empty() ? 0 : collapse_ops.front().rows(); }
};

/// 2·n + 1 operators in the order L_m^0, L_r^0, L_m^1, L_r^1, ..., L_l.
/// Throws UnsupportedAtomCount for n outside {1, 2, 3}.
DissipatorSet build_dissipators(const model::NoiseModel& noise, std::size_t n_atoms);
DissipatorSet build_dissipators(const model::SystemConfig& config, std::size_t n_atoms);

struct EvolveOptions {
  OdeOptions ode;
  bool keep_snapshots = true;
};

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<std::string> labels;              // basis labels, "gg", "ge", ...
  std::vector<std::vector<double>> populations; // [time][basis index]
  std::vector<DensityMatrix> snapshots;         // empty unless kept
  OdeStats stats;

  std::size_t label_index(std::string_view label) const;
  std::vector<double> series(std::string_view label) const;
};

/// Integrates from t_span.first to t_span.second, sampling at `sample_times`
/// (ascending, inside the span; the integrator lands exactly on each).
/// Throws InvalidInitialState, StepSizeUnderflow, TraceDrift, NotHermitian,
/// PositivityViolation.
TrajectoryResult evolve(const hamiltonian::HamiltonianBuilder& h, const DissipatorSet& dissipators,
                        const DensityMatrix& rho0, std::pair<double, double> t_span,
                        const std::vector<double>& sample_times, const EvolveOptions& options = {});

/// Trapezoidal average of one basis population over [window.first, window.second].
/// Throws WindowOutOfRange.
double time_averaged_population(const TrajectoryResult& result, std::string_view label,
                                std::pair<double, double> window);

/// Evenly spaced times start, ..., stop (count >= 2) or {start} for count 1.
std::vector<double> linspace(double start, double stop, std::size_t count);

/// Unitary propagator U(t1, t0) of the coherent part (dissipators ignored),
/// integrated column-wise from the identity.
core::ComplexMatrix propagate_unitary(const hamiltonian::HamiltonianBuilder& h, double t0, double t1,
                                      const OdeOptions& options = {});

}  // namespace floqryd::lindblad

// hamiltonian.hpp: the driven N-atom Hamiltonian in the {g,e}^N product basis
// and the Bessel-rescaled effective couplings of a frequency-modulated drive.
//
// H/ħ = −Σ_i (Δ(t) + Δ_D,i) n_i + (Ω(t)/2) Σ_i σ_x^i + Σ_{i<j} V_ij n_i n_j,
// with n_i = |e_i><e_i|. Basis index bit (N−1−i) is atom i (atom 0 leftmost).

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "floqryd/core/matrix.hpp"
#include "floqryd/drive/schedule.hpp"
#include "floqryd/model/system.hpp"

namespace floqryd::hamiltonian {

inline constexpr std::size_t kMaxAtoms = 4;  // dim <= 16

class HamiltonianBuilder {
 public:
  HamiltonianBuilder(model::AtomArray array, model::LaserParams lasers, drive::DriveSchedule schedule);

  /// Per-atom Doppler offsets Δ_D,i (rad/µs). Throws DimensionMismatch.
  HamiltonianBuilder& with_doppler(std::vector<double> offsets);
  /// Straight-line motion x_i + v_i t (µm/µs): V_ij follows the drifting
  /// spacing. Zero velocities (the default) keep V_ij fixed.
  HamiltonianBuilder& with_velocities(std::vector<model::Vec3> velocities);
  HamiltonianBuilder& with_ram(drive::RamModel ram);

  std::size_t atom_count() const noexcept { return array_.size(); }
  std::size_t dim() const noexcept { return std::size_t{1} << array_.size(); }
  const drive::DriveSchedule& schedule() const noexcept { return schedule_; }
  const model::AtomArray& array() const noexcept { return array_; }
  const model::LaserParams& lasers() const noexcept { return lasers_; }
  const std::vector<double>& doppler() const noexcept { return doppler_; }
  const std::optional<drive::RamModel>& ram() const noexcept { return ram_; }
  bool has_motion() const noexcept { return moving_; }

  /// V_ij at time t (rad/µs).
  double interaction(std::size_t i, std::size_t j, double t) const;

  /// Ω(t) and the diagonal of H at time t, evaluated inside segment `segment`
  /// (so the right end point of a segment uses that segment's drive).
  /// `diag` must hold dim() entries. Allocation free.
  double fill(double t, std::size_t segment, double* diag) const;

  /// Full Hermitian matrix at t (closed-open segment lookup).
  core::ComplexMatrix hamiltonian_at(double t) const;
  core::ComplexMatrix hamiltonian_in_segment(double t, std::size_t segment) const;

 private:
  model::AtomArray array_;
  model::LaserParams lasers_;
  drive::DriveSchedule schedule_;
  std::vector<double> doppler_;
  std::vector<model::Vec3> velocities_;
  std::optional<drive::RamModel> ram_;
  std::vector<double> static_v_;  // V_ij at t = 0, pair-major (i<j)
  bool moving_ = false;
};

struct Harmonic {
  int m = 0;
  double frequency = 0.0;  // rad/µs, relative to the carrier
  std::complex<double> weight;
};

struct EffectiveCouplings {
  std::vector<Harmonic> omega_a;  // |gg> <-> |W>
  std::vector<Harmonic> omega_b;  // |W> <-> |ee>
  int truncation_order = 0;

  /// |weight| of the zero-frequency component, 0 when none is resonant.
  double resonant_a() const;
  double resonant_b() const;
};

/// Default truncation: ceil(α) + 8.
int default_truncation(double alpha);

/// Harmonic decomposition of the FFM phase factor. omega_a carries J_m(α)e^{imπ/2}
/// at mω0; omega_b the same weights at mω0 + V, so the component resonant at
/// mω0 = −V has magnitude |J_{|V/ω0|}(α)|. Throws TruncationTooSmall when
/// truncation_order < ceil(α) + 5.
EffectiveCouplings effective_couplings(double alpha, double omega0, double v,
                                       std::optional<int> truncation_order = std::nullopt);

/// Zero-frequency carrier weight of the |gg> <-> |W> coupling under RAM:
/// J0(α) + Σ_n B_n (−i)^n J_n(α). Sine components A_n drop out.
std::complex<double> ram_carrier_weight(const drive::RamModel& ram, double alpha);

}  // namespace floqryd::hamiltonian

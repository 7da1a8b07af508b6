#include "floqryd/hamiltonian/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "floqryd/core/bessel.hpp"
#include "floqryd/error.hpp"

namespace floqryd::hamiltonian {

namespace {

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  // i < j, row-major over the strict upper triangle.
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

HamiltonianBuilder::HamiltonianBuilder(model::AtomArray array, model::LaserParams lasers, drive::DriveSchedule schedule)
    : array_(std::move(array)), lasers_(lasers), schedule_(std::move(schedule)) {
  array_.validate();
  const std::size_t n = array_.size();
  if (n > kMaxAtoms) throw Error(ErrorCode::UnsupportedAtomCount, std::to_string(n) + " atoms exceed the dense limit");
  if (schedule_.size() == 0) throw Error(ErrorCode::InvalidConfig, "empty drive schedule");
  doppler_.assign(n, 0.0);
  velocities_.assign(n, model::Vec3{0.0, 0.0, 0.0});
  static_v_.resize(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) static_v_[pair_index(i, j, n)] = model::interaction_strength(array_, i, j);
}

HamiltonianBuilder& HamiltonianBuilder::with_doppler(std::vector<double> offsets) {
  if (offsets.size() != array_.size())
    throw Error(ErrorCode::DimensionMismatch, "one Doppler offset per atom required");
  doppler_ = std::move(offsets);
  return *this;
}

HamiltonianBuilder& HamiltonianBuilder::with_velocities(std::vector<model::Vec3> velocities) {
  if (velocities.size() != array_.size())
    throw Error(ErrorCode::DimensionMismatch, "one velocity per atom required");
  velocities_ = std::move(velocities);
  moving_ = false;
  for (std::size_t i = 0; i < velocities_.size() && !moving_; ++i)
    for (std::size_t j = i + 1; j < velocities_.size(); ++j)
      if (velocities_[i] != velocities_[j]) moving_ = true;
  return *this;
}

HamiltonianBuilder& HamiltonianBuilder::with_ram(drive::RamModel ram) {
  ram.validate();
  ram_ = std::move(ram);
  return *this;
}

double HamiltonianBuilder::interaction(std::size_t i, std::size_t j, double t) const {
  const std::size_t n = array_.size();
  if (i >= n || j >= n) throw Error(ErrorCode::IndexOutOfRange, "atom index out of range");
  if (i == j) throw Error(ErrorCode::SameAtom, "interaction of an atom with itself");
  if (i > j) std::swap(i, j);
  if (!moving_) return static_v_[pair_index(i, j, n)];
  double r2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = (array_.positions[i][k] + velocities_[i][k] * t) - (array_.positions[j][k] + velocities_[j][k] * t);
    r2 += d * d;
  }
  return array_.c6 / (r2 * r2 * r2);
}

double HamiltonianBuilder::fill(double t, std::size_t segment, double* diag) const {
  const auto& seg = schedule_.segment(segment);
  const double local = std::clamp(t - schedule_.segment_start(segment), 0.0, seg.duration);
  const double detuning = lasers_.static_detuning + drive::detuning_at(seg, local);
  const double rabi = drive::rabi_at(seg, local, lasers_.rabi, ram_ ? &*ram_ : nullptr);

  const std::size_t n = array_.size();
  double v[kMaxAtoms * (kMaxAtoms - 1) / 2];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) v[pair_index(i, j, n)] = interaction(i, j, t);

  const std::size_t d = dim();
  for (std::size_t s = 0; s < d; ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((s >> (n - 1 - i)) & 1U)) continue;
      e -= detuning + doppler_[i];
      for (std::size_t j = i + 1; j < n; ++j)
        if ((s >> (n - 1 - j)) & 1U) e += v[pair_index(i, j, n)];
    }
    diag[s] = e;
  }
  return rabi;
}

core::ComplexMatrix HamiltonianBuilder::hamiltonian_in_segment(double t, std::size_t segment) const {
  const std::size_t d = dim();
  const std::size_t n = array_.size();
  double diag[std::size_t{1} << kMaxAtoms];
  const double rabi = fill(t, segment, diag);
  core::ComplexMatrix h(d, d);
  for (std::size_t s = 0; s < d; ++s) {
    h(s, s) = diag[s];
    for (std::size_t i = 0; i < n; ++i) h(s, s ^ (std::size_t{1} << (n - 1 - i))) = 0.5 * rabi;
  }
  return h;
}

core::ComplexMatrix HamiltonianBuilder::hamiltonian_at(double t) const {
  return hamiltonian_in_segment(t, schedule_.segment_index(t));
}

double EffectiveCouplings::resonant_a() const {
  for (const auto& h : omega_a)
    if (std::abs(h.frequency) < 1e-9) return std::abs(h.weight);
  return 0.0;
}

double EffectiveCouplings::resonant_b() const {
  for (const auto& h : omega_b)
    if (std::abs(h.frequency) < 1e-9) return std::abs(h.weight);
  return 0.0;
}

int default_truncation(double alpha) { return static_cast<int>(std::ceil(alpha)) + 8; }

EffectiveCouplings effective_couplings(double alpha, double omega0, double v, std::optional<int> truncation_order) {
  if (!(omega0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "modulation frequency must be positive");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidConfig, "modulation index must be >= 0");
  const int order = truncation_order.value_or(default_truncation(alpha));
  const int minimum = static_cast<int>(std::ceil(alpha)) + 5;
  if (order < minimum)
    throw Error(ErrorCode::TruncationTooSmall,
                "truncation order " + std::to_string(order) + " < ceil(alpha) + 5 = " + std::to_string(minimum));

  EffectiveCouplings out;
  out.truncation_order = order;
  // Frequencies within 1e-9 relative of resonance are snapped to exactly zero.
  const auto snap = [omega0](double f) { return std::abs(f) < 1e-9 * omega0 ? 0.0 : f; };
  for (int m = -order; m <= order; ++m) {
    const std::complex<double> w = core::bessel_j(m, alpha) * std::polar(1.0, m * std::numbers::pi / 2.0);
    out.omega_a.push_back({m, snap(m * omega0), w});
    out.omega_b.push_back({m, snap(m * omega0 + v), w});
  }
  return out;
}

std::complex<double> ram_carrier_weight(const drive::RamModel& ram, double alpha) {
  std::complex<double> w = core::bessel_j(0, alpha);
  std::complex<double> minus_i_pow{1.0, 0.0};
  for (std::size_t k = 0; k < ram.harmonics.size(); ++k) {
    minus_i_pow *= std::complex<double>{0.0, -1.0};
    w += ram.harmonics[k].second * minus_i_pow * core::bessel_j(static_cast<int>(k + 1), alpha);
  }
  return w;
}

}  // namespace floqryd::hamiltonian

#include "floqryd/floquet/floquet.hpp"

#include <cmath>
#include <numbers>

#include "floqryd/core/eigen.hpp"
#include "floqryd/disorder/ensemble.hpp"
#include "floqryd/error.hpp"
#include "floqryd/lindblad/evolver.hpp"
#include "floqryd/model/units.hpp"
#include "floqryd/observables/observables.hpp"

namespace floqryd::floquet {

namespace {

lindblad::OdeOptions propagator_tolerances() {
  lindblad::OdeOptions o;
  o.atol = 1e-12;
  o.rtol = 1e-11;
  return o;
}

}  // namespace

core::ComplexMatrix one_period_propagator(const hamiltonian::HamiltonianBuilder& h, double omega0, double t_start,
                                          const model::NoiseModel& noise) {
  if (noise != model::NoiseModel::none())
    throw Error(ErrorCode::DissipativeScheduleUnsupported, "Floquet propagator requires a dissipation-free model");
  if (!(omega0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "modulation frequency must be positive");
  const double period = units::kTwoPi / omega0;
  const auto& schedule = h.schedule();
  const std::size_t seg = schedule.segment_index(t_start);
  const auto& segment = schedule.segment(seg);
  const double seg_end = schedule.segment_start(seg) + segment.duration;
  if (!segment.is_ffm() || t_start + period > seg_end + 1e-9)
    throw Error(ErrorCode::DissipativeScheduleUnsupported, "window must lie inside one FFM segment");
  const auto& ffm = std::get<drive::FfmDrive>(segment.kind).ffm;
  if (std::abs(ffm.modulation_frequency - omega0) > 1e-9 * omega0)
    throw Error(ErrorCode::InvalidConfig, "omega0 does not match the segment modulation frequency");
  return lindblad::propagate_unitary(h, t_start, std::min(t_start + period, seg_end), propagator_tolerances());
}

FloquetSpectrum floquet_spectrum(const core::ComplexMatrix& propagator, double period) {
  const core::UnitaryEigen eig = core::unitary_eig(propagator);
  FloquetSpectrum out;
  out.period = period;
  out.quasi_phases = eig.phases;
  out.modes = eig.vectors;
  const std::size_t n = eig.phases.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && eig.phases[k] - eig.phases[k - 1] < kDegeneracyGap) {
      out.clusters.back().push_back(k);
    } else {
      out.clusters.push_back({k});
    }
  }
  // Phases just below π and just above −π are neighbours on the circle.
  if (out.clusters.size() > 1 &&
      (std::numbers::pi - eig.phases.back()) + (eig.phases.front() + std::numbers::pi) < kDegeneracyGap) {
    auto first = out.clusters.front();
    out.clusters.erase(out.clusters.begin());
    out.clusters.back().insert(out.clusters.back().end(), first.begin(), first.end());
  }
  return out;
}

std::vector<double> FloquetSpectrum::overlaps(const core::StateVector& psi) const {
  if (psi.dim() != modes.rows()) throw Error(ErrorCode::DimensionMismatch, "reference state dimension");
  std::vector<double> out;
  for (const auto& cluster : clusters) {
    double p = 0.0;
    for (std::size_t k : cluster) {
      core::cplx a{};
      for (std::size_t s = 0; s < psi.dim(); ++s) a += std::conj(modes(s, k)) * psi[s];
      p += std::norm(a);
    }
    out.push_back(p);
  }
  return out;
}

double ipr(const FloquetSpectrum& spectrum, const core::StateVector& reference) {
  if (std::abs(reference.norm() - 1.0) > 1e-9) throw Error(ErrorCode::NotNormalized, "reference state not normalized");
  double sum_sq = 0.0;
  bool any = false;
  for (double p : spectrum.overlaps(reference)) {
    sum_sq += p * p;
    if (p > 1e-14) any = true;
  }
  if (!any) throw Error(ErrorCode::ZeroOverlap, "reference has no overlap with any Floquet mode");
  return std::max(0.0, 1.0 / sum_sq - 1.0);
}

std::vector<std::vector<double>> ipr_map(const model::SystemConfig& config, double alpha,
                                         const std::vector<double>& doppler_grid,
                                         const std::vector<double>& omega0_grid, std::size_t threads) {
  if (doppler_grid.empty() || omega0_grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty IPR grid");
  if (config.array.size() != 2) throw Error(ErrorCode::UnsupportedAtomCount, "IPR map is defined for two atoms");
  const auto w = observables::WReference::symmetric(2).state();
  const std::size_t cols = doppler_grid.size();
  std::vector<std::vector<double>> out(omega0_grid.size(), std::vector<double>(cols, 0.0));
  disorder::parallel_for(omega0_grid.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t r = idx / cols, c = idx % cols;
    const double omega0 = omega0_grid[r];
    const auto ffm = drive::FfmParams::from_index(alpha, omega0);
    drive::DriveSchedule schedule({drive::PulseSegment::ffm(ffm.period(), ffm)});
    hamiltonian::HamiltonianBuilder h(config.array, config.lasers, schedule);
    h.with_doppler({doppler_grid[c], -doppler_grid[c]});
    const auto u = one_period_propagator(h, omega0);
    out[r][c] = ipr(floquet_spectrum(u, ffm.period()), w);
  });
  return out;
}

}  // namespace floqryd::floquet

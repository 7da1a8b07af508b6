#include <cmath>

#include "floqryd/core/bessel.hpp"
#include "floqryd/core/eigen.hpp"
#include "floqryd/floquet/floquet.hpp"
#include "floqryd/lindblad/evolver.hpp"
#include "floqryd/model/units.hpp"
#include "floqryd/observables/observables.hpp"
#include "support.hpp"

using namespace floqryd;
using core::cplx;

namespace {

const double kRabi = units::mhz_to_angular(1.0);

model::SystemConfig pair_config(double v_over_rabi) {
  auto cfg = model::paper_defaults();
  cfg.noise = model::NoiseModel::none();
  cfg.array = model::AtomArray::chain(2, model::distance_for_interaction(cfg.array.c6, v_over_rabi * kRabi), cfg.array.c6);
  return cfg;
}

hamiltonian::HamiltonianBuilder ffm_builder(const model::SystemConfig& cfg, double alpha, double omega0, double rabi) {
  auto lasers = cfg.lasers;
  lasers.rabi = rabi;
  const double period = units::kTwoPi / omega0;
  return hamiltonian::HamiltonianBuilder(
      cfg.array, lasers, drive::DriveSchedule({drive::PulseSegment::ffm(period, drive::FfmParams::from_index(alpha, omega0))}));
}

}  // namespace

TEST(Propagator, UnitaryAtDopplerMapParameters) {
  const auto cfg = pair_config(8.0);
  const auto h = ffm_builder(cfg, 5.5, 7.0 * kRabi, kRabi);
  const auto u = floquet::one_period_propagator(h, 7.0 * kRabi);
  EXPECT_LT(core::max_abs_diff(u.adjoint() * u, core::ComplexMatrix::identity(4)), 1e-8);
}

TEST(Propagator, NoDriveIsDiagonalPhases) {
  const auto cfg = pair_config(2.0);
  const double w0 = 3.0 * kRabi, period = units::kTwoPi / w0;
  auto lasers = cfg.lasers;
  hamiltonian::HamiltonianBuilder h(cfg.array, lasers, drive::DriveSchedule({drive::PulseSegment::laser_free(period)}));
  EXPECT_CODE(floquet::one_period_propagator(h, w0), ErrorCode::DissipativeScheduleUnsupported);

  // Ω = 0 with FFM: only detuning and interaction phases. The detuning integrates to zero over a period.
  const auto hz = ffm_builder(cfg, 2.0, w0, 1e-12);
  const auto u = floquet::one_period_propagator(hz, w0);
  const double v = model::interaction_strength(cfg.array, 0, 1);
  EXPECT_NEAR(std::abs(u(0, 0) - 1.0), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(u(3, 3) - std::polar(1.0, -v * period)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(u(0, 3)), 0.0, 1e-9);
}

TEST(Propagator, HighFrequencyMatchesBesselAverage) {
  // At ω0 = 50Ω, 30 periods of FFM approach the static drive with Ω → Ω J0(α).
  // The averaged coupling also carries a constant phase, so compare populations from |gg>.
  const auto cfg = pair_config(1.0);
  const double w0 = 50.0 * kRabi, alpha = 1.0, period = units::kTwoPi / w0;
  const auto u1 = floquet::one_period_propagator(ffm_builder(cfg, alpha, w0, kRabi), w0);
  auto u = core::ComplexMatrix::identity(4);
  for (int k = 0; k < 30; ++k) u = u1 * u;
  auto lasers = cfg.lasers;
  lasers.rabi = kRabi * core::bessel_j(0, alpha);
  hamiltonian::HamiltonianBuilder avg(cfg.array, lasers, drive::DriveSchedule({drive::PulseSegment::static_drive(30 * period)}));
  const auto ua = lindblad::propagate_unitary(avg, 0.0, 30 * period);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(std::norm(u(k, 0)), std::norm(ua(k, 0)), 0.01) << k;
  EXPECT_LT(std::norm(u(0, 0)), 0.5);
}

TEST(Ipr, SingleModeAndUniform) {
  const auto s = floquet::floquet_spectrum(core::ComplexMatrix::diagonal(std::vector<cplx>{std::polar(1.0, 0.1), std::polar(1.0, 0.7),
                                                                                           std::polar(1.0, -1.3), std::polar(1.0, 2.0)}),
                                           1.0);
  EXPECT_NEAR(floquet::ipr(s, core::StateVector::basis(4, 2)), 0.0, 1e-12);
  const double a = 1.0 / std::sqrt(3.0);
  core::StateVector psi({a, a, a, 0.0});
  EXPECT_NEAR(floquet::ipr(s, psi), 2.0, 1e-12);
  const auto p = s.overlaps(psi);
  double sum = 0.0;
  for (double x : p) sum += x;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Ipr, DegenerateClusterCountsAsOneMode) {
  const auto s = floquet::floquet_spectrum(core::ComplexMatrix::diagonal(std::vector<cplx>{1.0, 1.0, -1.0, core::cplx(0, 1)}), 1.0);
  const double a = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(floquet::ipr(s, core::StateVector({a, a, 0.0, 0.0})), 0.0, 1e-12);
}

TEST(Ipr, RejectsUnnormalized) {
  const auto s = floquet::floquet_spectrum(core::ComplexMatrix::identity(2), 1.0);
  EXPECT_CODE(floquet::ipr(s, core::StateVector({1.0, 1.0})), ErrorCode::NotNormalized);
}

TEST(IprMap, PointMatchesDirectAndDopplerSymmetric) {
  const auto cfg = pair_config(8.0);
  const double w0 = 7.0 * kRabi, dd = 0.05 * kRabi;
  const auto map = floquet::ipr_map(cfg, 5.5, {-dd, 0.0, dd}, {w0});
  EXPECT_NEAR(map[0][0], map[0][2], 1e-6);

  auto h = ffm_builder(cfg, 5.5, w0, kRabi);
  h.with_doppler({dd, -dd});
  const auto spec = floquet::floquet_spectrum(floquet::one_period_propagator(h, w0), units::kTwoPi / w0);
  EXPECT_NEAR(floquet::ipr(spec, observables::WReference::symmetric(2).state()), map[0][2], 1e-6);
}

TEST(IprMap, NeedsTwoAtoms) {
  auto cfg = pair_config(8.0);
  cfg.array = model::AtomArray::chain(3, 5.0, cfg.array.c6);
  EXPECT_CODE(floquet::ipr_map(cfg, 5.5, {0.0}, {7.0 * kRabi}), ErrorCode::UnsupportedAtomCount);
}

#include <cmath>

#include "floqryd/core/bessel.hpp"
#include "floqryd/hamiltonian/hamiltonian.hpp"
#include "floqryd/model/units.hpp"
#include "support.hpp"

using namespace floqryd;

namespace {

const double kRabi = units::mhz_to_angular(1.0);

model::AtomArray pair_at(double v_over_rabi) {
  const double c6 = model::paper_defaults().array.c6;
  return model::AtomArray::chain(2, model::distance_for_interaction(c6, v_over_rabi * kRabi), c6);
}

model::LaserParams lasers() {
  auto l = model::paper_defaults().lasers;
  l.rabi = kRabi;
  return l;
}

}  // namespace

TEST(Hamiltonian, SingleAtomLaserFreeIsZero) {
  const double c6 = model::paper_defaults().array.c6;
  hamiltonian::HamiltonianBuilder h(model::AtomArray::chain(1, 5.0, c6), lasers(),
                                    drive::DriveSchedule({drive::PulseSegment::laser_free(1.0)}));
  EXPECT_LT(h.hamiltonian_at(0.5).max_abs(), 1e-15);
}

TEST(Hamiltonian, TwoAtomStaticEntries) {
  hamiltonian::HamiltonianBuilder h(pair_at(8.0), lasers(), drive::DriveSchedule({drive::PulseSegment::static_drive(1.0)}));
  const auto m = h.hamiltonian_at(0.2);
  EXPECT_NEAR(m(3, 3).real(), 8.0 * kRabi, 1e-9);
  EXPECT_NEAR(std::abs(m(0, 1)), kRabi / 2.0, 1e-12);
  EXPECT_NEAR(std::abs(m(0, 2)), kRabi / 2.0, 1e-12);
  EXPECT_NEAR(std::abs(m(0, 3)), 0.0, 1e-15);
  EXPECT_LT(m.hermitian_defect(), 1e-14);
}

TEST(Hamiltonian, AntisymmetricDoppler) {
  const double dd = 0.3;
  hamiltonian::HamiltonianBuilder h(pair_at(8.0), lasers(), drive::DriveSchedule({drive::PulseSegment::static_drive(1.0)}));
  h.with_doppler({dd, -dd});
  const auto m = h.hamiltonian_at(0.0);
  EXPECT_NEAR(std::abs(m(1, 1).real() - m(2, 2).real()), 2.0 * dd, 1e-12);
}

TEST(Hamiltonian, DopplerLengthMustMatch) {
  hamiltonian::HamiltonianBuilder h(pair_at(8.0), lasers(), drive::DriveSchedule({drive::PulseSegment::static_drive(1.0)}));
  EXPECT_CODE(h.with_doppler({0.1}), ErrorCode::DimensionMismatch);
}

TEST(Hamiltonian, ReleasedAtomsChangeInteraction) {
  hamiltonian::HamiltonianBuilder h(pair_at(1.0), lasers(), drive::DriveSchedule({drive::PulseSegment::static_drive(5.0)}));
  h.with_velocities({{0.0, -0.02, 0.0}, {0.0, 0.02, 0.0}});
  const double v0 = h.interaction(0, 1, 0.0);
  const double r0 = model::distance_for_interaction(model::paper_defaults().array.c6, v0);
  EXPECT_NEAR(model::distance_for_interaction(model::paper_defaults().array.c6, h.interaction(0, 1, 2.5)), r0 + 0.1, 1e-9);
}

TEST(EffectiveCouplings, AntiBlockadeWeights) {
  const auto c = hamiltonian::effective_couplings(1.4, 6.0 * kRabi, 6.0 * kRabi);
  EXPECT_NEAR(c.resonant_a(), std::abs(core::bessel_j(0, 1.4)), 1e-12);
  EXPECT_NEAR(c.resonant_a(), 0.567, 1e-3);
  EXPECT_NEAR(c.resonant_b(), 0.542, 1e-3);
}

TEST(EffectiveCouplings, TrappingAtJ0Zero) {
  const auto c = hamiltonian::effective_couplings(5.5201, 3.0 * kRabi, 0.8 * kRabi);
  EXPECT_LT(c.resonant_a(), 1e-4);
  const auto exact = hamiltonian::effective_couplings(core::bessel_j_zero(0, 2), 3.0 * kRabi, 0.8 * kRabi);
  EXPECT_LT(exact.resonant_a(), 1e-6);
}

TEST(EffectiveCouplings, StaticLimitAndNormalization) {
  const auto c = hamiltonian::effective_couplings(0.0, 3.0 * kRabi, 1.0 * kRabi);
  double total = 0.0;
  for (const auto& h : c.omega_a) {
    if (h.m == 0) EXPECT_NEAR(std::abs(h.weight), 1.0, 1e-14);
    else EXPECT_NEAR(std::abs(h.weight), 0.0, 1e-14);
  }
  const auto d = hamiltonian::effective_couplings(6.9, 3.0 * kRabi, 1.0 * kRabi);
  for (const auto& h : d.omega_a) total += std::norm(h.weight);
  EXPECT_LE(total, 1.0 + 1e-9);
  EXPECT_GT(total, 1.0 - 1e-9);
}

TEST(EffectiveCouplings, TruncationTooSmall) {
  EXPECT_CODE(hamiltonian::effective_couplings(6.9, 3.0 * kRabi, kRabi, 3), ErrorCode::TruncationTooSmall);
}

TEST(EffectiveCouplings, RamCarrierWeight) {
  drive::RamModel ram;
  ram.harmonics = {{0.05, 0.0}};
  EXPECT_NEAR(std::abs(hamiltonian::ram_carrier_weight(ram, 2.0) - core::bessel_j(0, 2.0)), 0.0, 1e-12);
}

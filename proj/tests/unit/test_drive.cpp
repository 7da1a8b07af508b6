#include <cmath>

#include "floqryd/core/bessel.hpp"
#include "floqryd/drive/schedule.hpp"
#include "floqryd/model/system.hpp"
#include "floqryd/model/units.hpp"
#include "support.hpp"

using namespace floqryd;

namespace {
const double kRabi = units::mhz_to_angular(1.0);
}

TEST(Detuning, FfmWaveform) {
  const auto p = drive::FfmParams::from_index(6.0, units::mhz_to_angular(3.0));
  EXPECT_NEAR(p.modulation_amplitude, units::mhz_to_angular(18.0), 1e-12);
  const auto seg = drive::PulseSegment::ffm(2.0, p, 0.3);
  EXPECT_NEAR(drive::detuning_at(seg, 0.0), 0.3, 1e-12);
  const double quarter = 0.25 / 3.0;  // ω0 t = π/2
  EXPECT_NEAR(drive::detuning_at(seg, quarter), 0.3 + units::mhz_to_angular(18.0), 1e-9);
}

TEST(Detuning, PhaseOriginShift) {
  const auto p = drive::FfmParams::from_index(2.0, kRabi * 3.0, 0.1);
  const auto seg = drive::PulseSegment::ffm(1.0, p);
  EXPECT_NEAR(drive::detuning_at(seg, 0.1), 0.0, 1e-12);
}

TEST(Detuning, PeriodicInSegment) {
  const auto p = drive::FfmParams::from_index(5.5, kRabi * 6.0);
  const auto seg = drive::PulseSegment::ffm(3.0, p, 0.2);
  for (double t = 0.0; t + p.period() <= 3.0; t += 0.137)
    EXPECT_LT(std::abs(drive::detuning_at(seg, t) - drive::detuning_at(seg, t + p.period())), 1e-9);
}

TEST(Detuning, StaticAndLaserFree) {
  EXPECT_DOUBLE_EQ(drive::detuning_at(drive::PulseSegment::static_drive(1.0, 3.0), 0.5), 3.0);
  EXPECT_DOUBLE_EQ(drive::detuning_at(drive::PulseSegment::laser_free(1.0), 0.5), 0.0);
  EXPECT_CODE(drive::detuning_at(drive::PulseSegment::static_drive(1.0), 1.5), ErrorCode::TimeOutOfSegment);
}

TEST(Stirap, LiteralProfile) {
  const auto p = drive::StirapProfile::literal(4.0);
  EXPECT_NEAR(drive::stirap_alpha(p, 2.0), 2.4 * (1.2 * std::tanh(0.23) + 1.0), 1e-12);
  EXPECT_NEAR(drive::stirap_alpha(p, 2.0), 3.051, 1e-3);
  EXPECT_DOUBLE_EQ(drive::stirap_alpha(p, 4.0), 0.0);  // −0.217 clamped
  EXPECT_CODE(drive::stirap_alpha(p, 4.5), ErrorCode::TimeOutOfSegment);
}

TEST(Stirap, ConditionSolvedEndpoints) {
  const auto p = drive::StirapProfile::condition_solved(4.0);
  const double a0 = drive::stirap_alpha(p, 0.0), am = drive::stirap_alpha(p, 2.0), at = drive::stirap_alpha(p, 4.0);
  EXPECT_NEAR(a0, 5.5201, 1e-3);
  EXPECT_LT(std::abs(core::bessel_j(0, a0)), 1e-6);
  EXPECT_LT(std::abs(core::bessel_j(1, at)), 1e-6);
  EXPECT_LT(std::abs(core::bessel_j(0, am) - core::bessel_j(1, am)), 1e-6);
  EXPECT_DOUBLE_EQ(p.rate, 3.5);
}

TEST(Stirap, ConditionSolvedFromFirstZero) {
  const auto p = drive::StirapProfile::condition_solved(4.0, core::bessel_j_zero(0, 1));
  EXPECT_NEAR(drive::stirap_alpha(p, 0.0), 2.4048, 1e-3);
  EXPECT_NEAR(drive::stirap_alpha(p, 2.0), 1.4347, 1e-3);
  EXPECT_NEAR(drive::stirap_alpha(p, 4.0), 0.0, 1e-9);
}

TEST(Stirap, MonotoneDecreasing) {
  const auto p = drive::StirapProfile::condition_solved(4.0);
  double prev = drive::stirap_alpha(p, 0.0);
  for (double t = 0.05; t <= 4.0; t += 0.05) {
    const double a = drive::stirap_alpha(p, t);
    EXPECT_LE(a, prev + 1e-12);
    prev = a;
  }
}

TEST(Rabi, RamAndLaserFree) {
  drive::RamModel ram;
  ram.harmonics = {{0.0, 0.022}};
  const auto seg = drive::PulseSegment::ffm(1.0, drive::FfmParams::from_index(2.0, kRabi * 3.0));
  EXPECT_NEAR(drive::rabi_at(seg, 0.0, kRabi), kRabi, 1e-12);
  EXPECT_NEAR(drive::rabi_at(seg, 0.0, kRabi, &ram), 1.022 * kRabi, 1e-12);
  EXPECT_DOUBLE_EQ(drive::rabi_at(drive::PulseSegment::laser_free(1.0), 0.0, kRabi, &ram), 0.0);
  EXPECT_NEAR(drive::rabi_at(drive::PulseSegment::static_drive(1.0), 0.0, kRabi, &ram), kRabi, 1e-12);
}

TEST(Rabi, RamOutsidePerturbativeRange) {
  drive::RamModel ram;
  ram.harmonics = {{1.2, 0.0}};
  EXPECT_CODE(ram.validate(), ErrorCode::InvalidConfig);
}

TEST(PiPulse, Durations) {
  model::LaserParams lasers;
  lasers.rabi = kRabi;
  EXPECT_NEAR(drive::pi_pulse_duration(lasers, true), 0.35355, 1e-4);
  EXPECT_NEAR(drive::pi_pulse_duration(lasers, false), 0.5, 1e-12);
  EXPECT_NEAR(drive::pi_pulse_duration(lasers, true) * std::sqrt(2.0), drive::pi_pulse_duration(lasers, false), 1e-12);
}

TEST(Schedule, ClosedOpenTiling) {
  drive::DriveSchedule s({drive::PulseSegment::static_drive(1.0, 1.0), drive::PulseSegment::static_drive(2.0, 2.0)});
  EXPECT_DOUBLE_EQ(s.total_duration(), 3.0);
  EXPECT_EQ(s.segment_index(0.999), 0u);
  EXPECT_EQ(s.segment_index(1.0), 1u);
  EXPECT_EQ(s.segment_index(3.0), 1u);
  EXPECT_DOUBLE_EQ(s.detuning_at(1.0), 2.0);
  EXPECT_CODE(s.detuning_at(3.5), ErrorCode::TimeOutOfSchedule);
}

TEST(Schedule, FfmPhaseRestartsPerSegment) {
  const auto p = drive::FfmParams::from_index(3.0, kRabi * 4.0);
  drive::DriveSchedule s({drive::PulseSegment::static_drive(0.37), drive::PulseSegment::ffm(1.0, p)});
  EXPECT_NEAR(s.detuning_at(0.37), 0.0, 1e-9);
}

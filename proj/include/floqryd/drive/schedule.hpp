// schedule.hpp: piecewise drive schedules: static, FFM, laser-free and STIRAP
// segments, plus the optional residual amplitude modulation (RAM) of Ω.

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "floqryd/model/system.hpp"

namespace floqryd::drive {

struct FfmParams {
  double modulation_amplitude = 0.0;  // δ, rad/µs
  double modulation_frequency = 0.0;  // ω0, rad/µs
  double phase_origin = 0.0;          // µs after segment start where sin(...) = 0

  double index() const { return modulation_amplitude / modulation_frequency; }
  double period() const;
  void validate() const;

  static FfmParams from_index(double alpha, double omega0, double phase_origin = 0.0);
};

enum class StirapMode { LiteralPaper, ConditionSolved };

/// α(t) = α0·(scale·tanh[−(rate/T)(t − T/2) + offset] + 1), clamped at 0.
struct StirapProfile {
  double alpha_start_scale = 1.2;
  double rate = 3.5;
  double offset = 0.23;
  double alpha0 = 2.4;
  double total_time = 0.0;  // T, µs
  StirapMode mode = StirapMode::LiteralPaper;

  /// The printed constants, evaluated verbatim.
  static StirapProfile literal(double total_time);

  /// Same tanh shape with (alpha0, scale, offset) re-solved at fixed `rate` so
  /// that α(0) = start_alpha (a J0 zero), α(T) = 0 (J1 zero) and α(T/2) is the
  /// J0 = J1 crossing nearest start_alpha/2. Throws NoSolution otherwise.
  static StirapProfile condition_solved(double total_time, double start_alpha, double rate = 3.5);
  /// Starting from the J0 zero above 2.4 (≈ 5.5201).
  static StirapProfile condition_solved(double total_time);
};

/// Throws TimeOutOfSegment outside [0, T].
double stirap_alpha(const StirapProfile& profile, double t);

/// Rabi-amplitude ripple factor 1 + Σ_n (A_n sin nω0t + B_n cos nω0t).
struct RamModel {
  std::vector<std::pair<double, double>> harmonics;  // (A_n, B_n), n = 1..

  double factor(double omega0_t) const;
  void validate() const;
};

struct StaticDrive {
  double detuning = 0.0;
};
struct FfmDrive {
  FfmParams ffm;
  double detuning = 0.0;  // Δ0
};
struct LaserFree {};
struct StirapDrive {
  StirapProfile profile;
  double modulation_frequency = 0.0;  // ω0
};

using SegmentKind = std::variant<StaticDrive, FfmDrive, LaserFree, StirapDrive>;

struct PulseSegment {
  double duration = 0.0;  // µs
  SegmentKind kind;
  double rabi_scale = 1.0;

  static PulseSegment static_drive(double duration, double detuning = 0.0);
  static PulseSegment ffm(double duration, const FfmParams& params, double detuning = 0.0);
  static PulseSegment laser_free(double duration);
  static PulseSegment stirap(const StirapProfile& profile, double omega0);

  /// ω0 for FFM and STIRAP segments.
  std::optional<double> modulation_frequency() const;
  bool is_ffm() const { return std::holds_alternative<FfmDrive>(kind); }
};

/// Δ(t) at segment-local time t ∈ [0, duration].
double detuning_at(const PulseSegment& segment, double t);

/// Ω(t) at segment-local time; RAM applies to FFM segments only.
double rabi_at(const PulseSegment& segment, double t, double rabi, const RamModel* ram = nullptr);

/// π/(√2·Ω) for the blockaded pair (|gg> -> |W>), π/Ω for a single atom.
double pi_pulse_duration(const model::LaserParams& lasers, bool collective);

/// Segments laid end to end from t = 0. Lookups are closed-open: a boundary
/// time belongs to the later segment; the final end point belongs to the last.
class DriveSchedule {
 public:
  DriveSchedule() = default;
  explicit DriveSchedule(std::vector<PulseSegment> segments);

  double total_duration() const noexcept { return total_; }
  std::size_t size() const noexcept { return segments_.size(); }
  const PulseSegment& segment(std::size_t i) const { return segments_.at(i); }
  double segment_start(std::size_t i) const { return starts_.at(i); }
  std::size_t segment_index(double t) const;

  double detuning_at(double t) const;
  double rabi_at(double t, double rabi, const RamModel* ram = nullptr) const;

  /// Upper bound on integrator steps inside segment i: one twentieth of the
  /// modulation period for FFM/STIRAP segments, unbounded otherwise.
  double max_step(std::size_t i) const;

 private:
  std::vector<PulseSegment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

}  // namespace floqryd::drive

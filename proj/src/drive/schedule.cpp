#include "floqryd/drive/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "floqryd/core/bessel.hpp"
#include "floqryd/error.hpp"
#include "floqryd/model/units.hpp"

namespace floqryd::drive {

namespace {

constexpr double kTimeSlack = 1e-12;

void require_in_segment(double t, double duration) {
  if (t < -kTimeSlack || t > duration + kTimeSlack) {
    throw Error(ErrorCode::TimeOutOfSegment,
                "t = " + std::to_string(t) + " outside [0, " + std::to_string(duration) + "]");
  }
}

}  // namespace

double FfmParams::period() const { return units::kTwoPi / modulation_frequency; }

void FfmParams::validate() const {
  if (!(modulation_frequency > 0.0)) throw Error(ErrorCode::InvalidConfig, "modulation frequency must be positive");
  if (!(modulation_amplitude >= 0.0)) throw Error(ErrorCode::InvalidConfig, "modulation amplitude must be >= 0");
  if (!std::isfinite(index())) throw Error(ErrorCode::InvalidConfig, "modulation index not finite");
}

FfmParams FfmParams::from_index(double alpha, double omega0, double phase_origin) {
  FfmParams p{alpha * omega0, omega0, phase_origin};
  p.validate();
  return p;
}

StirapProfile StirapProfile::literal(double total_time) {
  if (!(total_time > 0.0)) throw Error(ErrorCode::InvalidConfig, "STIRAP duration must be positive");
  StirapProfile p;
  p.total_time = total_time;
  p.mode = StirapMode::LiteralPaper;
  return p;
}

StirapProfile StirapProfile::condition_solved(double total_time) {
  return condition_solved(total_time, core::bessel_j_zero(0, 2));
}

StirapProfile StirapProfile::condition_solved(double total_time, double start_alpha, double rate) {
  if (!(total_time > 0.0)) throw Error(ErrorCode::InvalidConfig, "STIRAP duration must be positive");
  if (!(start_alpha > 0.0) || !(rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "STIRAP start and rate must be positive");

  // J0 = J1 crossings below the start value; take the one nearest the midpoint.
  const auto j0_minus_j1 = [](double a) { return core::bessel_j(0, a) - core::bessel_j(1, a); };
  double mid = -1.0;
  for (int k = 1;; ++k) {
    double root = 0.0;
    try {
      root = core::kth_root(j0_minus_j1, 1e-6, start_alpha, k);
    } catch (const Error&) {
      break;
    }
    if (mid < 0.0 || std::abs(root - 0.5 * start_alpha) < std::abs(mid - 0.5 * start_alpha)) mid = root;
  }
  if (mid < 0.0) throw Error(ErrorCode::NoSolution, "no J0 = J1 crossing below the start index");

  // With α(t) = P + Q·tanh(−rate(t/T − 1/2) + c):
  //   α(T) = 0       ->  P = −Q tanh(c − rate/2)
  //   α(0) = start   ->  Q (tanh(c + rate/2) − tanh(c − rate/2)) = start
  //   α(T/2) = mid   ->  Q (tanh(c) − tanh(c − rate/2)) = mid
  const double h = 0.5 * rate;
  const double target = mid / start_alpha;
  const auto ratio = [h, target](double c) {
    return (std::tanh(c) - std::tanh(c - h)) / (std::tanh(c + h) - std::tanh(c - h)) - target;
  };
  double c = 0.0;
  try {
    c = core::kth_root(ratio, -20.0, 20.0, 1, 0.05);
  } catch (const Error&) {
    throw Error(ErrorCode::NoSolution, "tanh profile cannot meet the STIRAP end-point conditions");
  }
  const double q = start_alpha / (std::tanh(c + h) - std::tanh(c - h));
  const double p = -q * std::tanh(c - h);

  StirapProfile out;
  out.alpha0 = p;
  out.alpha_start_scale = q / p;
  out.rate = rate;
  out.offset = c;
  out.total_time = total_time;
  out.mode = StirapMode::ConditionSolved;
  return out;
}

double stirap_alpha(const StirapProfile& p, double t) {
  require_in_segment(t, p.total_time);
  const double tt = std::clamp(t, 0.0, p.total_time);
  const double shape = p.alpha_start_scale * std::tanh(-(p.rate / p.total_time) * (tt - 0.5 * p.total_time) + p.offset);
  return std::max(0.0, p.alpha0 * (shape + 1.0));
}

double RamModel::factor(double omega0_t) const {
  double f = 1.0;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    f += harmonics[k].first * std::sin(n * omega0_t) + harmonics[k].second * std::cos(n * omega0_t);
  }
  return f;
}

void RamModel::validate() const {
  for (const auto& [a, b] : harmonics)
    if (!(std::abs(a) < 1.0 && std::abs(b) < 1.0))
      throw Error(ErrorCode::InvalidConfig, "RAM harmonics must satisfy |A_n|, |B_n| < 1");
}

PulseSegment PulseSegment::static_drive(double duration, double detuning) {
  return {duration, StaticDrive{detuning}, 1.0};
}

PulseSegment PulseSegment::ffm(double duration, const FfmParams& params, double detuning) {
  params.validate();
  return {duration, FfmDrive{params, detuning}, 1.0};
}

PulseSegment PulseSegment::laser_free(double duration) { return {duration, LaserFree{}, 0.0}; }

PulseSegment PulseSegment::stirap(const StirapProfile& profile, double omega0) {
  if (!(omega0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "STIRAP modulation frequency must be positive");
  return {profile.total_time, StirapDrive{profile, omega0}, 1.0};
}

std::optional<double> PulseSegment::modulation_frequency() const {
  if (const auto* f = std::get_if<FfmDrive>(&kind)) return f->ffm.modulation_frequency;
  if (const auto* s = std::get_if<StirapDrive>(&kind)) return s->modulation_frequency;
  return std::nullopt;
}

double detuning_at(const PulseSegment& segment, double t) {
  require_in_segment(t, segment.duration);
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, StaticDrive>) {
          return k.detuning;
        } else if constexpr (std::is_same_v<K, FfmDrive>) {
          return k.detuning +
                 k.ffm.modulation_amplitude * std::sin(k.ffm.modulation_frequency * (t - k.ffm.phase_origin));
        } else if constexpr (std::is_same_v<K, LaserFree>) {
          return 0.0;
        } else {
          const double alpha = stirap_alpha(k.profile, std::min(t, k.profile.total_time));
          return alpha * k.modulation_frequency * std::sin(k.modulation_frequency * t);
        }
      },
      segment.kind);
}

double rabi_at(const PulseSegment& segment, double t, double rabi, const RamModel* ram) {
  require_in_segment(t, segment.duration);
  double value = rabi * segment.rabi_scale;
  if (ram != nullptr && value != 0.0) {
    if (const auto* f = std::get_if<FfmDrive>(&segment.kind)) {
      value *= ram->factor(f->ffm.modulation_frequency * (t - f->ffm.phase_origin));
    }
  }
  return value;
}

double pi_pulse_duration(const model::LaserParams& lasers, bool collective) {
  if (!(lasers.rabi > 0.0)) throw Error(ErrorCode::InvalidConfig, "Rabi frequency must be positive");
  const double omega = collective ? std::numbers::sqrt2 * lasers.rabi : lasers.rabi;
  return std::numbers::pi / omega;
}

DriveSchedule::DriveSchedule(std::vector<PulseSegment> segments) : segments_(std::move(segments)) {
  starts_.reserve(segments_.size());
  double t = 0.0;
  for (const auto& s : segments_) {
    if (!(s.duration >= 0.0)) throw Error(ErrorCode::InvalidConfig, "segment duration must be >= 0");
    starts_.push_back(t);
    t += s.duration;
  }
  total_ = t;
}

std::size_t DriveSchedule::segment_index(double t) const {
  if (segments_.empty() || t < -kTimeSlack || t > total_ + kTimeSlack) {
    throw Error(ErrorCode::TimeOutOfSchedule,
                "t = " + std::to_string(t) + " outside [0, " + std::to_string(total_) + "]");
  }
  // Last segment whose start is <= t, skipping zero-length segments at t.
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(starts_.begin(), it));
  i = i == 0 ? 0 : i - 1;
  while (i > 0 && segments_[i].duration == 0.0) --i;
  return i;
}

double DriveSchedule::detuning_at(double t) const {
  const std::size_t i = segment_index(t);
  return drive::detuning_at(segments_[i], std::clamp(t - starts_[i], 0.0, segments_[i].duration));
}

double DriveSchedule::rabi_at(double t, double rabi, const RamModel* ram) const {
  const std::size_t i = segment_index(t);
  return drive::rabi_at(segments_[i], std::clamp(t - starts_[i], 0.0, segments_[i].duration), rabi, ram);
}

double DriveSchedule::max_step(std::size_t i) const {
  if (const auto w = segments_.at(i).modulation_frequency()) return units::kTwoPi / *w / 20.0;
  return std::numeric_limits<double>::infinity();
}

}  // namespace floqryd::drive

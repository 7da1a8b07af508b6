// units.hpp: the single unit convention of the library.
//
// Internally: time in µs, length in µm, angular frequencies in rad/µs
// (so 2π×1 MHz == 2π rad/µs). Files and CLI speak ordinary frequency (MHz);
// conversion happens only through these helpers.

#pragma once

#include <numbers>

namespace floqryd::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency in MHz -> angular rad/µs.
constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz; }
/// Ordinary frequency in kHz -> angular rad/µs.
constexpr double khz_to_angular(double f_khz) { return kTwoPi * f_khz * 1e-3; }
/// Angular rad/µs -> ordinary MHz.
constexpr double angular_to_mhz(double w) { return w / kTwoPi; }

inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kSodium23Mass = 3.8175e-26;    // kg

}  // namespace floqryd::units

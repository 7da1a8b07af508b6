// system.hpp: atom array, lasers, noise channels, SPAM and thermal parameters.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace floqryd::model {

using Vec3 = std::array<double, 3>;  // µm (x = laser axis, y = array axis, z = tweezer axis)

double distance(const Vec3& a, const Vec3& b);

struct AtomArray {
  std::vector<Vec3> positions;
  double c6 = 0.0;  // rad/µs · µm^6

  std::size_t size() const noexcept { return positions.size(); }
  /// Throws InvalidConfig on an empty array, overlapping atoms (< 0.5 µm) or c6 <= 0.
  void validate() const;

  /// Atoms equally spaced along y, starting at the origin.
  static AtomArray chain(std::size_t n, double spacing_um, double c6);

  bool operator==(const AtomArray&) const = default;
};

struct LaserParams {
  double rabi = 0.0;                 // Ω, rad/µs
  double static_detuning = 0.0;      // Δ0, rad/µs
  double effective_wavevector = 0.0; // k, rad/µm along x

  bool operator==(const LaserParams&) const = default;
};

/// Counter-propagating 589 nm / 409 nm pair: k = 2π(1/0.409 − 1/0.589) rad/µm.
double default_effective_wavevector();

struct NoiseModel {
  double gamma1 = 0.0;   // 589 nm intermediate-state scattering, rad/µs
  double gamma2 = 0.0;   // 409 nm intermediate-state scattering, rad/µs
  double gamma_r = 0.0;  // Rydberg decay, 1/µs
  double gamma_l = 0.0;  // laser phase noise, rad/µs

  static NoiseModel none() { return {}; }
  /// Idealized channel set with a single global dephasing such that the
  /// |gg>–|W> coherence decays with time constant `coherence_time_us`.
  static NoiseModel enhanced_coherence(double coherence_time_us);

  bool operator==(const NoiseModel&) const = default;
};

struct SpamModel {
  double false_positive = 0.0;  // ε = P(e | true g)
  double false_negative = 0.0;  // ε' = P(g | true e)
  double pumping_error = 0.0;   // η

  void validate() const;
  bool operator==(const SpamModel&) const = default;
};

struct ThermalEnsemble {
  double sigma_radial = 0.0;           // µm (x, y)
  double sigma_axial = 0.0;            // µm (z)
  double temperature_uk = 0.0;         // µK
  double atom_mass_kg = 0.0;
  double velocity_sigma_radial = 0.0;  // µm/µs per component
  double velocity_sigma_axial = 0.0;   // µm/µs
  /// Tweezers off during excitation: spacing drifts with the sampled velocities.
  bool released = true;

  /// Maxwell–Boltzmann velocities √(k_B T / m) on every axis.
  static ThermalEnsemble thermal(double sigma_radial, double sigma_axial, double temperature_uk, double mass_kg);

  /// Motional-ground-state-cooled preset. Trap frequencies are inferred from
  /// `reference` as ω = v_th/σ per axis; the cooled spreads are the harmonic
  /// oscillator variances σ_x² = ħ(2n̄+1)/(2mω), σ_v² = ħω(2n̄+1)/(2m).
  /// Atoms stay trapped (released = false).
  static ThermalEnsemble ground_state_cooled(const ThermalEnsemble& reference, double nbar_radial, double nbar_axial);

  static ThermalEnsemble frozen() { return {}; }

  bool operator==(const ThermalEnsemble&) const = default;
};

enum class RydbergLifetime { BlackbodyLimited, Natural };

struct SystemConfig {
  AtomArray array;
  LaserParams lasers;
  NoiseModel noise;
  SpamModel spam;
  ThermalEnsemble thermal;
  double blackbody_lifetime_us = 0.0;
  double natural_lifetime_us = 0.0;

  double rydberg_lifetime_us(RydbergLifetime kind) const {
    return kind == RydbergLifetime::Natural ? natural_lifetime_us : blackbody_lifetime_us;
  }

  bool operator==(const SystemConfig&) const = default;
};

/// V_ij = C6 / r_ij^6 in rad/µs.
double interaction_strength(const AtomArray& array, std::size_t i, std::size_t j);
double interaction_at_distance(double c6, double r_um);
/// Inverse of interaction_at_distance.
double distance_for_interaction(double c6, double v);
/// R_b with V(R_b) = Ω.
double blockade_radius(const AtomArray& array, const LaserParams& lasers);

/// Experimental parameter set (two atoms on the y axis, 7.944 µm apart so V ≈ Ω).
SystemConfig paper_defaults();

// Constants file (data/defaults.json) in file units: MHz, kHz, µs, µm, µK, kg.
SystemConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SystemConfig& config);

/// Sparse deep merge of `overrides` onto `base`; any key in `overrides` absent
/// from `base` is rejected (Validation error naming the dotted key path).
nlohmann::json merge_overrides(const nlohmann::json& base, const nlohmann::json& overrides, const std::string& path = "");

/// The defaults document paper_defaults() is built from.
nlohmann::json defaults_document();

}  // namespace floqryd::model

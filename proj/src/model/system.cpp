#include "floqryd/model/system.hpp"

#include <cmath>

#include "floqryd/error.hpp"
#include "floqryd/model/units.hpp"

namespace floqryd::model {

using nlohmann::json;

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void AtomArray::validate() const {
  if (positions.empty()) throw Error(ErrorCode::InvalidConfig, "atom array is empty");
  if (!(c6 > 0.0)) throw Error(ErrorCode::InvalidConfig, "c6 must be positive");
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if (distance(positions[i], positions[j]) <= 0.5)
        throw Error(ErrorCode::InvalidConfig,
                    "atoms " + std::to_string(i) + " and " + std::to_string(j) + " closer than 0.5 um");
}

AtomArray AtomArray::chain(std::size_t n, double spacing_um, double c6) {
  AtomArray a;
  a.c6 = c6;
  for (std::size_t i = 0; i < n; ++i) a.positions.push_back({0.0, spacing_um * static_cast<double>(i), 0.0});
  return a;
}

double default_effective_wavevector() { return units::kTwoPi * (1.0 / 0.409 - 1.0 / 0.589); }

NoiseModel NoiseModel::enhanced_coherence(double coherence_time_us) {
  if (!(coherence_time_us > 0.0)) throw Error(ErrorCode::InvalidConfig, "coherence time must be positive");
  // Global σz⊗σz dephasing with L = √(γ/2)·Z⊗…⊗Z damps the |gg>–|W> coherence at rate γ.
  NoiseModel n;
  n.gamma_l = 1.0 / coherence_time_us;
  return n;
}

void SpamModel::validate() const {
  for (double p : {false_positive, false_negative, pumping_error})
    if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidConfig, "SPAM probabilities must lie in [0, 1)");
}

ThermalEnsemble ThermalEnsemble::thermal(double sigma_radial, double sigma_axial, double temperature_uk,
                                         double mass_kg) {
  ThermalEnsemble t;
  t.sigma_radial = sigma_radial;
  t.sigma_axial = sigma_axial;
  t.temperature_uk = temperature_uk;
  t.atom_mass_kg = mass_kg;
  // m/s and µm/µs coincide.
  const double v = mass_kg > 0.0 ? std::sqrt(units::kBoltzmann * temperature_uk * 1e-6 / mass_kg) : 0.0;
  t.velocity_sigma_radial = v;
  t.velocity_sigma_axial = v;
  t.released = true;
  return t;
}

ThermalEnsemble ThermalEnsemble::ground_state_cooled(const ThermalEnsemble& reference, double nbar_radial,
                                                     double nbar_axial) {
  if (!(reference.sigma_radial > 0.0 && reference.sigma_axial > 0.0 && reference.velocity_sigma_radial > 0.0 &&
        reference.velocity_sigma_axial > 0.0 && reference.atom_mass_kg > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "cooled preset needs a thermal reference with positive spreads");
  }
  const double hbar_over_m = units::kHbar / reference.atom_mass_kg * 1e6;  // µm²/µs
  const double w_radial = reference.velocity_sigma_radial / reference.sigma_radial;  // rad/µs
  const double w_axial = reference.velocity_sigma_axial / reference.sigma_axial;
  ThermalEnsemble t = reference;
  t.sigma_radial = std::sqrt(hbar_over_m / (2.0 * w_radial) * (2.0 * nbar_radial + 1.0));
  t.sigma_axial = std::sqrt(hbar_over_m / (2.0 * w_axial) * (2.0 * nbar_axial + 1.0));
  t.velocity_sigma_radial = std::sqrt(hbar_over_m * w_radial / 2.0 * (2.0 * nbar_radial + 1.0));
  t.velocity_sigma_axial = std::sqrt(hbar_over_m * w_axial / 2.0 * (2.0 * nbar_axial + 1.0));
  t.released = false;
  return t;
}

double interaction_at_distance(double c6, double r_um) { return c6 / std::pow(r_um, 6); }

double distance_for_interaction(double c6, double v) {
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidConfig, "interaction must be positive");
  return std::pow(c6 / v, 1.0 / 6.0);
}

double interaction_strength(const AtomArray& array, std::size_t i, std::size_t j) {
  if (i >= array.size() || j >= array.size()) throw Error(ErrorCode::IndexOutOfRange, "atom index");
  if (i == j) throw Error(ErrorCode::SameAtom, "interaction of an atom with itself");
  return interaction_at_distance(array.c6, distance(array.positions[i], array.positions[j]));
}

double blockade_radius(const AtomArray& array, const LaserParams& lasers) {
  if (!(lasers.rabi > 0.0)) throw Error(ErrorCode::InvalidConfig, "Rabi frequency must be positive");
  return std::pow(array.c6 / lasers.rabi, 1.0 / 6.0);
}

json defaults_document() {
  return json::parse(R"({
    "schema_version": 1,
    "atoms": {
      "positions_um": [[0.0, 0.0, 0.0], [0.0, 7.944, 0.0]],
      "c6_ghz_um6": 251.288
    },
    "lasers": {
      "rabi_mhz": 1.0,
      "static_detuning_mhz": 0.0,
      "wavelengths_um": [0.589, 0.409],
      "effective_wavevector_rad_per_um": null
    },
    "noise": {
      "gamma1_khz": 17.0,
      "gamma2_khz": 2.4,
      "rydberg_lifetime_us": 106.5,
      "gamma_l_khz": 50.0,
      "enhanced_coherence_time_us": null
    },
    "spam": {
      "false_positive": 0.03,
      "false_negative": 0.03,
      "pumping_error": 0.009
    },
    "thermal": {
      "sigma_radial_um": 0.17,
      "sigma_axial_um": 0.92,
      "temperature_uk": 1.2,
      "atom_mass_kg": 3.8175e-26,
      "released": true,
      "ground_state_cooling": null
    },
    "lifetimes_us": {
      "blackbody": 106.5,
      "natural": 260.0
    }
  })");
}

namespace {

double number_at(const json& doc, const char* section, const char* key) {
  const auto& v = doc.at(section).at(key);
  if (!v.is_number()) throw Error(ErrorCode::Validation, std::string(section) + "." + key + " must be a number");
  return v.get<double>();
}

}  // namespace

SystemConfig config_from_json(const json& doc) {
  try {
    if (doc.contains("schema_version") && doc.at("schema_version").get<int>() > 1) {
      throw Error(ErrorCode::Validation, "schema_version newer than supported (1)");
    }
    SystemConfig cfg;
    for (const auto& p : doc.at("atoms").at("positions_um")) {
      cfg.array.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    }
    cfg.array.c6 = units::mhz_to_angular(number_at(doc, "atoms", "c6_ghz_um6") * 1000.0);

    cfg.lasers.rabi = units::mhz_to_angular(number_at(doc, "lasers", "rabi_mhz"));
    cfg.lasers.static_detuning = units::mhz_to_angular(number_at(doc, "lasers", "static_detuning_mhz"));
    const auto& k = doc.at("lasers").at("effective_wavevector_rad_per_um");
    if (k.is_null()) {
      const auto& wl = doc.at("lasers").at("wavelengths_um");
      cfg.lasers.effective_wavevector =
          units::kTwoPi * (1.0 / wl.at(1).get<double>() - 1.0 / wl.at(0).get<double>());
    } else {
      cfg.lasers.effective_wavevector = k.get<double>();
    }

    const auto& coh = doc.at("noise").at("enhanced_coherence_time_us");
    if (coh.is_null()) {
      cfg.noise.gamma1 = units::khz_to_angular(number_at(doc, "noise", "gamma1_khz"));
      cfg.noise.gamma2 = units::khz_to_angular(number_at(doc, "noise", "gamma2_khz"));
      const auto& tau = doc.at("noise").at("rydberg_lifetime_us");
      cfg.noise.gamma_r = (tau.is_null() || tau.get<double>() <= 0.0) ? 0.0 : 1.0 / tau.get<double>();
      cfg.noise.gamma_l = units::khz_to_angular(number_at(doc, "noise", "gamma_l_khz"));
    } else {
      cfg.noise = NoiseModel::enhanced_coherence(coh.get<double>());
    }

    cfg.spam.false_positive = number_at(doc, "spam", "false_positive");
    cfg.spam.false_negative = number_at(doc, "spam", "false_negative");
    cfg.spam.pumping_error = number_at(doc, "spam", "pumping_error");

    const auto& th = doc.at("thermal");
    cfg.thermal = ThermalEnsemble::thermal(number_at(doc, "thermal", "sigma_radial_um"),
                                           number_at(doc, "thermal", "sigma_axial_um"),
                                           number_at(doc, "thermal", "temperature_uk"),
                                           number_at(doc, "thermal", "atom_mass_kg"));
    cfg.thermal.released = th.at("released").get<bool>();
    const auto& cool = th.at("ground_state_cooling");
    if (!cool.is_null()) {
      cfg.thermal = ThermalEnsemble::ground_state_cooled(cfg.thermal, cool.at("nbar_radial").get<double>(),
                                                         cool.at("nbar_axial").get<double>());
    }

    cfg.blackbody_lifetime_us = number_at(doc, "lifetimes_us", "blackbody");
    cfg.natural_lifetime_us = number_at(doc, "lifetimes_us", "natural");

    cfg.array.validate();
    cfg.spam.validate();
    if (!(cfg.lasers.rabi > 0.0)) throw Error(ErrorCode::InvalidConfig, "lasers.rabi_mhz must be positive");
    for (double r : {cfg.noise.gamma1, cfg.noise.gamma2, cfg.noise.gamma_r, cfg.noise.gamma_l})
      if (r < 0.0) throw Error(ErrorCode::InvalidConfig, "noise rates must be non-negative");
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, std::string("config document: ") + e.what());
  }
}

json config_to_json(const SystemConfig& c) {
  json positions = json::array();
  for (const auto& p : c.array.positions) positions.push_back({p[0], p[1], p[2]});
  return json{
      {"atoms", {{"positions_um", positions}, {"c6_mhz_um6", units::angular_to_mhz(c.array.c6)}}},
      {"lasers",
       {{"rabi_mhz", units::angular_to_mhz(c.lasers.rabi)},
        {"static_detuning_mhz", units::angular_to_mhz(c.lasers.static_detuning)},
        {"effective_wavevector_rad_per_um", c.lasers.effective_wavevector}}},
      {"noise",
       {{"gamma1_mhz", units::angular_to_mhz(c.noise.gamma1)},
        {"gamma2_mhz", units::angular_to_mhz(c.noise.gamma2)},
        {"gamma_r_per_us", c.noise.gamma_r},
        {"gamma_l_mhz", units::angular_to_mhz(c.noise.gamma_l)}}},
      {"spam",
       {{"false_positive", c.spam.false_positive},
        {"false_negative", c.spam.false_negative},
        {"pumping_error", c.spam.pumping_error}}},
      {"thermal",
       {{"sigma_radial_um", c.thermal.sigma_radial},
        {"sigma_axial_um", c.thermal.sigma_axial},
        {"temperature_uk", c.thermal.temperature_uk},
        {"velocity_sigma_radial_um_per_us", c.thermal.velocity_sigma_radial},
        {"velocity_sigma_axial_um_per_us", c.thermal.velocity_sigma_axial},
        {"released", c.thermal.released}}},
      {"lifetimes_us", {{"blackbody", c.blackbody_lifetime_us}, {"natural", c.natural_lifetime_us}}},
  };
}

json merge_overrides(const json& base, const json& overrides, const std::string& path) {
  if (!overrides.is_object()) {
    throw Error(ErrorCode::Validation, (path.empty() ? std::string("config") : path) + " must be an object");
  }
  json out = base;
  for (const auto& [key, value] : overrides.items()) {
    const std::string key_path = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw Error(ErrorCode::Validation, "unknown config key '" + key_path + "'");
    const json& current = base.at(key);
    if (current.is_object() && value.is_object()) {
      out[key] = merge_overrides(current, value, key_path);
    } else if (current.is_null() || value.is_null() || current.type() == value.type() ||
               (current.is_number() && value.is_number())) {
      out[key] = value;
    } else {
      throw Error(ErrorCode::Validation, "config key '" + key_path + "' has the wrong type");
    }
  }
  return out;
}

SystemConfig paper_defaults() { return config_from_json(defaults_document()); }

}  // namespace floqryd::model

#include "floqryd/scenario/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "floqryd/core/bessel.hpp"
#include "floqryd/disorder/ensemble.hpp"
#include "floqryd/model/units.hpp"
#include "floqryd/observables/observables.hpp"
#include "internal.hpp"

namespace floqryd::scenario {

using nlohmann::json;

namespace {

const std::set<std::string> kKinds = {"trajectory", "ensemble", "map2d", "ipr_map",
                                      "stirap", "calibration", "connectivity"};

const std::set<std::string> kTopLevelKeys = {
    "schema_version", "name", "kind", "description", "budget_s", "config", "geometry", "noise", "disorder",
    "schedule", "ram", "sample_times", "samples", "seed", "spam_forward", "static_interaction", "initial_state",
    "variants", "window_us", "fit", "axes", "fixed", "observable", "samples_per_us", "alpha",
    "interaction_over_rabi", "omega0_over_rabi", "doppler_scaled", "stirap", "calibration", "connectivity",
    "hold_scan", "doppler_sigma_khz"};

const std::set<std::string> kVariantKeys = {"label", "config", "geometry", "noise", "disorder", "schedule", "ram",
                                            "spam_forward", "static_interaction", "initial_state", "samples",
                                            "stirap", "hold", "window_us", "fit"};

const std::map<std::string, std::vector<std::string>> kRequired = {
    {"trajectory", {"schedule", "sample_times"}},
    {"ensemble", {"sample_times", "samples", "seed", "schedule"}},
    {"map2d", {"axes", "observable", "window_us", "fixed"}},
    {"ipr_map", {"alpha", "interaction_over_rabi", "omega0_over_rabi", "doppler_scaled"}},
    {"stirap", {"stirap", "sample_times"}},
    {"calibration", {"calibration"}},
    {"connectivity", {"connectivity"}},
};

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
  return s;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Validation, "scenario must be a JSON object with keys: name, kind");
  std::vector<std::string> missing;
  for (const char* k : {"name", "kind"})
    if (!doc.contains(k)) missing.emplace_back(k);
  if (!missing.empty()) throw Error(ErrorCode::Validation, "missing required keys: " + join(missing));
  if (doc.contains("schema_version")) {
    const auto& v = doc.at("schema_version");
    if (!v.is_number_integer()) throw Error(ErrorCode::Validation, "schema_version must be an integer");
    if (v.get<int>() > kSchemaVersion)
      throw Error(ErrorCode::Validation, "schema_version " + std::to_string(v.get<int>()) +
                                             " is newer than supported (" + std::to_string(kSchemaVersion) + ")");
  }
  if (!doc.at("name").is_string() || doc.at("name").get<std::string>().empty())
    throw Error(ErrorCode::Validation, "name must be a non-empty string");
  const std::string name = doc.at("name").get<std::string>();
  if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..")
    throw Error(ErrorCode::Validation, "name must not contain path separators");
  if (!doc.at("kind").is_string() || !kKinds.count(doc.at("kind").get<std::string>()))
    throw Error(ErrorCode::Validation, "kind must be one of trajectory, ensemble, map2d, ipr_map, stirap, "
                                       "calibration, connectivity");
  const std::string kind = doc.at("kind").get<std::string>();

  for (const auto& [key, value] : doc.items())
    if (!kTopLevelKeys.count(key)) throw Error(ErrorCode::Validation, "unknown key '" + key + "'");

  const bool has_variants = doc.contains("variants");
  if (has_variants) {
    if (!doc.at("variants").is_array() || doc.at("variants").empty())
      throw Error(ErrorCode::Validation, "variants must be a non-empty array");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < doc.at("variants").size(); ++i) {
      const auto& v = doc.at("variants").at(i);
      const std::string where = "variants[" + std::to_string(i) + "]";
      if (!v.is_object() || !v.contains("label") || !v.at("label").is_string())
        throw Error(ErrorCode::Validation, where + ".label is required");
      for (const auto& [key, value] : v.items())
        if (!kVariantKeys.count(key)) throw Error(ErrorCode::Validation, "unknown key '" + where + "." + key + "'");
      if (!labels.insert(v.at("label").get<std::string>()).second)
        throw Error(ErrorCode::Validation, "duplicate variant label '" + v.at("label").get<std::string>() + "'");
    }
  }

  if (doc.contains("hold_scan")) {
    const auto& h = doc.at("hold_scan");
    if (!h.is_object() || !h.contains("hold_times_us")) throw Error(ErrorCode::Validation, "hold_scan.hold_times_us is required");
    for (const auto& [key, value] : h.items())
      if (key != "hold_times_us" && key != "fit") throw Error(ErrorCode::Validation, "unknown key 'hold_scan." + key + "'");
  }

  missing.clear();
  for (const auto& key : kRequired.at(kind)) {
    if (doc.contains(key)) continue;
    if (key == "sample_times" && doc.contains("hold_scan")) continue;
    // Variant-level keys may replace the scenario-level one.
    bool in_all_variants = has_variants && kVariantKeys.count(key);
    if (in_all_variants)
      for (const auto& v : doc.at("variants")) in_all_variants = in_all_variants && v.contains(key);
    if (key == "schedule" && doc.contains("hold_scan")) {
      in_all_variants = has_variants;
      for (const auto& v : has_variants ? doc.at("variants") : json::array())
        in_all_variants = in_all_variants && v.contains("hold");
    }
    if (!in_all_variants) missing.push_back(key);
  }
  if (!missing.empty()) throw Error(ErrorCode::Validation, "missing required keys for kind '" + kind + "': " + join(missing));

  // Dry-build every variant so type errors surface at validation time.
  try {
    for (const auto& v : detail::variant_docs(doc)) {
      if (v.contains("config") || v.contains("geometry") || v.contains("noise") || v.contains("disorder")) {
        const auto cfg = detail::build_config(v, "none");
        if (v.contains("schedule")) detail::build_schedule(v.at("schedule"), cfg.lasers);
      } else if (v.contains("schedule")) {
        detail::build_schedule(v.at("schedule"), model::paper_defaults().lasers);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, std::string("malformed scenario: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Validation) throw;
    throw Error(ErrorCode::Validation, e.what());
  }
  return {name, kind, doc};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(ErrorCode::Validation, "empty scenario file; missing required keys: name, kind");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Validation, std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const auto& f : files) files_json.push_back({{"checksum_fnv1a64", f.checksum}, {"path", f.path}});
  return json{{"scenario", scenario_name}, {"scenario_hash_fnv1a64", scenario_hash}, {"code_version", code_version},
              {"started_utc", started}, {"finished_utc", finished}, {"files", files_json}};
}

RunManifest run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunManifest m;
  m.scenario_name = scenario.name;
  m.code_version = kCodeVersion;
  m.started = utc_now();

  json effective = scenario.doc;
  if (options.seed) effective["seed"] = *options.seed;
  m.scenario_hash = fnv1a_hex(effective.dump());
  const Scenario run{scenario.name, scenario.kind, effective};

  detail::Outputs out(options.out_dir / scenario.name);
  detail::Context ctx{run, disorder::resolve_threads(options.threads),
                      effective.value("seed", std::uint64_t{0}), out};
  json summary;
  const std::string& k = scenario.kind;
  if (k == "trajectory") summary = detail::run_trajectory(ctx);
  else if (k == "ensemble") summary = detail::run_ensemble_kind(ctx);
  else if (k == "map2d") summary = detail::run_map2d(ctx);
  else if (k == "ipr_map") summary = detail::run_ipr_map(ctx);
  else if (k == "stirap") summary = detail::run_stirap(ctx);
  else if (k == "calibration") summary = detail::run_calibration(ctx);
  else summary = detail::run_connectivity(ctx);

  summary["scenario"] = scenario.name;
  summary["kind"] = scenario.kind;
  out.write_json("summary.json", summary);
  m.summary = summary;
  m.files = out.files();
  m.finished = utc_now();
  const std::string text = m.to_json().dump(2) + "\n";
  std::ofstream f(out.dir() / "manifest.json", std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write manifest.json");
  return m;
}

std::filesystem::path bundled_scenario_dir() {
  if (const char* env = std::getenv("FLOQRYD_SCENARIO_DIR")) return env;
  return FLOQRYD_SCENARIO_DIR;
}

std::vector<CatalogEntry> list_scenarios(const std::filesystem::path& dir) {
  std::vector<CatalogEntry> out;
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, "no scenario directory " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    const Scenario s = load_scenario(e.path());
    out.push_back({s.name, s.kind, s.doc.value("description", std::string{}), s.doc.value("budget_s", 0.0), e.path()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnsupportedAtomCount:
    case ErrorCode::TruncationTooSmall:
    case ErrorCode::FrequencyOutOfBand:
    case ErrorCode::TargetUnreachable:
    case ErrorCode::InsufficientData:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::DissipativeScheduleUnsupported:
      return 2;
    case ErrorCode::StepSizeUnderflow:
    case ErrorCode::TraceDrift:
    case ErrorCode::PositivityViolation:
    case ErrorCode::NotHermitian:
    case ErrorCode::NotUnitary:
    case ErrorCode::NotNormalized:
    case ErrorCode::NoConvergence:
    case ErrorCode::NoImprovement:
      return 3;
    default:
      return 1;
  }
}

namespace detail {

json variant_doc(const json& doc, const json& variant) {
  json out = doc;
  out.erase("variants");
  for (const auto& [key, value] : variant.items()) out[key] = value;
  return out;
}

std::vector<json> variant_docs(const json& doc) {
  std::vector<json> out;
  if (doc.contains("variants")) {
    for (const auto& v : doc.at("variants")) out.push_back(variant_doc(doc, v));
  } else {
    json d = doc;
    d["label"] = "main";
    out.push_back(d);
  }
  return out;
}

double number(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw Error(ErrorCode::Validation, "missing key '" + key + "'");
  if (!doc.at(key).is_number()) throw Error(ErrorCode::Validation, "'" + key + "' must be a number");
  return doc.at(key).get<double>();
}

double number_or(const json& doc, const std::string& key, double fallback) {
  return doc.contains(key) ? number(doc, key) : fallback;
}

std::string text_or(const json& doc, const std::string& key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_string()) throw Error(ErrorCode::Validation, "'" + key + "' must be a string");
  return doc.at(key).get<std::string>();
}

std::vector<double> grid(const json& g, const std::string& key) {
  if (g.is_array()) {
    std::vector<double> v;
    for (const auto& x : g) {
      if (!x.is_number()) throw Error(ErrorCode::Validation, "'" + key + "' entries must be numbers");
      v.push_back(x.get<double>());
    }
    if (v.empty()) throw Error(ErrorCode::Validation, "'" + key + "' is empty");
    return v;
  }
  if (g.is_object()) {
    const double start = number(g, "start"), stop = number(g, "stop");
    const double count = number(g, "count");
    if (!(count >= 1.0) || count != std::floor(count))
      throw Error(ErrorCode::Validation, "'" + key + ".count' must be a positive integer");
    return lindblad::linspace(start, stop, static_cast<std::size_t>(count));
  }
  throw Error(ErrorCode::Validation, "'" + key + "' must be an array or {start, stop, count}");
}

std::vector<double> sample_times(const json& doc, double default_stop) {
  if (!doc.contains("sample_times")) throw Error(ErrorCode::Validation, "missing key 'sample_times'");
  json g = doc.at("sample_times");
  if (g.is_object() && !g.contains("stop")) g["stop"] = default_stop;
  if (g.is_object() && !g.contains("start")) g["start"] = 0.0;
  auto t = grid(g, "sample_times");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw Error(ErrorCode::Validation, "sample_times must increase");
  return t;
}

model::SystemConfig build_config(const json& doc, const std::string& default_disorder) {
  const json merged = model::merge_overrides(model::defaults_document(), doc.value("config", json::object()));
  model::SystemConfig cfg = model::config_from_json(merged);

  if (doc.contains("geometry")) {
    const json& g = doc.at("geometry");
    const double n = number_or(g, "atoms", 2.0);
    if (!(n >= 1.0 && n <= 3.0) || n != std::floor(n))
      throw Error(ErrorCode::Validation, "geometry.atoms must be 1, 2 or 3");
    double spacing = 0.0;
    if (g.contains("spacing_um")) {
      spacing = number(g, "spacing_um");
    } else if (g.contains("interaction_over_rabi")) {
      const double neighbour = number_or(g, "reference_neighbor", 1.0);
      spacing = model::distance_for_interaction(cfg.array.c6, number(g, "interaction_over_rabi") * cfg.lasers.rabi) /
                neighbour;
    } else if (n > 1.0) {
      throw Error(ErrorCode::Validation, "geometry needs spacing_um or interaction_over_rabi");
    }
    cfg.array = model::AtomArray::chain(static_cast<std::size_t>(n), spacing, cfg.array.c6);
    cfg.array.validate();
  }

  const json noise = doc.value("noise", json("paper"));
  if (noise.is_string()) {
    const auto s = noise.get<std::string>();
    if (s == "none") cfg.noise = model::NoiseModel::none();
    else if (s != "paper") throw Error(ErrorCode::Validation, "noise must be 'paper', 'none' or {coherence_time_us}");
  } else if (noise.is_object()) {
    cfg.noise = model::NoiseModel::enhanced_coherence(number(noise, "coherence_time_us"));
  } else {
    throw Error(ErrorCode::Validation, "noise must be 'paper', 'none' or {coherence_time_us}");
  }

  const json dis = doc.value("disorder", json(default_disorder));
  if (dis.is_string()) {
    const auto s = dis.get<std::string>();
    if (s == "none") cfg.thermal = model::ThermalEnsemble::frozen();
    else if (s == "cooled") cfg.thermal = model::ThermalEnsemble::ground_state_cooled(cfg.thermal, 0.05, 0.20);
    else if (s != "thermal") throw Error(ErrorCode::Validation, "disorder must be 'thermal', 'cooled', 'none' or an object");
  } else if (dis.is_object()) {
    for (const auto& [key, value] : dis.items())
      if (key != "doppler_sigma_khz" && key != "nbar_radial" && key != "nbar_axial")
        throw Error(ErrorCode::Validation, "unknown key 'disorder." + key + "'");
    if (dis.contains("doppler_sigma_khz")) {
      // Doppler-only disorder: sampled velocities set the Doppler shifts, atoms
      // stay trapped so neither positions nor spacings vary.
      const double sd = units::khz_to_angular(number(dis, "doppler_sigma_khz"));
      auto t = model::ThermalEnsemble::frozen();
      t.velocity_sigma_radial = cfg.lasers.effective_wavevector > 0.0 ? sd / cfg.lasers.effective_wavevector : 0.0;
      t.released = false;
      cfg.thermal = t;
    } else {
      cfg.thermal = model::ThermalEnsemble::ground_state_cooled(cfg.thermal, number_or(dis, "nbar_radial", 0.05),
                                                                number_or(dis, "nbar_axial", 0.20));
    }
  } else {
    throw Error(ErrorCode::Validation, "disorder must be a string or an object");
  }
  return cfg;
}

drive::PulseSegment build_segment(const json& seg, const model::LaserParams& lasers) {
  if (!seg.is_object() || !seg.contains("type") || !seg.at("type").is_string())
    throw Error(ErrorCode::Validation, "schedule segments need a string 'type'");
  const std::string type = seg.at("type").get<std::string>();
  const double rabi = lasers.rabi;
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"pi_pulse", {"type", "collective"}},
      {"static", {"type", "duration_us", "detuning_over_rabi"}},
      {"ffm", {"type", "duration_us", "omega0_over_rabi", "alpha", "detuning_over_rabi", "phase_origin_us"}},
      {"laser_free", {"type", "duration_us"}},
      {"stirap", {"type", "total_time_us", "omega0_over_rabi", "mode", "start_alpha", "rate"}},
  };
  const auto it = allowed.find(type);
  if (it == allowed.end()) throw Error(ErrorCode::Validation, "unknown segment type '" + type + "'");
  for (const auto& [key, value] : seg.items())
    if (!it->second.count(key)) throw Error(ErrorCode::Validation, "unknown key '" + key + "' in " + type + " segment");

  if (type == "pi_pulse") return drive::PulseSegment::static_drive(drive::pi_pulse_duration(lasers, seg.value("collective", true)));
  if (type == "static")
    return drive::PulseSegment::static_drive(number(seg, "duration_us"), number_or(seg, "detuning_over_rabi", 0.0) * rabi);
  if (type == "laser_free") return drive::PulseSegment::laser_free(number(seg, "duration_us"));
  if (type == "ffm") {
    const auto ffm = drive::FfmParams::from_index(number(seg, "alpha"), number(seg, "omega0_over_rabi") * rabi,
                                                  number_or(seg, "phase_origin_us", 0.0));
    return drive::PulseSegment::ffm(number(seg, "duration_us"), ffm, number_or(seg, "detuning_over_rabi", 0.0) * rabi);
  }
  const double total = number(seg, "total_time_us");
  const std::string mode = text_or(seg, "mode", "condition_solved");
  drive::StirapProfile profile;
  if (mode == "literal") profile = drive::StirapProfile::literal(total);
  else if (mode == "condition_solved")
    profile = drive::StirapProfile::condition_solved(total, number_or(seg, "start_alpha", core::bessel_j_zero(0, 2)),
                                                     number_or(seg, "rate", 3.5));
  else throw Error(ErrorCode::Validation, "stirap mode must be 'literal' or 'condition_solved'");
  return drive::PulseSegment::stirap(profile, number(seg, "omega0_over_rabi") * rabi);
}

drive::DriveSchedule build_schedule(const json& list, const model::LaserParams& lasers) {
  if (!list.is_array() || list.empty()) throw Error(ErrorCode::Validation, "schedule must be a non-empty array");
  std::vector<drive::PulseSegment> segs;
  for (const auto& s : list) {
    auto seg = build_segment(s, lasers);
    if (seg.duration > 0.0) segs.push_back(std::move(seg));
  }
  if (segs.empty()) throw Error(ErrorCode::Validation, "schedule has zero total duration");
  return drive::DriveSchedule(std::move(segs));
}

Setup build_setup(const json& doc, const std::string& default_disorder, const std::string& default_noise) {
  json d = doc;
  if (!d.contains("noise")) d["noise"] = default_noise;
  Setup s;
  s.label = doc.value("label", std::string("main"));
  s.config = build_config(d, default_disorder);
  if (doc.contains("schedule")) s.schedule = build_schedule(doc.at("schedule"), s.config.lasers);
  if (doc.contains("ram")) {
    drive::RamModel ram;
    for (const auto& h : doc.at("ram").at("harmonics")) ram.harmonics.emplace_back(h.at(0).get<double>(), h.at(1).get<double>());
    ram.validate();
    s.ram = ram;
  }
  s.spam_forward = doc.value("spam_forward", false);
  s.static_interaction = doc.value("static_interaction", false);
  const std::string init = text_or(doc, "initial_state", "ground");
  const std::size_t n = s.config.array.size();
  if (init == "w") s.initial = lindblad::DensityMatrix::pure(observables::WReference::symmetric(n).state());
  else if (init != "ground") throw Error(ErrorCode::Validation, "initial_state must be 'ground' or 'w'");
  if (doc.contains("samples")) {
    const double k = number(doc, "samples");
    if (!(k >= 0.0) || k != std::floor(k)) throw Error(ErrorCode::Validation, "samples must be a non-negative integer");
    s.samples = static_cast<std::size_t>(k);
  }
  return s;
}

double window_average(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
  if (t.size() != y.size() || t.size() < 2 || !(b > a) || a < t.front() - 1e-12 || b > t.back() + 1e-12)
    throw Error(ErrorCode::WindowOutOfRange, "averaging window outside the sampled range");
  const auto at = [&](double x) {
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return y.front();
    if (it == t.end()) return y.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double f = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + f * (y[i] - y[i - 1]);
  };
  double area = 0.0, prev_t = a, prev_y = at(a);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= a || t[i] >= b) continue;
    area += 0.5 * (y[i] + prev_y) * (t[i] - prev_t);
    prev_t = t[i];
    prev_y = y[i];
  }
  area += 0.5 * (at(b) + prev_y) * (b - prev_t);
  return area / (b - a);
}

std::string fmt(double v) {
  if (v == 0.0) return "0";  // folds −0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw Error(ErrorCode::DimensionMismatch, "CSV row width");
  rows_.push_back(cells);
}

std::string Csv::str() const {
  std::string s;
  const auto line = [&s](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    s += "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return s;
}

Outputs::Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
}

void Outputs::write(const std::string& relative, const std::string& content) {
  std::ofstream f(dir_ / relative, std::ios::binary);
  f << content;
  if (!f) throw Error(ErrorCode::Io, "cannot write " + (dir_ / relative).string());
  files_.push_back({relative, fnv1a_hex(content)});
}

void Outputs::write_json(const std::string& relative, const json& content) { write(relative, content.dump(2) + "\n"); }

json bessel_zero_sidecar() {
  json j0 = json::array(), j1 = json::array();
  for (int k = 1; k <= 2; ++k) {
    j0.push_back(std::round(core::bessel_j_zero(0, k) * 1e4) / 1e4);
    j1.push_back(std::round(core::bessel_j_zero(1, k) * 1e4) / 1e4);
  }
  return json{{"J0", j0}, {"J1", j1}};
}

json fit_json(const fitting::FitResult& fit) {
  json params = json::object(), errors = json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    params[fit.names[i]] = fit.parameters[i];
    errors[fit.names[i]] = fit.uncertainties[i];
  }
  json cov = json::array();
  for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c) row.push_back(fit.covariance(r, c));
    cov.push_back(row);
  }
  return json{{"parameters", params}, {"uncertainties", errors}, {"covariance", cov},
              {"residual_norm", fit.residual_norm}, {"converged", fit.converged}, {"iterations", fit.iterations}};
}

}  // namespace detail

}  // namespace floqryd::scenario

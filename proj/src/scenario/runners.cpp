#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "floqryd/calibration/calibration.hpp"
#include "floqryd/core/bessel.hpp"
#include "floqryd/disorder/ensemble.hpp"
#include "floqryd/fitting/fitting.hpp"
#include "floqryd/floquet/floquet.hpp"
#include "floqryd/model/units.hpp"
#include "floqryd/observables/observables.hpp"
#include "internal.hpp"

namespace floqryd::scenario::detail {

namespace {

/// Reported series of one evolution: labels from the population map, then fidelity_w.
struct Series {
  std::vector<std::string> labels;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [time][label]

  std::vector<double> column(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error(ErrorCode::Validation, "unknown observable '" + label + "'");
    const auto k = static_cast<std::size_t>(it - labels.begin());
    std::vector<double> out;
    for (const auto& row : values) out.push_back(row[k]);
    return out;
  }
};

Series evolve_nominal(const Setup& s, const std::vector<double>& times) {
  const std::size_t n = s.config.array.size();
  hamiltonian::HamiltonianBuilder h(s.config.array, s.config.lasers, s.schedule);
  if (s.ram) h.with_ram(*s.ram);
  const auto d = lindblad::build_dissipators(s.config, n);
  const auto rho0 = s.initial ? *s.initial : lindblad::DensityMatrix::ground(n);
  const auto traj = lindblad::evolve(h, d, rho0, {0.0, times.back()}, times);
  const auto w = observables::WReference::symmetric(n).state();
  Series out;
  out.times = times;
  for (std::size_t t = 0; t < times.size(); ++t) {
    std::vector<double> p = traj.populations[t];
    if (s.spam_forward) p = observables::apply_spam(p, n, s.config.spam);
    const auto pops = observables::populations(p, n);
    std::vector<double> row;
    if (out.labels.empty()) {
      for (const auto& [label, v] : pops) out.labels.push_back(label);
      out.labels.push_back("fidelity_w");
    }
    for (const auto& [label, v] : pops) row.push_back(v);
    row.push_back(observables::w_fidelity(traj.snapshots[t].matrix(), w));
    out.values.push_back(std::move(row));
  }
  return out;
}

std::pair<double, double> window_of(const json& doc, double t_end) {
  if (!doc.contains("window_us")) return {0.0, t_end};
  const auto& w = doc.at("window_us");
  if (w.is_number()) return {0.0, w.get<double>()};
  if (w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number())
    return {w[0].get<double>(), w[1].get<double>()};
  throw Error(ErrorCode::Validation, "window_us must be a number or [start, stop]");
}

json series_summary(const std::vector<std::string>& labels, const std::vector<double>& times,
                    const std::vector<std::vector<double>>& values, std::pair<double, double> window) {
  json max = json::object(), min = json::object(), fin = json::object(), avg = json::object();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    std::vector<double> col;
    for (const auto& row : values) col.push_back(row[k]);
    max[labels[k]] = *std::max_element(col.begin(), col.end());
    min[labels[k]] = *std::min_element(col.begin(), col.end());
    fin[labels[k]] = col.back();
    if (times.size() >= 2) avg[labels[k]] = window_average(times, col, window.first, window.second);
  }
  return json{{"max", max}, {"min", min}, {"final", fin}, {"time_average", avg},
              {"window_us", {window.first, window.second}}};
}

std::vector<std::string> header_with(std::vector<std::string> head, const std::vector<std::string>& labels,
                                     const std::string& prefix = "") {
  for (const auto& l : labels) head.push_back(prefix + l);
  return head;
}

fitting::FitResult fit_series(const json& spec, const std::vector<double>& t, const std::vector<double>& y) {
  const std::string model = text_or(spec, "model", "exponential");
  std::vector<double> ft, fy;
  double a = t.front(), b = t.back();
  if (spec.contains("window_us")) {
    a = spec.at("window_us").at(0).get<double>();
    b = spec.at("window_us").at(1).get<double>();
  }
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= a - 1e-12 && t[i] <= b + 1e-12) {
      ft.push_back(t[i]);
      fy.push_back(y[i]);
    }
  if (model == "exponential") return fitting::fit_exponential_decay(ft, fy);
  if (model == "damped_sinusoid") return fitting::fit_damped_sinusoid(ft, fy);
  throw Error(ErrorCode::Validation, "fit.model must be 'exponential' or 'damped_sinusoid'");
}

json fit_block(const json& spec, const std::vector<double>& t, const std::vector<double>& y) {
  json j = fit_json(fit_series(spec, t, y));
  j["series"] = spec.value("series", std::string("gg"));
  j["model"] = text_or(spec, "model", "exponential");
  return j;
}

std::vector<double> max_times(const json& doc, double window) {
  const double per_us = number_or(doc, "samples_per_us", 40.0);
  const auto n = static_cast<std::size_t>(std::ceil(window * per_us)) + 1;
  return lindblad::linspace(0.0, window, std::max<std::size_t>(n, 2));
}

}  // namespace

// ---------------------------------------------------------------- trajectory

json run_trajectory(Context& ctx) {
  json summary = json::object();
  std::vector<std::string> labels;
  std::vector<std::vector<std::string>> rows;
  for (const auto& vd : variant_docs(ctx.scenario.doc)) {
    const Setup s = build_setup(vd, "none", "paper");
    const auto times = sample_times(vd, s.schedule.total_duration());
    const Series series = evolve_nominal(s, times);
    if (labels.empty()) labels = series.labels;
    if (series.labels != labels) throw Error(ErrorCode::Validation, "variants must share the atom count");
    for (std::size_t t = 0; t < times.size(); ++t) {
      std::vector<std::string> r{s.label, fmt(times[t])};
      for (double v : series.values[t]) r.push_back(fmt(v));
      rows.push_back(std::move(r));
    }
    summary["variants"][s.label] = series_summary(series.labels, times, series.values, window_of(vd, times.back()));
  }
  Csv csv(header_with({"variant", "time_us"}, labels));
  for (auto& r : rows) csv.row(r);
  ctx.out.write("data.csv", csv.str());
  return summary;
}

// ---------------------------------------------------------------- ensemble

namespace {

disorder::EnsembleSpec ensemble_spec(const Setup& s, const std::vector<double>& times, Context& ctx) {
  disorder::EnsembleSpec spec;
  spec.config = s.config;
  spec.schedule = s.schedule;
  spec.ram = s.ram;
  spec.sample_times = times;
  spec.n_samples = s.samples;
  spec.seed = ctx.seed;
  spec.static_interaction = s.static_interaction;
  spec.spam_forward = s.spam_forward;
  spec.threads = ctx.threads;
  spec.initial = s.initial;
  return spec;
}

json run_hold_scan(Context& ctx) {
  const json& doc = ctx.scenario.doc;
  const json& scan = doc.at("hold_scan");
  const auto holds = grid(scan.at("hold_times_us"), "hold_scan.hold_times_us");
  for (std::size_t i = 0; i < holds.size(); ++i)
    if (holds[i] < 0.0 || (i > 0 && !(holds[i] > holds[i - 1])))
      throw Error(ErrorCode::Validation, "hold_times_us must be non-negative and increasing");

  json summary = json::object();
  Csv csv({"variant", "hold_us", "mean_gg_readout", "std_gg_readout", "mean_fidelity_w", "std_fidelity_w"});
  for (const auto& vd0 : variant_docs(doc)) {
    json hold_seg = vd0.at("hold");
    const auto schedule_for = [&](double hold, bool readout) {
      json list = json::array({json{{"type", "pi_pulse"}}});
      if (hold > 0.0) {
        json seg = hold_seg;
        seg["duration_us"] = hold;
        list.push_back(seg);
      }
      if (readout) list.push_back(json{{"type", "pi_pulse"}});
      return list;
    };
    json vd = vd0;
    vd["schedule"] = schedule_for(holds.back(), false);
    const Setup s = build_setup(vd, "thermal", "paper");
    if (s.samples < 2) throw Error(ErrorCode::Validation, "hold scans need samples >= 2");
    const std::size_t n = s.config.array.size();
    const double t_pi = drive::pi_pulse_duration(s.config.lasers, true);
    std::vector<double> times;
    for (double h : holds) times.push_back(t_pi + h);
    std::vector<drive::DriveSchedule> readout;
    for (double h : holds) readout.push_back(build_schedule(schedule_for(h, true), s.config.lasers));

    const auto base = ensemble_spec(s, times, ctx);
    const auto d = lindblad::build_dissipators(s.config, n);
    const auto w = observables::WReference::symmetric(n).state();
    std::vector<std::vector<double>> gg(s.samples), fid(s.samples);
    disorder::parallel_for(s.samples, ctx.threads, [&](std::size_t k) {
      try {
        const auto sample = disorder::draw_sample(s.config.thermal, s.config.array,
                                                  s.config.lasers.effective_wavevector, ctx.seed, k);
        const auto h = disorder::sample_hamiltonian(base, sample);
        const auto traj = lindblad::evolve(h, d, lindblad::DensityMatrix::ground(n), {0.0, times.back()}, times);
        for (std::size_t i = 0; i < holds.size(); ++i) {
          auto spec_i = base;
          spec_i.schedule = readout[i];
          const auto hi = disorder::sample_hamiltonian(spec_i, sample);
          const double t_end = readout[i].total_duration();
          const auto r = lindblad::evolve(hi, d, traj.snapshots[i], {times[i], t_end}, {t_end});
          std::vector<double> p = r.populations.back();
          if (s.spam_forward) p = observables::apply_spam(p, n, s.config.spam);
          gg[k].push_back(p[0]);
          fid[k].push_back(observables::w_fidelity(traj.snapshots[i].matrix(), w));
        }
      } catch (const Error& e) {
        throw Error(e.code(), "sample " + std::to_string(k) + ": " + e.what());
      }
    });

    std::vector<double> mean_gg;
    for (std::size_t i = 0; i < holds.size(); ++i) {
      double mg = 0.0, mf = 0.0;
      for (std::size_t k = 0; k < s.samples; ++k) {
        mg += gg[k][i];
        mf += fid[k][i];
      }
      mg /= static_cast<double>(s.samples);
      mf /= static_cast<double>(s.samples);
      double vg = 0.0, vf = 0.0;
      for (std::size_t k = 0; k < s.samples; ++k) {
        vg += (gg[k][i] - mg) * (gg[k][i] - mg);
        vf += (fid[k][i] - mf) * (fid[k][i] - mf);
      }
      const double dof = static_cast<double>(s.samples - 1);
      csv.row({s.label, fmt(holds[i]), fmt(mg), fmt(std::sqrt(vg / dof)), fmt(mf), fmt(std::sqrt(vf / dof))});
      mean_gg.push_back(mg);
    }
    json fit_spec = scan.value("fit", json{{"model", "exponential"}});
    fit_spec["series"] = "gg_readout";
    summary["variants"][s.label] = {{"fit", fit_block(fit_spec, holds, mean_gg)},
                                    {"samples", s.samples},
                                    {"readout_pi_us", t_pi}};
  }
  ctx.out.write("data.csv", csv.str());
  return summary;
}

}  // namespace

json run_ensemble_kind(Context& ctx) {
  const json& doc = ctx.scenario.doc;
  if (doc.contains("hold_scan")) return run_hold_scan(ctx);
  const bool sweep = doc.contains("doppler_sigma_khz");
  const std::vector<double> widths = sweep ? grid(doc.at("doppler_sigma_khz"), "doppler_sigma_khz") : std::vector<double>{0.0};

  json summary = json::object();
  std::vector<std::string> labels;
  std::vector<std::vector<std::string>> rows, sample_rows, final_rows;
  for (const auto& vd0 : variant_docs(doc)) {
    for (double width : widths) {
      json vd = vd0;
      if (sweep) vd["disorder"] = json{{"doppler_sigma_khz", width}};
      const Setup s = build_setup(vd, "thermal", "paper");
      if (s.samples < 2) throw Error(ErrorCode::Validation, "ensembles need samples >= 2");
      const auto times = sample_times(vd, s.schedule.total_duration());
      const auto stats = disorder::run_ensemble(ensemble_spec(s, times, ctx));
      if (labels.empty()) labels = stats.labels;
      std::vector<std::string> lead{s.label};
      if (sweep) lead.push_back(fmt(width));
      for (std::size_t t = 0; t < times.size(); ++t) {
        auto r = lead;
        r.push_back(fmt(times[t]));
        for (double v : stats.mean[t]) r.push_back(fmt(v));
        for (double v : stats.stdev[t]) r.push_back(fmt(v));
        rows.push_back(std::move(r));
      }
      for (std::size_t k = 0; k < stats.fmax_samples.size(); ++k) {
        auto r = lead;
        r.push_back(std::to_string(k));
        r.push_back(fmt(stats.fmax_samples[k]));
        sample_rows.push_back(std::move(r));
      }
      const std::size_t f = stats.label_index("fidelity_w");
      json entry = series_summary(stats.labels, times, stats.mean, window_of(vd, times.back()));
      entry["fmax_mean"] = stats.fmax_mean;
      entry["fmax_std"] = stats.fmax_std;
      entry["final_std"] = json::object();
      for (std::size_t l = 0; l < stats.labels.size(); ++l) entry["final_std"][stats.labels[l]] = stats.stdev.back()[l];
      entry["samples"] = stats.sample_count;
      entry["seed"] = stats.seed;
      if (vd.contains("fit")) {
        const std::string series = vd.at("fit").value("series", std::string("gg"));
        entry["fit"] = fit_block(vd.at("fit"), times, stats.mean_series(series));
      }
      if (sweep) {
        auto r = lead;
        r.push_back(fmt(stats.mean.back()[f]));
        r.push_back(fmt(stats.stdev.back()[f]));
        final_rows.push_back(std::move(r));
        entry["doppler_sigma_khz"] = width;
        summary["variants"][s.label]["sweep"].push_back(entry);
      } else {
        summary["variants"][s.label] = entry;
      }
    }
  }
  std::vector<std::string> lead{"variant"};
  if (sweep) lead.push_back("doppler_sigma_khz");
  auto head = lead;
  head.push_back("time_us");
  Csv csv(header_with(header_with(head, labels, "mean_"), labels, "std_"));
  for (auto& r : rows) csv.row(r);
  ctx.out.write("data.csv", csv.str());
  auto shead = lead;
  shead.insert(shead.end(), {"sample", "fmax_w"});
  Csv samples(shead);
  for (auto& r : sample_rows) samples.row(r);
  ctx.out.write("samples.csv", samples.str());
  if (sweep) {
    auto fhead = lead;
    fhead.insert(fhead.end(), {"final_mean_fidelity_w", "final_std_fidelity_w"});
    Csv fin(fhead);
    for (auto& r : final_rows) fin.row(r);
    ctx.out.write("final_fidelity.csv", fin.str());
  }
  return summary;
}

// ---------------------------------------------------------------- map2d

json run_map2d(Context& ctx) {
  const json& doc = ctx.scenario.doc;
  static const std::vector<std::string> params = {"omega0_over_rabi", "alpha", "interaction_over_rabi"};
  const json& axes = doc.at("axes");
  const std::string xn = axes.at("x").at("name").get<std::string>();
  const std::string yn = axes.at("y").at("name").get<std::string>();
  for (const auto& nm : {xn, yn})
    if (std::find(params.begin(), params.end(), nm) == params.end())
      throw Error(ErrorCode::Validation, "map axis '" + nm + "' must be omega0_over_rabi, alpha or interaction_over_rabi");
  if (xn == yn) throw Error(ErrorCode::Validation, "map axes must differ");
  const auto xs = grid(axes.at("x").at("values"), "axes.x.values");
  const auto ys = grid(axes.at("y").at("values"), "axes.y.values");
  const json& fixed = doc.at("fixed");
  for (const auto& nm : params)
    if (nm != xn && nm != yn && !fixed.contains(nm)) throw Error(ErrorCode::Validation, "fixed." + nm + " is required");

  const std::string observable = doc.at("observable").get<std::string>();
  const double window = number(doc, "window_us");
  json base_doc = doc;
  base_doc.erase("schedule");
  const Setup base = build_setup(base_doc, "none", "none");
  const auto times = max_times(doc, window);
  const std::size_t n_atoms = doc.contains("geometry") ? base.config.array.size() : 2;

  std::vector<double> values(xs.size() * ys.size());
  disorder::parallel_for(values.size(), ctx.threads, [&](std::size_t idx) {
    const std::size_t ix = idx / ys.size(), iy = idx % ys.size();
    std::map<std::string, double> p;
    for (const auto& nm : params)
      if (fixed.contains(nm)) p[nm] = fixed.at(nm).get<double>();
    p[xn] = xs[ix];
    p[yn] = ys[iy];
    Setup s = base;
    const double rabi = s.config.lasers.rabi;
    s.config.array = model::AtomArray::chain(
        n_atoms, model::distance_for_interaction(s.config.array.c6, p["interaction_over_rabi"] * rabi), s.config.array.c6);
    const auto ffm = drive::FfmParams::from_index(p["alpha"], p["omega0_over_rabi"] * rabi);
    s.schedule = drive::DriveSchedule({drive::PulseSegment::ffm(window, ffm)});
    const Series series = evolve_nominal(s, times);
    if (observable == "max_fidelity_w") {
      const auto col = series.column("fidelity_w");
      values[idx] = *std::max_element(col.begin(), col.end());
    } else if (observable.rfind("time_avg_", 0) == 0) {
      values[idx] = window_average(times, series.column(observable.substr(9)), 0.0, window);
    } else {
      throw Error(ErrorCode::Validation, "observable must be max_fidelity_w or time_avg_<label>");
    }
  });

  Csv csv({xn, yn, observable});
  for (std::size_t ix = 0; ix < xs.size(); ++ix)
    for (std::size_t iy = 0; iy < ys.size(); ++iy) csv.row({fmt(xs[ix]), fmt(ys[iy]), fmt(values[ix * ys.size() + iy])});
  ctx.out.write("data.csv", csv.str());
  if (xn == "alpha" || yn == "alpha") ctx.out.write_json("bessel_zeros.json", bessel_zero_sidecar());

  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const auto at = [&](std::vector<double>::const_iterator it) {
    const auto idx = static_cast<std::size_t>(it - values.begin());
    return json{{xn, xs[idx / ys.size()]}, {yn, ys[idx % ys.size()]}, {"value", *it}};
  };
  return json{{"observable", observable}, {"window_us", window}, {"min", at(mn)}, {"max", at(mx)},
              {"points", values.size()}};
}

// ---------------------------------------------------------------- ipr_map

json run_ipr_map(Context& ctx) {
  const json& doc = ctx.scenario.doc;
  json d = doc;
  d["geometry"] = json{{"atoms", 2}, {"interaction_over_rabi", number(doc, "interaction_over_rabi")}};
  const model::SystemConfig cfg = build_config(d, "none");
  const double rabi = cfg.lasers.rabi;
  const auto w0 = grid(doc.at("omega0_over_rabi"), "omega0_over_rabi");
  const auto dd = grid(doc.at("doppler_scaled"), "doppler_scaled");
  std::vector<double> w0_abs, dd_abs;
  for (double w : w0) w0_abs.push_back(w * rabi);
  for (double x : dd) dd_abs.push_back(x * rabi / 10.0);  // axis is 10·Δ_D/Ω
  const auto map = floquet::ipr_map(cfg, number(doc, "alpha"), dd_abs, w0_abs, ctx.threads);

  std::vector<std::string> head{"omega0_over_rabi"};
  for (double x : dd) head.push_back("doppler_scaled=" + fmt(x));
  Csv csv(head);
  json rows = json::array();
  for (std::size_t r = 0; r < w0.size(); ++r) {
    std::vector<std::string> row{fmt(w0[r])};
    for (double v : map[r]) row.push_back(fmt(v));
    csv.row(row);
    rows.push_back({{"omega0_over_rabi", w0[r]},
                    {"max_over_band", *std::max_element(map[r].begin(), map[r].end())},
                    {"min_over_band", *std::min_element(map[r].begin(), map[r].end())}});
  }
  ctx.out.write("data.csv", csv.str());
  return json{{"alpha", number(doc, "alpha")}, {"interaction_over_rabi", number(doc, "interaction_over_rabi")},
              {"rows", rows}};
}

// ---------------------------------------------------------------- stirap

json run_stirap(Context& ctx) {
  json summary = json::object();
  Csv csv({"variant", "time_us", "alpha", "mean_gg", "mean_ge+eg", "mean_ee", "std_ee"});
  for (const auto& vd0 : variant_docs(ctx.scenario.doc)) {
    json vd = vd0;
    json seg = vd.at("stirap");
    seg["type"] = "stirap";
    vd["schedule"] = json::array({seg});
    const Setup s = build_setup(vd, "none", "none");
    const auto times = sample_times(vd, s.schedule.total_duration());
    const auto& profile = std::get<drive::StirapDrive>(s.schedule.segment(0).kind).profile;
    std::vector<std::vector<double>> mean;  // gg, ge+eg, ee
    std::vector<double> std_ee(times.size(), 0.0);
    if (s.samples >= 2) {
      const auto stats = disorder::run_ensemble(ensemble_spec(s, times, ctx));
      const auto gg = stats.mean_series("gg"), w = stats.mean_series("ge+eg"), ee = stats.mean_series("ee");
      std_ee = stats.std_series("ee");
      for (std::size_t t = 0; t < times.size(); ++t) mean.push_back({gg[t], w[t], ee[t]});
    } else {
      const Series series = evolve_nominal(s, times);
      const auto gg = series.column("gg"), w = series.column("ge+eg"), ee = series.column("ee");
      for (std::size_t t = 0; t < times.size(); ++t) mean.push_back({gg[t], w[t], ee[t]});
    }
    double max_ee = 0.0;
    for (std::size_t t = 0; t < times.size(); ++t) {
      csv.row({s.label, fmt(times[t]), fmt(drive::stirap_alpha(profile, std::min(times[t], profile.total_time))),
               fmt(mean[t][0]), fmt(mean[t][1]), fmt(mean[t][2]), fmt(std_ee[t])});
      max_ee = std::max(max_ee, mean[t][2]);
    }
    summary["variants"][s.label] = {
        {"final_ee", mean.back()[2]},
        {"final_ee_std", std_ee.back()},
        {"max_ee", max_ee},
        {"samples", s.samples},
        {"profile",
         {{"mode", profile.mode == drive::StirapMode::LiteralPaper ? "literal" : "condition_solved"},
          {"alpha0", profile.alpha0},
          {"scale", profile.alpha_start_scale},
          {"rate", profile.rate},
          {"offset", profile.offset},
          {"total_time_us", profile.total_time}}}};
  }
  ctx.out.write("data.csv", csv.str());
  return summary;
}

// ---------------------------------------------------------------- calibration

namespace {

json calibrate_bessel(Context& ctx, const json& c) {
  const auto alphas = grid(c.at("alpha_grid"), "calibration.alpha_grid");
  const double noise = number_or(c, "noise_std", 0.0);
  std::mt19937_64 rng = disorder::substream(ctx.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Csv csv({"case", "alpha_spec", "carrier_power", "fit"});
  json out = json::object();
  for (const auto& cs : c.at("cases")) {
    const std::string label = cs.at("label").get<std::string>();
    const double chi = number(cs, "chi");
    std::vector<double> p;
    for (double a : alphas) p.push_back(std::abs(core::bessel_j(0, a / chi)) + noise * normal(rng));
    const auto fit = fitting::fit_bessel_carrier(alphas, p);
    const double chi_fit = fit.value("chi");
    for (std::size_t i = 0; i < alphas.size(); ++i)
      csv.row({label, fmt(alphas[i]), fmt(p[i]), fmt(std::abs(core::bessel_j(0, alphas[i] / chi_fit)))});
    out[label] = {{"chi_true", chi},
                  {"omega0_mhz", number_or(cs, "omega0_mhz", 0.0)},
                  {"fit", fit_json(fit)},
                  {"first_carrier_minimum", chi_fit * core::bessel_j_zero(0, 1)}};
  }
  ctx.out.write("data.csv", csv.str());
  ctx.out.write_json("bessel_zeros.json", bessel_zero_sidecar());
  return json{{"cases", out}};
}

json calibrate_aod(Context& ctx, const json& c, const model::SystemConfig& cfg) {
  const auto f = grid(c.at("spacings_mhz"), "calibration.spacings_mhz");
  const double kappa = number(c, "kappa_um_per_mhz");
  const double du = number_or(c, "delta_u_mhz", 0.0);
  const double noise = number_or(c, "noise_std_mhz", 0.0);
  const double c6 = units::angular_to_mhz(cfg.array.c6);  // MHz·µm^6
  std::mt19937_64 rng = disorder::substream(ctx.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> shift;
  for (double fr : f) shift.push_back(c6 / std::pow(kappa * fr, 6) + du + noise * normal(rng));
  const auto fit = fitting::fit_distance_calibration(f, shift, c6);
  Csv csv({"spacing_mhz", "distance_um", "shift_mhz", "fit_mhz"});
  for (std::size_t i = 0; i < f.size(); ++i)
    csv.row({fmt(f[i]), fmt(kappa * f[i]), fmt(shift[i]),
             fmt(c6 / std::pow(fit.value("kappa") * f[i], 6) + fit.value("delta_u"))});
  ctx.out.write("data.csv", csv.str());
  return json{{"kappa_true", kappa}, {"delta_u_true", du}, {"c6_mhz_um6", c6}, {"fit", fit_json(fit)}};
}

json spectrum_json(const calibration::RamSpectrum& s) {
  json h = json::array();
  for (const auto& [a, b] : s.harmonics) h.push_back({a, b});
  return json{{"harmonics", h}, {"peak_to_peak_fraction", s.peak_to_peak_fraction}};
}

json calibrate_ram(Context& ctx, const json& c) {
  const double carrier = number_or(c, "carrier_mhz", 110.0);
  const double target = number(c, "target_power");
  const auto ffm = drive::FfmParams::from_index(number(c, "alpha"), units::mhz_to_angular(number(c, "omega0_mhz")));
  const auto model = calibration::AomTransferModel::synthetic(carrier);
  calibration::TraceSpec raw = calibration::TraceSpec::from_ffm(ffm, carrier, calibration::drive_for_power(model, carrier, target), false);
  raw.periods = static_cast<std::size_t>(number_or(c, "periods", 8));
  raw.samples_per_period = static_cast<std::size_t>(number_or(c, "samples_per_period", 64));
  calibration::TraceSpec cal = raw;
  cal.calibrated = true;
  cal.level = target;

  // Pure first-harmonic (cosine) power ripple on a frequency-flat device.
  const auto flat = calibration::AomTransferModel::flat(model.f_min, model.f_max, 0.5, 0.45, 0.18, 0.5);
  calibration::TraceSpec rip = raw;
  rip.level = calibration::drive_for_power(flat, carrier, target);
  // Drive distortion b1 chosen so the uncompensated power ripple equals ripple_fraction.
  const double ripple = number(c, "ripple_fraction");
  if (!(ripple > 0.0 && ripple < 0.5)) throw Error(ErrorCode::Validation, "ripple_fraction must lie in (0, 0.5)");
  const auto ripple_at = [&](double b1) {
    calibration::TraceSpec t = rip;
    t.distortion = {{0.0, b1}};
    return calibration::ram_spectrum(calibration::simulate_power_trace(flat, t, {}), t.dt(), t.omega0)
               .peak_to_peak_fraction -
           ripple;
  };
  rip.distortion = {{0.0, core::bisect(ripple_at, 0.0, 0.5, 1e-12)}};

  struct Case {
    std::string label;
    const calibration::AomTransferModel* model;
    calibration::TraceSpec spec;
    bool compensate;
  };
  const std::vector<Case> cases = {{"uncompensated", &model, raw, false},
                                   {"calibrated", &model, cal, false},
                                   {"gradient_descent", &model, raw, true},
                                   {"ripple_b1", &flat, rip, false},
                                   {"ripple_b1_compensated", &flat, rip, true}};
  Csv traces({"case", "time_us", "power"});
  Csv spectra({"case", "n", "A_n", "B_n"});
  json out = json::object();
  for (const auto& cs : cases) {
    std::vector<std::pair<double, double>> comp;
    json extra = json::object();
    if (!cs.spec.distortion.empty()) extra["drive_distortion_b1"] = cs.spec.distortion.front().second;
    if (cs.compensate) {
      const auto r = calibration::compensate_ram(*cs.model, cs.spec);
      comp = r.harmonics;
      json h = json::array();
      for (const auto& [a, b] : comp) h.push_back({a, b});
      extra["drive_harmonics"] = h;
      extra["iterations"] = r.iterations;
      extra["objective_start"] = r.objective_history.front();
    }
    const auto trace = calibration::simulate_power_trace(*cs.model, cs.spec, comp);
    const auto spec = calibration::ram_spectrum(trace, cs.spec.dt(), cs.spec.omega0);
    for (std::size_t k = 0; k < trace.size(); ++k) traces.row({cs.label, fmt(cs.spec.dt() * static_cast<double>(k)), fmt(trace[k])});
    for (std::size_t n = 0; n < spec.harmonics.size(); ++n)
      spectra.row({cs.label, std::to_string(n + 1), fmt(spec.harmonics[n].first), fmt(spec.harmonics[n].second)});
    json entry = spectrum_json(spec);
    entry.update(extra);
    json rabi = json::array();
    for (const auto& [a, b] : spec.to_ram_model(true).harmonics) rabi.push_back({a, b});
    entry["rabi_ram_sqrt"] = rabi;
    out[cs.label] = entry;
  }
  ctx.out.write("data.csv", traces.str());
  ctx.out.write("spectrum.csv", spectra.str());

  // Transfer-curve fit on a slice of the synthetic device at the carrier.
  std::vector<double> v, p;
  for (double x : lindblad::linspace(-0.2, 1.1, 27)) {
    v.push_back(x);
    p.push_back(calibration::simulated_power(model, carrier, x));
  }
  const auto tanh_fit = fitting::fit_tanh_efficiency(v, p);
  return json{{"cases", out},
              {"tanh_fit", fit_json(tanh_fit)},
              {"tanh_true", {{"A", model.a(carrier)}, {"V0", model.v0(carrier)}, {"sigma", model.sigma(carrier)}, {"C", model.c(carrier)}}},
              {"aom_model", calibration::model_to_json(model)}};
}

}  // namespace

json run_calibration(Context& ctx) {
  const json& c = ctx.scenario.doc.at("calibration");
  const std::string type = text_or(c, "type", "");
  if (type == "bessel") return calibrate_bessel(ctx, c);
  if (type == "aod") return calibrate_aod(ctx, c, build_config(ctx.scenario.doc, "none"));
  if (type == "ram") return calibrate_ram(ctx, c);
  throw Error(ErrorCode::Validation, "calibration.type must be bessel, ram or aod");
}

// ---------------------------------------------------------------- connectivity

namespace {

/// Max over the window of <W|ρ|W> for two atoms at interaction v·Ω.
double max_fidelity(const Setup& base, double v, double alpha, double omega0, double window, const json& doc) {
  Setup s = base;
  const double rabi = s.config.lasers.rabi;
  s.config.array = model::AtomArray::chain(2, model::distance_for_interaction(s.config.array.c6, v * rabi), s.config.array.c6);
  if (alpha > 0.0)
    s.schedule = drive::DriveSchedule({drive::PulseSegment::ffm(window, drive::FfmParams::from_index(alpha, omega0 * rabi))});
  else
    s.schedule = drive::DriveSchedule({drive::PulseSegment::static_drive(window)});
  const auto col = evolve_nominal(s, max_times(doc, window)).column("fidelity_w");
  return *std::max_element(col.begin(), col.end());
}

/// Smallest V on the static curve reaching `target` (linear interpolation).
std::optional<double> matched_interaction(const std::vector<double>& v, const std::vector<double>& f, double target) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (f[i] < target) continue;
    if (i == 0) return v[0];
    return v[i - 1] + (target - f[i - 1]) / (f[i] - f[i - 1]) * (v[i] - v[i - 1]);
  }
  return std::nullopt;
}

}  // namespace

json run_connectivity(Context& ctx) {
  const json& doc = ctx.scenario.doc;
  const json& c = doc.at("connectivity");
  const std::string analysis = text_or(c, "analysis", "fidelity_match");
  if (analysis == "gate_error") {
    const auto cfg = build_config(doc, "none");
    const std::string which = text_or(c, "lifetime", "blackbody");
    const double tau = cfg.rydberg_lifetime_us(which == "natural" ? model::RydbergLifetime::Natural
                                                                   : model::RydbergLifetime::BlackbodyLimited);
    Csv csv({"interaction_mhz", "e_min"});
    json rows = json::array();
    for (double v : grid(c.at("interaction_mhz"), "connectivity.interaction_mhz")) {
      const double e = observables::gate_error_bound(units::mhz_to_angular(v), tau);
      csv.row({fmt(v), fmt(e)});
      rows.push_back({{"interaction_mhz", v}, {"e_min", e}});
    }
    ctx.out.write("data.csv", csv.str());
    return json{{"lifetime_us", tau}, {"rows", rows}};
  }
  if (analysis != "fidelity_match") throw Error(ErrorCode::Validation, "connectivity.analysis must be fidelity_match or gate_error");

  const double omega0 = number(c, "omega0_over_rabi");
  const auto alphas = grid(c.at("alpha"), "connectivity.alpha");
  const auto v_ffm = grid(c.at("ffm_interaction_over_rabi"), "connectivity.ffm_interaction_over_rabi");
  const auto v_static = grid(c.at("static_interaction_over_rabi"), "connectivity.static_interaction_over_rabi");
  const double window = number(c, "window_us");
  json coherences = c.value("coherence_time_us", json::array({nullptr}));

  Csv csv({"variant", "drive", "alpha", "interaction_over_rabi", "max_fidelity_w"});
  json summary = json::object();
  for (const auto& coh : coherences) {
    json d = doc;
    d["noise"] = coh.is_null() ? json("none") : json{{"coherence_time_us", coh}};
    const std::string label = coh.is_null() ? "noiseless" : "coherence_" + fmt(coh.get<double>()) + "us";
    const Setup base = build_setup(d, "none", "none");
    std::vector<double> f_static(v_static.size());
    disorder::parallel_for(v_static.size(), ctx.threads, [&](std::size_t i) {
      f_static[i] = max_fidelity(base, v_static[i], 0.0, omega0, window, c);
    });
    std::vector<double> f_ffm(alphas.size() * v_ffm.size());
    disorder::parallel_for(f_ffm.size(), ctx.threads, [&](std::size_t i) {
      f_ffm[i] = max_fidelity(base, v_ffm[i % v_ffm.size()], alphas[i / v_ffm.size()], omega0, window, c);
    });
    for (std::size_t i = 0; i < v_static.size(); ++i)
      csv.row({label, "static", "0", fmt(v_static[i]), fmt(f_static[i])});
    json points = json::array();
    for (std::size_t i = 0; i < f_ffm.size(); ++i) {
      const double a = alphas[i / v_ffm.size()], v = v_ffm[i % v_ffm.size()];
      csv.row({label, "ffm", fmt(a), fmt(v), fmt(f_ffm[i])});
      const auto m = matched_interaction(v_static, f_static, f_ffm[i]);
      json pt = {{"alpha", a}, {"interaction_over_rabi", v}, {"ffm_max_fidelity_w", f_ffm[i]}};
      pt["matched_static_interaction_over_rabi"] = m ? json(*m) : json(nullptr);
      pt["range_extension_factor"] = m ? json(std::pow(*m / v, 1.0 / 6.0)) : json(nullptr);
      points.push_back(pt);
    }
    summary["variants"][label] = {{"points", points}, {"omega0_over_rabi", omega0}, {"window_us", window}};
  }
  ctx.out.write("data.csv", csv.str());
  return summary;
}

}  // namespace floqryd::scenario::detail

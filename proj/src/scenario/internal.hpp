// Shared pieces of the scenario runner: JSON-to-model builders and artifact
// writers. Not installed.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "floqryd/drive/schedule.hpp"
#include "floqryd/fitting/fitting.hpp"
#include "floqryd/lindblad/evolver.hpp"
#include "floqryd/model/system.hpp"
#include "floqryd/scenario/scenario.hpp"

namespace floqryd::scenario::detail {

using nlohmann::json;

/// Everything needed to evolve one variant.
struct Setup {
  std::string label;
  model::SystemConfig config;
  drive::DriveSchedule schedule;
  std::optional<drive::RamModel> ram;
  bool spam_forward = false;
  bool static_interaction = false;
  std::optional<lindblad::DensityMatrix> initial;  // empty = ground state
  std::size_t samples = 0;
};

/// Scenario-level keys overridden by each entry of "variants".
json variant_doc(const json& doc, const json& variant);
std::vector<json> variant_docs(const json& doc);

model::SystemConfig build_config(const json& doc, const std::string& default_disorder);
drive::PulseSegment build_segment(const json& seg, const model::LaserParams& lasers);
drive::DriveSchedule build_schedule(const json& list, const model::LaserParams& lasers);
Setup build_setup(const json& doc, const std::string& default_disorder, const std::string& default_noise);

/// Grid given as an array or as {"start", "stop", "count"}.
std::vector<double> grid(const json& g, const std::string& key);
std::vector<double> sample_times(const json& doc, double default_stop);

double number(const json& doc, const std::string& key);
double number_or(const json& doc, const std::string& key, double fallback);
std::string text_or(const json& doc, const std::string& key, const std::string& fallback);

/// Trapezoid average of y over [a, b] on the sampled points (linear interpolation at the edges).
double window_average(const std::vector<double>& t, const std::vector<double>& y, double a, double b);

/// Fixed-format number for byte-stable CSV output.
std::string fmt(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Collects output files and their checksums under one directory.
class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir);
  void write(const std::string& relative, const std::string& content);
  void write_json(const std::string& relative, const json& content);
  const std::vector<OutputFile>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

json bessel_zero_sidecar();
json fit_json(const fitting::FitResult& fit);

struct Context {
  const Scenario& scenario;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  Outputs& out;
};

json run_trajectory(Context& ctx);
json run_ensemble_kind(Context& ctx);
json run_map2d(Context& ctx);
json run_ipr_map(Context& ctx);
json run_stirap(Context& ctx);
json run_calibration(Context& ctx);
json run_connectivity(Context& ctx);

}  // namespace floqryd::scenario::detail

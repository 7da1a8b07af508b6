// floqryd: run, list and validate scenario files.
//
//   floqryd run <scenario.json> [--out DIR] [--threads N] [--seed S]
//   floqryd list [--dir DIR]
//   floqryd validate <scenario.json>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "floqryd/disorder/ensemble.hpp"
#include "floqryd/error.hpp"
#include "floqryd/scenario/scenario.hpp"

namespace fs = std::filesystem;
using namespace floqryd;

namespace {

int run(const std::string& path, const std::string& out, std::optional<std::size_t> threads,
        std::optional<std::uint64_t> seed) {
  const auto sc = scenario::load_scenario(path);
  scenario::RunOptions opt;
  opt.out_dir = out;
  opt.threads = disorder::resolve_threads(threads);
  opt.seed = seed;
  const auto manifest = scenario::run_scenario(sc, opt);
  std::printf("%s: %zu files written to %s\n", sc.name.c_str(), manifest.files.size(),
              (fs::path(out) / sc.name).string().c_str());
  return 0;
}

int list(const std::string& dir) {
  const auto entries = scenario::list_scenarios(dir.empty() ? scenario::bundled_scenario_dir() : fs::path(dir));
  std::printf("%-14s %-13s %8s  %s\n", "name", "kind", "budget_s", "description");
  for (const auto& e : entries)
    std::printf("%-14s %-13s %8.0f  %s\n", e.name.c_str(), e.kind.c_str(), e.budget_s, e.description.c_str());
  return 0;
}

int validate(const std::string& path) {
  const auto sc = scenario::load_scenario(path);
  std::printf("%s: ok (%s)\n", sc.name.c_str(), sc.kind.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet frequency-modulated Rydberg array simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", list_dir;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "run a scenario and write out/<name>/");
  run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "output root directory");
  run_cmd->add_option("--threads", threads, "worker threads (default FLOQRYD_THREADS or 1)");
  run_cmd->add_option("--seed", seed, "override the scenario seed");

  auto* list_cmd = app.add_subcommand("list", "list bundled scenarios");
  list_cmd->add_option("--dir", list_dir, "scenario directory");

  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a scenario");
  validate_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(scenario_path, out_dir, threads, seed);
    if (*list_cmd) return list(list_dir);
    if (*validate_cmd) return validate(scenario_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return scenario::exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: Validation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

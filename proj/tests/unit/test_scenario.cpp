#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "floqryd/scenario/scenario.hpp"
#include "support.hpp"

using namespace floqryd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("floqryd_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_ensemble() {
  return json::parse(R"({
    "schema_version": 1, "name": "tiny", "kind": "ensemble", "description": "small ensemble",
    "geometry": {"atoms": 2, "interaction_over_rabi": 0.8},
    "noise": "paper", "disorder": "thermal", "samples": 5, "seed": 11,
    "sample_times": {"count": 21},
    "schedule": [{"type": "ffm", "duration_us": 1.0, "omega0_over_rabi": 3.0, "alpha": 5.5}]
  })");
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(FLOQRYD_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(ScenarioParse, AcceptsMinimalEnsemble) {
  const auto sc = scenario::parse_scenario(small_ensemble());
  EXPECT_EQ(sc.name, "tiny");
  EXPECT_EQ(sc.kind, "ensemble");
}

TEST(ScenarioParse, RejectsUnknownKeyAndVersion) {
  auto doc = small_ensemble();
  doc["colour"] = "blue";
  EXPECT_CODE(scenario::parse_scenario(doc), ErrorCode::Validation);
  doc = small_ensemble();
  doc["schema_version"] = 2;
  EXPECT_CODE(scenario::parse_scenario(doc), ErrorCode::Validation);
  doc = small_ensemble();
  doc.erase("schedule");
  EXPECT_CODE(scenario::parse_scenario(doc), ErrorCode::Validation);
  EXPECT_CODE(scenario::parse_scenario(json::object()), ErrorCode::Validation);
}

TEST(ScenarioParse, RejectsUnknownConfigOverride) {
  auto doc = small_ensemble();
  doc["config"] = {{"lasers", {{"rabbi_mhz", 1.0}}}};
  EXPECT_CODE(scenario::parse_scenario(doc), ErrorCode::Validation);
}

TEST(ScenarioCatalog, BundledScenariosAllValidate) {
  const auto entries = scenario::list_scenarios(scenario::bundled_scenario_dir());
  EXPECT_GE(entries.size(), 20u);
  bool has_doppler_sweep = false;
  for (const auto& e : entries) {
    EXPECT_NO_THROW(scenario::load_scenario(e.path)) << e.name;
    EXPECT_GT(e.budget_s, 0.0) << e.name;
    has_doppler_sweep |= e.name == "fig3f";
  }
  EXPECT_TRUE(has_doppler_sweep);
}

TEST(ScenarioRun, ManifestChecksumsMatchFiles) {
  const auto out = temp_dir("manifest");
  const auto m = scenario::run_scenario(scenario::parse_scenario(small_ensemble()), {out, 1, std::nullopt});
  ASSERT_FALSE(m.files.empty());
  for (const auto& f : m.files) EXPECT_EQ(scenario::fnv1a_hex(slurp(out / "tiny" / f.path)), f.checksum) << f.path;
  const auto manifest = json::parse(slurp(out / "tiny" / "manifest.json"));
  EXPECT_EQ(manifest.at("scenario_hash_fnv1a64").get<std::string>(), m.scenario_hash);
  EXPECT_TRUE(fs::exists(out / "tiny" / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "tiny" / "data.csv"));
}

TEST(ScenarioRun, ByteIdenticalAcrossThreadCounts) {
  const auto a = temp_dir("threads1"), b = temp_dir("threads3");
  const auto sc = scenario::parse_scenario(small_ensemble());
  scenario::run_scenario(sc, {a, 1, std::nullopt});
  scenario::run_scenario(sc, {b, 3, std::nullopt});
  for (const char* f : {"data.csv", "samples.csv"}) EXPECT_EQ(slurp(a / "tiny" / f), slurp(b / "tiny" / f)) << f;
}

TEST(ScenarioRun, SeedOverrideChangesSamples) {
  const auto a = temp_dir("seed_a"), b = temp_dir("seed_b");
  const auto sc = scenario::parse_scenario(small_ensemble());
  scenario::run_scenario(sc, {a, 1, std::nullopt});
  scenario::run_scenario(sc, {b, 1, 99});
  EXPECT_NE(slurp(a / "tiny" / "samples.csv"), slurp(b / "tiny" / "samples.csv"));
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(scenario::exit_code_for(ErrorCode::Validation), 2);
  EXPECT_EQ(scenario::exit_code_for(ErrorCode::StepSizeUnderflow), 3);
  EXPECT_EQ(scenario::exit_code_for(ErrorCode::Io), 1);
}

TEST(Cli, EmptyFileAndMissingFile) {
  const auto d = temp_dir("cli");
  std::ofstream(d / "empty.json").close();
  EXPECT_EQ(cli("validate " + (d / "empty.json").string()), 2);
  std::ofstream(d / "tiny.json") << small_ensemble().dump();
  EXPECT_EQ(cli("validate " + (d / "tiny.json").string()), 0);
  EXPECT_EQ(cli("run " + (d / "missing.json").string()), 1);
  EXPECT_EQ(cli("frobnicate"), 2);
}

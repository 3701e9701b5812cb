#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "rzlab/cramer.hpp"
#include "rzlab/harness/config.hpp"
#include "rzlab/harness/experiments.hpp"
#include "rzlab/harness/output.hpp"

using namespace rzlab;
using namespace rzlab::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rzlab_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig config_of(const std::string& sub, const std::string& text) {
  const ConfigResult r = validate_config(sub, text);
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
  return *r.config;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RZLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const ExperimentConfig c = config_of("symmetry", "");
  EXPECT_EQ(c.seed(), 42u);
  EXPECT_EQ(c.real("symmetry.beta"), 2.0);
  EXPECT_EQ(c.text("symmetry.k_rule"), "sqrt");
  EXPECT_EQ(c.u64("symmetry.n_blocks"), 1000u);
  EXPECT_EQ(c.out_dir(), "runs/symmetry");
}

TEST(Config, AggregatesEveryViolation) {
  const ConfigResult r = validate_config("additive", "additive.alpha = 0.6\nadditive.c = -1\nrun.threads = 0\n");
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.violations.size(), 3u);
  bool names_raw = false;
  for (const auto& v : r.violations) names_raw = names_raw || v.find("'0.6'") != std::string::npos;
  EXPECT_TRUE(names_raw);
}

TEST(Config, TypeErrorsDoNotHideSemanticChecks) {
  const ConfigResult r = validate_config("additive", "additive.n_lo = many\nadditive.alpha = 0.9\n");
  EXPECT_EQ(r.violations.size(), 2u);
}

TEST(Config, UnknownKeysRejectedForeignSectionsIgnored) {
  EXPECT_FALSE(validate_config("sample", "sample.bogus = 1\n").ok());
  EXPECT_FALSE(validate_config("sample", "symmetry.bogus = 3\n").ok());
  const ConfigResult shared = validate_config("sample", "symmetry.beta = 3\n");
  ASSERT_TRUE(shared.ok());
  EXPECT_EQ(shared.config->canonical().count("symmetry.beta"), 0u);
  EXPECT_FALSE(validate_config("sample", "just text\n").ok());
}

TEST(Config, SigmaListMustDescend) {
  EXPECT_FALSE(validate_config("critical-line", "critical_line.sigmas = 0.5,0.6\n").ok());
  EXPECT_TRUE(validate_config("critical-line", "critical_line.sigmas = 0.6,0.5\n").ok());
}

TEST(Config, ScientificIntegersAndLists) {
  const ExperimentConfig c = config_of("count-stats", "count_stats.n_max = 1e6\ncount_stats.checkpoints = 1e4, 1e5\n");
  EXPECT_EQ(c.u64("count_stats.n_max"), 1000000u);
  EXPECT_EQ(c.u64_list("count_stats.checkpoints"), (std::vector<std::uint64_t>{10000, 100000}));
  EXPECT_FALSE(validate_config("count-stats", "count_stats.n_max = 1.5\n").ok());
}

TEST(Config, LayerPrecedence) {
  std::vector<ConfigLayer> layers = {{"file", {{"symmetry.beta", "3"}, {"symmetry.sigma", "0.7"}}},
                                     {"env", {{"symmetry.beta", "4"}}},
                                     {"flags", {{"symmetry.sigma", "0.9"}}}};
  const ConfigResult r = validate_config("symmetry", layers);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->real("symmetry.beta"), 4.0);
  EXPECT_EQ(r.config->real("symmetry.sigma"), 0.9);
}

TEST(Config, EnvironmentNamesAndFlags) {
  for (const auto& p : schema("symmetry")) {
    if (p.key == "symmetry.n_blocks") {
      EXPECT_EQ(p.env_var(), "RZLAB_SYMMETRY_N_BLOCKS");
      EXPECT_EQ(p.flag(), "--n-blocks");
    }
  }
  ::setenv("RZLAB_SYMMETRY_BETA", "5", 1);
  const ConfigLayer env = environment_layer("symmetry");
  ::unsetenv("RZLAB_SYMMETRY_BETA");
  ASSERT_EQ(env.entries.count("symmetry.beta"), 1u);
  EXPECT_EQ(env.entries.at("symmetry.beta"), "5");
}

TEST(Config, ManifestParametersRoundTrip) {
  const ExperimentConfig c = config_of("zeta-grid", "zeta_grid.sigmas = 1.25, 2\nrun.seed = 0x10\n");
  RunManifest m;
  m.experiment = "zeta-grid";
  m.parameters = c.canonical();
  const ConfigResult again = validate_config("zeta-grid", m.to_json());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again.config->canonical(), c.canonical());
  EXPECT_EQ(again.config->seed(), 16u);
}

TEST(Output, RealFormattingRoundTrips) {
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(std::stod(format_real(0.1)), 0.1);
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Output, CsvTableAndParse) {
  CsvTable t({"a", "b"});
  t.row() << std::uint64_t{1} << 0.25;
  t.row() << "x" << true;
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.body(), "a,b\n1,0.25\nx,1\n");
  const CsvData d = parse_csv(t.body());
  EXPECT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[1][d.column("b")], "1");
}

TEST(Output, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Experiments, CountStatsHasOneRowPerCheckpoint) {
  ExperimentConfig c = config_of("count-stats", "run.replicas = 3\ncount_stats.n_max = 1e5\n");
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.files.size(), 1u);
  EXPECT_EQ(r.files[0].name, "count_stats.csv");
  EXPECT_EQ(r.files[0].rows, 9u);
  const CsvData d = parse_csv(r.files[0].bytes);
  EXPECT_EQ(d.rows[2][d.column("pi")], std::to_string(sample_indicators(100000, cramer_key(42, 0)).count_upto(100000)));
}

TEST(Experiments, DeterministicAcrossThreads) {
  const std::string text = "run.replicas = 4\nsymmetry.n_blocks = 200\nsymmetry.clt_replicas = 50\n";
  ExperimentConfig a = config_of("symmetry", text + "run.threads = 1\n");
  ExperimentConfig b = config_of("symmetry", text + "run.threads = 4\n");
  const ExperimentResult ra = run_experiment(a), rb = run_experiment(b);
  ASSERT_EQ(ra.files.size(), rb.files.size());
  for (std::size_t i = 0; i < ra.files.size(); ++i) EXPECT_EQ(ra.files[i].bytes, rb.files[i].bytes) << ra.files[i].name;
}

TEST(Experiments, ManifestDetectsTamperedOutput) {
  const fs::path dir = scratch("tamper");
  ExperimentConfig c = config_of("zeta-grid", "zeta_grid.n_max = 1000\nrun.out_dir = " + dir.string() + "\n");
  std::ostringstream log;
  const RunManifest m = execute_run(c, log);
  EXPECT_EQ(m.artifact_version, "1.0.0");
  for (const auto& check : verify_run(dir.string(), m)) EXPECT_TRUE(check.ok());
  EXPECT_TRUE(build_report(dir.string()).integrity_ok);

  const fs::path csv = dir / "zeta_grid.csv";
  std::string bytes = read_file(csv.string());
  bytes[bytes.size() - 2] = bytes[bytes.size() - 2] == '1' ? '2' : '1';
  write_file(csv.string(), bytes);
  const ReportResult report = build_report(dir.string());
  EXPECT_FALSE(report.integrity_ok);
  EXPECT_NE(report.text.find("DIGEST MISMATCH"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Experiments, ManifestJsonRoundTrip) {
  RunManifest m;
  m.artifact_version = kArtifactVersion;
  m.experiment = "sample";
  m.master_seed = 7;
  m.parameters = {{"run.seed", "7"}};
  m.outputs = {{"a.csv", "00", 3, 1}};
  m.summary = {{"k", "v"}};
  const RunManifest back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  EXPECT_EQ(run_cli("bogus"), 2);
  EXPECT_EQ(run_cli("additive --alpha 0.6 --out-dir " + dir.string()), 3);
  EXPECT_EQ(run_cli("critical-line --sigmas 0.5,0.7 --out-dir " + dir.string()), 3);
  EXPECT_EQ(run_cli("zeta-grid --n-max 1000 --out-dir /proc/rzlab_no_such_dir"), 4);
  EXPECT_EQ(run_cli("zeta-grid --n-max 1000 --out-dir " + dir.string()), 0);
  EXPECT_EQ(run_cli("report --from " + dir.string()), 0);
  std::string bytes = read_file((dir / "zeta_grid.csv").string());
  bytes += "0\n";
  write_file((dir / "zeta_grid.csv").string(), bytes);
  EXPECT_EQ(run_cli("report --from " + dir.string()), 5);
  fs::remove_all(dir);
}

TEST(Cli, ManifestRerunReproducesOutputs) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  ASSERT_EQ(run_cli("count-stats --n-max 20000 --checkpoints 100,20000 --replicas 2 --out-dir " + a.string()), 0);
  ASSERT_EQ(run_cli("count-stats --config " + (a / "manifest.json").string() + " --threads 3 --out-dir " + b.string()),
            0);
  EXPECT_EQ(read_file((a / "count_stats.csv").string()), read_file((b / "count_stats.csv").string()));
  fs::remove_all(a);
  fs::remove_all(b);
}

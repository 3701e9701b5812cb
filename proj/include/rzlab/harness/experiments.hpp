// Subcommand implementations. run_experiment is pure (tables in memory);
// execute_run adds the run directory, the files and the manifest.
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rzlab/harness/config.hpp"
#include "rzlab/harness/output.hpp"
#include "rzlab/rng.hpp"

namespace rzlab::harness {

struct ExperimentFile {
  std::string name;
  std::string bytes;
  std::uint64_t rows = 0;
};

struct ExperimentResult {
  std::vector<ExperimentFile> files;
  std::map<std::string, std::string> summary;
};

/// Stream label shared by every experiment on the Cramér model, so one
/// (seed, replica) names the same realization everywhere.
inline constexpr const char* kCramerLabel = "cramer";
inline constexpr const char* kBlockLabel = "blocks";
inline constexpr const char* kInfinitudeLabel = "infinitude";

StreamKey cramer_key(std::uint64_t seed, std::uint64_t replica);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs the experiment, writes its files and manifest.json into out_dir.
RunManifest execute_run(const ExperimentConfig& config, std::ostream& log);

struct ReportResult {
  std::string text;
  bool integrity_ok = true;
};

/// Summaries of one run directory, or of every run directory directly below
/// `from`. Digests of all outputs are re-verified.
ReportResult build_report(const std::string& from);

}  // namespace rzlab::harness

// rzlab: command-line entry point for every experiment.
//
// Exit codes: 0 success, 2 usage error or unknown subcommand, 3 invalid
// configuration or parameter, 4 I/O failure, 5 integrity failure (digest
// mismatch or model invariant), 6 numerical domain or singularity error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "rzlab/common.hpp"
#include "rzlab/harness/config.hpp"
#include "rzlab/harness/experiments.hpp"
#include "rzlab/harness/output.hpp"

namespace {

using namespace rzlab;
using namespace rzlab::harness;

enum Exit : int { kOk = 0, kUsage = 2, kConfig = 3, kIo = 4, kIntegrity = 5, kNumeric = 6, kOther = 1 };

struct SubcommandArgs {
  std::string config_path;
  std::vector<std::string> sets;  // key=value
  std::map<std::string, std::string> flags;
  bool list_params = false;
};

void print_params(const std::string& sub) {
  for (const auto& p : schema(sub)) {
    std::printf("%-32s %-16s default: %-24s %s\n", p.key.c_str(), p.flag().c_str(),
                p.default_value.empty() ? "(empty)" : p.default_value.c_str(), p.doc.c_str());
  }
}

int run_subcommand(const std::string& sub, const SubcommandArgs& args) {
  if (args.list_params) {
    print_params(sub);
    return kOk;
  }
  std::vector<std::string> violations;
  std::vector<ConfigLayer> layers;
  if (!args.config_path.empty()) {
    std::string text;
    try {
      text = read_file(args.config_path);
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kIo;
    }
    layers.push_back(parse_config_text(text, args.config_path, violations));
  }
  layers.push_back(environment_layer(sub));
  ConfigLayer flags{"command line", args.flags};
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      violations.push_back("--set " + kv + ": expected key=value");
      continue;
    }
    flags.entries[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  layers.push_back(std::move(flags));

  ConfigResult result = validate_config(sub, layers);
  violations.insert(violations.end(), result.violations.begin(), result.violations.end());
  if (!violations.empty() || !result.ok()) {
    std::cerr << "invalid configuration (" << violations.size() << " problem" << (violations.size() == 1 ? "" : "s")
              << "):\n";
    for (const auto& v : violations) std::cerr << "  " << v << "\n";
    return kConfig;
  }
  const ExperimentConfig& config = *result.config;

  if (sub == "report") {
    const ReportResult report = build_report(config.text("report.from"));
    std::cout << report.text;
    if (!report.integrity_ok) {
      std::cerr << "error: outputs do not match their manifest digests\n";
      return kIntegrity;
    }
    return kOk;
  }
  execute_run(config, std::cout);
  std::cout << "manifest: " << config.out_dir() << "/" << kManifestName << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-prime zeta laboratory"};
  app.require_subcommand(1, 1);
  std::map<std::string, SubcommandArgs> args;
  for (const auto& sub : subcommands()) {
    CLI::App* cmd = app.add_subcommand(sub, "run the " + sub + " experiment");
    SubcommandArgs& a = args[sub];
    cmd->add_option("--config", a.config_path, "flat key = value file, or a run manifest to re-run");
    cmd->add_option("--set", a.sets, "override any key: --set section.key=value");
    cmd->add_flag("--list-params", a.list_params, "print every parameter with its default");
    for (const auto& p : schema(sub)) {
      const std::string key = p.key;
      cmd->add_option_function<std::string>(
          p.flag(), [&a, key](const std::string& v) { a.flags[key] = v; }, p.doc + " (" + key + ")");
    }
  }
  if (argc > 1 && argv[1][0] != '-' && !is_subcommand(argv[1])) {
    std::cerr << "unknown subcommand '" << argv[1] << "'; expected one of:";
    for (const auto& sub : subcommands()) std::cerr << " " << sub;
    std::cerr << "\n";
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return run_subcommand(sub, args[sub]);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kIntegrity;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kConfig;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kNumeric;
  } catch (const SingularityError& e) {
    std::cerr << "singularity: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}

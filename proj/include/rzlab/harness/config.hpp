// Typed, fully-defaulted experiment configuration.
//
// Raw input is flat `dotted.key = value` text. Layers are applied in order
// (defaults < config file < RZLAB_* environment < command-line flags) and every
// violation is collected before reporting.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rzlab::harness {

enum class ParamType { Seed, UInt, Real, Text, UIntList, RealList, Flag };

struct ParamSpec {
  std::string key;  // "section.name"
  ParamType type;
  std::string default_value;
  std::string doc;

  /// Command-line flag: "--" + name with '_' replaced by '-'.
  [[nodiscard]] std::string flag() const;
  /// Environment variable: RZLAB_ + key upper-cased, '.' and '-' as '_'.
  [[nodiscard]] std::string env_var() const;
};

using ParamValue =
    std::variant<std::uint64_t, double, std::string, std::vector<std::uint64_t>, std::vector<double>, bool>;

const std::vector<std::string>& subcommands();
bool is_subcommand(std::string_view name);

/// "count-stats" -> "count_stats".
std::string section_of(std::string_view subcommand);

/// run.* keys followed by the subcommand's own keys.
const std::vector<ParamSpec>& schema(const std::string& subcommand);

class ExperimentConfig {
 public:
  std::string subcommand;

  [[nodiscard]] std::uint64_t u64(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] const std::string& text(const std::string& key) const;
  [[nodiscard]] const std::vector<std::uint64_t>& u64_list(const std::string& key) const;
  [[nodiscard]] const std::vector<double>& real_list(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;

  [[nodiscard]] std::uint64_t seed() const { return u64("run.seed"); }
  [[nodiscard]] std::uint64_t replicas() const { return u64("run.replicas"); }
  [[nodiscard]] unsigned threads() const { return static_cast<unsigned>(u64("run.threads")); }
  [[nodiscard]] const std::string& out_dir() const { return text("run.out_dir"); }

  /// Canonical text of every parameter, in key order.
  [[nodiscard]] std::map<std::string, std::string> canonical() const;

  void set(const std::string& key, ParamValue value) { values_[key] = std::move(value); }

 private:
  const ParamValue& at(const std::string& key) const;
  std::map<std::string, ParamValue> values_;
};

struct ConfigLayer {
  std::string origin;
  std::map<std::string, std::string> entries;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> violations;

  [[nodiscard]] bool ok() const { return config.has_value(); }
};

/// Parse `key = value` lines ('#' starts a comment). A text starting with '{'
/// is read as a run manifest and its "parameters" object is used. Syntax
/// problems are appended to `violations`.
ConfigLayer parse_config_text(std::string_view text, const std::string& origin, std::vector<std::string>& violations);

/// RZLAB_* variables for the keys of the subcommand.
ConfigLayer environment_layer(const std::string& subcommand);

ConfigResult validate_config(const std::string& subcommand, std::span<const ConfigLayer> layers);

/// Single raw text on top of the defaults.
ConfigResult validate_config(const std::string& subcommand, std::string_view raw);

/// Text form used in manifests and config files.
std::string canonical_text(const ParamValue& value);

/// 17 significant digits (%.17g); "nan", "inf", "-inf" for non-finite values.
std::string format_real(double x);

}  // namespace rzlab::harness

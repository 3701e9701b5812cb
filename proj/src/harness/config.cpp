#include "rzlab/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rzlab/common.hpp"
#include "rzlab/rng.hpp"

namespace rzlab::harness {

namespace {

using Violations = std::vector<std::string>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::optional<double> parse_real(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

// Accepts plain integers and integral reals such as 1e6.
std::optional<std::uint64_t> parse_uint(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return v;
  const auto r = parse_real(text);
  if (!r || !std::isfinite(*r) || *r < 0.0 || *r != std::floor(*r) || *r >= 0x1.0p64) return std::nullopt;
  return static_cast<std::uint64_t>(*r);
}

std::optional<ParamValue> parse_value(const ParamSpec& spec, const std::string& raw, std::string& problem) {
  switch (spec.type) {
    case ParamType::Seed:
      try {
        return ParamValue{parse_seed(raw)};
      } catch (const Error&) {
        problem = "expected decimal or 0x-prefixed hex seed";
        return std::nullopt;
      }
    case ParamType::UInt:
      if (auto v = parse_uint(raw)) return ParamValue{*v};
      problem = "expected a non-negative integer";
      return std::nullopt;
    case ParamType::Real:
      if (auto v = parse_real(raw)) return ParamValue{*v};
      problem = "expected a real number";
      return std::nullopt;
    case ParamType::Text:
      return ParamValue{raw};
    case ParamType::UIntList: {
      std::vector<std::uint64_t> out;
      for (const auto& item : split_list(raw)) {
        const auto v = parse_uint(item);
        if (!v) {
          problem = "expected a comma-separated list of non-negative integers";
          return std::nullopt;
        }
        out.push_back(*v);
      }
      return ParamValue{out};
    }
    case ParamType::RealList: {
      std::vector<double> out;
      for (const auto& item : split_list(raw)) {
        const auto v = parse_real(item);
        if (!v) {
          problem = "expected a comma-separated list of real numbers";
          return std::nullopt;
        }
        out.push_back(*v);
      }
      return ParamValue{out};
    }
    case ParamType::Flag:
      if (raw == "true" || raw == "1" || raw == "yes") return ParamValue{true};
      if (raw == "false" || raw == "0" || raw == "no") return ParamValue{false};
      problem = "expected true or false";
      return std::nullopt;
  }
  return std::nullopt;
}

ParamSpec P(std::string key, ParamType type, std::string def, std::string doc) {
  return {std::move(key), type, std::move(def), std::move(doc)};
}

std::vector<ParamSpec> section_params(const std::string& sub) {
  using T = ParamType;
  if (sub == "sample") {
    return {P("sample.n_max", T::UInt, "1000000", "largest n sampled"),
            P("sample.write_bits", T::Flag, "true", "write packed indicator files")};
  }
  if (sub == "count-stats") {
    return {P("count_stats.n_max", T::UInt, "100000", "largest n sampled"),
            P("count_stats.checkpoints", T::UIntList, "1000,10000,100000", "ascending n at which the path is recorded")};
  }
  if (sub == "zeta-grid") {
    return {P("zeta_grid.n_max", T::UInt, "100000", "product cutoff N"),
            P("zeta_grid.sigmas", T::RealList, "1.5,2,3", "real parts, all > 0"),
            P("zeta_grid.ts", T::RealList, "0,10", "imaginary parts"),
            P("zeta_grid.order", T::UInt, "0", "log expansion order, 0 = automatic")};
  }
  if (sub == "critical-line") {
    return {P("critical_line.t", T::Real, "0", "imaginary part"),
            P("critical_line.sigmas", T::RealList, "0.8,0.7,0.6,0.5", "strictly descending real parts"),
            P("critical_line.cutoffs", T::UIntList, "10000,100000,1000000", "strictly ascending cutoffs >= 4"),
            P("critical_line.lemma_threshold", T::Real, "0.5", "bound on |S1' - E S1'| for the lemma probability")};
  }
  if (sub == "additive") {
    return {P("additive.c", T::Real, "1", "thin sequence scale"),
            P("additive.alpha", T::Real, "0.4", "thin sequence exponent, in (0, 1/2)"),
            P("additive.n_lo", T::UInt, "10000", "first n scanned"),
            P("additive.n_hi", T::UInt, "100000", "last n scanned"),
            P("additive.row_stride", T::UInt, "100", "write every stride-th n (failures are always written)")};
  }
  if (sub == "infinitude") {
    return {P("infinitude.preset", T::Text, "fibonacci", "fibonacci | mersenne | power | list"),
            P("infinitude.count", T::UInt, "60", "number K of sparse-set elements"),
            P("infinitude.values", T::UIntList, "", "explicit x_k for preset = list"),
            P("infinitude.m", T::Real, "2", "base for preset = power"),
            P("infinitude.c", T::Real, "1", "scale for preset = power"),
            P("infinitude.alpha", T::Real, "0.4", "exponent for preset = power")};
  }
  if (sub == "symmetry") {
    return {P("symmetry.beta", T::Real, "2", "block width exponent, B_n = floor(n^beta)"),
            P("symmetry.k_rule", T::Text, "sqrt", "sqrt (k = ceil(sqrt n)) | const (k = k0)"),
            P("symmetry.k0", T::UInt, "100", "offsets per block for k_rule = const"),
            P("symmetry.n_blocks", T::UInt, "1000", "number of blocks"),
            P("symmetry.sigma", T::Real, "0.6", "real part of s, > 0"),
            P("symmetry.t", T::Real, "0", "imaginary part of s"),
            P("symmetry.order", T::UInt, "0", "log expansion order, 0 = automatic"),
            P("symmetry.clt_blocks", T::UIntList, "", "block indices for the CLT check (empty = last block)"),
            P("symmetry.clt_replicas", T::UInt, "1000", "offset redraws per CLT block"),
            P("symmetry.dump_blocks", T::Flag, "false", "write every block with its offsets")};
  }
  if (sub == "region-scan") {
    return {P("region_scan.betas", T::RealList, "1,2,3,4,5", "block width exponents"),
            P("region_scan.eps", T::RealList, "0.4,0.6,0.8", "real parts of s"),
            P("region_scan.n_blocks", T::UInt, "16384", "blocks per realization, power of two >= 4")};
  }
  if (sub == "reference-check") {
    return {P("reference_check.tol", T::Real, "1e-13", "eta tolerance"),
            P("reference_check.stieltjes_m", T::UInt, "10000000", "truncation for the Stieltjes constants"),
            P("reference_check.laurent_terms", T::UInt, "6", "Stieltjes terms in the Laurent check, 1..9"),
            P("reference_check.phi_cutoff", T::UInt, "100000", "cutoff of phi before its tail correction")};
  }
  if (sub == "report") {
    return {P("report.from", T::Text, "", "run directory (or a directory of run directories)")};
  }
  return {};
}

std::map<std::string, std::vector<ParamSpec>> build_schemas() {
  std::map<std::string, std::vector<ParamSpec>> out;
  for (const auto& sub : subcommands()) {
    std::vector<ParamSpec> specs = {
        P("run.seed", ParamType::Seed, "42", "master seed, decimal or 0x hex"),
        P("run.replicas", ParamType::UInt, "1", "independent realizations"),
        P("run.threads", ParamType::UInt, "1", "worker threads (outputs do not depend on it)"),
        P("run.out_dir", ParamType::Text, "runs/" + sub, "output directory"),
    };
    for (auto& p : section_params(sub)) specs.push_back(std::move(p));
    out.emplace(sub, std::move(specs));
  }
  return out;
}

const std::map<std::string, std::vector<ParamSpec>>& all_schemas() {
  static const auto schemas = build_schemas();
  return schemas;
}

// Keys of every subcommand, so a shared config file may carry other sections.
const std::set<std::string>& known_keys() {
  static const auto keys = [] {
    std::set<std::string> out;
    for (const auto& [sub, specs] : all_schemas()) {
      for (const auto& s : specs) out.insert(s.key);
    }
    return out;
  }();
  return keys;
}

template <class T>
bool all_of(const std::vector<T>& xs, auto pred) {
  return std::all_of(xs.begin(), xs.end(), pred);
}

template <class T>
bool strictly_ascending(const std::vector<T>& xs) {
  return std::adjacent_find(xs.begin(), xs.end(), [](T a, T b) { return !(a < b); }) == xs.end();
}

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

void semantic_checks(const ExperimentConfig& c, const std::map<std::string, std::string>& raw, Violations& v) {
  auto bad = [&](const std::string& key, const std::string& what) {
    const auto it = raw.find(key);
    v.push_back(key + " = '" + (it == raw.end() ? std::string() : it->second) + "': " + what);
  };
  if (c.u64("run.replicas") < 1) bad("run.replicas", "must be >= 1");
  if (c.u64("run.threads") < 1 || c.u64("run.threads") > 256) bad("run.threads", "must lie in [1, 256]");
  if (c.out_dir().empty()) bad("run.out_dir", "must not be empty");
  const auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };

  const std::string& sub = c.subcommand;
  if (sub == "sample") {
    if (c.u64("sample.n_max") < 4) bad("sample.n_max", "must be >= 4");
  } else if (sub == "count-stats") {
    const auto n_max = c.u64("count_stats.n_max");
    const auto& cps = c.u64_list("count_stats.checkpoints");
    if (n_max < 4) bad("count_stats.n_max", "must be >= 4");
    if (cps.empty()) bad("count_stats.checkpoints", "must not be empty");
    if (!strictly_ascending(cps)) bad("count_stats.checkpoints", "must be strictly ascending");
    if (!all_of(cps, [&](std::uint64_t n) { return n >= 4 && n <= n_max; })) {
      bad("count_stats.checkpoints", "every checkpoint must lie in [4, count_stats.n_max]");
    }
  } else if (sub == "zeta-grid") {
    if (c.u64("zeta_grid.n_max") < 4) bad("zeta_grid.n_max", "must be >= 4");
    const auto& sig = c.real_list("zeta_grid.sigmas");
    if (sig.empty() || !all_of(sig, positive)) bad("zeta_grid.sigmas", "must be non-empty with every sigma > 0");
    const auto& ts = c.real_list("zeta_grid.ts");
    if (ts.empty() || !all_of(ts, [](double t) { return std::isfinite(t); })) {
      bad("zeta_grid.ts", "must be non-empty and finite");
    }
    if (c.u64("zeta_grid.order") > 64) bad("zeta_grid.order", "must lie in [0, 64]");
  } else if (sub == "critical-line") {
    const auto& sig = c.real_list("critical_line.sigmas");
    if (sig.empty() || !all_of(sig, positive)) bad("critical_line.sigmas", "must be non-empty with every sigma > 0");
    if (!std::is_sorted(sig.rbegin(), sig.rend()) || std::adjacent_find(sig.begin(), sig.end()) != sig.end()) {
      bad("critical_line.sigmas", "must be strictly descending");
    }
    const auto& cuts = c.u64_list("critical_line.cutoffs");
    if (cuts.empty() || !strictly_ascending(cuts) || !all_of(cuts, [](std::uint64_t n) { return n >= 4; })) {
      bad("critical_line.cutoffs", "must be non-empty, strictly ascending and >= 4");
    }
    if (!std::isfinite(c.real("critical_line.t"))) bad("critical_line.t", "must be finite");
    if (!positive(c.real("critical_line.lemma_threshold"))) bad("critical_line.lemma_threshold", "must be > 0");
  } else if (sub == "additive") {
    if (!positive(c.real("additive.c"))) bad("additive.c", "must be > 0");
    const double alpha = c.real("additive.alpha");
    if (!(alpha > 0.0 && alpha < 0.5)) {
      bad("additive.alpha", "must lie in (0, 1/2): the representation theorem assumes alpha < 1/2");
    }
    const auto lo = c.u64("additive.n_lo");
    const auto hi = c.u64("additive.n_hi");
    if (lo < 4) bad("additive.n_lo", "must be >= 4");
    if (hi < lo) bad("additive.n_hi", "must be >= additive.n_lo");
    if (c.u64("additive.row_stride") < 1) bad("additive.row_stride", "must be >= 1");
  } else if (sub == "infinitude") {
    const std::string& preset = c.text("infinitude.preset");
    if (preset != "fibonacci" && preset != "mersenne" && preset != "power" && preset != "list") {
      bad("infinitude.preset", "must be one of fibonacci, mersenne, power, list");
    }
    if (c.u64("infinitude.count") < 1) bad("infinitude.count", "must be >= 1");
    if (preset == "list") {
      const auto& xs = c.u64_list("infinitude.values");
      if (xs.empty() || !strictly_ascending(xs) || !all_of(xs, [](std::uint64_t x) { return x >= 4; })) {
        bad("infinitude.values", "preset = list needs a strictly ascending list with every x >= 4");
      }
    }
    if (preset == "power") {
      if (!(c.real("infinitude.m") > 1.0)) bad("infinitude.m", "must be > 1");
      if (!positive(c.real("infinitude.c"))) bad("infinitude.c", "must be > 0");
      if (!positive(c.real("infinitude.alpha"))) bad("infinitude.alpha", "must be > 0");
    }
  } else if (sub == "symmetry") {
    if (!positive(c.real("symmetry.beta"))) bad("symmetry.beta", "must be > 0");
    const std::string& rule = c.text("symmetry.k_rule");
    if (rule != "sqrt" && rule != "const") bad("symmetry.k_rule", "must be sqrt or const");
    if (c.u64("symmetry.k0") < 1) bad("symmetry.k0", "must be >= 1");
    const auto nb = c.u64("symmetry.n_blocks");
    if (nb < 1) bad("symmetry.n_blocks", "must be >= 1");
    if (!positive(c.real("symmetry.sigma"))) bad("symmetry.sigma", "must be > 0");
    if (!std::isfinite(c.real("symmetry.t"))) bad("symmetry.t", "must be finite");
    if (c.u64("symmetry.order") > 64) bad("symmetry.order", "must lie in [0, 64]");
    if (!all_of(c.u64_list("symmetry.clt_blocks"), [&](std::uint64_t b) { return b >= 1 && b <= nb; })) {
      bad("symmetry.clt_blocks", "every block index must lie in [1, symmetry.n_blocks]");
    }
    if (c.u64("symmetry.clt_replicas") < 2) bad("symmetry.clt_replicas", "must be >= 2");
  } else if (sub == "region-scan") {
    const auto& betas = c.real_list("region_scan.betas");
    const auto& eps = c.real_list("region_scan.eps");
    if (betas.empty() || !all_of(betas, positive)) bad("region_scan.betas", "must be non-empty with every beta > 0");
    if (eps.empty() || !all_of(eps, positive)) bad("region_scan.eps", "must be non-empty with every eps > 0");
    const auto nb = c.u64("region_scan.n_blocks");
    if (nb < 4 || !is_power_of_two(nb)) bad("region_scan.n_blocks", "must be a power of two >= 4");
  } else if (sub == "reference-check") {
    if (!positive(c.real("reference_check.tol"))) bad("reference_check.tol", "must be > 0");
    if (c.u64("reference_check.stieltjes_m") < 1) bad("reference_check.stieltjes_m", "must be >= 1");
    const auto terms = c.u64("reference_check.laurent_terms");
    if (terms < 1 || terms > 9) bad("reference_check.laurent_terms", "must lie in [1, 9]");
    if (c.u64("reference_check.phi_cutoff") < 2) bad("reference_check.phi_cutoff", "must be >= 2");
  } else if (sub == "report") {
    if (c.text("report.from").empty()) bad("report.from", "a run directory is required");
  }
}

}  // namespace

std::string ParamSpec::flag() const {
  std::string name = key.substr(key.find('.') + 1);
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

std::string ParamSpec::env_var() const {
  std::string out = "RZLAB_";
  for (const char ch : key) {
    out.push_back(ch == '.' || ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  return out;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"sample",      "count-stats", "zeta-grid",  "critical-line",
                                                 "additive",    "infinitude",  "symmetry",   "region-scan",
                                                 "reference-check", "report"};
  return names;
}

bool is_subcommand(std::string_view name) {
  const auto& subs = subcommands();
  return std::find(subs.begin(), subs.end(), name) != subs.end();
}

std::string section_of(std::string_view subcommand) {
  std::string out(subcommand);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

const std::vector<ParamSpec>& schema(const std::string& subcommand) {
  const auto& all = all_schemas();
  const auto it = all.find(subcommand);
  if (it == all.end()) throw ParameterError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

const ParamValue& ExperimentConfig::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ParameterError("config has no key '" + key + "'");
  return it->second;
}

std::uint64_t ExperimentConfig::u64(const std::string& key) const { return std::get<std::uint64_t>(at(key)); }
double ExperimentConfig::real(const std::string& key) const { return std::get<double>(at(key)); }
const std::string& ExperimentConfig::text(const std::string& key) const { return std::get<std::string>(at(key)); }
const std::vector<std::uint64_t>& ExperimentConfig::u64_list(const std::string& key) const {
  return std::get<std::vector<std::uint64_t>>(at(key));
}
const std::vector<double>& ExperimentConfig::real_list(const std::string& key) const {
  return std::get<std::vector<double>>(at(key));
}
bool ExperimentConfig::flag(const std::string& key) const { return std::get<bool>(at(key)); }

std::map<std::string, std::string> ExperimentConfig::canonical() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : values_) out.emplace(k, canonical_text(v));
  return out;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string canonical_text(const ParamValue& value) {
  struct Visitor {
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::vector<std::uint64_t>& xs) const {
      std::string out;
      for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
      return out;
    }
    std::string operator()(const std::vector<double>& xs) const {
      std::string out;
      for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_real(xs[i]);
      return out;
    }
  };
  return std::visit(Visitor{}, value);
}

ConfigLayer parse_config_text(std::string_view text, const std::string& origin, Violations& violations) {
  ConfigLayer layer{origin, {}};
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    const auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("parameters") || !doc["parameters"].is_object()) {
      violations.push_back(origin + ": JSON input must be a run manifest with a \"parameters\" object");
      return layer;
    }
    for (const auto& [k, v] : doc["parameters"].items()) {
      if (!v.is_string()) {
        violations.push_back(origin + ": parameter " + k + " must be a string");
        continue;
      }
      layer.entries[k] = v.get<std::string>();
    }
    return layer;
  }
  std::stringstream ss{std::string(text)};
  std::string line;
  for (int line_no = 1; std::getline(ss, line); ++line_no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      violations.push_back(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    if (key.empty()) {
      violations.push_back(origin + ":" + std::to_string(line_no) + ": empty key");
      continue;
    }
    layer.entries[key] = trim(std::string_view(stripped).substr(eq + 1));
  }
  return layer;
}

ConfigLayer environment_layer(const std::string& subcommand) {
  ConfigLayer layer{"environment", {}};
  for (const auto& spec : schema(subcommand)) {
    if (const char* v = std::getenv(spec.env_var().c_str())) layer.entries[spec.key] = v;
  }
  return layer;
}

ConfigResult validate_config(const std::string& subcommand, std::span<const ConfigLayer> layers) {
  ConfigResult result;
  if (!is_subcommand(subcommand)) {
    result.violations.push_back("unknown subcommand '" + subcommand + "'");
    return result;
  }
  const auto& specs = schema(subcommand);
  std::map<std::string, std::pair<std::string, std::string>> raw;  // key -> (value, origin)
  for (const auto& spec : specs) raw[spec.key] = {spec.default_value, "default"};
  for (const auto& layer : layers) {
    for (const auto& [key, value] : layer.entries) {
      if (raw.count(key)) {
        raw[key] = {value, layer.origin};
      } else if (!known_keys().count(key)) {
        result.violations.push_back(key + ": unknown key (from " + layer.origin + ")");
      }
    }
  }
  ExperimentConfig config;
  config.subcommand = subcommand;
  std::set<std::string> mistyped;
  for (const auto& spec : specs) {
    const auto& [value, origin] = raw[spec.key];
    std::string problem;
    if (auto parsed = parse_value(spec, value, problem)) {
      config.set(spec.key, std::move(*parsed));
    } else {
      // Keep checking the remaining keys against the default.
      mistyped.insert(spec.key);
      result.violations.push_back(spec.key + " = '" + value + "' (from " + origin + "): " + problem);
      config.set(spec.key, *parse_value(spec, spec.default_value, problem));
    }
  }
  std::map<std::string, std::string> shown;
  for (const auto& [key, vo] : raw) shown[key] = vo.first;
  Violations semantic;
  semantic_checks(config, shown, semantic);
  for (auto& msg : semantic) {
    if (!mistyped.count(msg.substr(0, msg.find(' ')))) result.violations.push_back(std::move(msg));
  }
  if (result.violations.empty()) result.config = std::move(config);
  return result;
}

ConfigResult validate_config(const std::string& subcommand, std::string_view raw) {
  Violations syntax;
  const ConfigLayer layer = parse_config_text(raw, "config", syntax);
  ConfigResult result = validate_config(subcommand, std::span<const ConfigLayer>(&layer, 1));
  if (!syntax.empty()) {
    result.violations.insert(result.violations.begin(), syntax.begin(), syntax.end());
    result.config.reset();
  }
  return result;
}

}  // namespace rzlab::harness

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and never relaxed at run time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "rzlab/additive.hpp"
#include "rzlab/cramer.hpp"
#include "rzlab/harness/experiments.hpp"
#include "rzlab/harness/output.hpp"
#include "rzlab/random_zeta.hpp"
#include "rzlab/symmetry.hpp"
#include "rzlab/zeta_reference.hpp"

using namespace rzlab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

StreamKey cramer(std::uint64_t r) { return harness::cramer_key(kSeed, r); }

Outcome expectation_law() {
  const std::uint64_t n = 1000000, replicas = 200;
  const std::vector<std::uint64_t> cps = {n};
  double sum = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) sum += static_cast<double>(counting_path(cramer(r), cps).pi[0]);
  const CountMoments m = count_moments(n);
  const double mean = sum / replicas, band = 3.0 * std::sqrt(m.variance / replicas);
  return {std::fabs(mean - m.mean) <= band,
          fmt("mean Pi(1e6) = %.3f, expected %.3f, |diff| %.3f vs band %.3f", mean, m.mean, std::fabs(mean - m.mean),
              band)};
}

Outcome variance_expansion() {
  auto rel = [](double n) {
    const double l = std::log(n);
    const double expansion = n / l - 1.5 * n / (l * l);
    const double exact = count_moments(static_cast<std::uint64_t>(n)).variance;
    return std::fabs(exact - expansion) / expansion;
  };
  const double r6 = rel(1e6), r8 = rel(1e8);
  return {r6 <= 0.10 && r8 <= 0.03,
          fmt("relative gap %.4f at 1e6 (limit 0.10), %.4f at 1e8 (limit 0.03)", r6, r8)};
}

Outcome lil_band() {
  const std::vector<std::uint64_t> cps = {10000, 100000, 1000000, 10000000};
  const std::uint64_t replicas = 100;
  std::uint64_t inside = 0;
  double worst = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const CountingPath p = counting_path(cramer(r), cps);
    bool ok = true;
    for (const auto& v : p.lil) {
      ok = ok && v && *v > 0.0 && *v <= 2.5;
      if (v) worst = std::max(worst, *v);
    }
    inside += ok;
  }
  const double frac = static_cast<double>(inside) / replicas;
  return {frac >= 0.95, fmt("%.2f of replicas in (0, 2.5] at every checkpoint, largest ratio %.3f", frac, worst)};
}

Outcome two_series() {
  const ComplexPoint s{0.6, 0.0};
  const std::uint64_t n = 1000000, replicas = 50;
  const std::vector<std::uint64_t> cuts = {n, 2 * n};
  const auto mom = s1_moments_path(s, cuts);
  const double mean_step = (mom[1].model_mean_partial - mom[0].model_mean_partial).real();
  const double limit = 3.0 * std::sqrt(mom[1].var_partial - mom[0].var_partial);
  std::uint64_t below = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const IndicatorStream ind = sample_indicators(2 * n, cramer(r));
    const double step = (s1_partial(ind, s, 2 * n) - s1_partial(ind, s, n)).real();
    below += std::fabs(step - mean_step) < limit;
  }
  const double frac = static_cast<double>(below) / replicas;

  // No plateau at the critical line: slope of var_partial against ln ln N.
  std::vector<std::uint64_t> grid;
  for (int j = 0; j <= 4; ++j) grid.push_back(static_cast<std::uint64_t>(std::llround(1e6 * std::pow(10.0, j / 2.0))));
  const auto crit = s1_moments_path({0.5, 0.0}, grid);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x = std::log(std::log(double(grid[i]))) - std::log(std::log(double(grid[0])));
    const double y = crit[i].var_partial - crit[0].var_partial;
    sxy += x * y;
    sxx += x * x;
  }
  const double slope = sxy / sxx;
  return {frac >= 0.90 && slope >= 0.8,
          fmt("%.2f of centred increments within 3 sd (need 0.90); variance slope vs ln ln N at sigma 1/2: %.3f "
              "(need 0.8)",
              frac, slope)};
}

Outcome divergence_lemma() {
  CriticalLineConfig cfg;
  cfg.key = cramer(0);
  cfg.sigmas = {0.5};
  cfg.cutoffs = {10000, 1000000, 100000000};
  cfg.replicas = 500;
  cfg.lemma_threshold = 0.5;
  const CriticalLineTable t = critical_line_scan(cfg);
  const double p4 = t.summary[0].lemma_probability, p6 = t.summary[1].lemma_probability,
               p8 = t.summary[2].lemma_probability;
  return {p4 > p6 && p6 > p8, fmt("P(|S - E| <= 0.5) = %.3f, %.3f, %.3f at N = 1e4, 1e6, 1e8", p4, p6, p8)};
}

Outcome reference_oracle() {
  const double z2 = std::fabs(zeta_via_eta({2.0, 0.0}).real() - std::numbers::pi * std::numbers::pi / 6.0);

  double phi_err = 0;
  for (int i = 0; i < 10; ++i) {
    const double sigma = 1.5 + 1.5 * i / 9.0, h = 1e-3;
    const double d = ((phi_with_tail({sigma + h, 0.0}, 100000) - phi_with_tail({sigma - h, 0.0}, 100000)) / (2 * h)).real();
    phi_err = std::max(phi_err, std::fabs(d - (1.0 - zeta_via_eta({sigma, 0.0}).real())));
  }

  const StieltjesTable table = stieltjes_table(6, 10000000);
  double laurent_err = 0;
  for (const double r : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    for (int a = 0; a < 8; ++a) {
      const double th = 2 * std::numbers::pi * (a + 0.5) / 8;
      const ComplexPoint s{1.0 + r * std::cos(th), r * std::sin(th)};
      laurent_err = std::max(laurent_err, std::abs(zeta_laurent(s, table, 6) - zeta_via_eta(s)));
    }
  }

  const double limit = stieltjes_gamma(0, 10000000, true);
  const double g0 = std::fabs(stieltjes_gamma(0, 1000000, false) - limit);

  return {z2 < 1e-10 && phi_err < 1e-4 && laurent_err < 1e-5 && g0 < 1e-5,
          fmt("zeta(2) err %.2e; phi' err %.2e; Laurent err %.2e; gamma0 err %.2e", z2, phi_err, laurent_err, g0)};
}

Outcome additive_representation() {
  const ThinSequence thin = thin_sequence(1.0, 0.4, 100000);
  const std::set<std::uint64_t> distinct(thin.values.begin(), thin.values.end());
  const std::uint64_t replicas = 50;
  std::vector<std::uint64_t> sampled;
  for (std::uint64_t n = 10000; n <= 100000; n += 1000) sampled.push_back(n);
  std::vector<std::uint64_t> fails_at(sampled.size(), 0);
  std::uint64_t covered = 0;
  bool oracle_ok = true;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const IndicatorStream ind = sample_indicators(100000, cramer(r));
    const CoverageReport rep = representation_scan(ind, thin, 10000, 100000);
    covered += rep.first_full_cover.has_value();
    for (std::size_t i = 0; i < sampled.size(); ++i) fails_at[i] += !rep.witnesses[sampled[i] - 10000].has_value();

    const CoverageReport small = representation_scan(ind, thin, 4, 1000);
    std::vector<std::uint64_t> brute;
    for (std::uint64_t n = 4; n <= 1000; ++n) {
      bool hit = false;
      for (const auto a : distinct) hit = hit || (a < n && ind.is_quasi_prime(n - a));
      if (!hit) brute.push_back(n);
    }
    oracle_ok = oracle_ok && brute == small.failures;
  }
  bool freq_ok = true;
  double worst_ratio = 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const double freq = static_cast<double>(fails_at[i]) / replicas;
    const double bound = failure_bound(sampled[i], thin).product_bound;
    freq_ok = freq_ok && freq <= 2.0 * bound;
    worst_ratio = std::max(worst_ratio, freq / bound);
  }
  return {freq_ok && covered == replicas && oracle_ok,
          fmt("worst frequency/product-bound %.3g at %.0f sampled n; N0 defined in %.0f/50 replicas; oracle match %.0f",
              worst_ratio, static_cast<double>(sampled.size()), static_cast<double>(covered), oracle_ok ? 1.0 : 0.0)};
}

Outcome infinitude() {
  const std::uint64_t replicas = 1000;
  const InfinitudeTable t = infinitude_experiment(FibonacciPreset{}, 60, replicas, {kSeed, "infinitude", 0});
  const double mean60 = t.mean_hits[59], mean30 = t.mean_hits[29];
  const double band = 3.0 * std::sqrt(t.variance[59] / replicas);
  return {std::fabs(mean60 - t.expected[59]) <= band && mean60 > mean30,
          fmt("mean hits %.3f vs expected %.3f (band %.3f); mean at K=30 %.3f", mean60, t.expected[59], band, mean30)};
}

Outcome symmetry_cancellation() {
  const ComplexPoint s{0.6, 0.0};
  BlockParams p;
  p.beta = 2.0;
  p.n_blocks = 1000;
  const auto blocks = build_blocks(p, {kSeed, "blocks", 0});
  double worst = 0;
  for (const auto& b : blocks) {
    const BlockFirstSum r = block_first_sum(b, s);
    worst = std::max(worst, r.residual / r.third_order_scale);
  }
  const double limit = 10.0 * std::abs(s.value() * (s.value() + 1.0) * (s.value() + 2.0)) / 6.0;

  BlockParams q = p;
  q.k_rule = KRule::Constant;
  q.k0 = 100;
  const auto wide = build_blocks(q, {kSeed, "blocks", 0});
  const std::vector<SymmetricBlock> chosen = {wide[249], wide[499], wide[999]};
  const std::uint64_t replicas = 1000;
  const CltTable clt = clt_fluctuation_check(chosen, s, replicas, {kSeed, "blocks", 0});
  bool clt_ok = !clt.regime_warning;
  double worst_mean = 0, lo_var = 1e9, hi_var = 0;
  for (const auto& row : clt.summary) {
    clt_ok = clt_ok && std::fabs(row.mean) <= 3.0 / std::sqrt(double(replicas)) && row.variance >= 0.85 &&
             row.variance <= 1.15;
    worst_mean = std::max(worst_mean, std::fabs(row.mean));
    lo_var = std::min(lo_var, row.variance);
    hi_var = std::max(hi_var, row.variance);
  }
  return {worst <= limit && clt_ok,
          fmt("fitted remainder constant %.3f (limit %.3f); CLT |mean| <= %.4f, variance in [%.3f, %.3f]", worst, limit,
              worst_mean, lo_var, hi_var)};
}

Outcome convergence_region() {
  RegionScanConfig cfg;
  cfg.betas = {1, 2, 3, 4, 5};
  cfg.eps = {0.4, 0.6, 0.8};
  cfg.n_blocks = 16384;
  cfg.replicas = 20;
  cfg.key = {kSeed, "blocks", 0};
  const RegionTable t = convergence_region_scan(cfg);
  auto cell = [&](double b, double e) {
    for (const auto& c : t.cells) {
      if (c.beta == b && c.eps == e) return c.converged_fraction;
    }
    return -1.0;
  };
  bool monotone = true;
  for (const double e : cfg.eps) {
    for (std::size_t i = 1; i < cfg.betas.size(); ++i) monotone = monotone && cell(cfg.betas[i], e) >= cell(cfg.betas[i - 1], e);
  }
  const double hi = cell(4, 0.6), lo = cell(1, 0.6);
  return {hi >= 0.95 && lo == 0.0 && monotone,
          fmt("converged fraction %.2f at (4, 0.6), %.2f at (1, 0.6); monotone in beta: %.0f", hi, lo, monotone ? 1.0 : 0.0)};
}

int cli(const std::string& args) {
  const std::string cmd = std::string(RZLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "rzlab_acceptance_rerun";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"count-stats", "--n-max 200000 --checkpoints 1000,200000 --replicas 8"},
      {"critical-line", "--cutoffs 1e3,1e5 --replicas 8"},
      {"additive", "--n-lo 1000 --n-hi 20000 --replicas 6"},
      {"infinitude", "--count 40 --replicas 50"},
      {"symmetry", "--n-blocks 300 --clt-replicas 40 --replicas 3"},
      {"region-scan", "--n-blocks 1024 --replicas 3"},
      {"zeta-grid", "--n-max 20000 --replicas 4"},
  };
  std::size_t compared = 0;
  bool ok = true;
  for (const auto& [sub, args] : runs) {
    const fs::path base = root / (sub + "_t1");
    if (cli(sub + " " + args + " --threads 1 --out-dir " + base.string()) != 0) {
      ok = false;
      continue;
    }
    for (const int threads : {4, 16}) {
      const fs::path dir = root / (sub + "_t" + std::to_string(threads));
      if (cli(sub + " --config " + (base / harness::kManifestName).string() + " --threads " + std::to_string(threads) +
              " --out-dir " + dir.string()) != 0) {
        ok = false;
        continue;
      }
      for (const auto& entry : fs::directory_iterator(base)) {
        if (entry.path().extension() != ".csv") continue;
        ok = ok && harness::read_file(entry.path().string()) ==
                       harness::read_file((dir / entry.path().filename()).string());
        ++compared;
      }
    }
  }
  fs::remove_all(root);
  return {ok && compared > 0, fmt("%.0f CSV files compared across 1, 4 and 16 threads", static_cast<double>(compared))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 expectation law", expectation_law},
      {"AC2 variance expansion", variance_expansion},
      {"AC3 LIL soft band", lil_band},
      {"AC4 two-series convergence", two_series},
      {"AC5 divergence lemma", divergence_lemma},
      {"AC6 reference zeta", reference_oracle},
      {"AC7 additive representation", additive_representation},
      {"AC8 infinitude", infinitude},
      {"AC9 symmetry cancellation", symmetry_cancellation},
      {"AC10 convergence region", convergence_region},
      {"AC11 reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

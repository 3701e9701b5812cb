#include "rzlab/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>

#include "rzlab/additive.hpp"
#include "rzlab/cramer.hpp"
#include "rzlab/parallel.hpp"
#include "rzlab/random_zeta.hpp"
#include "rzlab/symmetry.hpp"
#include "rzlab/zeta_reference.hpp"

namespace rzlab::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ExperimentFile csv_file(const std::string& name, const CsvTable& table) {
  return {name, table.body(), table.rows()};
}

ExperimentResult run_sample(const ExperimentConfig& c) {
  const auto n_max = c.u64("sample.n_max");
  const bool write_bits = c.flag("sample.write_bits");
  const auto inds = parallel_map(c.replicas(), c.threads(),
                                 [&](std::size_t r) { return sample_indicators(n_max, cramer_key(c.seed(), r)); });
  ExperimentResult res;
  CsvTable table({"seed", "replica", "n_max", "pi", "mean", "variance", "bits_file", "bits_sha256"});
  const CountMoments m = count_moments(n_max);
  for (std::uint64_t r = 0; r < inds.size(); ++r) {
    std::string name;
    std::string digest;
    if (write_bits) {
      const auto packed = inds[r].packed_bytes();
      std::string bytes(8, '\0');
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((n_max >> (8 * i)) & 0xFF);
      bytes.append(packed.begin(), packed.end());
      name = "bits_r" + std::to_string(r) + ".bin";
      digest = sha256_hex(bytes);
      res.files.push_back({name, std::move(bytes), 0});
    }
    table.row() << c.seed() << r << n_max << inds[r].count_upto(n_max) << m.mean << m.variance << name << digest;
  }
  res.files.push_back(csv_file("samples.csv", table));
  return res;
}

ExperimentResult run_count_stats(const ExperimentConfig& c) {
  const auto& cps = c.u64_list("count_stats.checkpoints");
  const auto paths = parallel_map(c.replicas(), c.threads(),
                                  [&](std::size_t r) { return counting_path(cramer_key(c.seed(), r), cps); });
  std::vector<double> li_values;
  for (const auto n : cps) li_values.push_back(static_cast<double>(n) >= std::numbers::e ? li(static_cast<double>(n)) : kNaN);

  CsvTable table({"seed", "replica", "n_max", "n", "pi", "mean", "var", "lil", "li"});
  std::uint64_t in_band = 0;
  for (std::uint64_t r = 0; r < paths.size(); ++r) {
    const CountingPath& p = paths[r];
    bool all_in = true;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string lil = p.lil[i] ? format_real(*p.lil[i]) : "";
      if (p.lil[i] && !(*p.lil[i] > 0.0 && *p.lil[i] <= 2.5)) all_in = false;
      table.row() << c.seed() << r << c.u64("count_stats.n_max") << p.n[i] << p.pi[i] << p.mean[i] << p.var[i] << lil
                  << li_values[i];
    }
    in_band += all_in ? 1 : 0;
  }
  ExperimentResult res;
  res.files.push_back(csv_file("count_stats.csv", table));
  res.summary["lil_band"] = "(0, 2.5]";
  res.summary["lil_band_fraction"] = format_real(static_cast<double>(in_band) / static_cast<double>(paths.size()));
  return res;
}

ExperimentResult run_zeta_grid(const ExperimentConfig& c) {
  const auto n_max = c.u64("zeta_grid.n_max");
  const auto& sigmas = c.real_list("zeta_grid.sigmas");
  const auto& ts = c.real_list("zeta_grid.ts");
  const int order = static_cast<int>(c.u64("zeta_grid.order"));

  struct Cell {
    ComplexEvaluation ev;
    Complex product;
  };
  const auto cells = parallel_map(c.replicas(), c.threads(), [&](std::size_t r) {
    const IndicatorStream ind = sample_indicators(n_max, cramer_key(c.seed(), r));
    const QuasiPrimeSequence seq = ind.sequence();
    std::vector<Cell> out;
    for (const double sigma : sigmas) {
      for (const double t : ts) {
        const ComplexPoint s{sigma, t};
        Cell cell{log_zeta_partial(seq, s, n_max, order), Complex(kNaN, kNaN)};
        try {
          cell.product = euler_product_partial(seq, s, n_max);
        } catch (const SingularityError&) {
        }
        out.push_back(cell);
      }
    }
    return out;
  });

  CsvTable table({"seed", "replica", "sigma", "t", "N", "order", "re_zeta", "im_zeta", "abs_zeta", "re_product",
                  "im_product", "tail_bound", "warning", "re_classical", "im_classical"});
  std::vector<Complex> classical;
  for (const double sigma : sigmas) {
    for (const double t : ts) {
      Complex z(kNaN, kNaN);
      try {
        z = zeta_via_eta({sigma, t});
      } catch (const Error&) {
      }
      classical.push_back(z);
    }
  }
  for (std::uint64_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      const Cell& cell = cells[r][i];
      table.row() << c.seed() << r << cell.ev.point.sigma << cell.ev.point.t << n_max << cell.ev.order
                  << cell.ev.value.real() << cell.ev.value.imag() << std::abs(cell.ev.value) << cell.product.real()
                  << cell.product.imag() << cell.ev.tail_bound << cell.ev.warning << classical[i].real()
                  << classical[i].imag();
    }
  }
  ExperimentResult res;
  res.files.push_back(csv_file("zeta_grid.csv", table));
  // Blow-up of |zeta_N(sigma)| as sigma decreases towards 1, on the real axis.
  for (std::uint64_t r = 0; r < cells.size(); ++r) {
    std::vector<double> xs, ys;
    for (const Cell& cell : cells[r]) {
      if (cell.ev.point.t == 0.0 && cell.ev.point.sigma > 1.0) {
        xs.push_back(cell.ev.point.sigma);
        ys.push_back(std::abs(cell.ev.value));
      }
    }
    if (xs.size() >= 2) res.summary["pole_exponent.replica_" + std::to_string(r)] = format_real(fit_pole_exponent(xs, ys));
  }
  return res;
}

ExperimentResult run_critical_line(const ExperimentConfig& c) {
  CriticalLineConfig cfg;
  cfg.key = cramer_key(c.seed(), 0);
  cfg.t = c.real("critical_line.t");
  cfg.sigmas = c.real_list("critical_line.sigmas");
  cfg.cutoffs = c.u64_list("critical_line.cutoffs");
  cfg.replicas = c.replicas();
  cfg.lemma_threshold = c.real("critical_line.lemma_threshold");
  cfg.threads = c.threads();
  const CriticalLineTable tab = critical_line_scan(cfg);

  CsvTable rows({"seed", "replica", "sigma", "t", "N", "re_zeta", "im_zeta", "abs_zeta", "abs_centered_s1",
                 "var_partial", "tail_bound"});
  for (const auto& row : tab.rows) {
    rows.row() << c.seed() << row.replica << row.sigma << row.t << row.cutoff << row.zeta.real() << row.zeta.imag()
               << row.abs_zeta << row.abs_centered_s1 << row.var_partial << row.tail_bound;
  }
  CsvTable summary({"seed", "replicas", "sigma", "t", "N", "var_partial", "abs_zeta_q25", "abs_zeta_median",
                    "abs_zeta_q75", "centered_q25", "centered_median", "centered_q75", "lemma_threshold",
                    "lemma_probability"});
  for (const auto& s : tab.summary) {
    summary.row() << c.seed() << c.replicas() << s.sigma << cfg.t << s.cutoff << s.var_partial << s.abs_zeta_q25
                  << s.abs_zeta_median << s.abs_zeta_q75 << s.centered_q25 << s.centered_median << s.centered_q75
                  << cfg.lemma_threshold << s.lemma_probability;
  }
  ExperimentResult res;
  res.files.push_back(csv_file("critical_line.csv", rows));
  res.files.push_back(csv_file("critical_line_summary.csv", summary));
  return res;
}

ExperimentResult run_additive(const ExperimentConfig& c) {
  const double cc = c.real("additive.c");
  const double alpha = c.real("additive.alpha");
  const auto n_lo = c.u64("additive.n_lo");
  const auto n_hi = c.u64("additive.n_hi");
  const auto stride = c.u64("additive.row_stride");
  const ThinSequence thin = thin_sequence(cc, alpha, n_hi);
  const auto reports = parallel_map(c.replicas(), c.threads(), [&](std::size_t r) {
    const IndicatorStream ind = sample_indicators(n_hi, cramer_key(c.seed(), r));
    return representation_scan(ind, thin, n_lo, n_hi);
  });

  CsvTable rows({"seed", "replica", "c", "alpha", "n", "covered", "witness_i", "witness_j", "bound_exp",
                 "bound_product"});
  CsvTable summary({"seed", "replica", "c", "alpha", "n_lo", "n_hi", "failures", "n0"});
  ExperimentResult res;
  for (std::uint64_t r = 0; r < reports.size(); ++r) {
    const CoverageReport& rep = reports[r];
    for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
      const auto& w = rep.witnesses[n - n_lo];
      if ((n - n_lo) % stride != 0 && w) continue;
      const FailureBound fb = failure_bound(n, thin);
      std::string wi, wj;
      if (w) {
        wi = std::to_string(w->i);
        wj = std::to_string(w->j);
      }
      rows.row() << c.seed() << r << cc << alpha << n << w.has_value() << wi << wj << fb.exp_bound
                 << fb.product_bound;
    }
    const std::string n0 = rep.first_full_cover ? std::to_string(*rep.first_full_cover) : "";
    summary.row() << c.seed() << r << cc << alpha << n_lo << n_hi << static_cast<std::uint64_t>(rep.failures.size())
                  << n0;
    res.summary["n0.replica_" + std::to_string(r)] = n0.empty() ? "undefined" : n0;
  }
  // -log P(E_n) ~ c1 (ln n)^{1+eps}, fitted to both bounds on the row grid.
  std::vector<std::uint64_t> fit_n;
  std::vector<double> fit_exp, fit_product;
  for (std::uint64_t n = n_lo; n <= n_hi; n += stride) {
    const FailureBound fb = failure_bound(n, thin);
    if (fb.exp_bound > 0.0 && fb.exp_bound < 1.0 && fb.product_bound > 0.0 && fb.product_bound < 1.0) {
      fit_n.push_back(n);
      fit_exp.push_back(fb.exp_bound);
      fit_product.push_back(fb.product_bound);
    }
  }
  if (fit_n.size() >= 2) {
    const BoundFit fe = fit_failure_exponent(fit_n, fit_exp);
    const BoundFit fp = fit_failure_exponent(fit_n, fit_product);
    res.summary["bound_fit.exp.c1"] = format_real(fe.c1);
    res.summary["bound_fit.exp.eps"] = format_real(fe.eps);
    res.summary["bound_fit.product.c1"] = format_real(fp.c1);
    res.summary["bound_fit.product.eps"] = format_real(fp.eps);
  }
  res.files.push_back(csv_file("additive.csv", rows));
  res.files.push_back(csv_file("additive_summary.csv", summary));
  return res;
}

SparseSetSpec sparse_spec(const ExperimentConfig& c) {
  const std::string& preset = c.text("infinitude.preset");
  if (preset == "fibonacci") return FibonacciPreset{};
  if (preset == "mersenne") return MersenneExponentPreset{};
  if (preset == "power") {
    return PowerLogWeights{c.real("infinitude.m"), c.real("infinitude.c"), c.real("infinitude.alpha")};
  }
  return ExplicitList{c.u64_list("infinitude.values")};
}

ExperimentResult run_infinitude(const ExperimentConfig& c) {
  const std::string& preset = c.text("infinitude.preset");
  const InfinitudeTable tab =
      infinitude_experiment(sparse_spec(c), c.u64("infinitude.count"), c.replicas(),
                            StreamKey{c.seed(), kInfinitudeLabel, 0}, c.threads());
  CsvTable rows({"seed", "replica", "preset", "k", "log_x", "hits", "expected"});
  for (const auto& row : tab.rows) {
    rows.row() << c.seed() << row.replica << preset << row.k << row.log_x << row.hits << row.expected;
  }
  CsvTable summary({"seed", "replicas", "preset", "k", "mean_hits", "expected", "variance"});
  for (std::size_t k = 0; k < tab.expected.size(); ++k) {
    summary.row() << c.seed() << c.replicas() << preset << static_cast<std::uint64_t>(k + 1) << tab.mean_hits[k]
                  << tab.expected[k] << tab.variance[k];
  }
  ExperimentResult res;
  res.files.push_back(csv_file("infinitude.csv", rows));
  res.files.push_back(csv_file("infinitude_summary.csv", summary));
  return res;
}

BlockParams block_params(const ExperimentConfig& c) {
  BlockParams p;
  p.beta = c.real("symmetry.beta");
  p.k_rule = c.text("symmetry.k_rule") == "const" ? KRule::Constant : KRule::Sqrt;
  p.k0 = c.u64("symmetry.k0");
  p.n_blocks = c.u64("symmetry.n_blocks");
  return p;
}

ExperimentResult run_symmetry(const ExperimentConfig& c) {
  const BlockParams params = block_params(c);
  const ComplexPoint s{c.real("symmetry.sigma"), c.real("symmetry.t")};
  const int order = static_cast<int>(c.u64("symmetry.order"));
  const std::string& rule = c.text("symmetry.k_rule");
  const StreamKey key{c.seed(), kBlockLabel, 0};

  struct Replica {
    std::vector<SymmetricBlock> blocks;
    std::vector<BlockFirstSum> sums;
    ComplexEvaluation zeta;
    Complex product;
  };
  const auto reps = parallel_map(c.replicas(), c.threads(), [&](std::size_t r) {
    Replica rep;
    rep.blocks = build_blocks(params, key.with_replica(r));
    for (const auto& b : rep.blocks) rep.sums.push_back(block_first_sum(b, s));
    rep.zeta = tilde_zeta_partial(rep.blocks, s, order);
    rep.product = Complex(kNaN, kNaN);
    try {
      rep.product = tilde_zeta_product(rep.blocks, s);
    } catch (const SingularityError&) {
    }
    return rep;
  });

  ExperimentResult res;
  CsvTable sums({"seed", "replica", "beta", "k_rule", "sigma", "t", "n", "k", "re_exact", "im_exact", "re_predicted",
                 "im_predicted", "residual", "third_order_scale", "first_order_deviation", "first_order_scale"});
  CsvTable zeta({"seed", "replica", "beta", "k_rule", "sigma", "t", "n_blocks", "order", "re_value", "im_value",
                 "abs_value", "tail_bound", "re_product", "im_product"});
  CsvTable dump({"seed", "replica", "beta", "k_rule", "n", "A", "B", "C", "k", "xi"});
  for (std::uint64_t r = 0; r < reps.size(); ++r) {
    const Replica& rep = reps[r];
    for (std::size_t i = 0; i < rep.blocks.size(); ++i) {
      const auto& b = rep.blocks[i];
      const auto& f = rep.sums[i];
      sums.row() << c.seed() << r << params.beta << rule << s.sigma << s.t << b.index << b.k() << f.exact.real()
                 << f.exact.imag() << f.predicted.real() << f.predicted.imag() << f.residual << f.third_order_scale
                 << f.first_order_deviation << f.first_order_scale;
      if (c.flag("symmetry.dump_blocks")) {
        std::string xi;
        for (std::size_t j = 0; j < b.xi.size(); ++j) xi += (j ? ";" : "") + to_string_wide(b.xi[j]);
        dump.row() << c.seed() << r << params.beta << rule << b.index << to_string_wide(b.A) << to_string_wide(b.B)
                   << to_string_wide(b.C) << b.k() << xi;
      }
    }
    zeta.row() << c.seed() << r << params.beta << rule << s.sigma << s.t << params.n_blocks << rep.zeta.order
               << rep.zeta.value.real() << rep.zeta.value.imag() << std::abs(rep.zeta.value) << rep.zeta.tail_bound
               << rep.product.real() << rep.product.imag();
  }

  // Empirical constant in residual <= const * k B^3 / C^{3+sigma}.
  double remainder_constant = 0.0;
  for (const Replica& rep : reps) {
    for (const auto& f : rep.sums) {
      if (f.third_order_scale > 0.0) remainder_constant = std::max(remainder_constant, f.residual / f.third_order_scale);
    }
  }
  res.summary["remainder_constant"] = format_real(remainder_constant);

  std::vector<std::uint64_t> clt_ids = c.u64_list("symmetry.clt_blocks");
  if (clt_ids.empty()) clt_ids.push_back(params.n_blocks);
  std::vector<SymmetricBlock> clt_blocks;
  for (const auto id : clt_ids) clt_blocks.push_back(reps[0].blocks[id - 1]);
  const CltTable clt = clt_fluctuation_check(clt_blocks, s, c.u64("symmetry.clt_replicas"), key, c.threads());
  CsvTable clt_rows({"seed", "replica", "beta", "k_rule", "block", "k", "statistic"});
  for (const auto& row : clt.rows) {
    clt_rows.row() << c.seed() << row.replica << params.beta << rule << row.block << row.k << row.statistic;
  }
  CsvTable clt_summary({"seed", "replicas", "beta", "k_rule", "sigma", "t", "block", "k", "mean", "variance", "skew",
                        "regime_warning", "re_second_order_mean", "im_second_order_mean",
                        "re_second_order_predicted", "im_second_order_predicted"});
  for (const auto& sm : clt.summary) {
    clt_summary.row() << c.seed() << c.u64("symmetry.clt_replicas") << params.beta << rule << s.sigma << s.t
                      << sm.block << sm.k << sm.mean << sm.variance << sm.skew << sm.regime_warning
                      << sm.second_order_mean.real() << sm.second_order_mean.imag()
                      << sm.second_order_predicted.real() << sm.second_order_predicted.imag();
  }
  res.files.push_back(csv_file("block_sums.csv", sums));
  res.files.push_back(csv_file("tilde_zeta.csv", zeta));
  res.files.push_back(csv_file("clt.csv", clt_rows));
  res.files.push_back(csv_file("clt_summary.csv", clt_summary));
  if (c.flag("symmetry.dump_blocks")) res.files.push_back(csv_file("blocks.csv", dump));
  if (clt.regime_warning) res.summary["clt_warning"] = "some tested blocks have k < 30";
  return res;
}

ExperimentResult run_region_scan(const ExperimentConfig& c) {
  RegionScanConfig cfg;
  cfg.betas = c.real_list("region_scan.betas");
  cfg.eps = c.real_list("region_scan.eps");
  cfg.n_blocks = c.u64("region_scan.n_blocks");
  cfg.replicas = c.replicas();
  cfg.key = StreamKey{c.seed(), kBlockLabel, 0};
  cfg.threads = c.threads();
  const RegionTable tab = convergence_region_scan(cfg);
  CsvTable rows({"beta", "eps", "replica", "n_blocks", "checkpoint", "abs_partial", "converged_flag", "seed"});
  for (const auto& row : tab.rows) {
    rows.row() << row.beta << row.eps << row.replica << row.n_blocks << row.checkpoint << row.abs_partial
               << row.converged << c.seed();
  }
  CsvTable cells({"seed", "replicas", "n_blocks", "beta", "eps", "threshold_beta", "converged_fraction"});
  for (const auto& cell : tab.cells) {
    cells.row() << c.seed() << c.replicas() << cfg.n_blocks << cell.beta << cell.eps << 1.5 / cell.eps
                << cell.converged_fraction;
  }
  ExperimentResult res;
  res.files.push_back(csv_file("region_scan.csv", rows));
  res.files.push_back(csv_file("region_cells.csv", cells));
  res.summary["criterion"] = tab.criterion;
  res.summary["k_rule"] = "sqrt";
  return res;
}

ExperimentResult run_reference_check(const ExperimentConfig& c) {
  const double tol = c.real("reference_check.tol");
  const auto m = c.u64("reference_check.stieltjes_m");
  const int terms = static_cast<int>(c.u64("reference_check.laurent_terms"));
  const auto phi_cut = c.u64("reference_check.phi_cutoff");

  CsvTable values({"seed", "re_s", "im_s", "method", "re_val", "im_val", "err_bound"});
  CsvTable checks({"seed", "check", "re_s", "im_s", "value", "reference", "error", "tolerance", "pass"});
  std::uint64_t failed = 0;
  auto check = [&](const std::string& name, ComplexPoint s, double value, double reference, double err,
                   double tolerance) {
    const bool pass = err < tolerance;
    failed += pass ? 0 : 1;
    checks.row() << c.seed() << name << s.sigma << s.t << value << reference << err << tolerance << pass;
  };

  const ComplexPoint two{2.0, 0.0};
  const EtaValue eta2 = eta(two, tol);
  const Complex z2 = zeta_via_eta(two, tol);
  values.row() << c.seed() << 2.0 << 0.0 << "eta" << z2.real() << z2.imag()
               << eta2.error_bound / std::abs(1.0 - std::pow(2.0, -1.0));
  const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  check("zeta2", two, z2.real(), pi2_6, std::abs(z2 - pi2_6), 1e-10);

  for (const double sigma : {2.0, 3.0}) {
    const DirichletValue d = zeta_dirichlet({sigma, 0.0}, 1000);
    values.row() << c.seed() << sigma << 0.0 << "dirichlet" << d.value.real() << d.value.imag() << d.error_estimate;
  }

  // phi'(sigma) = 1 - zeta(sigma) by central differences.
  const double h = 1e-3;
  for (int i = 0; i < 10; ++i) {
    const double sigma = 1.5 + 1.5 * i / 9.0;
    const Complex dphi = (phi_with_tail({sigma + h, 0.0}, phi_cut) - phi_with_tail({sigma - h, 0.0}, phi_cut)) / (2 * h);
    const Complex expect = 1.0 - zeta_via_eta({sigma, 0.0}, tol);
    check("phi_derivative", {sigma, 0.0}, dphi.real(), expect.real(), std::abs(dphi - expect), 1e-4);
  }

  const StieltjesTable table = stieltjes_table(std::max(terms, 1), m, true);
  for (const double r : {0.05, 0.2, 0.4}) {
    for (int q = 0; q < 4; ++q) {
      const double theta = (0.25 + 0.5 * q) * std::numbers::pi;
      const ComplexPoint s{1.0 + r * std::cos(theta), r * std::sin(theta)};
      const Complex laurent = zeta_laurent(s, table, terms);
      const Complex ref = zeta_via_eta(s, tol);
      values.row() << c.seed() << s.sigma << s.t << "laurent" << laurent.real() << laurent.imag()
                   << std::abs(laurent - ref);
      check("laurent_vs_eta", s, std::abs(laurent), std::abs(ref), std::abs(laurent - ref), 1e-5);
    }
  }

  const double g0_limit = table.gamma[0];
  const double g0_raw = stieltjes_gamma(0, 1000000, false);
  const double g0_acc = stieltjes_gamma(0, 1000, true);
  check("gamma0_raw_1e6", {1.0, 0.0}, g0_raw, g0_limit, std::fabs(g0_raw - g0_limit), 1e-5);
  check("gamma0_accelerated_1e3", {1.0, 0.0}, g0_acc, g0_limit, std::fabs(g0_acc - g0_limit), 1e-5);
  check("gamma0_vs_egamma", {1.0, 0.0}, g0_limit, std::numbers::egamma, std::fabs(g0_limit - std::numbers::egamma),
        1e-10);

  ExperimentResult res;
  res.files.push_back(csv_file("reference_values.csv", values));
  res.files.push_back(csv_file("reference_checks.csv", checks));
  res.summary["checks_failed"] = std::to_string(failed);
  return res;
}

}  // namespace

StreamKey cramer_key(std::uint64_t seed, std::uint64_t replica) { return StreamKey{seed, kCramerLabel, replica}; }

ExperimentResult run_experiment(const ExperimentConfig& c) {
  const std::string& sub = c.subcommand;
  if (sub == "sample") return run_sample(c);
  if (sub == "count-stats") return run_count_stats(c);
  if (sub == "zeta-grid") return run_zeta_grid(c);
  if (sub == "critical-line") return run_critical_line(c);
  if (sub == "additive") return run_additive(c);
  if (sub == "infinitude") return run_infinitude(c);
  if (sub == "symmetry") return run_symmetry(c);
  if (sub == "region-scan") return run_region_scan(c);
  if (sub == "reference-check") return run_reference_check(c);
  throw ParameterError("subcommand '" + sub + "' does not produce a run");
}

RunManifest execute_run(const ExperimentConfig& c, std::ostream& log) {
  namespace fs = std::filesystem;
  RunManifest manifest;
  manifest.artifact_version = kArtifactVersion;
  manifest.experiment = c.subcommand;
  manifest.master_seed = c.seed();
  manifest.parameters = c.canonical();
  manifest.started_at = utc_timestamp();

  const fs::path dir(c.out_dir());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  ExperimentResult result = run_experiment(c);
  std::sort(result.files.begin(), result.files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  for (const auto& f : result.files) {
    write_file((dir / f.name).string(), f.bytes);
    manifest.outputs.push_back({f.name, sha256_hex(f.bytes), f.bytes.size(), f.rows});
    log << f.name << ": " << f.rows << " rows, sha256 " << manifest.outputs.back().sha256 << "\n";
  }
  manifest.summary = std::move(result.summary);
  for (const auto& [k, v] : manifest.summary) log << k << " = " << v << "\n";
  manifest.finished_at = utc_timestamp();
  write_file((dir / kManifestName).string(), manifest.to_json());
  return manifest;
}

}  // namespace rzlab::harness

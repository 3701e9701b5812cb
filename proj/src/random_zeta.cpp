#include "rzlab/random_zeta.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "rzlab/parallel.hpp"

namespace rzlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Per-prime expansion stops once |p^{-ms}| drops below this; the remainder is
// bounded geometrically and added to the tail bound.
constexpr double kTermCut = 1e-40;

void require_positive_sigma(ComplexPoint s, const char* who) {
  if (!s.finite()) throw ParameterError(std::string(who) + ": non-finite point");
  if (!(s.sigma > 0.0)) throw DomainError(std::string(who) + ": requires Re s > 0, got " + to_string(s));
}

}  // namespace

double log_tail_bound(double sigma, int order) {
  const double a = (order + 1) * sigma;
  if (!(a > 1.0)) return std::numeric_limits<double>::infinity();
  // sum_{p>=2} p^{-m sigma} <= 2^{-m sigma} (1 + 2/(m sigma - 1)); the bracket
  // and 1/m shrink with m, leaving a geometric series of ratio 2^{-sigma}.
  return (1.0 + 2.0 / (a - 1.0)) * std::exp2(-a) / ((order + 1) * (1.0 - std::exp2(-sigma)));
}

int default_log_order(double sigma) {
  for (int m = 1; m < kMaxLogOrder; ++m) {
    if (log_tail_bound(sigma, m) < 1e-12) return m;
  }
  return kMaxLogOrder;
}

EulerLogAccumulator::EulerLogAccumulator(ComplexPoint s, int order)
    : s_(s), order_(order), analytic_tail_(log_tail_bound(s.sigma, order)) {
  require_positive_sigma(s, "EulerLogAccumulator");
  if (order < 1 || order > kMaxLogOrder) throw ParameterError("log expansion order must lie in [1, 64]");
}

void EulerLogAccumulator::add(double log_p) {
  const Complex z = dirichlet_power(log_p, s_);
  first_sum_.add(z);
  const double az = std::abs(z);
  Complex local = 0.0;
  Complex w = z;
  for (int m = 1; m <= order_; ++m) {
    local += w / static_cast<double>(m);
    w *= z;
    if (m < order_ && std::abs(w) < kTermCut) {
      cut_tail_ += std::abs(w) / ((m + 1) * (1.0 - az));
      break;
    }
  }
  log_sum_.add(local);
}

ComplexEvaluation EulerLogAccumulator::evaluation(std::uint64_t cutoff) const {
  ComplexEvaluation ev;
  ev.point = s_;
  ev.cutoff = cutoff;
  ev.order = order_;
  ev.log_value = log_value();
  ev.value = std::exp(ev.log_value);
  ev.tail_bound = tail_bound();
  ev.warning = s_.sigma <= 0.5 && order_ > 1;
  return ev;
}

Complex s1_partial(const IndicatorStream& ind, ComplexPoint s, std::uint64_t cutoff) {
  if (cutoff < kFirstRandomIndex || cutoff > ind.n_max()) {
    throw ParameterError("s1_partial: N must lie in [4, n_max], got " + std::to_string(cutoff));
  }
  if (!s.finite()) throw ParameterError("s1_partial: non-finite point");
  CompensatedComplexSum sum;
  sum.add(dirichlet_power(std::log(3.0), s));
  for (const std::uint64_t p : ind.sequence(cutoff).elements) {
    if (p >= kFirstRandomIndex) sum.add(dirichlet_power(std::log(static_cast<double>(p)), s));
  }
  return sum.value();
}

std::vector<SeriesMoments> s1_moments_path(ComplexPoint s, std::span<const std::uint64_t> cutoffs) {
  if (!s.finite()) throw ParameterError("s1_moments: non-finite point");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 3) throw ParameterError("s1_moments: N must be >= 3");
    if (i > 0 && cutoffs[i] < cutoffs[i - 1]) throw ParameterError("s1_moments: cutoffs must be ascending");
  }
  std::vector<SeriesMoments> out;
  out.reserve(cutoffs.size());
  CompensatedComplexSum mean;
  CompensatedSum var;
  const double log3 = std::log(3.0);
  const double p3 = 1.0 / log3;
  const Complex z3 = dirichlet_power(log3, s);
  std::uint64_t n = 3;
  for (const std::uint64_t cutoff : cutoffs) {
    for (; n <= cutoff; ++n) {
      const double L = std::log(static_cast<double>(n));
      const double p = 1.0 / L;
      const Complex z = dirichlet_power(L, s);
      const double mag = std::exp(-s.sigma * L);
      mean.add(p * z);
      var.add(p * (1.0 - p) * mag * mag);
    }
    SeriesMoments m;
    m.point = s;
    m.cutoff = cutoff;
    m.mean_partial = mean.value();
    m.var_partial = var.value();
    m.model_mean_partial = m.mean_partial + (1.0 - p3) * z3;
    m.model_var_partial = m.var_partial - p3 * (1.0 - p3) * std::norm(z3);
    out.push_back(m);
  }
  return out;
}

SeriesMoments s1_moments(ComplexPoint s, std::uint64_t cutoff) {
  const std::uint64_t c[1] = {cutoff};
  return s1_moments_path(s, c).front();
}

Complex euler_product_partial(const QuasiPrimeSequence& seq, ComplexPoint s, std::uint64_t cutoff) {
  require_positive_sigma(s, "euler_product_partial");
  Complex product = 1.0;
  for (const std::uint64_t p : seq.elements) {
    if (p > cutoff) break;
    if (p < 2) throw ParameterError("euler_product_partial: elements must be >= 2");
    const Complex factor = 1.0 - dirichlet_power(std::log(static_cast<double>(p)), s);
    if (std::abs(factor) < 1e-14) {
      throw SingularityError("euler_product_partial: factor for p = " + std::to_string(p) + " vanishes at s = " +
                             to_string(s));
    }
    product /= factor;
  }
  return product;
}

ComplexEvaluation log_zeta_partial(const QuasiPrimeSequence& seq, ComplexPoint s, std::uint64_t cutoff, int order) {
  require_positive_sigma(s, "log_zeta_partial");
  if (order < 0) throw ParameterError("log_zeta_partial: order must be >= 1 (or 0 for automatic)");
  EulerLogAccumulator acc(s, order == 0 ? default_log_order(s.sigma) : order);
  for (const std::uint64_t p : seq.elements) {
    if (p > cutoff) break;
    if (p < 2) throw ParameterError("log_zeta_partial: elements must be >= 2");
    acc.add(std::log(static_cast<double>(p)));
  }
  return acc.evaluation(cutoff);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  if (lo == hi || values[lo] == values[hi]) return values[lo];
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CriticalLineTable critical_line_scan(const CriticalLineConfig& cfg) {
  if (cfg.sigmas.empty()) throw ParameterError("critical_line_scan: sigma list is empty");
  for (std::size_t i = 0; i < cfg.sigmas.size(); ++i) {
    if (!(cfg.sigmas[i] > 0.0) || !std::isfinite(cfg.sigmas[i])) {
      throw ParameterError("critical_line_scan: sigma values must be positive and finite");
    }
    if (i > 0 && !(cfg.sigmas[i] < cfg.sigmas[i - 1])) {
      throw ParameterError("critical_line_scan: sigmas must be strictly descending");
    }
  }
  if (cfg.cutoffs.empty()) throw ParameterError("critical_line_scan: cutoff list is empty");
  for (std::size_t i = 0; i < cfg.cutoffs.size(); ++i) {
    if (cfg.cutoffs[i] < kFirstRandomIndex) throw ParameterError("critical_line_scan: cutoffs must be >= 4");
    if (i > 0 && cfg.cutoffs[i] <= cfg.cutoffs[i - 1]) {
      throw ParameterError("critical_line_scan: cutoffs must be strictly ascending");
    }
  }
  if (cfg.replicas == 0) throw ParameterError("critical_line_scan: replicas must be >= 1");
  if (!std::isfinite(cfg.t)) throw ParameterError("critical_line_scan: t must be finite");

  const std::size_t ns = cfg.sigmas.size();
  const std::size_t nc = cfg.cutoffs.size();
  std::vector<ComplexPoint> points;
  std::vector<std::vector<SeriesMoments>> moments;
  for (const double sigma : cfg.sigmas) {
    points.push_back({sigma, cfg.t});
    moments.push_back(s1_moments_path(points.back(), cfg.cutoffs));
  }

  // Per replica: cell (sigma i, cutoff j) at index i * nc + j.
  auto run_replica = [&](std::size_t r) {
    std::vector<CriticalLineRow> cells(ns * nc);
    std::vector<CompensatedComplexSum> s1(ns);
    std::vector<std::optional<EulerLogAccumulator>> logs(ns);
    const double log2 = std::log(2.0);
    const double log3 = std::log(3.0);
    for (std::size_t i = 0; i < ns; ++i) {
      s1[i].add(dirichlet_power(log3, points[i]));
      if (points[i].sigma > 0.5) {
        logs[i].emplace(points[i], default_log_order(points[i].sigma));
        logs[i]->add(log2);
        logs[i]->add(log3);
      }
    }
    IndicatorSampler sampler(cfg.key.with_replica(r));
    for (std::size_t j = 0; j < nc; ++j) {
      sampler.advance_to(cfg.cutoffs[j], [&](std::uint64_t n) {
        const double L = std::log(static_cast<double>(n));
        for (std::size_t i = 0; i < ns; ++i) {
          s1[i].add(dirichlet_power(L, points[i]));
          if (logs[i]) logs[i]->add(L);
        }
      });
      for (std::size_t i = 0; i < ns; ++i) {
        CriticalLineRow& row = cells[i * nc + j];
        row.sigma = cfg.sigmas[i];
        row.t = cfg.t;
        row.cutoff = cfg.cutoffs[j];
        row.replica = r;
        row.var_partial = moments[i][j].var_partial;
        row.abs_centered_s1 = std::abs(s1[i].value() - moments[i][j].model_mean_partial);
        if (logs[i]) {
          const Complex lv = logs[i]->log_value();
          row.zeta = std::exp(lv);
          row.abs_zeta = std::exp(lv.real());
          row.tail_bound = logs[i]->tail_bound();
        } else {
          row.zeta = {kNaN, kNaN};
          row.abs_zeta = kNaN;
          row.tail_bound = kNaN;
        }
      }
    }
    return cells;
  };
  const auto per_replica = parallel_map(cfg.replicas, cfg.threads, run_replica);

  CriticalLineTable table;
  table.rows.reserve(ns * nc * cfg.replicas);
  for (std::size_t cell = 0; cell < ns * nc; ++cell) {
    std::vector<double> zetas;
    std::vector<double> centered;
    std::size_t inside = 0;
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      const CriticalLineRow& row = per_replica[r][cell];
      table.rows.push_back(row);
      if (!std::isnan(row.abs_zeta)) zetas.push_back(row.abs_zeta);
      centered.push_back(row.abs_centered_s1);
      if (row.abs_centered_s1 <= cfg.lemma_threshold) ++inside;
    }
    CriticalLineSummary sum;
    sum.sigma = cfg.sigmas[cell / nc];
    sum.cutoff = cfg.cutoffs[cell % nc];
    sum.var_partial = moments[cell / nc][cell % nc].var_partial;
    sum.abs_zeta_q25 = quantile(zetas, 0.25);
    sum.abs_zeta_median = quantile(zetas, 0.5);
    sum.abs_zeta_q75 = quantile(zetas, 0.75);
    sum.centered_q25 = quantile(centered, 0.25);
    sum.centered_median = quantile(centered, 0.5);
    sum.centered_q75 = quantile(centered, 0.75);
    sum.lemma_probability = static_cast<double>(inside) / static_cast<double>(cfg.replicas);
    table.summary.push_back(sum);
  }
  return table;
}

double fit_pole_exponent(std::span<const double> sigmas, std::span<const double> abs_values) {
  if (sigmas.size() != abs_values.size() || sigmas.size() < 2) {
    throw ParameterError("fit_pole_exponent: need at least two matched points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 1.0) || !(abs_values[i] > 0.0)) {
      throw ParameterError("fit_pole_exponent: requires sigma > 1 and positive magnitudes");
    }
    const double x = -std::log(sigmas[i] - 1.0);
    const double y = std::log(abs_values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw ParameterError("fit_pole_exponent: sigmas must be distinct");
  return (k * sxy - sx * sy) / denom;
}

}  // namespace rzlab

#include "rzlab/additive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rzlab/common.hpp"
#include "rzlab/parallel.hpp"

namespace rzlab {

namespace {

void fill_distinct(ThinSequence& thin) {
  thin.distinct.clear();
  thin.first_index.clear();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::uint64_t i = 0; i < thin.values.size(); ++i) pairs.emplace_back(thin.values[i], i);
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [v, i] : pairs) {
    if (thin.distinct.empty() || thin.distinct.back() != v) {
      thin.distinct.push_back(v);
      thin.first_index.push_back(i);
    }
  }
}

void validate_sparse_list(const std::vector<std::uint64_t>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 4) throw ParameterError("infinitude: every x_k must be >= 4");
    if (i > 0 && xs[i] <= xs[i - 1]) throw ParameterError("infinitude: x_k must be strictly increasing");
  }
}

}  // namespace

std::uint64_t ThinSequence::nu(std::uint64_t n) const {
  return static_cast<std::uint64_t>(std::count_if(values.begin(), values.end(), [n](std::uint64_t a) { return a <= n; }));
}

ThinSequence thin_sequence(double c, double alpha, std::uint64_t n_max) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("thin_sequence: c must be positive");
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw ParameterError("thin_sequence: alpha must lie in (0, 1/2) (representation theorem requires alpha < 1/2)");
  }
  if (n_max < 1) throw ParameterError("thin_sequence: n_max must be >= 1");
  ThinSequence thin;
  thin.c = c;
  thin.alpha = alpha;
  for (std::uint64_t i = 0;; ++i) {
    const double exponent = c * std::pow(static_cast<double>(i), alpha);
    if (exponent > 44.0) break;  // e^44 > 2^63
    const auto a = static_cast<std::uint64_t>(std::floor(std::exp(exponent)));
    if (a > n_max) break;
    thin.values.push_back(a);
  }
  fill_distinct(thin);
  return thin;
}

ThinSequence thin_sequence_from_values(std::vector<std::uint64_t> values) {
  ThinSequence thin;
  thin.c = 0.0;
  thin.alpha = 0.0;
  thin.values = std::move(values);
  fill_distinct(thin);
  return thin;
}

double thin_count_estimate(double c, double alpha, double n) { return std::pow(std::log(n) / c, 1.0 / alpha); }

CoverageReport representation_scan(const IndicatorStream& ind, const ThinSequence& thin, std::uint64_t n_lo,
                                   std::uint64_t n_hi) {
  if (n_lo < 4) throw ParameterError("representation_scan: n_lo must be >= 4");
  if (n_hi < n_lo) throw ParameterError("representation_scan: empty range");
  if (n_hi > ind.n_max()) {
    throw ParameterError("representation_scan: range end " + std::to_string(n_hi) + " exceeds sampled n_max " +
                         std::to_string(ind.n_max()));
  }
  CoverageReport report;
  report.n_lo = n_lo;
  report.n_hi = n_hi;
  report.witnesses.reserve(n_hi - n_lo + 1);
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
    std::optional<Representation> found;
    for (std::size_t k = 0; k < thin.distinct.size(); ++k) {
      const std::uint64_t a = thin.distinct[k];
      if (a + 2 > n) break;
      const std::uint64_t p = n - a;
      if (ind.is_quasi_prime(p)) {
        found = Representation{n, thin.first_index[k], ind.count_upto(p), a, p};
        break;
      }
    }
    if (!found) report.failures.push_back(n);
    report.witnesses.push_back(found);
  }
  if (report.failures.empty()) {
    report.first_full_cover = n_lo;
  } else if (report.failures.back() < n_hi) {
    report.first_full_cover = report.failures.back() + 1;
  }
  return report;
}

FailureBound failure_bound(std::uint64_t n, const ThinSequence& thin) {
  if (n < 4) throw ParameterError("failure_bound: n must be >= 4");
  FailureBound fb;
  fb.nu = thin.nu(n);
  const double ln_n = std::log(static_cast<double>(n));
  fb.exp_bound = std::exp(-static_cast<double>(fb.nu) / ln_n);
  CompensatedSum harmonic;
  double product = 1.0;
  for (const std::uint64_t a : thin.values) {
    if (a + 3 >= n) continue;
    const double p = 1.0 / std::log(static_cast<double>(n - a));
    harmonic.add(p);
    product *= 1.0 - p;
  }
  fb.sum_bound = std::exp(-harmonic.value());
  fb.product_bound = product;
  double exact = 1.0;
  for (const std::uint64_t a : thin.distinct) {
    if (a >= n) break;
    const std::uint64_t m = n - a;
    if (m == 2 || m == 3) {
      exact = 0.0;
      break;
    }
    if (m >= 4) exact *= 1.0 - quasi_prime_probability(m);
  }
  fb.exact = exact;
  return fb;
}

BoundFit fit_failure_exponent(const std::vector<std::uint64_t>& ns, const std::vector<double>& bounds) {
  if (ns.size() != bounds.size() || ns.size() < 2) throw ParameterError("fit_failure_exponent: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(bounds[i] > 0.0 && bounds[i] < 1.0)) throw ParameterError("fit_failure_exponent: bounds must lie in (0,1)");
    const double x = std::log(std::log(static_cast<double>(ns[i])));
    const double y = std::log(-std::log(bounds[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(ns.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / k;
  return {std::exp(intercept), slope - 1.0};
}

std::vector<double> sparse_set_logs(const SparseSetSpec& spec, std::uint64_t count) {
  std::vector<double> logs;
  struct Visitor {
    std::uint64_t count;
    std::vector<double>& logs;

    void operator()(const ExplicitList& list) const {
      validate_sparse_list(list.values);
      for (std::size_t i = 0; i < list.values.size() && logs.size() < count; ++i) {
        logs.push_back(std::log(static_cast<double>(list.values[i])));
      }
    }
    void operator()(const FibonacciPreset&) const {
      // Standard indexing F_1 = F_2 = 1; exact while F_k fits in 64 bits,
      // then ln F_k = k ln phi - ln sqrt 5 (the psi^k term is below 1e-19).
      std::uint64_t a = 1, b = 1;
      std::uint64_t k = 2;
      while (logs.size() < count) {
        ++k;
        if (k <= 93) {
          const std::uint64_t next = a + b;
          a = b;
          b = next;
          if (b >= 4) logs.push_back(std::log(static_cast<double>(b)));
        } else {
          logs.push_back(static_cast<double>(k) * std::log(std::numbers::phi) - 0.5 * std::log(5.0));
        }
      }
    }
    void operator()(const MersenneExponentPreset&) const {
      std::vector<std::uint64_t> primes;
      for (std::uint64_t q = 3; logs.size() < count; q += 2) {
        bool prime = true;
        for (const std::uint64_t d : primes) {
          if (d * d > q) break;
          if (q % d == 0) {
            prime = false;
            break;
          }
        }
        if (!prime) continue;
        primes.push_back(q);
        const double dq = static_cast<double>(q);
        logs.push_back(dq * std::numbers::ln2 + std::log1p(-std::exp2(-dq)));
      }
    }
    void operator()(const PowerLogWeights& w) const {
      if (!(w.m > 1.0) || !(w.c > 0.0) || !(w.alpha > 0.0)) {
        throw ParameterError("infinitude: power preset needs m > 1, c > 0, alpha > 0");
      }
      const double log_m = std::log(w.m);
      const double log4 = std::log(4.0);
      for (std::uint64_t i = 1; logs.size() < count; ++i) {
        const double k = std::floor(w.c * std::pow(static_cast<double>(i), w.alpha) / log_m);
        double lx = k * log_m;
        if (lx < 52.0 * std::numbers::ln2) lx = std::log(std::floor(std::pow(w.m, k)));
        if (lx < log4) continue;
        if (!logs.empty() && !(lx > logs.back())) continue;
        logs.push_back(lx);
      }
    }
  };
  std::visit(Visitor{count, logs}, spec);
  return logs;
}

InfinitudeTable infinitude_experiment(const SparseSetSpec& spec, std::uint64_t count, std::uint64_t replicas,
                                      const StreamKey& key, unsigned threads) {
  if (replicas == 0) throw ParameterError("infinitude_experiment: replicas must be >= 1");
  const std::vector<double> logs = sparse_set_logs(spec, count);
  const std::size_t K = logs.size();

  InfinitudeTable table;
  table.expected.resize(K);
  table.variance.resize(K);
  table.mean_hits.assign(K, 0.0);
  CompensatedSum expected, variance;
  for (std::size_t k = 0; k < K; ++k) {
    const double p = 1.0 / logs[k];
    expected.add(p);
    variance.add(p * (1.0 - p));
    table.expected[k] = expected.value();
    table.variance[k] = variance.value();
  }

  const auto bits = parallel_map(replicas, threads, [&](std::size_t r) {
    return sparse_membership_sample_logs(logs, key.with_replica(r));
  });
  table.rows.reserve(replicas * K);
  std::vector<std::uint64_t> totals(K, 0);
  for (std::uint64_t r = 0; r < replicas; ++r) {
    std::uint64_t hits = 0;
    for (std::size_t k = 0; k < K; ++k) {
      hits += bits[r][k];
      totals[k] += hits;
      table.rows.push_back({r, k + 1, logs[k], hits, table.expected[k]});
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    table.mean_hits[k] = static_cast<double>(totals[k]) / static_cast<double>(replicas);
  }
  return table;
}

}  // namespace rzlab

// Additive experiments on Cramér quasi-primes:
//  - representation n = A_i + p_j(omega) with the thin sequence A_i = floor(e^{c i^alpha}),
//  - the failure-probability bounds for E_n = {n has no such representation},
//  - hits of quasi-primes on sparse sets with divergent sum 1/ln x_k.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rzlab/cramer.hpp"

namespace rzlab {

struct ThinSequence {
  double c = 1.0;
  double alpha = 0.4;
  // A_0, A_1, ... <= n_max in enumeration order; may repeat for small i.
  std::vector<std::uint64_t> values;
  // Distinct values ascending, with the first index i attaining each.
  std::vector<std::uint64_t> distinct;
  std::vector<std::uint64_t> first_index;

  /// nu(n) = #{i : A_i <= n}, counting repeated values.
  [[nodiscard]] std::uint64_t nu(std::uint64_t n) const;
};

ThinSequence thin_sequence(double c, double alpha, std::uint64_t n_max);

/// Build a ThinSequence from explicit values (enumeration order).
ThinSequence thin_sequence_from_values(std::vector<std::uint64_t> values);

/// (ln n / c)^{1/alpha}: the continuous approximation of nu(n).
double thin_count_estimate(double c, double alpha, double n);

struct Representation {
  std::uint64_t n = 0;
  std::uint64_t i = 0;  // thin index (first index with that value)
  std::uint64_t j = 0;  // quasi-prime rank: p_1 = 2, p_2 = 3, ...
  std::uint64_t a = 0;  // A_i
  std::uint64_t p = 0;  // p_j
};

struct CoverageReport {
  std::uint64_t n_lo = 0;
  std::uint64_t n_hi = 0;
  std::vector<std::uint64_t> failures;
  // 1 + last failure when every later n in range is covered; n_lo when nothing
  // fails; empty when n_hi itself fails.
  std::optional<std::uint64_t> first_full_cover;
  // Witness per n in [n_lo, n_hi]; empty optional for failures.
  std::vector<std::optional<Representation>> witnesses;
};

CoverageReport representation_scan(const IndicatorStream& ind, const ThinSequence& thin, std::uint64_t n_lo,
                                   std::uint64_t n_hi);

struct FailureBound {
  std::uint64_t nu = 0;
  // exp(-nu(n) / ln n), the final bound of the proof chain.
  double exp_bound = 1.0;
  // exp(-sum_i 1/ln(n - A_i)) over i with A_i < n - 3.
  double sum_bound = 1.0;
  // prod_i (1 - 1/ln(n - A_i)) over i with A_i < n - 3, repeats included.
  double product_bound = 1.0;
  // P(E_n) for the model: over distinct A < n, zero when n - A is 2 or 3.
  double exact = 1.0;
};

FailureBound failure_bound(std::uint64_t n, const ThinSequence& thin);

/// Least-squares fit of -log P = c1 (ln n)^{1+eps} against sampled bounds.
struct BoundFit {
  double c1 = 0.0;
  double eps = 0.0;
};
BoundFit fit_failure_exponent(const std::vector<std::uint64_t>& ns, const std::vector<double>& bounds);

// Sparse sets x_1 < x_2 < ... for the infinitude experiment.
struct ExplicitList {
  std::vector<std::uint64_t> values;
};
struct FibonacciPreset {};          // Fibonacci numbers >= 4: 5, 8, 13, ...
struct MersenneExponentPreset {};  // 2^q - 1 for primes q >= 3: 7, 31, 127, ...
// x_i = m^{k_i} with k_i = floor(c i^alpha / ln m), repeats and x < 4 dropped.
struct PowerLogWeights {
  double m = 2.0;
  double c = 1.0;
  double alpha = 0.4;
};
using SparseSetSpec = std::variant<ExplicitList, FibonacciPreset, MersenneExponentPreset, PowerLogWeights>;

/// ln x_k for the first K elements (fewer for a short explicit list).
std::vector<double> sparse_set_logs(const SparseSetSpec& spec, std::uint64_t count);

struct InfinitudeRow {
  std::uint64_t replica = 0;
  std::uint64_t k = 0;
  double log_x = 0.0;
  std::uint64_t hits = 0;   // cumulative quasi-prime hits among x_1..x_k
  double expected = 0.0;    // sum_{i<=k} 1/ln x_i
};

struct InfinitudeTable {
  std::vector<InfinitudeRow> rows;  // ordered by (replica, k)
  std::vector<double> mean_hits;    // per k, averaged over replicas
  std::vector<double> expected;     // per k
  std::vector<double> variance;     // per k: sum p(1 - p), one replica
};

InfinitudeTable infinitude_experiment(const SparseSetSpec& spec, std::uint64_t count, std::uint64_t replicas,
                                      const StreamKey& key, unsigned threads = 1);

}  // namespace rzlab

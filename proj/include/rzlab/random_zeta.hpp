// Random zeta function of the Cramér model,
//   zeta(s, omega) = prod_p (1 - p^{-s})^{-1}  over p in Pi(omega),
// evaluated by truncated products and by the exponential expansion
//   log zeta = sum_{m>=1} (1/m) sum_p p^{-ms},
// together with the Bernoulli series S1' = sum_{n>=3} eps_n n^{-s} and its
// mean/variance series.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rzlab/common.hpp"
#include "rzlab/cramer.hpp"

namespace rzlab {

struct ComplexEvaluation {
  ComplexPoint point;
  std::uint64_t cutoff = 0;
  int order = 0;
  Complex value;
  Complex log_value;
  double tail_bound = 0.0;
  // Set when sigma <= 1/2 and order > 1: the higher sums are outside their
  // region of absolute convergence.
  bool warning = false;
};

struct SeriesMoments {
  ComplexPoint point;
  std::uint64_t cutoff = 0;
  // sum_{n=3}^{N} 1/(ln n n^s) and sum_{n=3}^{N} (1/ln n)(1 - 1/ln n) n^{-2 sigma}.
  Complex mean_partial;
  double var_partial = 0.0;
  // Moments of the series actually realized by s1_partial, where eps_3 = 1
  // deterministically: the n = 3 term enters with mean 3^{-s} and no variance.
  Complex model_mean_partial;
  double model_var_partial = 0.0;
};

/// Largest order accepted by log_zeta_partial.
inline constexpr int kMaxLogOrder = 64;

/// Bound on sum_{m>M} (1/m) sum_{p>=2} p^{-m sigma}, using only that every
/// prime is >= 2. Infinite when (M + 1) sigma <= 1.
double log_tail_bound(double sigma, int order);

/// Smallest order with log_tail_bound < 1e-12, capped at kMaxLogOrder.
int default_log_order(double sigma);

/// Running value of the truncated exponential expansion over a growing set of
/// primes (with multiplicity). Shared by the Cramér and block models.
class EulerLogAccumulator {
 public:
  EulerLogAccumulator(ComplexPoint s, int order);

  void add(double log_p);

  [[nodiscard]] Complex log_value() const { return log_sum_.value(); }
  [[nodiscard]] Complex first_sum() const { return first_sum_.value(); }
  [[nodiscard]] double tail_bound() const { return analytic_tail_ + cut_tail_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] ComplexEvaluation evaluation(std::uint64_t cutoff) const;

 private:
  ComplexPoint s_;
  int order_;
  double analytic_tail_;
  double cut_tail_ = 0.0;
  CompensatedComplexSum log_sum_;
  CompensatedComplexSum first_sum_;
};

/// sum_{n=3}^{N} eps_n n^{-s}, eps_3 = 1.
Complex s1_partial(const IndicatorStream& ind, ComplexPoint s, std::uint64_t cutoff);

SeriesMoments s1_moments(ComplexPoint s, std::uint64_t cutoff);

/// s1_moments at several ascending cutoffs in a single pass.
std::vector<SeriesMoments> s1_moments_path(ComplexPoint s, std::span<const std::uint64_t> cutoffs);

/// prod over p in seq, p <= N, of (1 - p^{-s})^{-1}.
Complex euler_product_partial(const QuasiPrimeSequence& seq, ComplexPoint s, std::uint64_t cutoff);

/// Truncated exponential expansion; order 0 selects default_log_order(sigma).
ComplexEvaluation log_zeta_partial(const QuasiPrimeSequence& seq, ComplexPoint s, std::uint64_t cutoff, int order = 0);

struct CriticalLineConfig {
  StreamKey key;
  double t = 0.0;
  std::vector<double> sigmas;          // strictly descending
  std::vector<std::uint64_t> cutoffs;  // strictly ascending, >= 4
  std::uint64_t replicas = 1;
  double lemma_threshold = 0.5;
  unsigned threads = 1;
};

struct CriticalLineRow {
  double sigma = 0.0;
  double t = 0.0;
  std::uint64_t cutoff = 0;
  std::uint64_t replica = 0;
  // NaN when sigma <= 1/2: only the S1' and variance columns are evaluated there.
  Complex zeta;
  double abs_zeta = 0.0;
  double abs_centered_s1 = 0.0;
  double var_partial = 0.0;
  double tail_bound = 0.0;
};

struct CriticalLineSummary {
  double sigma = 0.0;
  std::uint64_t cutoff = 0;
  double var_partial = 0.0;
  double abs_zeta_q25 = 0.0, abs_zeta_median = 0.0, abs_zeta_q75 = 0.0;
  double centered_q25 = 0.0, centered_median = 0.0, centered_q75 = 0.0;
  // Fraction of replicas with |S1' - E S1'| <= lemma_threshold.
  double lemma_probability = 0.0;
};

struct CriticalLineTable {
  std::vector<CriticalLineRow> rows;  // ordered by (sigma, cutoff, replica)
  std::vector<CriticalLineSummary> summary;
};

CriticalLineTable critical_line_scan(const CriticalLineConfig& config);

/// Least-squares slope of log|zeta| against -log(sigma - 1): the blow-up
/// exponent of |zeta_N(sigma)| as sigma decreases to 1 (1 for a simple pole).
double fit_pole_exponent(std::span<const double> sigmas, std::span<const double> abs_values);

/// Type-7 quantile of a sample (copied and sorted).
double quantile(std::vector<double> values, double q);

}  // namespace rzlab

// Cramér quasi-prime model: n >= 4 is a quasi-prime independently with
// probability 1/ln n; 2 and 3 are always included.
//
// One StreamKey fixes one realization omega. The indicator for n always comes
// from draw number (n - 4) of the key's substream, so prefixes, checkpoints and
// streaming walks all see the same omega.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rzlab/rng.hpp"

namespace rzlab {

inline constexpr std::uint64_t kFirstRandomIndex = 4;

/// Probability that n >= 4 is a quasi-prime.
inline double quasi_prime_probability(std::uint64_t n) { return 1.0 / std::log(static_cast<double>(n)); }

/// Streaming indicator generator. Visits n = 4, 5, ... in increasing order and
/// reports hits. Produces exactly the bits of sample_indicators() for the same
/// key, but without storing them.
class IndicatorSampler {
 public:
  static constexpr std::uint64_t kBlock = 4096;

  explicit IndicatorSampler(const StreamKey& key) : stream_(derive_substream(key)) {}

  /// Next n that has not been drawn yet.
  [[nodiscard]] std::uint64_t next_n() const { return next_; }

  /// Draw indicators for every n in [next_n(), n_hi]; calls on_hit(n) for each
  /// quasi-prime in increasing order.
  template <class OnHit>
  void advance_to(std::uint64_t n_hi, OnHit&& on_hit);

 private:
  RandomStream stream_;
  std::uint64_t next_ = kFirstRandomIndex;
};

template <class OnHit>
void IndicatorSampler::advance_to(std::uint64_t n_hi, OnHit&& on_hit) {
  while (next_ <= n_hi) {
    const std::uint64_t lo = next_;
    const std::uint64_t hi = std::min(n_hi, lo + kBlock - 1);
    // 1/ln n decreases in n; a two-unit margin absorbs any non-monotone
    // rounding of log() so the fast paths never disagree with the exact test.
    const std::uint64_t t_upper = bernoulli_threshold(quasi_prime_probability(lo)) + 2;
    const std::uint64_t t_exact_lo = bernoulli_threshold(quasi_prime_probability(hi));
    const std::uint64_t t_lower = t_exact_lo > 2 ? t_exact_lo - 2 : 0;
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const std::uint64_t r = stream_.at(n - kFirstRandomIndex) >> 11;
      bool hit;
      if (r < t_lower) {
        hit = true;
      } else if (r >= t_upper) {
        hit = false;
      } else {
        hit = r < bernoulli_threshold(quasi_prime_probability(n));
      }
      if (hit) on_hit(n);
    }
    stream_.discard(hi - lo + 1);
    next_ = hi + 1;
  }
}

/// Sorted quasi-primes p_1 = 2 < p_2 = 3 < p_3 < ...
struct QuasiPrimeSequence {
  std::vector<std::uint64_t> elements;
};

/// Packed indicator bits eps_4..eps_{n_max} of one realization.
class IndicatorStream {
 public:
  IndicatorStream(std::uint64_t n_max, StreamKey key, std::vector<std::uint64_t> words);

  [[nodiscard]] std::uint64_t n_max() const { return n_max_; }
  [[nodiscard]] const StreamKey& key() const { return key_; }
  [[nodiscard]] std::span<const std::uint64_t> words() const { return words_; }

  /// eps_n for 4 <= n <= n_max.
  [[nodiscard]] bool bit(std::uint64_t n) const {
    const std::uint64_t i = n - kFirstRandomIndex;
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }

  /// Membership in Pi(omega) for any n <= n_max (2 and 3 included).
  [[nodiscard]] bool is_quasi_prime(std::uint64_t n) const {
    if (n < kFirstRandomIndex) return n == 2 || n == 3;
    return bit(n);
  }

  /// Pi(n, omega): number of quasi-primes <= n.
  [[nodiscard]] std::uint64_t count_upto(std::uint64_t n) const;

  /// Elements of Pi(omega) that are <= upto (defaults to n_max).
  [[nodiscard]] QuasiPrimeSequence sequence(std::optional<std::uint64_t> upto = std::nullopt) const;

  /// Packed little-endian bytes: bit (n - 4) is bit (n - 4) % 8 of byte (n - 4) / 8.
  [[nodiscard]] std::vector<std::uint8_t> packed_bytes() const;

 private:
  std::uint64_t n_max_;
  StreamKey key_;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> rank_;  // popcount of all words before index i
};

IndicatorStream sample_indicators(std::uint64_t n_max, const StreamKey& key);

/// Raw file format: 8-byte little-endian n_max, then packed_bytes().
void write_indicator_file(const std::string& path, const IndicatorStream& ind);
IndicatorStream read_indicator_file(const std::string& path, const StreamKey& key);

/// Deterministic moments of Pi(n, omega).
struct CountMoments {
  double mean = 2.0;      // 2 + sum_{k=4}^{n} 1/ln k
  double variance = 0.0;  // sum_{k=4}^{n} (1/ln k)(1 - 1/ln k)
};

CountMoments count_moments(std::uint64_t n);

/// |pi - mean| / (B_n sqrt(2 ln ln n)); reported only for n >= 16.
std::optional<double> lil_ratio(std::uint64_t n, double pi, const CountMoments& m);

inline constexpr std::uint64_t kLilMinN = 16;

struct CountingPath {
  std::vector<std::uint64_t> n;
  std::vector<std::uint64_t> pi;
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<std::optional<double>> lil;

  [[nodiscard]] std::size_t size() const { return n.size(); }
};

CountingPath counting_path(const IndicatorStream& ind, std::span<const std::uint64_t> checkpoints);

/// Same path computed by a streaming walk of the realization (no bit storage).
CountingPath counting_path(const StreamKey& key, std::span<const std::uint64_t> checkpoints);

/// Li(n) = integral from e to n of dx / ln x.
double li(double n);

/// log P(prefix) where prefix lists every quasi-prime <= n.
double sequence_log_probability(const QuasiPrimeSequence& prefix, std::uint64_t n);

/// Independent bits with P(bit_k = 1) = 1/ln x_k, one uniform per element in
/// order. These bits share the marginal law of eps_{x_k} but are drawn from
/// their own stream: they are not the bits of a full IndicatorStream.
std::vector<std::uint8_t> sparse_membership_sample(std::span<const std::uint64_t> xs, const StreamKey& key);

/// As above, with x_k given through ln x_k (for x_k beyond 64-bit range).
std::vector<std::uint8_t> sparse_membership_sample_logs(std::span<const double> log_xs, const StreamKey& key);

}  // namespace rzlab

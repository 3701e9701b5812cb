#include "rzlab/cramer.hpp"

#include <bit>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fstream>

#include "rzlab/common.hpp"

namespace rzlab {

namespace {

std::size_t word_count(std::uint64_t n_max) { return static_cast<std::size_t>((n_max - kFirstRandomIndex) / 64 + 1); }

// Running sums for mean and variance of Pi(n); shared by count_moments() and
// counting_path() so both produce bit-identical values.
class MomentAccumulator {
 public:
  void advance_to(std::uint64_t n) {
    for (; next_ <= n; ++next_) {
      const double p = quasi_prime_probability(next_);
      mean_.add(p);
      var_.add(p * (1.0 - p));
    }
  }
  [[nodiscard]] CountMoments moments() const { return {2.0 + mean_.value(), var_.value()}; }

 private:
  std::uint64_t next_ = kFirstRandomIndex;
  CompensatedSum mean_;
  CompensatedSum var_;
};

void check_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t n_max) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const std::uint64_t c = checkpoints[i];
    if (c < kFirstRandomIndex || c > n_max) {
      throw ParameterError("counting_path: checkpoint " + std::to_string(c) + " outside [4, " +
                           std::to_string(n_max) + "]");
    }
    if (i > 0 && c < checkpoints[i - 1]) throw ParameterError("counting_path: checkpoints must be sorted");
  }
}

void push_row(CountingPath& path, std::uint64_t n, std::uint64_t pi, const CountMoments& m) {
  path.n.push_back(n);
  path.pi.push_back(pi);
  path.mean.push_back(m.mean);
  path.var.push_back(m.variance);
  path.lil.push_back(lil_ratio(n, static_cast<double>(pi), m));
}

}  // namespace

IndicatorStream::IndicatorStream(std::uint64_t n_max, StreamKey key, std::vector<std::uint64_t> words)
    : n_max_(n_max), key_(std::move(key)), words_(std::move(words)) {
  if (n_max_ < kFirstRandomIndex) throw ParameterError("IndicatorStream: n_max must be >= 4");
  if (words_.size() != word_count(n_max_)) throw ParameterError("IndicatorStream: word count mismatch");
  // Bits past n_max must be clear so popcounts stay exact.
  const std::uint64_t used = (n_max_ - kFirstRandomIndex + 1) % 64;
  if (used != 0) words_.back() &= (1ULL << used) - 1;
  rank_.resize(words_.size() + 1, 0);
  for (std::size_t i = 0; i < words_.size(); ++i) rank_[i + 1] = rank_[i] + std::popcount(words_[i]);
}

std::uint64_t IndicatorStream::count_upto(std::uint64_t n) const {
  if (n < 2) return 0;
  if (n < kFirstRandomIndex) return n == 2 ? 1 : 2;
  if (n > n_max_) throw ParameterError("count_upto: n beyond sampled range");
  const std::uint64_t i = n - kFirstRandomIndex;  // inclusive bit index
  const std::uint64_t w = i >> 6;
  const std::uint64_t b = i & 63;
  const std::uint64_t mask = b == 63 ? ~0ULL : ((1ULL << (b + 1)) - 1);
  return 2 + rank_[w] + std::popcount(words_[w] & mask);
}

QuasiPrimeSequence IndicatorStream::sequence(std::optional<std::uint64_t> upto) const {
  const std::uint64_t hi = std::min(upto.value_or(n_max_), n_max_);
  QuasiPrimeSequence seq;
  if (hi >= 2) seq.elements.push_back(2);
  if (hi >= 3) seq.elements.push_back(3);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      const std::uint64_t n = kFirstRandomIndex + 64 * w + std::countr_zero(bits);
      if (n > hi) return seq;
      seq.elements.push_back(n);
      bits &= bits - 1;
    }
  }
  return seq;
}

std::vector<std::uint8_t> IndicatorStream::packed_bytes() const {
  const std::size_t nbits = n_max_ - kFirstRandomIndex + 1;
  std::vector<std::uint8_t> out((nbits + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

IndicatorStream sample_indicators(std::uint64_t n_max, const StreamKey& key) {
  if (n_max < kFirstRandomIndex) throw ParameterError("sample_indicators: n_max must be >= 4");
  std::vector<std::uint64_t> words(word_count(n_max), 0);
  IndicatorSampler sampler(key);
  sampler.advance_to(n_max, [&](std::uint64_t n) {
    const std::uint64_t i = n - kFirstRandomIndex;
    words[i >> 6] |= 1ULL << (i & 63);
  });
  return {n_max, key, std::move(words)};
}

void write_indicator_file(const std::string& path, const IndicatorStream& ind) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open '" + path + "' for writing");
  std::uint8_t header[8];
  for (int i = 0; i < 8; ++i) header[i] = static_cast<std::uint8_t>(ind.n_max() >> (8 * i));
  out.write(reinterpret_cast<const char*>(header), 8);
  const auto bytes = ind.packed_bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParameterError("write failed for '" + path + "'");
}

IndicatorStream read_indicator_file(const std::string& path, const StreamKey& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::uint8_t header[8];
  if (!in.read(reinterpret_cast<char*>(header), 8)) throw ValidationError("truncated indicator header");
  std::uint64_t n_max = 0;
  for (int i = 0; i < 8; ++i) n_max |= static_cast<std::uint64_t>(header[i]) << (8 * i);
  if (n_max < kFirstRandomIndex) throw ValidationError("indicator file: n_max < 4");
  const std::size_t nbytes = (n_max - kFirstRandomIndex + 1 + 7) / 8;
  std::vector<std::uint8_t> bytes(nbytes);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(nbytes))) {
    throw ValidationError("indicator file: truncated body");
  }
  std::vector<std::uint64_t> words(word_count(n_max), 0);
  for (std::size_t i = 0; i < nbytes; ++i) words[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  return {n_max, key, std::move(words)};
}

CountMoments count_moments(std::uint64_t n) {
  MomentAccumulator acc;
  acc.advance_to(n);
  return acc.moments();
}

std::optional<double> lil_ratio(std::uint64_t n, double pi, const CountMoments& m) {
  if (n < kLilMinN || m.variance <= 0.0) return std::nullopt;
  const double loglog = std::log(std::log(static_cast<double>(n)));
  return std::fabs(pi - m.mean) / (std::sqrt(m.variance) * std::sqrt(2.0 * loglog));
}

CountingPath counting_path(const IndicatorStream& ind, std::span<const std::uint64_t> checkpoints) {
  check_checkpoints(checkpoints, ind.n_max());
  CountingPath path;
  MomentAccumulator acc;
  for (const std::uint64_t n : checkpoints) {
    acc.advance_to(n);
    push_row(path, n, ind.count_upto(n), acc.moments());
  }
  return path;
}

CountingPath counting_path(const StreamKey& key, std::span<const std::uint64_t> checkpoints) {
  check_checkpoints(checkpoints, checkpoints.empty() ? kFirstRandomIndex : checkpoints.back());
  CountingPath path;
  MomentAccumulator acc;
  IndicatorSampler sampler(key);
  std::uint64_t pi = 2;
  for (const std::uint64_t n : checkpoints) {
    sampler.advance_to(n, [&](std::uint64_t) { ++pi; });
    acc.advance_to(n);
    push_row(path, n, pi, acc.moments());
  }
  return path;
}

double li(double n) {
  constexpr double e = 2.718281828459045;
  if (!(n >= e)) throw DomainError("li: requires n >= e, got " + std::to_string(n));
  const double upper = std::log(n);
  if (upper <= 1.0) return 0.0;
  // x = e^u turns the integrand into e^u / u on [1, ln n].
  auto integrand = [](double u) { return std::exp(u) / u; };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 1.0, upper, 20, 1e-15);
}

double sequence_log_probability(const QuasiPrimeSequence& prefix, std::uint64_t n) {
  const auto& el = prefix.elements;
  if (n < 3) throw ValidationError("sequence_log_probability: n must be >= 3");
  if (el.size() < 2 || el[0] != 2 || el[1] != 3) {
    throw ValidationError("sequence_log_probability: prefix must start with 2, 3");
  }
  for (std::size_t i = 1; i < el.size(); ++i) {
    if (el[i] <= el[i - 1]) throw ValidationError("sequence_log_probability: prefix not strictly increasing");
  }
  if (el.back() > n) throw ValidationError("sequence_log_probability: prefix element exceeds n");

  CompensatedSum logp;
  std::size_t idx = 2;
  for (std::uint64_t k = kFirstRandomIndex; k <= n; ++k) {
    const double p = quasi_prime_probability(k);
    if (idx < el.size() && el[idx] == k) {
      logp.add(std::log(p));
      ++idx;
    } else {
      logp.add(std::log1p(-p));
    }
  }
  return logp.value();
}

std::vector<std::uint8_t> sparse_membership_sample(std::span<const std::uint64_t> xs, const StreamKey& key) {
  std::vector<double> logs;
  logs.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < kFirstRandomIndex) throw ParameterError("sparse_membership_sample: x must be >= 4");
    if (i > 0 && xs[i] <= xs[i - 1]) throw ParameterError("sparse_membership_sample: xs must be strictly increasing");
    logs.push_back(std::log(static_cast<double>(xs[i])));
  }
  return sparse_membership_sample_logs(logs, key);
}

std::vector<std::uint8_t> sparse_membership_sample_logs(std::span<const double> log_xs, const StreamKey& key) {
  const double log4 = std::log(4.0);
  for (std::size_t i = 0; i < log_xs.size(); ++i) {
    if (!(log_xs[i] >= log4)) throw ParameterError("sparse_membership_sample: x must be >= 4");
    if (i > 0 && !(log_xs[i] > log_xs[i - 1])) {
      throw ParameterError("sparse_membership_sample: xs must be strictly increasing");
    }
  }
  RandomStream stream = derive_substream(key);
  std::vector<std::uint8_t> bits;
  bits.reserve(log_xs.size());
  for (const double lx : log_xs) bits.push_back(stream.bernoulli(1.0 / lx) ? 1 : 0);
  return bits;
}

}  // namespace rzlab

#include "rzlab/rng.hpp"

#include <bit>
#include <charconv>
#include <string_view>
#include <cmath>

#include "rzlab/common.hpp"

namespace rzlab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Increments with few bit transitions give visibly correlated Weyl sequences;
// same repair as java.util.SplittableRandom.
std::uint64_t repair_increment(std::uint64_t g) {
  g |= 1ULL;
  if (std::popcount(g ^ (g >> 1)) < 24) g ^= 0xAAAAAAAAAAAAAAAAULL;
  return g;
}

}  // namespace

StreamKey StreamKey::child(const std::string& suffix) const {
  return {master_seed, label + "/" + suffix, replica};
}

StreamKey StreamKey::with_replica(std::uint64_t r) const { return {master_seed, label, r}; }

bool RandomStream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError("bernoulli: p must lie in [0,1], got " + std::to_string(p));
  }
  return uniform01() < p;
}

RandomStream derive_substream(const StreamKey& key) {
  if (key.label.empty()) throw ParameterError("derive_substream: label must be non-empty");
  std::uint64_t h = mix64(key.master_seed + kGolden);
  h = mix64(h ^ fnv1a(key.label));
  h = mix64(h + (key.replica + 1) * kGolden);
  const std::uint64_t origin = h;
  const std::uint64_t increment = repair_increment(mix64(h ^ 0xD1B54A32D192ED03ULL));
  return {origin, increment};
}

std::uint64_t bernoulli_threshold(double p) noexcept {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return 1ULL << 53;
  // p * 2^53 is exact; r < x for integer r is r < ceil(x).
  return static_cast<std::uint64_t>(std::ceil(p * 0x1.0p53));
}

std::uint64_t parse_seed(const std::string& text) {
  std::string_view sv = text;
  int base = 10;
  if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'x' || sv[1] == 'X')) {
    sv.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value, base);
  if (sv.empty() || ec != std::errc{} || ptr != sv.data() + sv.size()) {
    throw ParameterError("invalid seed '" + text + "': expected decimal or 0x-prefixed hex");
  }
  return value;
}

}  // namespace rzlab

// Deterministic splittable random streams.
//
// Every draw is a pure function of (StreamKey, draw index): the key is hashed
// into a 64-bit origin and an odd increment, and draw k is the SplitMix64
// finalizer applied to origin + (k + 1) * increment. Streams therefore never
// depend on scheduling, and any position can be reached in O(1).
#pragma once

#include <cstdint>
#include <string>

namespace rzlab {

struct StreamKey {
  std::uint64_t master_seed = 0;
  std::string label;
  std::uint64_t replica = 0;

  /// Same seed, same replica, extended label ("label/suffix").
  [[nodiscard]] StreamKey child(const std::string& suffix) const;
  [[nodiscard]] StreamKey with_replica(std::uint64_t r) const;
};

/// SplitMix64 output function (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  static constexpr double kInv53 = 0x1.0p-53;

  RandomStream(std::uint64_t origin, std::uint64_t increment) noexcept
      : origin_(origin), increment_(increment | 1ULL) {}

  /// Raw 64-bit draw; advances the counter by one.
  std::uint64_t next_u64() noexcept { return at(counter_++); }

  /// Draw number `index` without touching the counter.
  [[nodiscard]] std::uint64_t at(std::uint64_t index) const noexcept {
    return mix64(origin_ + (index + 1) * increment_);
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * kInv53; }

  /// [uniform01() < p]. Exactly one draw regardless of p.
  bool bernoulli(double p);

  void discard(std::uint64_t k) noexcept { counter_ += k; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }
  [[nodiscard]] std::uint64_t origin() const noexcept { return origin_; }
  [[nodiscard]] std::uint64_t increment() const noexcept { return increment_; }

 private:
  std::uint64_t origin_;
  std::uint64_t increment_;
  std::uint64_t counter_ = 0;
};

/// Hash (master_seed, label, replica) into a fresh stream at counter 0.
RandomStream derive_substream(const StreamKey& key);

/// Integer threshold t with (r < t) <=> (r * 2^-53 < p) for 53-bit r.
/// Used by vectorized samplers to keep the canonical uniform01() < p mapping.
std::uint64_t bernoulli_threshold(double p) noexcept;

/// Parse a master seed given as decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& text);

}  // namespace rzlab

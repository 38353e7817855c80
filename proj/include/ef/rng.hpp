#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace ef {

/// Deterministic PRNG: xoshiro256++ with splitmix64 state seeding.
/// Both algorithms are fully specified by their constants, so identical seeds
/// produce identical streams on every platform. All randomness in the library
/// flows through this type; nothing touches <random> distributions (their
/// output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }
  static constexpr std::string_view algorithm() { return "xoshiro256++ / splitmix64"; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Unbiased via rejection on the top range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool coin_flip() { return (next_u64() >> 63) != 0; }

  /// Fisher-Yates shuffle, last-to-first.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices drawn uniformly from [0, n), in draw order
  /// (partial Fisher-Yates).
  std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k);

  /// splitmix64 step: advances `state` and returns the next output word.
  static std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

/// Stable sub-stream seed derivation: hashes (base, stream, index) through the
/// splitmix64 finalizer. Used to give every example/epoch/step its own seed
/// without order dependence.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t s = base;
  (void)Rng::splitmix64(s);
  s ^= stream * 0xA24BAED4963EE407ull;
  (void)Rng::splitmix64(s);
  s ^= index * 0x9FB21C651E98DF25ull;
  return Rng::splitmix64(s);
}

/// Fixed stream tags for derive_seed, so independent consumers of one base
/// seed can never collide.
namespace seed_stream {
inline constexpr std::uint64_t kModelInit = 1;    // parameter initialization
inline constexpr std::uint64_t kShuffle = 2;      // per-epoch batch shuffling
inline constexpr std::uint64_t kAugment = 3;      // per-(epoch,example) flip/crop
inline constexpr std::uint64_t kTrainAttack = 4;  // per-(epoch,example) inner max
inline constexpr std::uint64_t kTrainEF = 5;      // per-(epoch,example) transform
inline constexpr std::uint64_t kPgdStep = 6;      // per-step defended forward
inline constexpr std::uint64_t kPgdInit = 7;      // random-start draw
inline constexpr std::uint64_t kExample = 8;      // per-example attack seeds
inline constexpr std::uint64_t kSynth = 9;        // synthetic dataset generator
}  // namespace seed_stream

inline std::vector<std::size_t> Rng::sample_distinct(std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace ef

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Counter-based splittable RNG. Every draw is a pure function of
// (key, counter), so sub-streams derived per round / per couple produce
// the same values no matter how the work is scheduled. Reproducibility
// only, not cryptography.
namespace qpa::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

  // Independent sub-stream identified by index.
  Stream child(std::uint64_t index) const {
    return Stream(mix64(key_ ^ mix64(index + kGolden)), RawKey{});
  }

  // Stateless access: draw i of this stream.
  std::uint64_t word_at(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kGolden);
  }
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(word_at(counter) >> 11) * 0x1.0p-53;
  }

  // Stateful access: successive draws walk the counter.
  std::uint64_t next_word() { return word_at(counter_++); }
  double uniform() {  // in [0, 1)
    return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) via multiply-shift.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_word()) * bound) >> 64);
  }

 private:
  struct RawKey {};
  Stream(std::uint64_t key, RawKey) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform point on the 3-simplex (flat Dirichlet) from normalized
// exponential spacings.
inline std::array<double, 4> dirichlet4(Stream& s) {
  std::array<double, 4> x{};
  double total = 0.0;
  for (auto& v : x) {
    v = -std::log1p(-s.uniform());
    total += v;
  }
  if (total <= 0.0) return {0.25, 0.25, 0.25, 0.25};
  for (auto& v : x) v /= total;
  return x;
}

}  // namespace qpa::rng

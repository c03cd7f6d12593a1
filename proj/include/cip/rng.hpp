#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace cip {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a path of integers into a child seed:
///   h = mix64(master); for each p: h = mix64(h ^ mix64(p + 0x9e3779b97f4a7c15)).
/// Every randomized stage derives its seed this way, which keeps streams
/// independent of scheduling and reproducible from the formula alone.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x9e3779b97f4a7c15ULL));
  return h;
}

// Stream tags for derive_seed.
namespace purpose {
inline constexpr std::uint64_t kGenerate = 1;
inline constexpr std::uint64_t kProbe = 2;
inline constexpr std::uint64_t kAttempt = 3;
inline constexpr std::uint64_t kSplit = 4;
inline constexpr std::uint64_t kCases = 5;
inline constexpr std::uint64_t kStudy = 6;
inline constexpr std::uint64_t kBudget = 7;
}  // namespace purpose

/// SplitMix64 generator with portable bounded draws. The standard
/// distributions are implementation-defined, so they are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do r = next();
    while (r >= limit);
    return r % n;
  }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform in [0, 1) with 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool chance(double p) { return unit() < p; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace cip

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace sgqa {

/// Deterministic generator with named substreams. Sampling helpers avoid the
/// standard distributions, whose output differs between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Independent stream keyed by `name`; the parent's state is untouched.
  Rng split(std::string_view name) const;

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// True with probability `p`.
  bool chance(double p);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(below(v.size()))];
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a; stable across platforms.
std::uint64_t stable_hash(std::string_view s);

}  // namespace sgqa

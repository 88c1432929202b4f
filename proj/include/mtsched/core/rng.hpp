#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace mts {

/// Derives an independent 64-bit seed for a named component stream.
/// Equal (root, tag, index) triples always give the same seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

/// Seeded generator used for every stochastic choice in the library.
///
/// Sampling is done with explicit bit manipulation rather than the standard
/// distributions so that a draw sequence is fully specified by the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  /// Standard normal via Box-Muller (one value per call, second discarded).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn from a probability vector by inverse CDF on one uniform.
  std::size_t categorical(std::span<const double> probs) { return pick(probs, uniform()); }

  /// Inverse-CDF lookup for a given uniform `u`; exposed so logs can be replayed.
  static std::size_t pick(std::span<const double> probs, double u);

  std::string state() const;
  void set_state(const std::string& s);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mts

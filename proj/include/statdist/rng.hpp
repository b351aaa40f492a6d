#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "statdist/common.hpp"

namespace statdist {

namespace detail {

// splitmix64 finalizer; full-avalanche mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace detail

/// Counter-based generator: output i is a pure function of (key, i), so any
/// draw can be replayed and independent substreams can be split off without
/// coordination. Not cryptographic.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Key for an independent substream. Substreams of substreams are fine.
  static std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) {
    return detail::mix64((key ^ 0xd2b74407b1ce6e93ull) +
                         detail::kGolden * detail::mix64(stream + 1));
  }

  static CounterRng substream(std::uint64_t key, std::uint64_t stream) {
    return CounterRng(derive_key(key, stream));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t at(std::uint64_t counter) const {
    return detail::mix64(key_ + detail::kGolden * (counter + 1));
  }

  std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform in [0, 1), 53 significant bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe under log().
  double next_uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_normal() {
    const double u1 = next_uniform_open();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stable key material from a double (used to make simulated evaluations at
/// an orientation independent of evaluation order).
inline std::uint64_t key_from_double(double x) {
  return detail::mix64(std::bit_cast<std::uint64_t>(x));
}

enum class BinomialSampler { Inversion, GaussianApprox };

inline const char* to_string(BinomialSampler s) {
  return s == BinomialSampler::Inversion ? "inversion" : "gaussian_approx";
}

struct BinomialDraw {
  std::uint64_t yes_count = 0;
  BinomialSampler sampler = BinomialSampler::Inversion;
};

namespace detail {

inline std::uint64_t binomial_by_inversion(CounterRng& rng, std::uint64_t n,
                                           double p) {
  // Work with q <= 1/2 so the pmf walk starts from a representable value.
  const bool flipped = p > 0.5;
  const double q = flipped ? 1.0 - p : p;
  const double u = rng.next_uniform();
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-q));
  double cdf = pmf;
  std::uint64_t k = 0;
  const double ratio = q / (1.0 - q);
  while (u > cdf && k < n) {
    ++k;
    pmf *= ratio * (static_cast<double>(n - k + 1) / static_cast<double>(k));
    cdf += pmf;
  }
  return flipped ? n - k : k;
}

inline std::uint64_t binomial_by_gaussian(CounterRng& rng, std::uint64_t n,
                                          double p) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  // Continuity correction: round the continuous draw to the nearest count.
  const double x = std::floor(mean + sd * rng.next_normal() + 0.5);
  if (x <= 0.0) return 0;
  if (x >= static_cast<double>(n)) return n;
  return static_cast<std::uint64_t>(x);
}

}  // namespace detail

/// Binomial(n, p) draw. Exact inversion below 10^3 trials, Gaussian
/// approximation with continuity correction above.
inline BinomialDraw sample_binomial(CounterRng& rng, std::uint64_t n,
                                    double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("binomial probability outside [0, 1]");
  }
  BinomialDraw draw;
  draw.sampler =
      n < 1000 ? BinomialSampler::Inversion : BinomialSampler::GaussianApprox;
  if (p == 0.0) {
    draw.yes_count = 0;
  } else if (p == 1.0) {
    draw.yes_count = n;
  } else if (draw.sampler == BinomialSampler::Inversion) {
    draw.yes_count = detail::binomial_by_inversion(rng, n, p);
  } else {
    draw.yes_count = detail::binomial_by_gaussian(rng, n, p);
  }
  return draw;
}

}  // namespace statdist

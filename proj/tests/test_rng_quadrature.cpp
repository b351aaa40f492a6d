#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "statdist/quadrature.hpp"
#include "statdist/rng.hpp"

using namespace statdist;

TEST_CASE("counter rng is a pure function of key and index", "[rng]") {
  CounterRng a(42);
  CounterRng b(42);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
  CHECK(CounterRng(42).at(57) == CounterRng(42).at(57));
  CHECK(CounterRng(42).at(57) != CounterRng(43).at(57));
  CHECK(CounterRng::derive_key(7, 1) != CounterRng::derive_key(7, 2));
  CHECK(key_from_double(0.5) == key_from_double(0.5));
  CHECK(key_from_double(0.5) != key_from_double(0.5000001));
}

TEST_CASE("uniform draws live in [0,1) and fill the range", "[rng]") {
  CounterRng rng(2024);
  double lo = 1.0;
  double hi = 0.0;
  double sum = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
  CHECK(std::abs(sum / draws - 0.5) < 0.01);
}

TEST_CASE("normal draws have unit variance and zero mean", "[rng]") {
  CounterRng rng(99);
  double sum = 0.0;
  double sum2 = 0.0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / draws;
  const double var = sum2 / draws - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("binomial sampling is deterministic and well calibrated", "[rng]") {
  const auto draw_once = [](std::uint64_t key, std::uint64_t n, double p) {
    CounterRng rng(key);
    return sample_binomial(rng, n, p);
  };
  CHECK(draw_once(7, 50, 0.0).yes_count == 0);
  CHECK(draw_once(7, 50, 1.0).yes_count == 50);
  CHECK(draw_once(7, 500, 0.3).sampler == BinomialSampler::Inversion);
  CHECK(draw_once(7, 2000, 0.3).sampler == BinomialSampler::GaussianApprox);
  CHECK(draw_once(7, 2000, 0.3).yes_count == draw_once(7, 2000, 0.3).yes_count);
  CHECK(draw_once(7, 500, 0.3).yes_count == draw_once(7, 500, 0.3).yes_count);
  CHECK_THROWS_AS(draw_once(7, 10, 1.5), ValidationError);

  for (const std::uint64_t n : {400ULL, 5000ULL}) {
    double sum = 0.0;
    double sum2 = 0.0;
    const int reps = 3000;
    for (int r = 0; r < reps; ++r) {
      const auto draw = draw_once(CounterRng::derive_key(1234, r), n, 0.3);
      REQUIRE(draw.yes_count <= n);
      const double x = static_cast<double>(draw.yes_count);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    const double expect_mean = 0.3 * static_cast<double>(n);
    const double expect_var = 0.21 * static_cast<double>(n);
    CHECK(std::abs(mean - expect_mean) < 4.0 * std::sqrt(expect_var / reps));
    CHECK(std::abs(var / expect_var - 1.0) < 0.15);
  }
}

TEST_CASE("adaptive simpson integrates smooth functions", "[quadrature]") {
  const auto cube = adaptive_simpson(
      [](double x) { return x * x; }, 0.0, 1.0);
  CHECK(cube.converged);
  CHECK(std::abs(cube.value - 1.0 / 3.0) < 1e-12);

  const auto sine = adaptive_simpson(
      [](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(sine.converged);
  CHECK(std::abs(sine.value - 2.0) < 1e-9);
  CHECK(sine.evaluations > 4);

  const auto empty = adaptive_simpson(
      [](double x) { return std::exp(x); }, 0.7, 0.7);
  CHECK(empty.value == 0.0);
}

TEST_CASE("derivative of a full oscillation integrates to zero",
          "[quadrature]") {
  const auto result = adaptive_simpson(
      [](double t) { return -std::sin(2.0 * t); }, 0.0, kPi);
  CHECK(std::abs(result.value) < 1e-9);
}

TEST_CASE("non-finite integrands are rejected", "[quadrature]") {
  CHECK_THROWS_AS(adaptive_simpson(
                      [](double x) { return 1.0 / x; }, -1.0, 1.0),
                  NumericError);
}

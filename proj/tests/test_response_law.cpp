#include <cmath>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "statdist/response_law.hpp"
#include "test_helpers.hpp"

using namespace statdist;
using laws::ResponseLaw;

TEST_CASE("cos^2 law evaluates probabilities and slopes", "[law]") {
  const auto law = ResponseLaw::cosine_squared();
  CHECK(law.kind() == laws::LawKind::CosineSquared);
  CHECK(law.domain_lo() == 0.0);
  CHECK(law.domain_hi() == kHalfPi);
  CHECK(law.probability(0.0) == 1.0);
  CHECK(std::abs(law.probability(kPi / 4.0) - 0.5) < 1e-15);
  CHECK(law.probability(kHalfPi) < 1e-15);
  CHECK(std::abs(law.variance_at(kPi / 4.0) - 0.25) < 1e-15);
  // d/dtheta cos^2(theta) = -sin(2 theta); at 0.6 that is -0.93203908596722635.
  const auto slope = law.derivative(0.6);
  CHECK_FALSE(slope.one_sided);
  CHECK(std::abs(slope.value - (-0.93203908596722635)) < 1e-12);
  CHECK_THROWS_AS(law.probability(-0.1), ValidationError);
  CHECK_THROWS_AS(law.probability(2.0), ValidationError);
}

TEST_CASE("scaled cos^2 law clips its domain to one monotone branch",
          "[law]") {
  const auto law = ResponseLaw::cosine_squared_scaled(2.0);
  CHECK(law.frequency().has_value());
  CHECK(law.frequency().value() == 2.0);
  CHECK(std::abs(law.domain_hi() - kPi / 4.0) < 1e-15);
  CHECK(std::abs(law.probability(kPi / 8.0) - 0.5) < 1e-15);

  const auto wide = ResponseLaw::cosine_squared_scaled(0.5);
  CHECK(wide.domain_hi() == kHalfPi);

  CHECK_THROWS_AS(ResponseLaw::cosine_squared_scaled(0.0), ValidationError);
  CHECK_THROWS_AS(ResponseLaw::cosine_squared_scaled(-1.0), ValidationError);
}

TEST_CASE("tabulated law interpolates and differentiates", "[law]") {
  const auto law = ResponseLaw::tabulated(
      {{0.0, 1.0}, {0.5, 0.8}, {1.0, 0.3}, {1.5, 0.1}});
  CHECK(law.kind() == laws::LawKind::Tabulated);
  CHECK_FALSE(law.frequency().has_value());
  CHECK(law.domain_hi() == 1.5);
  CHECK(std::abs(law.probability(0.25) - 0.9) < 1e-12);
  CHECK(std::abs(law.probability(0.75) - 0.55) < 1e-12);

  const auto mid = law.derivative(0.25);
  CHECK_FALSE(mid.one_sided);
  CHECK(std::abs(mid.value - (-0.4)) < 1e-9);
  CHECK(law.derivative(0.0).one_sided);
  CHECK(law.derivative(1.5).one_sided);

  CHECK(law.monotonicity() == laws::Monotonicity::Decreasing);
  const auto segments = law.monotone_segments(0.0, 1.5);
  REQUIRE(segments.size() == 1);
}

TEST_CASE("tabulated law validation names the offending sample", "[law]") {
  using laws::LawSample;
  CHECK_THROWS_AS(ResponseLaw::tabulated({{0.0, 1.0}, {1.0, 0.5}}),
                  ValidationError);
  CHECK_THROWS_WITH(
      ResponseLaw::tabulated({{0.0, 1.0}, {0.5, 0.8}, {0.4, 0.5}}),
      Catch::Matchers::ContainsSubstring("sample 2"));
  CHECK_THROWS_WITH(
      ResponseLaw::tabulated({{0.0, 1.0}, {0.5, 1.2}, {1.0, 0.5}}),
      Catch::Matchers::ContainsSubstring("sample 1"));
  CHECK_THROWS_AS(
      ResponseLaw::tabulated({{0.0, 1.0}, {0.5, 0.8}, {2.0, 0.5}}),
      ValidationError);
}

TEST_CASE("dense table reproduces the analytic slope", "[law]") {
  const auto law = testutil::dense_cos2_table(1e-5);
  // -sin(0.6) = -0.56464247339503536 is d/dtheta cos^2 at theta = 0.3.
  CHECK(std::abs(law.derivative(0.3).value - (-0.56464247339503536)) < 2e-5);
  CHECK(std::abs(law.probability(0.3) - 0.91266780745483915) < 1e-9);
}

TEST_CASE("inverse probability finds the orientation", "[law]") {
  const auto cos2 = ResponseLaw::cosine_squared();
  // cos^2(theta) = 0.25 at theta = pi/3.
  CHECK(std::abs(cos2.inverse_probability(0.25) - kPi / 3.0) < 1e-12);
  CHECK(cos2.inverse_probability(1.0) == 0.0);
  CHECK(std::abs(cos2.inverse_probability(0.0) - kHalfPi) < 1e-12);
  CHECK_THROWS_AS(cos2.inverse_probability(1.5), ValidationError);

  const auto table = ResponseLaw::tabulated(
      {{0.0, 1.0}, {0.5, 0.8}, {1.0, 0.3}, {1.5, 0.1}});
  CHECK(std::abs(table.inverse_probability(0.55) - 0.75) < 1e-9);
  CHECK(std::abs(table.probability(table.inverse_probability(0.42)) - 0.42) <
        1e-9);

  const auto vee = ResponseLaw::tabulated(
      {{0.0, 0.9}, {0.75, 0.1}, {1.5, 0.8}});
  CHECK(vee.monotonicity() == laws::Monotonicity::Piecewise);
  CHECK(vee.monotone_segments(0.0, 1.5).size() == 2);
  CHECK_THROWS_AS(vee.inverse_probability(0.5), ValidationError);
}

TEST_CASE("law tables load from csv and reject malformed rows", "[law]") {
  const auto law =
      ResponseLaw::tabulated_from_csv(testutil::data_path("coarse_table.csv"));
  REQUIRE(law.samples().size() == 4);
  CHECK(law.samples()[1].theta == 0.5);
  CHECK(law.samples()[1].p == 0.8);

  CHECK_THROWS_WITH(
      ResponseLaw::tabulated_from_csv(testutil::data_path("bad_table.csv")),
      Catch::Matchers::ContainsSubstring("row 3") &&
          Catch::Matchers::ContainsSubstring("bad_table.csv"));
  CHECK_THROWS_AS(ResponseLaw::tabulated_from_csv("no_such_file.csv"),
                  ValidationError);

  const auto path = testutil::temp_path("statdist_law_roundtrip.csv");
  {
    std::ofstream out(path);
    out << "theta,p\n";
    for (const auto& s : law.samples()) {
      out << format_double(s.theta) << "," << format_double(s.p) << "\n";
    }
  }
  const auto reloaded = ResponseLaw::tabulated_from_csv(path);
  REQUIRE(reloaded.samples().size() == law.samples().size());
  for (std::size_t i = 0; i < law.samples().size(); ++i) {
    CHECK(reloaded.samples()[i].theta == law.samples()[i].theta);
    CHECK(reloaded.samples()[i].p == law.samples()[i].p);
  }
}

TEST_CASE("probability pairs stay consistent near the edges", "[law]") {
  const auto law = testutil::dense_cos2_table(1e-4);
  for (const double theta : {1e-4, 1e-3, 0.3, 1.2, kHalfPi - 1e-3}) {
    const auto pair = law.probability_pair(theta);
    CHECK(pair.p >= 0.0);
    CHECK(pair.q >= 0.0);
    CHECK(std::abs(pair.p + pair.q - 1.0) < 1e-12);
    CHECK(pair.variance() >= 0.0);
  }
  // Complement interpolation keeps q accurate where p is within ulps of 1:
  // q(1e-4) = sin^2(1e-4) ~ 1e-8 must not drown in cancellation noise.
  const double q_small = law.probability_pair(1e-4).q;
  CHECK(q_small > 0.0);
  CHECK(std::abs(q_small / 1e-8 - 1.0) < 0.01);
}

#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "statdist/common.hpp"

namespace statdist::laws {

enum class LawKind { CosineSquared, CosineSquaredScaled, Tabulated };

enum class Monotonicity { Decreasing, Increasing, Piecewise, Constant };

inline const char* to_string(LawKind k) {
  switch (k) {
    case LawKind::CosineSquared: return "cos2";
    case LawKind::CosineSquaredScaled: return "cos2_scaled";
    default: return "table";
  }
}

/// p and its complement, each computed without cancellation. Near p = 1 the
/// naive 1 - p loses every significant digit of q, and the variance p(1-p)
/// with it; everything downstream that divides by sqrt(p(1-p)) cares.
struct ProbabilityPair {
  double p = 0.0;
  double q = 0.0;

  double variance() const { return p * q; }
};

struct Slope {
  double value = 0.0;
  bool one_sided = false;
};

struct LawSample {
  double theta = 0.0;
  double p = 0.0;
};

/// Probability law of a two-outcome device as the orientation varies:
/// theta -> P(yes). Analytic cosine-squared laws and tabulated laws with
/// linear interpolation share one interface.
class ResponseLaw {
public:
  static ResponseLaw cosine_squared() {
    auto impl = std::make_shared<Impl>();
    impl->kind = LawKind::CosineSquared;
    impl->w = 1.0;
    impl->lo = 0.0;
    impl->hi = kHalfPi;
    return ResponseLaw(std::move(impl));
  }

  /// cos^2(w * theta), restricted to where it is one-to-one.
  static ResponseLaw cosine_squared_scaled(double w) {
    if (!std::isfinite(w) || w <= 0.0) {
      throw ValidationError("law frequency must be finite and positive");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = LawKind::CosineSquaredScaled;
    impl->w = w;
    impl->lo = 0.0;
    impl->hi = std::min(kHalfPi, kPi / (2.0 * w));
    return ResponseLaw(std::move(impl));
  }

  static ResponseLaw tabulated(std::vector<LawSample> samples) {
    auto impl = std::make_shared<Impl>();
    impl->kind = LawKind::Tabulated;
    impl->samples = std::move(samples);
    validate_samples(impl->samples);
    impl->lo = impl->samples.front().theta;
    impl->hi = impl->samples.back().theta;
    impl->complements.reserve(impl->samples.size());
    for (const auto& s : impl->samples) {
      impl->complements.push_back(1.0 - s.p);
    }
    return ResponseLaw(std::move(impl));
  }

  /// Columns `theta,p`, one sample per row, thetas strictly increasing.
  static ResponseLaw tabulated_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw ValidationError("cannot open law table '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
      throw ValidationError("law table '" + path + "' is empty");
    }
    if (trim(line) != "theta,p") {
      throw ValidationError("law table '" + path +
                            "': expected header 'theta,p'");
    }
    std::vector<LawSample> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto comma = t.find(',');
      if (comma == std::string::npos) {
        throw ValidationError("law table '" + path + "' row " +
                              std::to_string(row) + ": expected 'theta,p'");
      }
      LawSample s;
      s.theta = parse_field(t.substr(0, comma), path, row);
      s.p = parse_field(t.substr(comma + 1), path, row);
      samples.push_back(s);
    }
    return tabulated(std::move(samples));
  }

  LawKind kind() const { return impl_->kind; }

  /// Frequency of the cosine-squared family; tabulated laws have none.
  std::optional<double> frequency() const {
    if (impl_->kind == LawKind::Tabulated) return std::nullopt;
    return impl_->w;
  }

  double domain_lo() const { return impl_->lo; }
  double domain_hi() const { return impl_->hi; }

  bool contains(double theta) const {
    return theta >= impl_->lo && theta <= impl_->hi;
  }

  std::string describe() const {
    switch (impl_->kind) {
      case LawKind::CosineSquared:
        return "cos2";
      case LawKind::CosineSquaredScaled:
        return "cos2:w=" + format_double(impl_->w);
      default:
        return "table(" + std::to_string(impl_->samples.size()) + " samples)";
    }
  }

  double probability(double theta) const { return probability_pair(theta).p; }

  ProbabilityPair probability_pair(double theta) const {
    require_contains(theta);
    ProbabilityPair pr;
    if (impl_->kind == LawKind::Tabulated) {
      const auto [i, t] = locate(theta);
      const auto& s = impl_->samples;
      pr.p = s[i].p + t * (s[i + 1].p - s[i].p);
      pr.q = impl_->complements[i] +
             t * (impl_->complements[i + 1] - impl_->complements[i]);
    } else {
      const double c = std::cos(impl_->w * theta);
      const double sn = std::sin(impl_->w * theta);
      pr.p = c * c;
      pr.q = sn * sn;
    }
    return pr;
  }

  /// p(1-p), stable near both ends of the probability range.
  double variance_at(double theta) const {
    require_contains(theta);
    if (impl_->kind != LawKind::Tabulated) {
      const double s = 0.5 * std::sin(2.0 * impl_->w * theta);
      return s * s;
    }
    return probability_pair(theta).variance();
  }

  /// dp/dtheta; analytic for the cosine family, finite differences for
  /// tabulated laws (one-sided at the domain ends).
  Slope derivative(double theta) const {
    require_contains(theta);
    Slope slope;
    if (impl_->kind != LawKind::Tabulated) {
      slope.value = -impl_->w * std::sin(2.0 * impl_->w * theta);
      return slope;
    }
    const double h = 1e-6 * (impl_->hi - impl_->lo);
    const bool room_below = theta - h >= impl_->lo;
    const bool room_above = theta + h <= impl_->hi;
    if (room_below && room_above) {
      slope.value =
          (probability(theta + h) - probability(theta - h)) / (2.0 * h);
    } else if (room_above) {
      slope.value = (probability(theta + h) - probability(theta)) / h;
      slope.one_sided = true;
    } else {
      slope.value = (probability(theta) - probability(theta - h)) / h;
      slope.one_sided = true;
    }
    return slope;
  }

  /// Orientation at which the law takes probability p. Analytic for the
  /// cosine family; bisection for tabulated laws, which must be monotone.
  double inverse_probability(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("probability " + format_double(p) +
                            " outside [0, 1]");
    }
    if (impl_->kind != LawKind::Tabulated) {
      const double theta = std::acos(std::sqrt(p)) / impl_->w;
      if (theta > impl_->hi + kAngleEpsilon) {
        throw ValidationError("probability " + format_double(p) +
                              " below the law's range");
      }
      return std::clamp(theta, impl_->lo, impl_->hi);
    }
    const Monotonicity m = monotonicity();
    if (m == Monotonicity::Piecewise || m == Monotonicity::Constant) {
      throw ValidationError("law is not invertible: " +
                            std::string(m == Monotonicity::Constant
                                            ? "constant"
                                            : "not monotone"));
    }
    const double p_lo = impl_->samples.front().p;
    const double p_hi = impl_->samples.back().p;
    if (p < std::min(p_lo, p_hi) || p > std::max(p_lo, p_hi)) {
      throw ValidationError("probability " + format_double(p) +
                            " outside the law's range [" +
                            format_double(std::min(p_lo, p_hi)) + ", " +
                            format_double(std::max(p_lo, p_hi)) + "]");
    }
    double lo = impl_->lo;
    double hi = impl_->hi;
    const double sign = m == Monotonicity::Increasing ? 1.0 : -1.0;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (sign * (probability(mid) - p) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  Monotonicity monotonicity() const {
    if (impl_->kind != LawKind::Tabulated) return Monotonicity::Decreasing;
    bool up = false;
    bool down = false;
    const auto& s = impl_->samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i + 1].p > s[i].p) up = true;
      if (s[i + 1].p < s[i].p) down = true;
    }
    if (up && down) return Monotonicity::Piecewise;
    if (up) return Monotonicity::Increasing;
    if (down) return Monotonicity::Decreasing;
    return Monotonicity::Constant;
  }

  /// Partition of [lo, hi] into maximal intervals on which the law is
  /// monotone. Flat stretches attach to the running segment.
  std::vector<std::pair<double, double>> monotone_segments(double lo,
                                                           double hi) const {
    if (!(lo <= hi)) {
      throw ValidationError("segment bounds out of order");
    }
    require_contains(lo);
    require_contains(hi);
    if (impl_->kind != LawKind::Tabulated) {
      return {{lo, hi}};
    }
    std::vector<std::pair<double, double>> segments;
    double start = lo;
    int sign = 0;
    const auto& s = impl_->samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i + 1].theta <= lo || s[i].theta >= hi) continue;
      const double dp = s[i + 1].p - s[i].p;
      const int step = dp > 0.0 ? 1 : dp < 0.0 ? -1 : 0;
      if (step == 0) continue;
      if (sign != 0 && step != sign && s[i].theta > start) {
        segments.emplace_back(start, s[i].theta);
        start = s[i].theta;
      }
      sign = step;
    }
    segments.emplace_back(start, hi);
    return segments;
  }

  /// Empty for the cosine family.
  const std::vector<LawSample>& samples() const { return impl_->samples; }

  friend bool operator==(const ResponseLaw& a, const ResponseLaw& b) {
    return a.impl_ == b.impl_;
  }

private:
  struct Impl {
    LawKind kind = LawKind::CosineSquared;
    double w = 1.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<LawSample> samples;
    std::vector<double> complements;
  };

  explicit ResponseLaw(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}

  void require_contains(double theta) const {
    if (!std::isfinite(theta)) {
      throw ValidationError("orientation must be finite");
    }
    if (!contains(theta)) {
      throw ValidationError("orientation " + format_double(theta) +
                            " outside the law domain [" +
                            format_double(impl_->lo) + ", " +
                            format_double(impl_->hi) + "]");
    }
  }

  /// Index of the knot interval holding theta and the interpolation weight.
  std::pair<std::size_t, double> locate(double theta) const {
    const auto& s = impl_->samples;
    std::size_t lo = 0;
    std::size_t hi = s.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (s[mid].theta <= theta) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double span = s[lo + 1].theta - s[lo].theta;
    return {lo, (theta - s[lo].theta) / span};
  }

  static void validate_samples(const std::vector<LawSample>& samples) {
    if (samples.size() < 3) {
      throw ValidationError("law table needs at least three samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      if (!std::isfinite(s.theta) || s.theta < 0.0 || s.theta > kHalfPi) {
        throw ValidationError("sample " + std::to_string(i) +
                              ": theta outside [0, pi/2]");
      }
      if (!std::isfinite(s.p) || s.p < 0.0 || s.p > 1.0) {
        throw ValidationError("sample " + std::to_string(i) +
                              ": probability outside [0, 1]");
      }
      if (i > 0 && samples[i - 1].theta >= s.theta) {
        throw ValidationError("sample " + std::to_string(i) +
                              ": thetas must be strictly increasing");
      }
    }
  }

  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
  }

  static double parse_field(const std::string& field, const std::string& path,
                            std::size_t row) {
    const std::string t = trim(field);
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("law table '" + path + "' row " +
                            std::to_string(row) + ": bad number '" + t + "'");
    }
  }

  std::shared_ptr<const Impl> impl_;
};

}  // namespace statdist::laws

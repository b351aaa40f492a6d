#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "statdist/common.hpp"
#include "statdist/quadrature.hpp"
#include "statdist/response_law.hpp"

namespace statdist::core {

class DiscreteDistribution {
public:
  explicit DiscreteDistribution(std::vector<double> probabilities)
      : p_(std::move(probabilities)) {
    if (p_.empty()) {
      throw ValidationError("distribution needs at least one outcome");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (!std::isfinite(p_[i]) || p_[i] < 0.0) {
        throw ValidationError("outcome " + std::to_string(i) +
                              " has invalid probability " +
                              format_double(p_[i]));
      }
      sum += p_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("outcome probabilities sum to " +
                            format_double(sum) + ", not 1");
    }
  }

  static DiscreteDistribution bernoulli(const laws::ProbabilityPair& pair) {
    return DiscreteDistribution({pair.p, pair.q});
  }

  static DiscreteDistribution bernoulli(double p) {
    return DiscreteDistribution({p, 1.0 - p});
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }

private:
  std::vector<double> p_;
};

enum class DistanceMethod { Quadrature, ClosedForm, Counting, Hilbert };

inline const char* to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::Quadrature: return "quadrature";
    case DistanceMethod::ClosedForm: return "closed_form";
    case DistanceMethod::Counting: return "counting";
    default: return "hilbert";
  }
}

struct DistanceDiagnostics {
  double error_estimate = 0.0;
  double integrand_min = 0.0;
  double integrand_max = 0.0;
  std::uint64_t evaluations = 0;
};

struct DistanceReport {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::Quadrature;
  DistanceDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

namespace detail {

/// A law whose probability sticks at 0 or 1 over an interval carries no
/// orientation information there; distances across such a segment are
/// undefined. Piecewise-linear laws make the check exact.
inline void require_identifiable(const laws::ResponseLaw& law, double lo,
                                 double hi) {
  if (law.kind() != laws::LawKind::Tabulated) return;
  const auto& s = law.samples();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i + 1].theta <= lo || s[i].theta >= hi) continue;
    const bool flat_zero = s[i].p == 0.0 && s[i + 1].p == 0.0;
    const bool flat_one = s[i].p == 1.0 && s[i + 1].p == 1.0;
    if (flat_zero || flat_one) {
      throw NumericError("law is not identifiable on [" +
                         format_double(std::max(s[i].theta, lo)) + ", " +
                         format_double(std::min(s[i + 1].theta, hi)) +
                         "]: p(1-p) vanishes on an interval");
    }
  }
}

/// Clip for the substituted integration variable; keeps evaluations off the
/// exact segment endpoints where p(1-p) can round to zero.
inline constexpr double kSubstitutionClip = 1e-7;

}  // namespace detail

/// Statistical distance ("distinguishability per sqrt-trial"): the integral
/// of |dp/dtheta| / (2 sqrt(p(1-p))) between the two orientations. Each
/// monotone segment is integrated under the substitution
/// theta = a + (b-a) sin^2(u), whose Jacobian absorbs the inverse-square-root
/// endpoint singularities where p reaches 0 or 1.
inline DistanceReport statistical_distance(const laws::ResponseLaw& law,
                                           double theta1, double theta2) {
  const double lo = std::min(theta1, theta2);
  const double hi = std::max(theta1, theta2);
  DistanceReport report;
  report.method = DistanceMethod::Quadrature;
  if (lo == hi) {
    law.probability(lo);
    return report;
  }
  detail::require_identifiable(law, lo, hi);
  double raw_min = std::numeric_limits<double>::infinity();
  double raw_max = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : law.monotone_segments(lo, hi)) {
    if (a == b) continue;
    const auto transformed = [&](double u) {
      const double uc = std::clamp(u, detail::kSubstitutionClip,
                                   kHalfPi - detail::kSubstitutionClip);
      const double su = std::sin(uc);
      const double cu = std::cos(uc);
      const double theta = std::clamp(a + (b - a) * su * su, a, b);
      const double variance = law.variance_at(theta);
      if (variance <= 0.0) {
        throw NumericError("p(1-p) vanishes at theta=" + format_double(theta) +
                           " inside the integration range");
      }
      const double f =
          std::abs(law.derivative(theta).value) / (2.0 * std::sqrt(variance));
      raw_min = std::min(raw_min, f);
      raw_max = std::max(raw_max, f);
      return f * (b - a) * 2.0 * su * cu;
    };
    const QuadratureResult q = adaptive_simpson(transformed, 0.0, kHalfPi);
    report.value += q.value;
    report.diagnostics.error_estimate += q.error_estimate;
    report.diagnostics.evaluations += q.evaluations;
    if (!q.converged) {
      report.warnings.push_back("quadrature hit the depth limit on [" +
                                format_double(a) + ", " + format_double(b) +
                                "]");
    }
  }
  if (report.diagnostics.evaluations > 0) {
    report.diagnostics.integrand_min = raw_min;
    report.diagnostics.integrand_max = raw_max;
  }
  return report;
}

/// arcsin(sqrt(p)) computed so that neither p near 0 nor p near 1 loses
/// precision.
inline double angle_coordinate(const laws::ProbabilityPair& pair) {
  return std::atan2(std::sqrt(pair.p), std::sqrt(pair.q));
}

/// Antiderivative route: d/dtheta arcsin(sqrt(p)) = p' / (2 sqrt(p(1-p))),
/// so the distance telescopes to endpoint differences over monotone
/// segments. Independent of the quadrature path.
inline DistanceReport closed_form_distance(const laws::ResponseLaw& law,
                                           double theta1, double theta2) {
  const double lo = std::min(theta1, theta2);
  const double hi = std::max(theta1, theta2);
  DistanceReport report;
  report.method = DistanceMethod::ClosedForm;
  if (lo == hi) {
    law.probability(lo);
    return report;
  }
  std::vector<std::pair<double, double>> segments;
  try {
    segments = law.monotone_segments(lo, hi);
  } catch (const NumericError& e) {
    DistanceReport fallback = statistical_distance(law, lo, hi);
    fallback.warnings.push_back(std::string("monotone segmentation failed (") +
                                e.what() + "); fell back to quadrature");
    return fallback;
  }
  for (const auto& [a, b] : segments) {
    report.value += std::abs(angle_coordinate(law.probability_pair(b)) -
                             angle_coordinate(law.probability_pair(a)));
    report.diagnostics.evaluations += 2;
  }
  return report;
}

struct ProportionalityReport {
  bool proportional = false;
  /// Ratio of statistical distance to angular separation when proportional:
  /// mean of |p'| / sqrt(p(1-p)) over the grid, divided by 2.
  double constant = 0.0;
  double max_relative_deviation = 0.0;
  std::size_t grid_points = 0;
  std::size_t excluded_points = 0;
};

/// Does |dp/dtheta| stay proportional to sqrt(p(1-p)) across the domain?
/// Exactly the laws with this property have statistical distance linear in
/// the angle, and cos^2(w theta) is the family that realizes it.
inline ProportionalityReport check_proportionality(
    const laws::ResponseLaw& law) {
  constexpr double kStep = 1e-3;
  const double lo = law.domain_lo();
  const double hi = law.domain_hi();
  std::vector<double> ratios;
  std::size_t excluded = 0;
  for (std::size_t i = 1;; ++i) {
    const double theta = lo + static_cast<double>(i) * kStep;
    if (theta >= hi) break;
    const double variance = law.variance_at(theta);
    if (variance == 0.0) {
      ++excluded;
      continue;
    }
    ratios.push_back(std::abs(law.derivative(theta).value) /
                     std::sqrt(variance));
  }
  if (ratios.empty()) {
    throw NumericError("no identifiable grid points in the law domain");
  }
  ProportionalityReport report;
  report.grid_points = ratios.size();
  report.excluded_points = excluded;
  const double mean =
      std::accumulate(ratios.begin(), ratios.end(), 0.0) /
      static_cast<double>(ratios.size());
  if (mean == 0.0) {
    report.proportional = true;
    return report;
  }
  double max_dev = 0.0;
  for (const double r : ratios) {
    max_dev = std::max(max_dev, std::abs(r - mean));
  }
  report.max_relative_deviation = max_dev / mean;
  report.proportional = report.max_relative_deviation < 1e-6;
  report.constant = mean / 2.0;
  return report;
}

/// Overlap sum of two distributions, 1 when identical, 0 when disjoint.
inline double bhattacharyya_affinity(const DiscreteDistribution& p,
                                     const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw ValidationError("distributions have different outcome counts");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += std::sqrt(p[i] * q[i]);
  }
  return sum;
}

/// Angle between two distributions regarded as unit vectors of square-root
/// probabilities; bounded by pi/2.
inline double wootters_measure(const DiscreteDistribution& p,
                               const DiscreteDistribution& q) {
  return acos_clamped(bhattacharyya_affinity(p, q), "distribution overlap");
}

/// Per-trial information (dp/dtheta)^2 / (p(1-p)) of the yes/no outcome.
inline double fisher_information(const laws::ResponseLaw& law, double theta) {
  const double variance = law.variance_at(theta);
  if (variance == 0.0) {
    throw NumericError("Fisher information is singular at theta=" +
                       format_double(theta) + ": p(1-p)=0");
  }
  const double slope = law.derivative(theta).value;
  return slope * slope / variance;
}

/// W(theta, theta+delta)^2 / ((delta^2/4) I(theta)); tends to 1 as the
/// separation shrinks, tying the overlap angle to Fisher information.
inline double fisher_limit_ratio(const laws::ResponseLaw& law, double theta,
                                 double delta) {
  if (delta == 0.0) {
    throw ValidationError("delta must be nonzero");
  }
  const double w =
      wootters_measure(DiscreteDistribution::bernoulli(law.probability_pair(theta)),
                       DiscreteDistribution::bernoulli(
                           law.probability_pair(theta + delta)));
  const double info = fisher_information(law, theta);
  if (info == 0.0) {
    throw NumericError("zero Fisher information at theta=" +
                       format_double(theta));
  }
  return (w * w) / (0.25 * delta * delta * info);
}

}  // namespace statdist::core

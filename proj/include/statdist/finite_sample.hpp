#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "statdist/common.hpp"
#include "statdist/response_law.hpp"

namespace statdist::finite {

/// Where a finite-trial experiment can place an orientation: the estimate
/// plus/minus one standard error mapped through the response law.
struct UncertaintyInterval {
  OrientationAngle center;
  double halfwidth = 0.0;
  SampleSize sample_size;
  /// True where the law's slope vanishes: the experiment says nothing about
  /// theta there, and halfwidth is meaningless.
  bool unbounded = false;
};

/// One-standard-error uncertainty of an observed frequency after n trials.
inline double p_uncertainty(double p, SampleSize n) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("probability " + format_double(p) +
                          " outside [0, 1]");
  }
  return std::sqrt(p * (1.0 - p) / n.as_double());
}

/// The frequency uncertainty pushed through the law: halfwidth
/// sqrt(p(1-p)/n) / |dp/dtheta|. Zero variance wins over zero slope: points
/// where p hits 0 or 1 look perfectly distinguishable (an artifact of the
/// Gaussian error model), while interior slope zeros are uninformative.
inline UncertaintyInterval theta_uncertainty(const laws::ResponseLaw& law,
                                             double theta, SampleSize n) {
  const double variance = law.variance_at(theta);
  const double slope = law.derivative(theta).value;
  UncertaintyInterval interval{OrientationAngle(theta), 0.0, n, false};
  if (variance == 0.0) {
    return interval;
  }
  if (slope == 0.0) {
    interval.unbounded = true;
    return interval;
  }
  return UncertaintyInterval{OrientationAngle(theta),
                             std::sqrt(variance / n.as_double()) /
                                 std::abs(slope),
                             n, false};
}

/// Non-overlap of the two uncertainty regions. Intervals must come from the
/// same number of trials; an unbounded interval is never distinguishable.
inline bool distinguishable(const UncertaintyInterval& a,
                            const UncertaintyInterval& b) {
  if (!(a.sample_size == b.sample_size)) {
    throw ValidationError("intervals come from different sample sizes");
  }
  if (a.unbounded || b.unbounded) return false;
  return std::abs(a.center.radians() - b.center.radians()) >=
         a.halfwidth + b.halfwidth;
}

namespace detail {

/// Halfwidth for packing; throws where packing cannot proceed.
inline double usable_halfwidth(const laws::ResponseLaw& law, double theta,
                               SampleSize n) {
  const UncertaintyInterval u = theta_uncertainty(law, theta, n);
  if (u.unbounded) {
    throw NumericError("uninformative interval at theta=" +
                       format_double(theta) + ": dp/dtheta vanishes");
  }
  if (u.halfwidth == 0.0) {
    throw NumericError("uncertainty vanishes at theta=" +
                       format_double(theta) +
                       "; keep span ends strictly inside the open domain");
  }
  return u.halfwidth;
}

/// Greedy non-overlapping interval packing over (t1, t2). hw(theta) supplies
/// the halfwidth at a candidate point and throws where packing is undefined.
/// Greedy is optimal for interval packing on a line; points are accepted
/// strictly inside the span (up to the endpoint epsilon).
template <typename HalfwidthFn>
std::uint64_t greedy_pack(double t1, double t2, HalfwidthFn&& hw) {
  if (!(t1 <= t2)) {
    throw ValidationError("span bounds out of order");
  }
  if (t1 == t2) return 0;
  const double limit = t2 - kAngleEpsilon;
  if (limit <= t1) return 0;
  double current = t1;
  double hw_current = hw(t1);
  std::uint64_t count = 0;
  while (true) {
    const auto gap = [&](double t) {
      return (t - current) - hw_current - hw(t);
    };
    if (gap(limit) < 0.0) break;
    double lo = current;
    double hi = limit;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    current = hi;
    hw_current = hw(current);
    ++count;
  }
  return count;
}

}  // namespace detail

/// Maximum number of mutually distinguishable orientations that fit strictly
/// between theta1 and theta2 at n trials each.
inline std::uint64_t count_distinguishable(const laws::ResponseLaw& law,
                                           double theta1, double theta2,
                                           SampleSize n) {
  law.probability(theta1);
  law.probability(theta2);
  return detail::greedy_pack(theta1, theta2, [&](double t) {
    return detail::usable_halfwidth(law, t, n);
  });
}

struct CountingPoint {
  std::uint64_t n = 0;
  std::uint64_t count = 0;
  /// count / sqrt(n), the finite-n distance estimate.
  double estimate = 0.0;
};

struct CountingSeries {
  std::vector<CountingPoint> points;
  /// Linear extrapolation to n = infinity from the last two points,
  /// (D2 - D1) / (sqrt(n2) - sqrt(n1)).
  double richardson = 0.0;
  bool richardson_valid = false;

  double final_estimate() const { return points.back().estimate; }
};

inline std::vector<SampleSize> default_schedule() {
  return {SampleSize(100), SampleSize(1000), SampleSize(10000),
          SampleSize(100000), SampleSize(1000000)};
}

/// Convergence study of count/sqrt(n) over a schedule of sample sizes; the
/// final entry is the counting estimate of the statistical distance.
inline CountingSeries distance_by_counting(
    const laws::ResponseLaw& law, double theta1, double theta2,
    const std::vector<SampleSize>& schedule) {
  if (schedule.empty()) {
    throw ValidationError("sample-size schedule is empty");
  }
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i - 1] < schedule[i])) {
      throw ValidationError("sample-size schedule must be strictly increasing");
    }
  }
  CountingSeries series;
  for (const SampleSize n : schedule) {
    const std::uint64_t d = count_distinguishable(law, theta1, theta2, n);
    series.points.push_back(
        {n.count(), d, static_cast<double>(d) / n.sqrt()});
  }
  if (series.points.size() >= 2) {
    const CountingPoint& a = series.points[series.points.size() - 2];
    const CountingPoint& b = series.points.back();
    const double denom = std::sqrt(static_cast<double>(b.n)) -
                         std::sqrt(static_cast<double>(a.n));
    series.richardson = (static_cast<double>(b.count) -
                         static_cast<double>(a.count)) /
                        denom;
    series.richardson_valid = true;
  }
  return series;
}

}  // namespace statdist::finite

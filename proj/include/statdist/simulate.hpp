#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "statdist/common.hpp"
#include "statdist/distance.hpp"
#include "statdist/finite_sample.hpp"
#include "statdist/parallel.hpp"
#include "statdist/response_law.hpp"
#include "statdist/rng.hpp"

namespace statdist::sim {

/// One simulated experiment: n yes/no trials at a fixed (hidden) orientation.
struct TrialRecord {
  laws::ResponseLaw law;
  OrientationAngle theta_true;
  SampleSize n;
  std::uint64_t yes_count = 0;
  std::uint64_t seed = 0;
  BinomialSampler sampler = BinomialSampler::Inversion;
};

/// Draws yes_count ~ Binomial(n, p(theta_true)). The generator key folds in
/// theta and n, so a record is a pure function of (law, theta, n, seed)
/// regardless of evaluation order.
inline TrialRecord run_trials(const laws::ResponseLaw& law, double theta_true,
                              SampleSize n, std::uint64_t seed) {
  const double p = law.probability(theta_true);
  CounterRng rng(CounterRng::derive_key(
      CounterRng::derive_key(seed, key_from_double(theta_true)), n.count()));
  const BinomialDraw draw = sample_binomial(rng, n.count(), p);
  return TrialRecord{law,  OrientationAngle(theta_true), n,
                     draw.yes_count, seed, draw.sampler};
}

struct ThetaEstimate {
  finite::UncertaintyInterval interval;
  double p_hat = 0.0;
  /// Set when the observed frequency falls at or beyond the law's range and
  /// the estimate was pinned to a domain endpoint.
  bool boundary_clipped = false;
};

/// Inverts the observed frequency through the law. The halfwidth is
/// evaluated just inside the domain when the estimate lands on an endpoint,
/// where the error model degenerates.
inline ThetaEstimate estimate_theta(const TrialRecord& record) {
  const laws::ResponseLaw& law = record.law;
  const laws::Monotonicity mono = law.monotonicity();
  if (mono != laws::Monotonicity::Increasing &&
      mono != laws::Monotonicity::Decreasing) {
    throw ValidationError(
        "orientation is not identifiable: law is not monotone");
  }
  const double p_hat =
      static_cast<double>(record.yes_count) / record.n.as_double();
  const double p_at_lo = law.probability(law.domain_lo());
  const double p_at_hi = law.probability(law.domain_hi());
  const double p_min = std::min(p_at_lo, p_at_hi);
  const double p_max = std::max(p_at_lo, p_at_hi);
  double theta_hat = 0.0;
  bool clipped = false;
  if (p_hat >= p_max) {
    theta_hat = p_at_lo >= p_at_hi ? law.domain_lo() : law.domain_hi();
    clipped = true;
  } else if (p_hat <= p_min) {
    theta_hat = p_at_lo <= p_at_hi ? law.domain_lo() : law.domain_hi();
    clipped = true;
  } else {
    theta_hat = law.inverse_probability(p_hat);
  }
  const double eval_at =
      std::clamp(theta_hat, law.domain_lo() + kAngleEpsilon,
                 law.domain_hi() - kAngleEpsilon);
  finite::UncertaintyInterval interval =
      finite::theta_uncertainty(law, eval_at, record.n);
  interval.center = OrientationAngle(theta_hat);
  return ThetaEstimate{interval, p_hat, clipped};
}

struct ReplicateSummary {
  std::size_t replicates = 0;
  double mean_p_hat = 0.0;
  /// Sample standard deviation (n-1 denominator) of the observed
  /// frequencies, to be compared with predicted_std.
  double std_p_hat = 0.0;
  double predicted_std = 0.0;
  /// Fraction of replicates whose +-1 halfwidth interval covers theta_true.
  double coverage = 0.0;
  std::size_t boundary_count = 0;
  std::size_t unbounded_count = 0;
};

/// Repeats the experiment under derived seeds and scores the error model:
/// the spread of p-hat against sqrt(p(1-p)/n) and the interval coverage of
/// the true orientation.
inline ReplicateSummary replicate_statistics(const laws::ResponseLaw& law,
                                             double theta_true, SampleSize n,
                                             std::size_t replicates,
                                             std::uint64_t seed) {
  if (replicates < 2) {
    throw ValidationError("need at least two replicates");
  }
  std::vector<double> p_hats(replicates);
  ReplicateSummary summary;
  summary.replicates = replicates;
  std::size_t covered = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    const TrialRecord record =
        run_trials(law, theta_true, n, CounterRng::derive_key(seed, r));
    const ThetaEstimate estimate = estimate_theta(record);
    p_hats[r] = estimate.p_hat;
    if (estimate.boundary_clipped) ++summary.boundary_count;
    if (estimate.interval.unbounded) {
      ++summary.unbounded_count;
      ++covered;
    } else if (std::abs(estimate.interval.center.radians() - theta_true) <=
               estimate.interval.halfwidth) {
      ++covered;
    }
  }
  double mean = 0.0;
  for (const double p : p_hats) mean += p;
  mean /= static_cast<double>(replicates);
  double ss = 0.0;
  for (const double p : p_hats) ss += (p - mean) * (p - mean);
  summary.mean_p_hat = mean;
  summary.std_p_hat = std::sqrt(ss / static_cast<double>(replicates - 1));
  summary.predicted_std = finite::p_uncertainty(law.probability(theta_true), n);
  summary.coverage = static_cast<double>(covered) /
                     static_cast<double>(replicates);
  return summary;
}

struct EmpiricalDistance {
  double empirical = 0.0;
  std::uint64_t empirical_count = 0;
  double analytic = 0.0;
  std::uint64_t analytic_count = 0;
  /// Estimates pinned to a domain endpoint while packing.
  std::size_t boundary_flags = 0;
};

/// The counting distance with halfwidths read off simulated experiments
/// instead of the exact error formula: at each candidate orientation a
/// record is simulated, the orientation re-estimated, and the uncertainty
/// evaluated at that estimate.
inline EmpiricalDistance empirical_distance(const laws::ResponseLaw& law,
                                            double theta1, double theta2,
                                            SampleSize n, std::uint64_t seed) {
  EmpiricalDistance result;
  std::size_t boundary = 0;
  const auto simulated_halfwidth = [&](double theta) {
    const TrialRecord record = run_trials(law, theta, n, seed);
    const ThetaEstimate estimate = estimate_theta(record);
    if (estimate.boundary_clipped) ++boundary;
    if (estimate.interval.unbounded) {
      throw NumericError("uninformative interval at theta=" +
                         format_double(theta) + ": dp/dtheta vanishes");
    }
    if (estimate.interval.halfwidth == 0.0) {
      throw NumericError("estimated uncertainty vanishes at theta=" +
                         format_double(theta));
    }
    return estimate.interval.halfwidth;
  };
  law.probability(theta1);
  law.probability(theta2);
  result.empirical_count =
      finite::detail::greedy_pack(theta1, theta2, simulated_halfwidth);
  result.empirical = static_cast<double>(result.empirical_count) / n.sqrt();
  result.analytic_count = finite::count_distinguishable(law, theta1, theta2, n);
  result.analytic = static_cast<double>(result.analytic_count) / n.sqrt();
  result.boundary_flags = boundary;
  return result;
}

struct Column {
  std::string id;
  double theta = 0.0;
};

/// A sheet of orientation-selective columns sharing one response law.
struct ColumnSheet {
  std::vector<Column> columns;
  laws::ResponseLaw law;
};

inline void validate_sheet(const ColumnSheet& sheet) {
  if (sheet.columns.size() < 2) {
    throw ValidationError("sheet needs at least two columns");
  }
  std::set<std::string> ids;
  for (const Column& c : sheet.columns) {
    if (!ids.insert(c.id).second) {
      throw ValidationError("duplicate column id '" + c.id + "'");
    }
    if (!sheet.law.contains(c.theta)) {
      throw ValidationError("column '" + c.id + "' orientation " +
                            format_double(c.theta) +
                            " outside the law domain");
    }
  }
}

/// Default sheet: columns uniformly spaced across the law domain.
inline ColumnSheet uniform_sheet(const laws::ResponseLaw& law,
                                 std::size_t count = 18) {
  if (count < 2) {
    throw ValidationError("sheet needs at least two columns");
  }
  ColumnSheet sheet{{}, law};
  const double lo = law.domain_lo();
  const double hi = law.domain_hi();
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "c%02zu", i);
    const double theta =
        lo + (hi - lo) * static_cast<double>(i) /
                 static_cast<double>(count - 1);
    sheet.columns.push_back({id, theta});
  }
  return sheet;
}

struct DistanceMatrix {
  std::vector<std::string> ids;
  /// Pairwise distances; NaN where the computation failed.
  std::vector<std::vector<double>> values;
  /// Empty string per entry when ok, otherwise the error message.
  std::vector<std::vector<std::string>> status;
};

struct EmpiricalParams {
  SampleSize n;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename PairDistance>
DistanceMatrix build_matrix(const ColumnSheet& sheet, int threads,
                            PairDistance&& pair_distance) {
  validate_sheet(sheet);
  const std::size_t count = sheet.columns.size();
  DistanceMatrix matrix;
  matrix.ids.reserve(count);
  for (const Column& c : sheet.columns) matrix.ids.push_back(c.id);
  matrix.values.assign(count, std::vector<double>(count, 0.0));
  matrix.status.assign(count, std::vector<std::string>(count));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    try {
      const double d = pair_distance(i, j);
      matrix.values[i][j] = matrix.values[j][i] = d;
    } catch (const std::exception& e) {
      matrix.values[i][j] = matrix.values[j][i] =
          std::numeric_limits<double>::quiet_NaN();
      matrix.status[i][j] = matrix.status[j][i] = e.what();
    }
  });
  return matrix;
}

}  // namespace detail

/// Pairwise statistical distances between column orientations, by
/// quadrature.
inline DistanceMatrix column_distance_matrix(const ColumnSheet& sheet,
                                             int threads = 1) {
  return detail::build_matrix(sheet, threads, [&](std::size_t i,
                                                  std::size_t j) {
    return core::statistical_distance(sheet.law, sheet.columns[i].theta,
                                      sheet.columns[j].theta)
        .value;
  });
}

/// Pairwise empirical counting distances; each pair gets a seed derived from
/// its index so the matrix is order-independent.
inline DistanceMatrix column_distance_matrix(const ColumnSheet& sheet,
                                             const EmpiricalParams& params,
                                             int threads = 1) {
  const std::size_t count = sheet.columns.size();
  return detail::build_matrix(
      sheet, threads, [&](std::size_t i, std::size_t j) {
        const double a = std::min(sheet.columns[i].theta,
                                  sheet.columns[j].theta);
        const double b = std::max(sheet.columns[i].theta,
                                  sheet.columns[j].theta);
        return empirical_distance(
                   sheet.law, a, b, params.n,
                   CounterRng::derive_key(params.seed, i * count + j))
            .empirical;
      });
}

}  // namespace statdist::sim

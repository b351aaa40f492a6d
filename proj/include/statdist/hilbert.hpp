#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "statdist/common.hpp"
#include "statdist/rng.hpp"

namespace statdist::hilbert {

using Complex = std::complex<double>;

class PureState {
public:
  explicit PureState(std::vector<Complex> amplitudes)
      : a_(std::move(amplitudes)) {
    if (a_.empty()) {
      throw ValidationError("state needs at least one amplitude");
    }
    double norm2 = 0.0;
    for (const Complex& c : a_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw ValidationError("state amplitudes must be finite");
      }
      norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > 1e-12) {
      throw ValidationError("state norm^2 is " + format_double(norm2) +
                            ", not 1");
    }
  }

  /// Scales an arbitrary nonzero vector onto the unit sphere.
  static PureState normalized(std::vector<Complex> amplitudes) {
    double norm2 = 0.0;
    for (const Complex& c : amplitudes) norm2 += std::norm(c);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
      throw ValidationError("cannot normalize a zero or non-finite vector");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& c : amplitudes) c *= inv;
    return PureState(std::move(amplitudes));
  }

  std::size_t dim() const { return a_.size(); }
  const Complex& operator[](std::size_t i) const { return a_[i]; }
  const std::vector<Complex>& amplitudes() const { return a_; }

private:
  std::vector<Complex> a_;
};

/// Hermitian inner product, conjugate-linear in the first argument.
inline Complex inner_product(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("state dimensions differ: " +
                          std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
  }
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    sum += std::conj(a[i]) * b[i];
  }
  return sum;
}

/// Angle between the rays: arccos |<psi1, psi2>|. Insensitive to global
/// phase on either state.
inline double hilbert_distance(const PureState& psi1, const PureState& psi2) {
  return acos_clamped(std::abs(inner_product(psi1, psi2)), "state overlap");
}

/// Complete orthonormal analyzer: N distinct outcomes in dimension N.
class MeasurementBasis {
public:
  explicit MeasurementBasis(std::vector<PureState> states)
      : states_(std::move(states)) {
    if (states_.size() < 2) {
      throw ValidationError("analyzer needs at least two outcomes");
    }
    const std::size_t d = states_[0].dim();
    if (states_.size() != d) {
      throw ValidationError("analyzer must be complete: got " +
                            std::to_string(states_.size()) +
                            " outcomes in dimension " + std::to_string(d));
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (states_[i].dim() != d) {
        throw ValidationError("analyzer outcome dimensions differ");
      }
      for (std::size_t j = 0; j < i; ++j) {
        const double overlap = std::abs(inner_product(states_[i], states_[j]));
        if (overlap > 1e-12) {
          throw ValidationError("analyzer outcomes " + std::to_string(j) +
                                " and " + std::to_string(i) +
                                " are not orthogonal (overlap " +
                                format_double(overlap) + ")");
        }
      }
    }
  }

  std::size_t size() const { return states_.size(); }
  std::size_t dim() const { return states_[0].dim(); }
  const PureState& state(std::size_t i) const { return states_[i]; }
  const std::vector<PureState>& states() const { return states_; }

private:
  std::vector<PureState> states_;
};

/// Outcome probabilities |<phi_i, psi>|^2 of analyzing psi.
inline std::vector<double> outcome_probabilities(const MeasurementBasis& basis,
                                                 const PureState& psi) {
  std::vector<double> p(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    p[i] = std::norm(inner_product(basis.state(i), psi));
  }
  return p;
}

/// Distance as seen through one fixed analyzer:
/// arccos( sum_i |<phi_i, psi1>| |<phi_i, psi2>| ). Never exceeds the
/// Hilbert angle; equals it when an analyzer outcome matches a state.
inline double device_distance(const MeasurementBasis& basis,
                              const PureState& psi1, const PureState& psi2) {
  if (basis.dim() != psi1.dim() || basis.dim() != psi2.dim()) {
    throw ValidationError("analyzer and state dimensions differ");
  }
  double affinity = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    affinity += std::abs(inner_product(basis.state(i), psi1)) *
                std::abs(inner_product(basis.state(i), psi2));
  }
  return acos_clamped(affinity, "analyzer overlap");
}

namespace detail {

inline std::vector<Complex> gaussian_vector(CounterRng& rng, std::size_t dim) {
  std::vector<Complex> v(dim);
  for (Complex& c : v) {
    c = Complex(rng.next_normal(), rng.next_normal());
  }
  return v;
}

/// Gram-Schmidt completion: orthonormalizes random draws against the rows
/// already in `basis` until it holds `dim` vectors. Double orthogonalization
/// pass keeps the result orthogonal well below the 1e-12 gate.
inline void complete_orthonormal(std::vector<std::vector<Complex>>& basis,
                                 std::size_t dim, CounterRng& rng) {
  while (basis.size() < dim) {
    std::vector<Complex> v = gaussian_vector(rng, dim);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : basis) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += std::conj(u[i]) * v[i];
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * u[i];
      }
    }
    double norm2 = 0.0;
    for (const Complex& c : v) norm2 += std::norm(c);
    if (norm2 < 1e-16) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& c : v) c *= inv;
    basis.push_back(std::move(v));
  }
}

inline MeasurementBasis to_basis(std::vector<std::vector<Complex>> rows) {
  std::vector<PureState> states;
  states.reserve(rows.size());
  for (auto& r : rows) states.push_back(PureState::normalized(std::move(r)));
  return MeasurementBasis(std::move(states));
}

}  // namespace detail

/// Haar-uniform random pure state (normalized complex Gaussian vector).
inline PureState random_state(std::size_t dim, std::uint64_t seed) {
  if (dim < 2) {
    throw ValidationError("dimension must be at least 2");
  }
  CounterRng rng = CounterRng::substream(seed, 0x51a7e);
  return PureState::normalized(detail::gaussian_vector(rng, dim));
}

/// Haar-uniform random analyzer basis via Gram-Schmidt on Gaussian draws.
inline MeasurementBasis random_basis(std::size_t dim, std::uint64_t seed) {
  if (dim < 2) {
    throw ValidationError("dimension must be at least 2");
  }
  CounterRng rng = CounterRng::substream(seed, 0xba515);
  std::vector<std::vector<Complex>> rows;
  detail::complete_orthonormal(rows, dim, rng);
  return detail::to_basis(std::move(rows));
}

/// Basis whose first outcome is the given state; the rest is a random
/// orthonormal completion.
inline MeasurementBasis aligned_basis(const PureState& psi,
                                      std::uint64_t seed) {
  if (psi.dim() < 2) {
    throw ValidationError("dimension must be at least 2");
  }
  CounterRng rng = CounterRng::substream(seed, 0xa116);
  std::vector<std::vector<Complex>> rows{psi.amplitudes()};
  detail::complete_orthonormal(rows, psi.dim(), rng);
  return detail::to_basis(std::move(rows));
}

struct BasisSearchResult {
  /// Best analyzer found across all routes and its distance.
  MeasurementBasis basis;
  double d_max = 0.0;
  /// The Hilbert angle the search is trying to attain.
  double d_target = 0.0;
  /// Analytic route: analyzers aligned with each input state.
  double d_aligned_first = 0.0;
  double d_aligned_second = 0.0;
  /// Numeric route: best coordinate-descent value over restarts.
  double d_numeric = 0.0;
  bool numeric_converged = false;
  std::uint64_t restarts = 0;
  std::uint64_t sweeps_best = 0;
};

namespace detail {

struct DescentOutcome {
  std::vector<std::vector<Complex>> rows;
  double affinity = 0.0;
  bool converged = false;
  std::uint64_t sweeps = 0;
};

/// Minimizes sum_i |<phi_i,psi1>||<phi_i,psi2>| by sweeping two-dimensional
/// rotations over all row pairs. Each pair step scans a coarse
/// (angle, phase) grid and polishes the best cell by golden-section in each
/// coordinate.
inline DescentOutcome descend_affinity(const PureState& psi1,
                                       const PureState& psi2,
                                       std::uint64_t seed) {
  const std::size_t dim = psi1.dim();
  DescentOutcome out;
  {
    CounterRng rng = CounterRng::substream(seed, 0xde5c);
    detail::complete_orthonormal(out.rows, dim, rng);
  }
  std::vector<Complex> c1(dim), c2(dim);
  const auto overlap = [&](const std::vector<Complex>& row,
                           const PureState& psi) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) sum += std::conj(row[i]) * psi[i];
    return sum;
  };
  for (std::size_t i = 0; i < dim; ++i) {
    c1[i] = overlap(out.rows[i], psi1);
    c2[i] = overlap(out.rows[i], psi2);
  }
  const auto total = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += std::abs(c1[i]) * std::abs(c2[i]);
    return s;
  };
  out.affinity = total();

  constexpr int kAngleGrid = 10;
  constexpr int kPhaseGrid = 12;
  constexpr double kGolden = 0.6180339887498949;
  for (std::uint64_t sweep = 0; sweep < 1000; ++sweep) {
    const double before = out.affinity;
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i + 1; j < dim; ++j) {
        // Pair objective: affinity contribution of rows i and j after a
        // rotation by (t, phase), other rows unchanged.
        const auto pair_value = [&](double t, double phase) {
          const double ct = std::cos(t);
          const double st = std::sin(t);
          const Complex e = std::polar(1.0, phase);
          const Complex a1 = ct * c1[i] + e * st * c1[j];
          const Complex b1 = -std::conj(e) * st * c1[i] + ct * c1[j];
          const Complex a2 = ct * c2[i] + e * st * c2[j];
          const Complex b2 = -std::conj(e) * st * c2[i] + ct * c2[j];
          return std::abs(a1) * std::abs(a2) + std::abs(b1) * std::abs(b2);
        };
        double best_t = 0.0;
        double best_phase = 0.0;
        double best = pair_value(0.0, 0.0);
        for (int ti = 0; ti < kAngleGrid; ++ti) {
          const double t = kPi * ti / kAngleGrid;
          for (int pi = 0; pi < kPhaseGrid; ++pi) {
            const double phase = 2.0 * kPi * pi / kPhaseGrid;
            const double v = pair_value(t, phase);
            if (v < best) {
              best = v;
              best_t = t;
              best_phase = phase;
            }
          }
        }
        // Golden-section polish, alternating coordinates.
        double span_t = kPi / kAngleGrid;
        double span_p = 2.0 * kPi / kPhaseGrid;
        for (int round = 0; round < 3; ++round) {
          for (int coord = 0; coord < 2; ++coord) {
            double lo = (coord == 0 ? best_t : best_phase) -
                        (coord == 0 ? span_t : span_p);
            double hi = (coord == 0 ? best_t : best_phase) +
                        (coord == 0 ? span_t : span_p);
            const auto eval = [&](double x) {
              return coord == 0 ? pair_value(x, best_phase)
                                : pair_value(best_t, x);
            };
            double x1 = hi - kGolden * (hi - lo);
            double x2 = lo + kGolden * (hi - lo);
            double f1 = eval(x1);
            double f2 = eval(x2);
            for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
              if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kGolden * (hi - lo);
                f1 = eval(x1);
              } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kGolden * (hi - lo);
                f2 = eval(x2);
              }
            }
            const double x = 0.5 * (lo + hi);
            const double fx = eval(x);
            if (fx < best) {
              best = fx;
              (coord == 0 ? best_t : best_phase) = x;
            }
          }
          span_t *= 0.25;
          span_p *= 0.25;
        }
        if (best < out.affinity) {
          const double ct = std::cos(best_t);
          const double st = std::sin(best_t);
          const Complex e = std::polar(1.0, best_phase);
          const Complex n1i = ct * c1[i] + e * st * c1[j];
          const Complex n1j = -std::conj(e) * st * c1[i] + ct * c1[j];
          const Complex n2i = ct * c2[i] + e * st * c2[j];
          const Complex n2j = -std::conj(e) * st * c2[i] + ct * c2[j];
          c1[i] = n1i;
          c1[j] = n1j;
          c2[i] = n2i;
          c2[j] = n2j;
          for (std::size_t k = 0; k < dim; ++k) {
            const Complex ri = ct * out.rows[i][k] +
                               std::conj(e) * st * out.rows[j][k];
            const Complex rj =
                -e * st * out.rows[i][k] + ct * out.rows[j][k];
            out.rows[i][k] = ri;
            out.rows[j][k] = rj;
          }
          out.affinity = best;
        }
      }
    }
    out.sweeps = sweep + 1;
    if (before - out.affinity < 1e-9) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Searches for the analyzer that maximizes device_distance. Two routes:
/// analytically, a basis aligned with either state attains the Hilbert
/// angle; numerically, coordinate descent over pair rotations from random
/// starts confirms it without using that fact.
inline BasisSearchResult optimize_basis(const PureState& psi1,
                                        const PureState& psi2,
                                        std::uint64_t restarts,
                                        std::uint64_t seed) {
  if (psi1.dim() != psi2.dim()) {
    throw ValidationError("state dimensions differ");
  }
  if (psi1.dim() < 2) {
    throw ValidationError("dimension must be at least 2");
  }
  if (restarts == 0) {
    throw ValidationError("need at least one restart");
  }
  const MeasurementBasis first = aligned_basis(psi1, CounterRng::derive_key(seed, 1));
  const MeasurementBasis second = aligned_basis(psi2, CounterRng::derive_key(seed, 2));

  BasisSearchResult result{first,
                           0.0,
                           hilbert_distance(psi1, psi2),
                           device_distance(first, psi1, psi2),
                           device_distance(second, psi1, psi2),
                           0.0,
                           false,
                           restarts,
                           0};

  double best_affinity = std::numeric_limits<double>::infinity();
  std::optional<detail::DescentOutcome> best;
  for (std::uint64_t r = 0; r < restarts; ++r) {
    detail::DescentOutcome outcome = detail::descend_affinity(
        psi1, psi2, CounterRng::derive_key(seed, 0x100 + r));
    if (outcome.affinity < best_affinity) {
      best_affinity = outcome.affinity;
      best = std::move(outcome);
    }
  }
  // Re-orthonormalize the winner (rotation roundoff accumulates) and score
  // the polished basis honestly.
  std::vector<std::vector<Complex>> rows;
  rows.reserve(psi1.dim());
  for (auto& row : best->rows) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : rows) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          proj += std::conj(u[i]) * row[i];
        }
        for (std::size_t i = 0; i < u.size(); ++i) row[i] -= proj * u[i];
      }
    }
    double norm2 = 0.0;
    for (const Complex& c : row) norm2 += std::norm(c);
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& c : row) c *= inv;
    rows.push_back(std::move(row));
  }
  const MeasurementBasis numeric_basis = detail::to_basis(std::move(rows));
  result.d_numeric = device_distance(numeric_basis, psi1, psi2);
  result.numeric_converged = best->converged;
  result.sweeps_best = best->sweeps;

  result.d_max = result.d_aligned_first;
  result.basis = first;
  if (result.d_aligned_second > result.d_max) {
    result.d_max = result.d_aligned_second;
    result.basis = second;
  }
  if (result.d_numeric > result.d_max) {
    result.d_max = result.d_numeric;
    result.basis = numeric_basis;
  }
  return result;
}

}  // namespace statdist::hilbert

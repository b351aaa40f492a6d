#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace statdist {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kHalfPi = kPi / 2.0;

/// Inputs outside a documented domain or malformed configuration.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Singular, non-identifiable, or non-convergent numeric configurations.
/// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Spans are evaluated on open intervals: a point closer than this to an
/// endpoint counts as sitting on it.
inline constexpr double kAngleEpsilon = 1e-9;

/// arccos arguments may leave [-1, 1] by at most this much before the
/// excursion is treated as a logic error rather than rounding.
inline constexpr double kAcosSlack = 1e-12;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// arccos with the excursion policy above.
inline double acos_clamped(double x, const char* context) {
  if (std::abs(x) > 1.0 + kAcosSlack) {
    throw NumericError(std::string(context) + ": arccos argument " +
                       format_double(x) + " exceeds [-1, 1] beyond tolerance");
  }
  return std::acos(std::clamp(x, -1.0, 1.0));
}

/// Orientation in radians, canonical domain [0, pi/2] where the cosine-family
/// response laws are one-to-one.
class OrientationAngle {
public:
  explicit OrientationAngle(double radians) : value_(radians) {
    if (!std::isfinite(radians)) {
      throw ValidationError("orientation angle must be finite");
    }
    if (radians < 0.0 || radians > kHalfPi) {
      throw ValidationError("orientation angle " + format_double(radians) +
                            " outside [0, pi/2]");
    }
  }

  double radians() const { return value_; }

  friend bool operator==(OrientationAngle a, OrientationAngle b) {
    return a.value_ == b.value_;
  }

private:
  double value_;
};

/// Number of yes/no trials available to the experimenter.
class SampleSize {
public:
  explicit SampleSize(std::uint64_t n) : n_(n) {
    if (n == 0) {
      throw ValidationError("sample size must be at least 1");
    }
  }

  std::uint64_t count() const { return n_; }
  double as_double() const { return static_cast<double>(n_); }
  double sqrt() const { return std::sqrt(as_double()); }

  friend bool operator==(SampleSize a, SampleSize b) { return a.n_ == b.n_; }
  friend bool operator<(SampleSize a, SampleSize b) { return a.n_ < b.n_; }

private:
  std::uint64_t n_;
};

}  // namespace statdist

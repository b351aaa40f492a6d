#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "statdist/common.hpp"
#include "statdist/distance.hpp"

namespace statdist::channels {

using ChannelVector = std::vector<double>;

/// Bank of overlapping compact-support cos^2 channels on uniformly spaced
/// centers: channel k responds cos^2(w (theta - c_k)) within half a period
/// of its center and 0 outside. Lives on the real line, so encoding commutes
/// with translating the bank and the input together.
class ChannelBank {
public:
  ChannelBank(std::size_t count, double lo, double hi,
              std::optional<double> width_scale = std::nullopt) {
    if (count < 3) {
      throw ValidationError("bank needs at least three channels");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw ValidationError("bank span must be a finite nonempty interval");
    }
    spacing_ = (hi - lo) / static_cast<double>(count - 1);
    // Default width puts three channels over every point: support
    // half-width 1.5 spacings.
    w_ = width_scale.value_or(kPi / (3.0 * spacing_));
    if (!std::isfinite(w_) || w_ <= 0.0) {
      throw ValidationError("width scale must be finite and positive");
    }
    if (!(spacing_ < support_halfwidth())) {
      throw ValidationError(
          "channel supports must overlap: spacing " + format_double(spacing_) +
          " >= support half-width " + format_double(support_halfwidth()));
    }
    centers_.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      centers_.push_back(lo + static_cast<double>(k) * spacing_);
    }
  }

  std::size_t size() const { return centers_.size(); }
  double center(std::size_t k) const { return centers_[k]; }
  const std::vector<double>& centers() const { return centers_; }
  double spacing() const { return spacing_; }
  double width_scale() const { return w_; }
  double support_halfwidth() const { return kHalfPi / w_; }
  double covered_lo() const { return centers_.front() - support_halfwidth(); }
  double covered_hi() const { return centers_.back() + support_halfwidth(); }

  double response(std::size_t k, double theta) const {
    const double offset = theta - centers_[k];
    if (std::abs(offset) >= support_halfwidth()) return 0.0;
    const double c = std::cos(w_ * offset);
    return c * c;
  }

  ChannelVector encode(double theta) const {
    if (!std::isfinite(theta) ||
        !(theta > covered_lo() && theta < covered_hi())) {
      throw ValidationError("orientation " + format_double(theta) +
                            " outside the covered span (" +
                            format_double(covered_lo()) + ", " +
                            format_double(covered_hi()) + ")");
    }
    ChannelVector v(size());
    for (std::size_t k = 0; k < size(); ++k) v[k] = response(k, theta);
    return v;
  }

  /// Inverts an activation vector locally around its strongest channel.
  /// With the default three-channel overlap the three activations around
  /// the peak combine into a single phasor whose argument is the offset;
  /// otherwise the peak activation is inverted through arccos and the
  /// side is picked by matching the remaining channels.
  double decode(const ChannelVector& v) const {
    require_shape(v);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k] > v[peak]) peak = k;
    }
    if (v[peak] == 0.0) {
      throw ValidationError("all-zero activation vector is undecodable");
    }
    const bool default_overlap =
        std::abs(w_ * spacing_ - kPi / 3.0) <= 1e-12;
    if (default_overlap && peak > 0 && peak + 1 < v.size()) {
      const double third = 2.0 * kPi / 3.0;
      const std::complex<double> z =
          v[peak - 1] * std::polar(1.0, -third) + v[peak] +
          v[peak + 1] * std::polar(1.0, third);
      return centers_[peak] + std::arg(z) / (2.0 * w_);
    }
    const double offset = std::acos(std::sqrt(v[peak])) / w_;
    const double right = centers_[peak] + offset;
    const double left = centers_[peak] - offset;
    return mismatch(v, right) < mismatch(v, left) ? right : left;
  }

private:
  void require_shape(const ChannelVector& v) const {
    if (v.size() != size()) {
      throw ValidationError("activation vector has " +
                            std::to_string(v.size()) + " entries, bank has " +
                            std::to_string(size()));
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!std::isfinite(v[k]) || v[k] < 0.0 || v[k] > 1.0) {
        throw ValidationError("activation " + std::to_string(k) +
                              " outside [0, 1]");
      }
    }
  }

  double mismatch(const ChannelVector& v, double theta) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const double d = response(k, theta) - v[k];
      sum += d * d;
    }
    return sum;
  }

  std::vector<double> centers_;
  double spacing_ = 0.0;
  double w_ = 0.0;
};

/// Bhattacharyya angle between activation patterns regarded as
/// distributions over channels (L1-normalized).
inline double channel_similarity(const ChannelVector& v1,
                                 const ChannelVector& v2) {
  if (v1.size() != v2.size()) {
    throw ValidationError("activation vectors differ in length");
  }
  const auto normalize = [](const ChannelVector& v) {
    double sum = 0.0;
    for (const double x : v) {
      if (!std::isfinite(x) || x < 0.0) {
        throw ValidationError("activations must be finite and non-negative");
      }
      sum += x;
    }
    if (sum == 0.0) {
      throw ValidationError("all-zero activation vector is undecodable");
    }
    std::vector<double> p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i] / sum;
    return core::DiscreteDistribution(std::move(p));
  };
  return core::wootters_measure(normalize(v1), normalize(v2));
}

}  // namespace statdist::channels

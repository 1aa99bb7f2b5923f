// Min-max normalization of compressed features onto a target interval,
// [-1, 1] by default.
#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wavediag/error.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

struct NormalizerStats {
  std::vector<std::string> feature_names;
  std::vector<double> x_min;
  std::vector<double> x_max;
  double target_lo = -1.0;
  double target_hi = 1.0;
  std::vector<bool> degenerate;

  std::size_t dimension() const noexcept { return feature_names.size(); }

  /// Stats that make normalize() the identity on [lo, hi]^n.
  static NormalizerStats identity(std::vector<std::string> names, double lo = -1.0,
                                  double hi = 1.0) {
    const std::size_t n = names.size();
    return {std::move(names), std::vector<double>(n, lo), std::vector<double>(n, hi), lo, hi,
            std::vector<bool>(n, false)};
  }

  void validate() const {
    const std::size_t n = feature_names.size();
    if (x_min.size() != n || x_max.size() != n || degenerate.size() != n) {
      throw StructureError("normalizer vectors disagree in length");
    }
    if (!(target_lo < target_hi)) throw StructureError("normalizer target_lo must be < target_hi");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(x_min[i] <= x_max[i])) {
        throw StructureError("normalizer x_min > x_max for '" + feature_names[i] + "'");
      }
      if (degenerate[i] != (x_min[i] == x_max[i])) {
        throw StructureError("normalizer degenerate flag inconsistent for '" + feature_names[i] + "'");
      }
    }
  }

  friend bool operator==(const NormalizerStats&, const NormalizerStats&) = default;
};

/// Per-feature extrema over every point in the set.
inline NormalizerStats fit_normalizer(const LabeledPointSet& points, double target_lo = -1.0,
                           double target_hi = 1.0) {
  if (points.empty()) throw ArgumentError("cannot fit a normalizer on an empty point set");
  if (!(target_lo < target_hi)) throw ArgumentError("target_lo must be < target_hi");
  const std::size_t n = points.dimension();
  NormalizerStats s;
  s.feature_names = points.feature_names();
  s.target_lo = target_lo;
  s.target_hi = target_hi;
  s.x_min = points[0].features;
  s.x_max = points[0].features;
  for (const auto& p : points.points()) {
    for (std::size_t i = 0; i < n; ++i) {
      s.x_min[i] = std::min(s.x_min[i], p.features[i]);
      s.x_max[i] = std::max(s.x_max[i], p.features[i]);
    }
  }
  s.degenerate.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.degenerate[i] = s.x_min[i] == s.x_max[i];
  return s;
}

/// x' = lo + (x - x_min)(hi - lo)/(x_max - x_min). Degenerate features map to
/// the midpoint of the target; values outside [x_min, x_max] extrapolate.
inline void normalize_into(const NormalizerStats& s, std::span<const double> v, std::span<double> out) {
  if (v.size() != s.dimension() || out.size() != s.dimension()) {
    throw ArgumentError("vector has " + std::to_string(v.size()) + " features, normalizer expects " +
                        std::to_string(s.dimension()));
  }
  const double span = s.target_hi - s.target_lo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (s.degenerate[i]) {
      out[i] = (s.target_lo + s.target_hi) / 2.0;
    } else {
      out[i] = s.target_lo + (v[i] - s.x_min[i]) * span / (s.x_max[i] - s.x_min[i]);
    }
  }
}

inline std::vector<double> normalize(const NormalizerStats& s, std::span<const double> v) {
  std::vector<double> out(v.size());
  normalize_into(s, v, out);
  return out;
}

inline std::vector<double> normalize(const NormalizerStats& s, const std::vector<double>& v) {
  return normalize(s, std::span<const double>(v));
}

inline LabeledPointSet normalize(const NormalizerStats& s, const LabeledPointSet& points) {
  if (points.feature_names() != s.feature_names) {
    throw ArgumentError("point set features do not match the normalizer");
  }
  LabeledPointSet out(points.feature_names());
  for (const auto& p : points.points()) out.add(normalize(s, p.features), p.label);
  return out;
}

/// Affine inverse of normalize(). Degenerate features cannot be inverted.
inline std::vector<double> denormalize(const NormalizerStats& s, std::span<const double> v) {
  if (v.size() != s.dimension()) {
    throw ArgumentError("vector has " + std::to_string(v.size()) + " features, normalizer expects " +
                        std::to_string(s.dimension()));
  }
  const double span = s.target_hi - s.target_lo;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (s.degenerate[i]) {
      throw DegenerateInputError("feature '" + s.feature_names[i] + "' is degenerate and cannot be inverted");
    }
    out[i] = s.x_min[i] + (v[i] - s.target_lo) * (s.x_max[i] - s.x_min[i]) / span;
  }
  return out;
}

inline std::vector<double> denormalize(const NormalizerStats& s, const std::vector<double>& v) {
  return denormalize(s, std::span<const double>(v));
}

inline void write_normalizer_csv(std::ostream& out, const NormalizerStats& s) {
  out << "feature,x_min,x_max,target_lo,target_hi,degenerate\n";
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    out << s.feature_names[i] << ',' << format_real(s.x_min[i]) << ',' << format_real(s.x_max[i])
        << ',' << format_real(s.target_lo) << ',' << format_real(s.target_hi) << ','
        << (s.degenerate[i] ? 1 : 0) << '\n';
  }
}

}  // namespace wavediag

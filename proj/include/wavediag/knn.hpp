// K-nearest-neighbour baseline over normalized feature vectors.
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavediag/error.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

struct KnnModel {
  std::size_t k = 5;
  LabeledPointSet points;
};

inline KnnModel knn_fit(const LabeledPointSet& points, std::size_t k = 5) {
  if (points.empty()) throw ArgumentError("KNN needs at least one stored point");
  if (k == 0 || k > points.size()) {
    throw ArgumentError("k must lie in 1.." + std::to_string(points.size()) + ", got " +
                        std::to_string(k));
  }
  return {k, points};
}

/// Majority label among the k nearest stored points (Euclidean). Distance ties
/// go to the lower stored index; vote ties go to the label that occurs
/// nearest, which is the nearest neighbour's label whenever it is tied.
inline int knn_predict(const KnnModel& model, std::span<const double> x) {
  const auto& pts = model.points;
  if (x.size() != pts.dimension()) {
    throw ArgumentError("query has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(pts.dimension()));
  }
  using Entry = std::pair<double, std::size_t>;
  std::vector<Entry> dist(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& f = pts[i].features;
    double d = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double t = f[j] - x[j];
      d += t * t;
    }
    dist[i] = {d, i};
  }
  const auto k = static_cast<std::ptrdiff_t>(model.k);
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  std::array<std::size_t, kClassCount> votes{};
  for (std::ptrdiff_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(pts[dist[static_cast<std::size_t>(i)].second].label)];
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  for (std::ptrdiff_t i = 0; i < k; ++i) {
    const int label = pts[dist[static_cast<std::size_t>(i)].second].label;
    if (votes[static_cast<std::size_t>(label)] == top) return label;
  }
  return pts[dist.front().second].label;
}

inline int knn_predict(const KnnModel& model, const std::vector<double>& x) {
  return knn_predict(model, std::span<const double>(x));
}

}  // namespace wavediag

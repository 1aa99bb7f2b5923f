// End-to-end glue: compressed point assembly, stratified splitting, training
// and evaluation, and the windowed stream diagnoser.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavediag/dfn.hpp"
#include "wavediag/diagnose.hpp"
#include "wavediag/error.hpp"
#include "wavediag/knn.hpp"
#include "wavediag/preprocess.hpp"
#include "wavediag/random.hpp"
#include "wavediag/signal.hpp"
#include "wavediag/wavelet.hpp"

namespace wavediag {

/// Per-time-point feature vectors from a labeled recording, in `features`
/// order.
inline LabeledPointSet to_points(const Recording& rec, const std::vector<std::string>& features) {
  if (!rec.has_labels()) throw ArgumentError("recording is unlabeled");
  std::vector<std::size_t> idx;
  for (const auto& f : features) idx.push_back(rec.channel_index(f));
  LabeledPointSet out(features);
  const auto& labels = *rec.labels();
  for (std::size_t t = 0; t < rec.length(); ++t) {
    std::vector<double> v(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) v[j] = rec.channel(idx[j])[t];
    out.add(std::move(v), labels[t]);
  }
  return out;
}

/// compress(levels) per channel, then one point per compressed time step.
inline LabeledPointSet compress_to_points(const Recording& raw, const std::vector<std::string>& features,
                                          std::size_t levels = 3) {
  return to_points(compress_recording(raw, levels), features);
}

inline LabeledPointSet compress_to_points(std::span<const Recording> raws,
                                          const std::vector<std::string>& features,
                                          std::size_t levels = 3) {
  LabeledPointSet out(features);
  for (const auto& r : raws) out.append(compress_to_points(r, features, levels));
  return out;
}

struct Split {
  LabeledPointSet train;
  LabeledPointSet test;
};

/// Training share for a class of `n` points: floor(n * fraction), at least 1.
inline std::size_t train_count(std::size_t n, double fraction) {
  if (n == 0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
  return std::clamp<std::size_t>(k, 1, n);
}

/// Per class (ascending code), shuffles the class's points with a seeded
/// stream and sends the first train_count() of them to training.
inline Split stratified_split(const LabeledPointSet& points, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("split fraction must lie in (0, 1)");
  Split s{LabeledPointSet(points.feature_names()), LabeledPointSet(points.feature_names())};
  for (int c = 0; c < kClassCount; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].label == c) idx.push_back(i);
    }
    if (idx.empty()) continue;
    Rng rng(derive_seed(seed, 0x5EED0000ULL + static_cast<std::uint64_t>(c)));
    rng.shuffle(std::span<std::size_t>(idx));
    const std::size_t k = train_count(idx.size(), fraction);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto& p = points[idx[j]];
      (j < k ? s.train : s.test).add(p.features, p.label);
    }
  }
  return s;
}

inline MetricsReport evaluate(const MLPModel& model, const LabeledPointSet& points) {
  const auto decisions = classify(model, points);
  std::vector<int> pred;
  pred.reserve(decisions.size());
  for (const auto& d : decisions) pred.push_back(decision_code(d));
  return metrics(pred, points.labels(), model.class_count);
}

/// KNN on the same normalized space the network sees.
inline MetricsReport evaluate_knn(const NormalizerStats& stats, const LabeledPointSet& train,
                                  const LabeledPointSet& test, std::size_t k, int class_count) {
  const auto model = knn_fit(normalize(stats, train), k);
  std::vector<int> pred;
  pred.reserve(test.size());
  std::vector<double> x(test.dimension());
  for (const auto& p : test.points()) {
    normalize_into(stats, p.features, x);
    pred.push_back(knn_predict(model, x));
  }
  return metrics(pred, test.labels(), class_count);
}

// ---------------------------------------------------------------------------
// Streaming
// ---------------------------------------------------------------------------

/// Turns raw windows into verdicts: compress each channel, assemble one point
/// per compressed step in the model's feature order, predict, round, judge.
class StreamDiagnoser {
 public:
  StreamDiagnoser(const MLPModel& model, const std::vector<std::string>& input_channels,
                  std::size_t window_raw = 160, std::size_t levels = 3, std::size_t run_min = 3)
      : model_(model), window_raw_(window_raw), levels_(levels), run_min_(run_min) {
    detail::check_dyadic(window_raw, levels);
    if (run_min == 0) throw ArgumentError("run_min must be >= 1");
    for (const auto& name : model.normalizer.feature_names) {
      std::size_t found = input_channels.size();
      for (std::size_t i = 0; i < input_channels.size(); ++i) {
        if (input_channels[i] == name) found = i;
      }
      if (found == input_channels.size()) {
        throw ArgumentError("input has no channel '" + name + "' required by the model");
      }
      channel_index_.push_back(found);
    }
  }

  std::size_t window_raw() const noexcept { return window_raw_; }
  std::size_t points_per_window() const noexcept { return window_raw_ >> levels_; }

  /// Compressed wire payload of one window, one vector per channel in model
  /// feature order.
  std::vector<std::vector<double>> compress_window(const Recording& window) const {
    if (window.length() != window_raw_) {
      throw ArgumentError("window has " + std::to_string(window.length()) + " samples, expected " +
                          std::to_string(window_raw_));
    }
    std::vector<std::vector<double>> out;
    out.reserve(channel_index_.size());
    for (auto c : channel_index_) out.push_back(compress(window.channel(c), levels_));
    return out;
  }

  Verdict judge(const Recording& window) const {
    const auto payload = compress_window(window);
    const std::size_t n = points_per_window();
    std::vector<Decision> decisions;
    decisions.reserve(n);
    std::vector<double> point(payload.size());
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t j = 0; j < payload.size(); ++j) point[j] = payload[j][t];
      decisions.push_back(round_decision(predict(model_, point), model_.class_count));
    }
    return window_verdict(decisions, run_min_);
  }

 private:
  const MLPModel& model_;
  std::size_t window_raw_;
  std::size_t levels_;
  std::size_t run_min_;
  std::vector<std::size_t> channel_index_;
};

}  // namespace wavediag

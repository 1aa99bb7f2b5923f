// Rounding decision rule, windowed joint verdict and classification metrics.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wavediag/error.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

/// Rounded classifier output. `label` is empty when the raw value fell
/// outside the rounding window.
struct Decision {
  std::optional<ClassLabel> label;
  double raw = 0.0;

  bool is_unknown() const noexcept { return !label.has_value(); }
  bool operator==(const Decision&) const = default;
};

/// Class(round(f)) when -0.5 < f < (class_count - 1) + 0.5, Unknown otherwise.
/// Rounding is half-away-from-zero.
inline Decision round_decision(double f, int class_count = kClassCount) {
  if (!std::isfinite(f)) throw ArgumentError("classifier output is not finite");
  if (class_count < 1 || class_count > kClassCount) {
    throw ArgumentError("class count must lie in 1.." + std::to_string(kClassCount));
  }
  Decision d;
  d.raw = f;
  if (f > -0.5 && f < static_cast<double>(class_count - 1) + 0.5) {
    d.label = static_cast<ClassLabel>(static_cast<int>(std::round(f)));
  }
  return d;
}

enum class VerdictRule { TrailingRun, Majority };

constexpr std::string_view rule_name(VerdictRule r) noexcept {
  return r == VerdictRule::TrailingRun ? "TrailingRun" : "Majority";
}

struct Verdict {
  ClassLabel final = ClassLabel::Normal;
  std::array<std::size_t, kClassCount> counts{};
  std::size_t unknown = 0;
  VerdictRule rule = VerdictRule::Majority;
  std::vector<Decision> window;

  std::size_t total() const noexcept {
    std::size_t s = unknown;
    for (auto c : counts) s += c;
    return s;
  }
};

/// Joint decision over a window.
///
/// A trailing run of at least `run_min` identical fault decisions wins even
/// when it is the minority: it marks a fault that began inside the window.
/// Otherwise the most frequent known class wins, ties to the lower code. An
/// all-Unknown window reports Normal.
inline Verdict window_verdict(std::span<const Decision> decisions, std::size_t run_min = 3) {
  if (decisions.empty()) throw ArgumentError("verdict window is empty");
  if (run_min == 0) throw ArgumentError("run_min must be >= 1");
  Verdict v;
  v.window.assign(decisions.begin(), decisions.end());
  for (const auto& d : decisions) {
    if (d.label) {
      ++v.counts[static_cast<std::size_t>(code(*d.label))];
    } else {
      ++v.unknown;
    }
  }

  const auto& last = decisions.back();
  if (last.label && *last.label != ClassLabel::Normal) {
    std::size_t run = 0;
    for (auto it = decisions.rbegin(); it != decisions.rend() && it->label == last.label; ++it) ++run;
    if (run >= run_min) {
      v.final = *last.label;
      v.rule = VerdictRule::TrailingRun;
      return v;
    }
  }

  v.rule = VerdictRule::Majority;
  std::size_t best = 0;
  for (std::size_t c = 1; c < v.counts.size(); ++c) {
    if (v.counts[c] > v.counts[best]) best = c;
  }
  v.final = static_cast<ClassLabel>(best);
  return v;
}

inline Verdict window_verdict(const std::vector<Decision>& decisions, std::size_t run_min = 3) {
  return window_verdict(std::span<const Decision>(decisions), run_min);
}

/// One NDJSON record: window_index, final, rule, counts, decisions.
inline nlohmann::json verdict_to_json(const Verdict& v, std::size_t window_index) {
  nlohmann::json counts = nlohmann::json::object();
  for (int c = 0; c < kClassCount; ++c) {
    counts[std::string(kClassNames[static_cast<std::size_t>(c)])] = v.counts[static_cast<std::size_t>(c)];
  }
  counts["Unknown"] = v.unknown;
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : v.window) {
    decisions.push_back(d.label ? nlohmann::json(std::string(label_name(*d.label)))
                                : nlohmann::json("Unknown"));
  }
  return {{"window_index", window_index},
          {"final", std::string(label_name(v.final))},
          {"rule", std::string(rule_name(v.rule))},
          {"counts", counts},
          {"decisions", decisions}};
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Prediction code for an Unknown decision. It counts against recall and
/// accuracy but belongs to no predicted-class column.
inline constexpr int kUnknownCode = -1;

inline int decision_code(const Decision& d) noexcept {
  return d.label ? code(*d.label) : kUnknownCode;
}

struct MetricsReport {
  int class_count = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
  std::vector<std::size_t> unknown;                  // [truth]
  std::vector<double> precision;
  std::vector<double> recall;
  double accuracy = 0.0;
  std::size_t total = 0;
};

inline MetricsReport metrics(std::span<const int> pred, std::span<const int> truth, int class_count) {
  if (pred.size() != truth.size()) {
    throw ArgumentError("prediction and truth lengths differ: " + std::to_string(pred.size()) +
                        " vs " + std::to_string(truth.size()));
  }
  if (pred.empty()) throw ArgumentError("metrics need at least one prediction");
  if (class_count < 1) throw ArgumentError("class count must be >= 1");
  const auto k = static_cast<std::size_t>(class_count);
  MetricsReport m;
  m.class_count = class_count;
  m.total = pred.size();
  m.confusion.assign(k, std::vector<std::size_t>(k, 0));
  m.unknown.assign(k, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < kUnknownCode || pred[i] >= class_count || truth[i] < 0 ||
        truth[i] >= class_count) {
      throw ArgumentError("class code out of range at index " + std::to_string(i));
    }
    if (pred[i] == kUnknownCode) {
      ++m.unknown[static_cast<std::size_t>(truth[i])];
      continue;
    }
    ++m.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
  }
  std::size_t trace = 0;
  m.precision.assign(k, 0.0);
  m.recall.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = m.unknown[c], col = 0;
    for (std::size_t o = 0; o < k; ++o) {
      row += m.confusion[c][o];
      col += m.confusion[o][c];
    }
    const auto hit = m.confusion[c][c];
    trace += hit;
    if (col) m.precision[c] = static_cast<double>(hit) / static_cast<double>(col);
    if (row) m.recall[c] = static_cast<double>(hit) / static_cast<double>(row);
  }
  m.accuracy = static_cast<double>(trace) / static_cast<double>(m.total);
  return m;
}

inline MetricsReport metrics(const std::vector<int>& pred, const std::vector<int>& truth,
                             int class_count) {
  return metrics(std::span<const int>(pred), std::span<const int>(truth), class_count);
}

inline void write_metrics_report(std::ostream& out, const MetricsReport& m, std::string_view title) {
  out << "# " << title << '\n';
  out << "samples: " << m.total << '\n';
  out << "accuracy: " << format_real(m.accuracy) << '\n';
  out << "class,precision,recall,support\n";
  for (int c = 0; c < m.class_count; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    std::size_t support = m.unknown[cc];
    for (auto v : m.confusion[cc]) support += v;
    const std::string name = c < kClassCount ? std::string(kClassNames[cc]) : std::to_string(c);
    out << name << ',' << format_real(m.precision[cc]) << ',' << format_real(m.recall[cc]) << ','
        << support << '\n';
  }
  out << "confusion (rows = truth, columns = predicted, last = unknown):\n";
  for (std::size_t i = 0; i < m.confusion.size(); ++i) {
    for (auto v : m.confusion[i]) out << v << ',';
    out << m.unknown[i] << '\n';
  }
}

}  // namespace wavediag

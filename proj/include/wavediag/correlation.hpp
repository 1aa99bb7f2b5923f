// Pearson correlation over channels and greedy redundancy removal.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavediag/error.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ArgumentError("sequence lengths differ: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
  }
  if (x.size() < 2) throw ArgumentError("need at least two samples");
}

inline double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace detail

/// Sample covariance, divisor m - 1.
inline double covariance(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - mx) * (y[k] - my);
  return s / static_cast<double>(x.size() - 1);
}

/// Pearson coefficient. Throws DegenerateInputError if either input is
/// constant. Round-off beyond [-1, 1] is clamped.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("constant sequence has zero variance");
  // The (m - 1) divisors cancel.
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, -1.0, 1.0);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(std::span<const double>(x), std::span<const double>(y));
}

inline double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  return covariance(std::span<const double>(x), std::span<const double>(y));
}

/// Symmetric matrix of Pearson coefficients, row-major.
class CorrelationMatrix {
 public:
  CorrelationMatrix(std::vector<std::string> names, std::vector<double> r)
      : names_(std::move(names)), r_(std::move(r)) {
    const std::size_t n = names_.size();
    if (n == 0) throw ArgumentError("correlation matrix needs at least one feature");
    if (r_.size() != n * n) throw ArgumentError("correlation matrix must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double v = (*this)(i, j);
        if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12) {
          throw ArgumentError("correlation entry out of [-1, 1]");
        }
        if (v != (*this)(j, i)) throw ArgumentError("correlation matrix must be symmetric");
      }
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  double operator()(std::size_t i, std::size_t j) const { return r_[i * names_.size() + j]; }
  const std::vector<double>& values() const noexcept { return r_; }

  friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> r_;
};

/// Pairwise Pearson coefficients over all channels; the diagonal is exactly 1.
inline CorrelationMatrix correlation_matrix(const Recording& rec) {
  const std::size_t n = rec.channel_count();
  if (n < 2) throw ArgumentError("correlation matrix needs at least two channels");
  if (rec.length() < 2) throw ArgumentError("correlation matrix needs at least two samples");
  for (std::size_t c = 0; c < n; ++c) {
    auto ch = rec.channel(c);
    if (std::all_of(ch.begin(), ch.end(), [&](double v) { return v == ch.front(); })) {
      throw DegenerateInputError("channel '" + rec.channel_names()[c] + "' is constant");
    }
  }
  std::vector<double> r(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    r[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = pearson(rec.channel(i), rec.channel(j));
      r[i * n + j] = v;
      r[j * n + i] = v;
    }
  }
  return CorrelationMatrix(rec.channel_names(), std::move(r));
}

inline void write_correlation_csv(std::ostream& out, const CorrelationMatrix& cm) {
  out << "feature";
  for (const auto& n : cm.names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < cm.size(); ++i) {
    out << cm.names()[i];
    for (std::size_t j = 0; j < cm.size(); ++j) out << ',' << format_real(cm(i, j));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Correlation degree
// ---------------------------------------------------------------------------

enum class CorrelationDegree { Weak, Moderate, Significant, High };

constexpr std::string_view degree_name(CorrelationDegree d) noexcept {
  switch (d) {
    case CorrelationDegree::Weak: return "weak";
    case CorrelationDegree::Moderate: return "moderate";
    case CorrelationDegree::Significant: return "significant";
    case CorrelationDegree::High: return "high";
  }
  return "?";
}

/// Bins |r|: [0, 0.3) weak, [0.3, 0.5) moderate, [0.5, 0.8) significant,
/// [0.8, 1] high.
inline CorrelationDegree degree(double r) {
  const double a = std::abs(r);
  if (!(a <= 1.0)) throw ArgumentError("correlation coefficient outside [-1, 1]");
  if (a < 0.3) return CorrelationDegree::Weak;
  if (a < 0.5) return CorrelationDegree::Moderate;
  if (a < 0.8) return CorrelationDegree::Significant;
  return CorrelationDegree::High;
}

// ---------------------------------------------------------------------------
// Feature selection
// ---------------------------------------------------------------------------

struct Displacement {
  std::string removed;
  std::string by;
  double r = 0.0;

  friend bool operator==(const Displacement&, const Displacement&) = default;
};

struct SelectionReport {
  std::vector<std::string> kept;           // in scan order
  std::vector<Displacement> removed;       // still removed after fine-tuning
  std::vector<std::string> fine_tuned_in;  // re-added, in order

  /// Final feature set: kept followed by fine-tuned features.
  std::vector<std::string> selected() const {
    std::vector<std::string> out = kept;
    out.insert(out.end(), fine_tuned_in.begin(), fine_tuned_in.end());
    return out;
  }

  friend bool operator==(const SelectionReport&, const SelectionReport&) = default;
};

/// Greedy redundancy removal.
///
/// 1. Rank features by how many partners they have with |r| >= threshold,
///    descending, ties by index.
/// 2. Scan in rank order. A feature that is still available is kept and
///    removes every available partner with |r| >= threshold.
/// 3. `fine_tune_count` times, re-add the removed feature whose largest |r|
///    against the current selection is smallest (ties by index).
///
/// The partner-count ranking is a heuristic: a feature that explains many
/// others is treated as the most informative representative of its group.
inline SelectionReport select_features(const CorrelationMatrix& cm,
                                       double redundancy_threshold = 0.5,
                                       std::size_t fine_tune_count = 1) {
  if (!(redundancy_threshold > 0.0 && redundancy_threshold <= 1.0)) {
    throw ArgumentError("redundancy threshold must lie in (0, 1]");
  }
  const std::size_t n = cm.size();
  auto redundant = [&](std::size_t i, std::size_t j) {
    return i != j && std::abs(cm(i, j)) >= redundancy_threshold;
  };

  std::vector<std::size_t> partners(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) partners[i] += redundant(i, j) ? 1 : 0;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return partners[a] > partners[b]; });

  enum class State { Open, Kept, Removed };
  std::vector<State> state(n, State::Open);
  std::vector<std::size_t> removed_by(n, n);
  std::vector<std::size_t> selected;
  std::vector<std::size_t> removal_order;
  for (std::size_t i : order) {
    if (state[i] != State::Open) continue;
    state[i] = State::Kept;
    selected.push_back(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (state[j] == State::Open && redundant(i, j)) {
        state[j] = State::Removed;
        removed_by[j] = i;
        removal_order.push_back(j);
      }
    }
  }

  SelectionReport report;
  for (std::size_t i : selected) report.kept.push_back(cm.names()[i]);

  std::vector<std::size_t> fine_tuned;
  for (std::size_t round = 0; round < fine_tune_count; ++round) {
    std::size_t best = n;
    double best_score = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (state[j] != State::Removed) continue;
      double score = 0.0;
      for (std::size_t s : selected) score = std::max(score, std::abs(cm(j, s)));
      if (best == n || score < best_score) {
        best = j;
        best_score = score;
      }
    }
    if (best == n) break;
    state[best] = State::Kept;
    selected.push_back(best);
    fine_tuned.push_back(best);
    report.fine_tuned_in.push_back(cm.names()[best]);
  }

  for (std::size_t j : removal_order) {
    if (state[j] == State::Removed) {
      report.removed.push_back({cm.names()[j], cm.names()[removed_by[j]], cm(j, removed_by[j])});
    }
  }
  return report;
}

inline void write_selection_report(std::ostream& out, const SelectionReport& rep) {
  out << "kept:";
  for (const auto& k : rep.kept) out << ' ' << k;
  out << '\n';
  for (const auto& d : rep.removed) {
    out << "removed: " << d.removed << " by " << d.by << " (r = " << format_real(d.r) << ", "
        << degree_name(degree(d.r)) << ")\n";
  }
  out << "fine_tuned_in:";
  for (const auto& f : rep.fine_tuned_in) out << ' ' << f;
  out << '\n';
  out << "selected:";
  for (const auto& s : rep.selected()) out << ' ' << s;
  out << '\n';
}

}  // namespace wavediag

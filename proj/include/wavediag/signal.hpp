// Recordings, class labels, labeled point sets, windowing and the CSV format
// every other module reads and writes.
//
// CSV layout (UTF-8, ',' separator, '.' decimal point):
//
//   t,<channel>...[,label]
//   0,1.0,...,0
//   6.25e-05,2.0,...,0
//
// The header row is mandatory. The `t` column is only used to infer the sample
// rate from the first two rows. Reals are written with 17 significant digits
// so that binary64 values survive a save/load round trip unchanged.
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "wavediag/error.hpp"

namespace wavediag {

// ---------------------------------------------------------------------------
// Class labels
// ---------------------------------------------------------------------------

/// Converter state. Codes 0-4 are the healthy state and the four single
/// open-circuit switch faults; 5 and 6 are the two double faults.
enum class ClassLabel : int { Normal = 0, S1 = 1, S2 = 2, S3 = 3, S4 = 4, S1S2 = 5, S2S4 = 6 };

inline constexpr int kClassCount = 7;

inline constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "Normal", "S1", "S2", "S3", "S4", "S1S2", "S2S4"};

constexpr int code(ClassLabel c) noexcept { return static_cast<int>(c); }

constexpr bool is_valid_code(int c) noexcept { return c >= 0 && c < kClassCount; }

inline ClassLabel label_from_code(int c) {
  if (!is_valid_code(c)) {
    throw ArgumentError("unknown class code " + std::to_string(c) + " (expected 0.." +
                        std::to_string(kClassCount - 1) + ")");
  }
  return static_cast<ClassLabel>(c);
}

constexpr std::string_view label_name(ClassLabel c) noexcept {
  return kClassNames[static_cast<std::size_t>(code(c))];
}

inline std::optional<ClassLabel> label_from_name(std::string_view name) noexcept {
  for (int i = 0; i < kClassCount; ++i) {
    if (kClassNames[static_cast<std::size_t>(i)] == name) return static_cast<ClassLabel>(i);
  }
  return std::nullopt;
}

inline constexpr std::array<ClassLabel, kClassCount> kAllClassLabels = {
    ClassLabel::Normal, ClassLabel::S1, ClassLabel::S2, ClassLabel::S3,
    ClassLabel::S4, ClassLabel::S1S2, ClassLabel::S2S4};

// ---------------------------------------------------------------------------
// Text helpers
// ---------------------------------------------------------------------------

/// Shortest form that still round-trips: 17 significant digits.
inline std::string format_real(double v) {
  std::array<char, 40> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw ArgumentError("cannot format real");
  return std::string(buf.data(), end);
}

inline std::optional<double> parse_real(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Recording
// ---------------------------------------------------------------------------

/// Named multichannel time series at a fixed sample rate, optionally labeled
/// per sample. Immutable after construction.
class Recording {
 public:
  Recording(std::vector<std::string> channel_names, double sample_rate_hz,
            std::vector<std::vector<double>> channels,
            std::optional<std::vector<int>> labels = std::nullopt)
      : names_(std::move(channel_names)),
        rate_(sample_rate_hz),
        channels_(std::move(channels)),
        labels_(std::move(labels)) {
    if (names_.empty()) throw ArgumentError("recording needs at least one channel");
    if (names_.size() != channels_.size()) {
      throw ArgumentError("recording has " + std::to_string(names_.size()) + " names but " +
                          std::to_string(channels_.size()) + " channels");
    }
    if (!(rate_ > 0.0) || !std::isfinite(rate_)) {
      throw ArgumentError("sample rate must be positive and finite");
    }
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw ArgumentError("empty channel name");
      if (!seen.insert(n).second) throw ArgumentError("duplicate channel name '" + n + "'");
    }
    const std::size_t len = channels_.front().size();
    if (len == 0) throw ArgumentError("recording channels must be non-empty");
    for (std::size_t c = 0; c < channels_.size(); ++c) {
      if (channels_[c].size() != len) {
        throw ArgumentError("channel '" + names_[c] + "' has length " +
                            std::to_string(channels_[c].size()) + ", expected " +
                            std::to_string(len));
      }
    }
    if (labels_) {
      if (labels_->size() != len) {
        throw ArgumentError("label count " + std::to_string(labels_->size()) +
                            " does not match channel length " + std::to_string(len));
      }
      for (int l : *labels_) label_from_code(l);
    }
  }

  const std::vector<std::string>& channel_names() const noexcept { return names_; }
  double sample_rate_hz() const noexcept { return rate_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t length() const noexcept { return channels_.front().size(); }
  bool has_labels() const noexcept { return labels_.has_value(); }

  std::span<const double> channel(std::size_t i) const { return channels_.at(i); }
  std::span<const double> channel(std::string_view name) const {
    return channels_[channel_index(name)];
  }
  const std::vector<std::vector<double>>& channels() const noexcept { return channels_; }
  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> find_channel(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t channel_index(std::string_view name) const {
    if (auto i = find_channel(name)) return *i;
    throw ArgumentError("no channel named '" + std::string(name) + "'");
  }

  /// Copy of samples [begin, begin + count).
  Recording slice(std::size_t begin, std::size_t count) const {
    if (count == 0 || begin + count > length()) throw ArgumentError("slice out of range");
    std::vector<std::vector<double>> ch;
    ch.reserve(channels_.size());
    for (const auto& c : channels_) {
      ch.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(begin),
                      c.begin() + static_cast<std::ptrdiff_t>(begin + count));
    }
    std::optional<std::vector<int>> lab;
    if (labels_) {
      lab.emplace(labels_->begin() + static_cast<std::ptrdiff_t>(begin),
                  labels_->begin() + static_cast<std::ptrdiff_t>(begin + count));
    }
    return Recording(names_, rate_, std::move(ch), std::move(lab));
  }

  friend bool operator==(const Recording&, const Recording&) = default;

 private:
  std::vector<std::string> names_;
  double rate_;
  std::vector<std::vector<double>> channels_;
  std::optional<std::vector<int>> labels_;
};

/// Consecutive non-overlapping windows of `window_len` samples. A trailing
/// partial window is dropped.
inline std::vector<Recording> window_iter(const Recording& rec, std::size_t window_len) {
  if (window_len == 0) throw ArgumentError("window length must be >= 1");
  std::vector<Recording> out;
  const std::size_t n = rec.length() / window_len;
  out.reserve(n);
  for (std::size_t w = 0; w < n; ++w) out.push_back(rec.slice(w * window_len, window_len));
  return out;
}

/// Joins recordings end to end. Channel names and sample rates must agree;
/// labels are kept only if every part carries them.
inline Recording concatenate(std::span<const Recording> parts) {
  if (parts.empty()) throw ArgumentError("nothing to concatenate");
  const auto& first = parts.front();
  std::vector<std::vector<double>> ch(first.channel_count());
  std::vector<int> labels;
  bool labeled = true;
  for (const auto& p : parts) {
    if (p.channel_names() != first.channel_names()) {
      throw ArgumentError("recordings have different channel sets");
    }
    if (p.sample_rate_hz() != first.sample_rate_hz()) {
      throw ArgumentError("recordings have different sample rates");
    }
    for (std::size_t c = 0; c < ch.size(); ++c) {
      auto s = p.channel(c);
      ch[c].insert(ch[c].end(), s.begin(), s.end());
    }
    labeled = labeled && p.has_labels();
    if (labeled) labels.insert(labels.end(), p.labels()->begin(), p.labels()->end());
  }
  std::optional<std::vector<int>> lab;
  if (labeled) lab = std::move(labels);
  return Recording(first.channel_names(), first.sample_rate_hz(), std::move(ch), std::move(lab));
}

// ---------------------------------------------------------------------------
// Labeled points
// ---------------------------------------------------------------------------

struct LabeledPoint {
  std::vector<double> features;
  int label = 0;

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Feature vectors with class codes. Every vector has one entry per feature
/// name.
class LabeledPointSet {
 public:
  LabeledPointSet() = default;
  explicit LabeledPointSet(std::vector<std::string> feature_names)
      : names_(std::move(feature_names)) {}

  void add(std::vector<double> features, int label) {
    if (features.size() != names_.size()) {
      throw ArgumentError("point has " + std::to_string(features.size()) +
                          " features, expected " + std::to_string(names_.size()));
    }
    label_from_code(label);
    points_.push_back({std::move(features), label});
  }

  void append(const LabeledPointSet& other) {
    if (other.names_ != names_) throw ArgumentError("feature names differ between point sets");
    points_.insert(points_.end(), other.points_.begin(), other.points_.end());
  }

  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<LabeledPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.label);
    return out;
  }

  friend bool operator==(const LabeledPointSet&, const LabeledPointSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<LabeledPoint> points_;
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Incremental reader: parses the header eagerly, then hands out blocks of
/// rows. Memory use is bounded by the block size, which is what the stream
/// command relies on.
class CsvRecordingReader {
 public:
  explicit CsvRecordingReader(std::istream& in) : in_(in) { read_header(); }

  const std::vector<std::string>& channel_names() const noexcept { return names_; }
  bool has_labels() const noexcept { return has_label_; }

  /// Sample rate from the first two data rows. Requires at least two rows.
  double sample_rate_hz() {
    if (rate_) return *rate_;
    fill_lookahead(2);
    if (lookahead_.size() < 2) {
      throw ParseError("need at least two data rows to infer the sample rate", row_ + 1);
    }
    const double dt = lookahead_[1].t - lookahead_[0].t;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ParseError("time column must be strictly increasing", lookahead_[1].row);
    }
    double rate = 1.0 / dt;
    // Integral rates are the norm; undo the ulp lost in t = i / rate.
    const double nearest = std::round(rate);
    if (nearest > 0.0 && std::abs(rate - nearest) <= 1e-9 * nearest) rate = nearest;
    rate_ = rate;
    return rate;
  }

  /// Up to `max_rows` further rows, or std::nullopt at end of input.
  std::optional<Recording> next_block(std::size_t max_rows) {
    if (max_rows == 0) throw ArgumentError("block size must be >= 1");
    const double rate = sample_rate_hz();
    std::vector<std::vector<double>> ch(names_.size());
    std::vector<int> labels;
    std::size_t got = 0;
    while (got < max_rows) {
      fill_lookahead(1);
      if (lookahead_.empty()) break;
      Row r = std::move(lookahead_.front());
      lookahead_.erase(lookahead_.begin());
      for (std::size_t c = 0; c < names_.size(); ++c) ch[c].push_back(r.values[c]);
      if (has_label_) labels.push_back(r.label);
      ++got;
    }
    if (got == 0) return std::nullopt;
    std::optional<std::vector<int>> lab;
    if (has_label_) lab = std::move(labels);
    return Recording(names_, rate, std::move(ch), std::move(lab));
  }

 private:
  struct Row {
    std::size_t row = 0;
    double t = 0.0;
    std::vector<double> values;
    int label = 0;
  };

  void read_header() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("missing header row", 1);
    row_ = 1;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
      line.erase(0, 3);
    }
    auto fields = split_fields(trim(line));
    if (fields.empty() || trim(fields.front()) != "t") {
      throw ParseError("malformed header: first column must be 't'", 1);
    }
    std::size_t end = fields.size();
    if (end >= 2 && trim(fields.back()) == "label") {
      has_label_ = true;
      --end;
    }
    if (end < 2) throw ParseError("malformed header: no channel columns", 1);
    std::set<std::string> seen;
    for (std::size_t i = 1; i < end; ++i) {
      std::string name(trim(fields[i]));
      if (name.empty()) throw ParseError("malformed header: empty column name", 1);
      if (name == "t" || name == "label") {
        throw ParseError("malformed header: reserved column name '" + name + "'", 1);
      }
      if (!seen.insert(name).second) {
        throw ParseError("malformed header: duplicate column '" + name + "'", 1);
      }
      names_.push_back(std::move(name));
    }
  }

  void fill_lookahead(std::size_t want) {
    std::string line;
    while (lookahead_.size() < want && std::getline(in_, line)) {
      ++row_;
      auto body = trim(line);
      if (body.empty()) continue;
      lookahead_.push_back(parse_row(body));
    }
  }

  Row parse_row(std::string_view body) const {
    auto fields = split_fields(body);
    const std::size_t expected = 1 + names_.size() + (has_label_ ? 1 : 0);
    if (fields.size() != expected) {
      throw ParseError("ragged row: " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(expected),
                       row_);
    }
    Row r;
    r.row = row_;
    auto num = [&](std::size_t i) {
      auto v = parse_real(fields[i]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("non-numeric cell '" + std::string(fields[i]) + "' in column " +
                             std::to_string(i + 1),
                         row_);
      }
      return *v;
    };
    r.t = num(0);
    r.values.reserve(names_.size());
    for (std::size_t c = 0; c < names_.size(); ++c) r.values.push_back(num(c + 1));
    if (has_label_) {
      auto l = parse_integer(fields.back());
      if (!l) throw ParseError("non-integer label '" + std::string(fields.back()) + "'", row_);
      if (!is_valid_code(static_cast<int>(*l)) || *l != static_cast<int>(*l)) {
        throw ParseError("unknown label code " + std::to_string(*l), row_);
      }
      r.label = static_cast<int>(*l);
    }
    return r;
  }

  std::istream& in_;
  std::vector<std::string> names_;
  bool has_label_ = false;
  std::size_t row_ = 0;
  std::optional<double> rate_;
  std::vector<Row> lookahead_;
};

inline Recording read_recording_csv(std::istream& in) {
  CsvRecordingReader reader(in);
  const double rate = reader.sample_rate_hz();
  std::vector<std::vector<double>> ch(reader.channel_names().size());
  std::vector<int> labels;
  while (auto block = reader.next_block(4096)) {
    for (std::size_t c = 0; c < ch.size(); ++c) {
      auto s = block->channel(c);
      ch[c].insert(ch[c].end(), s.begin(), s.end());
    }
    if (block->has_labels()) {
      labels.insert(labels.end(), block->labels()->begin(), block->labels()->end());
    }
  }
  std::optional<std::vector<int>> lab;
  if (reader.has_labels()) lab = std::move(labels);
  return Recording(reader.channel_names(), rate, std::move(ch), std::move(lab));
}

inline Recording load_recording_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return read_recording_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Writes rows [first_sample, first_sample + length) with t = index / rate.
inline void write_recording_csv(std::ostream& out, const Recording& rec,
                                std::size_t first_sample = 0, bool with_header = true) {
  if (with_header) {
    out << 't';
    for (const auto& n : rec.channel_names()) out << ',' << n;
    if (rec.has_labels()) out << ",label";
    out << '\n';
  }
  for (std::size_t i = 0; i < rec.length(); ++i) {
    out << format_real(static_cast<double>(first_sample + i) / rec.sample_rate_hz());
    for (std::size_t c = 0; c < rec.channel_count(); ++c) {
      out << ',' << format_real(rec.channel(c)[i]);
    }
    if (rec.has_labels()) out << ',' << (*rec.labels())[i];
    out << '\n';
  }
}

inline void save_recording_csv(const Recording& rec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_recording_csv(out, rec);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace wavediag

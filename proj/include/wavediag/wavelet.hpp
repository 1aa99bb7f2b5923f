// Orthonormal Haar analysis/synthesis and approximation-only compression.
//
// One analysis step maps each sample pair (x[2k], x[2k+1]) to
//
//   approx[k] = (x[2k] + x[2k+1]) / sqrt(2)
//   detail[k] = (x[2k] - x[2k+1]) / sqrt(2)
//
// Both branches carry the 1/sqrt(2) factor, so the transform preserves energy
// and compressed magnitudes grow by 2^(L/2) after L levels. Downstream
// normalization takes care of the scale.
#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavediag/error.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

template <std::floating_point T>
struct HaarStep {
  std::vector<T> approx;
  std::vector<T> detail;
};

/// Dyadic decomposition: `details[0]` is the finest level.
template <std::floating_point T = double>
struct WaveletPyramid {
  std::vector<std::vector<T>> details;
  std::vector<T> approx;
  std::size_t original_len = 0;

  std::size_t levels() const noexcept { return details.size(); }

  /// Throws StructureError when the shapes do not describe a dyadic pyramid.
  void validate() const {
    if (details.empty()) throw StructureError("pyramid has no levels");
    if (original_len == 0) throw StructureError("pyramid original length is zero");
    if (details.size() >= 8 * sizeof(std::size_t)) throw StructureError("too many levels");
    const std::size_t block = std::size_t{1} << details.size();
    if (original_len % block != 0) {
      throw StructureError("original length " + std::to_string(original_len) +
                           " is not divisible by 2^" + std::to_string(details.size()));
    }
    std::size_t expect = original_len;
    for (std::size_t k = 0; k < details.size(); ++k) {
      expect /= 2;
      if (details[k].size() != expect) {
        throw StructureError("detail level " + std::to_string(k) + " has length " +
                             std::to_string(details[k].size()) + ", expected " +
                             std::to_string(expect));
      }
    }
    if (approx.size() != expect) {
      throw StructureError("approximation has length " + std::to_string(approx.size()) +
                           ", expected " + std::to_string(expect));
    }
  }

  friend bool operator==(const WaveletPyramid&, const WaveletPyramid&) = default;
};

template <std::floating_point T>
HaarStep<T> haar_forward_step(std::span<const T> seq) {
  if (seq.empty() || seq.size() % 2 != 0) {
    throw ArgumentError("Haar step needs a non-empty even-length sequence, got length " +
                        std::to_string(seq.size()));
  }
  constexpr T inv_sqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  const std::size_t half = seq.size() / 2;
  HaarStep<T> out;
  out.approx.resize(half);
  out.detail.resize(half);
  for (std::size_t k = 0; k < half; ++k) {
    const T a = seq[2 * k];
    const T b = seq[2 * k + 1];
    out.approx[k] = (a + b) * inv_sqrt2;
    out.detail[k] = (a - b) * inv_sqrt2;
  }
  return out;
}

template <std::floating_point T>
HaarStep<T> haar_forward_step(const std::vector<T>& seq) {
  return haar_forward_step(std::span<const T>(seq));
}

template <std::floating_point T>
std::vector<T> haar_inverse_step(std::span<const T> approx, std::span<const T> detail) {
  if (approx.size() != detail.size()) {
    throw ArgumentError("Haar inverse needs equal lengths, got " + std::to_string(approx.size()) +
                        " and " + std::to_string(detail.size()));
  }
  constexpr T inv_sqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  std::vector<T> out(2 * approx.size());
  for (std::size_t k = 0; k < approx.size(); ++k) {
    out[2 * k] = (approx[k] + detail[k]) * inv_sqrt2;
    out[2 * k + 1] = (approx[k] - detail[k]) * inv_sqrt2;
  }
  return out;
}

template <std::floating_point T>
std::vector<T> haar_inverse_step(const std::vector<T>& approx, const std::vector<T>& detail) {
  return haar_inverse_step(std::span<const T>(approx), std::span<const T>(detail));
}

namespace detail {

inline void check_dyadic(std::size_t len, std::size_t levels) {
  if (levels == 0) throw ArgumentError("wavelet levels must be >= 1");
  if (levels >= 8 * sizeof(std::size_t)) throw ArgumentError("too many wavelet levels");
  const std::size_t block = std::size_t{1} << levels;
  if (len < block || len % block != 0) {
    throw ArgumentError("sequence length " + std::to_string(len) + " must be a non-zero multiple of 2^" +
                        std::to_string(levels) + " = " + std::to_string(block));
  }
}

}  // namespace detail

template <std::floating_point T>
WaveletPyramid<T> decompose(std::span<const T> seq, std::size_t levels) {
  detail::check_dyadic(seq.size(), levels);
  WaveletPyramid<T> pyr;
  pyr.original_len = seq.size();
  pyr.details.reserve(levels);
  std::vector<T> running(seq.begin(), seq.end());
  for (std::size_t l = 0; l < levels; ++l) {
    auto step = haar_forward_step(std::span<const T>(running));
    pyr.details.push_back(std::move(step.detail));
    running = std::move(step.approx);
  }
  pyr.approx = std::move(running);
  return pyr;
}

template <std::floating_point T>
WaveletPyramid<T> decompose(const std::vector<T>& seq, std::size_t levels) {
  return decompose(std::span<const T>(seq), levels);
}

template <std::floating_point T>
std::vector<T> reconstruct(const WaveletPyramid<T>& pyr) {
  pyr.validate();
  std::vector<T> running = pyr.approx;
  for (std::size_t l = pyr.levels(); l-- > 0;) {
    running = haar_inverse_step(std::span<const T>(running), std::span<const T>(pyr.details[l]));
  }
  return running;
}

/// Lossy compression: the final approximation after `levels` analysis steps.
/// Output length is input length / 2^levels.
template <std::floating_point T>
std::vector<T> compress(std::span<const T> seq, std::size_t levels = 3) {
  detail::check_dyadic(seq.size(), levels);
  std::vector<T> running(seq.begin(), seq.end());
  constexpr T inv_sqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  std::size_t len = running.size();
  for (std::size_t l = 0; l < levels; ++l) {
    len /= 2;
    for (std::size_t k = 0; k < len; ++k) {
      running[k] = (running[2 * k] + running[2 * k + 1]) * inv_sqrt2;
    }
  }
  running.resize(len);
  return running;
}

template <std::floating_point T>
std::vector<T> compress(const std::vector<T>& seq, std::size_t levels = 3) {
  return compress(std::span<const T>(seq), levels);
}

/// Compresses every channel. Labels are reduced per block of 2^levels samples
/// by majority, ties going to the label of the block's last sample.
inline Recording compress_recording(const Recording& rec, std::size_t levels = 3) {
  detail::check_dyadic(rec.length(), levels);
  const std::size_t block = std::size_t{1} << levels;
  std::vector<std::vector<double>> ch;
  ch.reserve(rec.channel_count());
  for (std::size_t c = 0; c < rec.channel_count(); ++c) ch.push_back(compress(rec.channel(c), levels));
  std::optional<std::vector<int>> labels;
  if (rec.has_labels()) {
    const auto& raw = *rec.labels();
    labels.emplace();
    labels->reserve(rec.length() / block);
    for (std::size_t b = 0; b < rec.length(); b += block) {
      std::array<std::size_t, kClassCount> votes{};
      for (std::size_t i = b; i < b + block; ++i) ++votes[static_cast<std::size_t>(raw[i])];
      int best = raw[b + block - 1];
      for (int c = 0; c < kClassCount; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
      }
      labels->push_back(best);
    }
  }
  return Recording(rec.channel_names(), rec.sample_rate_hz() / static_cast<double>(block),
                   std::move(ch), std::move(labels));
}

// Pyramid text form, one level per line:
//
//   original_len,<n>
//   detail,<level>,<values...>
//   approx,<levels>,<values...>

template <std::floating_point T>
void write_pyramid_csv(std::ostream& out, const WaveletPyramid<T>& pyr) {
  pyr.validate();
  out << "original_len," << pyr.original_len << '\n';
  for (std::size_t l = 0; l < pyr.levels(); ++l) {
    out << "detail," << l;
    for (T v : pyr.details[l]) out << ',' << format_real(static_cast<double>(v));
    out << '\n';
  }
  out << "approx," << pyr.levels();
  for (T v : pyr.approx) out << ',' << format_real(static_cast<double>(v));
  out << '\n';
}

inline WaveletPyramid<double> read_pyramid_csv(std::istream& in) {
  WaveletPyramid<double> pyr;
  std::string line;
  std::size_t row = 0;
  bool have_len = false;
  bool have_approx = false;
  while (std::getline(in, line)) {
    ++row;
    auto body = trim(line);
    if (body.empty()) continue;
    auto f = split_fields(body);
    auto tag = trim(f[0]);
    if (tag == "original_len" && f.size() == 2) {
      auto n = parse_integer(f[1]);
      if (!n || *n <= 0) throw ParseError("bad original_len", row);
      pyr.original_len = static_cast<std::size_t>(*n);
      have_len = true;
      continue;
    }
    if ((tag != "detail" && tag != "approx") || f.size() < 3) {
      throw ParseError("unrecognized pyramid line", row);
    }
    auto level = parse_integer(f[1]);
    if (!level || *level < 0) throw ParseError("bad level index", row);
    std::vector<double> values;
    for (std::size_t i = 2; i < f.size(); ++i) {
      auto v = parse_real(f[i]);
      if (!v) throw ParseError("non-numeric coefficient", row);
      values.push_back(*v);
    }
    if (tag == "detail") {
      if (static_cast<std::size_t>(*level) != pyr.details.size()) {
        throw ParseError("detail levels out of order", row);
      }
      pyr.details.push_back(std::move(values));
    } else {
      pyr.approx = std::move(values);
      have_approx = true;
    }
  }
  if (!have_len || !have_approx) throw ParseError("incomplete pyramid");
  pyr.validate();
  return pyr;
}

}  // namespace wavediag

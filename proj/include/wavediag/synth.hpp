// Seeded class-conditional recordings that stand in for converter
// measurements. This is a statistical stand-in, not a circuit simulation.
//
// Four channels mirror the selected features (I_11, I_hau, I_12, I_RL). Each
// channel is a periodic base waveform w_c at the fundamental frequency:
//
//   x_c(t) = A_c * (1 + s*da_k) * (w_c(u) + s*h_k * w_c(2u)) + s*O_c*o_k + noise
//
// where u is the phase in cycles, s is `separation` and (da_k, o_k, h_k) is
// the class triple from kClassTriples. I_RL is a load current with a small
// ripple and a small class dependence, so it is dominated by measurement
// noise.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wavediag/error.hpp"
#include "wavediag/random.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

struct ClassTriple {
  double amplitude_delta;   // relative change of the waveform amplitude
  double offset;            // DC shift, scaled per channel
  double harmonic;          // second-harmonic fraction
};

/// Indexed by class code.
inline constexpr std::array<ClassTriple, kClassCount> kClassTriples = {{
    {0.00, 0.00, 0.00},    // Normal
    {-0.45, 1.00, 0.00},   // S1
    {-0.45, -1.00, 0.25},  // S2
    {0.40, 0.50, -0.25},   // S3
    {0.40, -0.50, 0.25},   // S4
    {-0.70, -1.50, 0.40},  // S1S2
    {0.00, 1.50, -0.40},   // S2S4
}};

enum class Waveform { Sine, Triangle, ClippedSine, Sawtooth };

struct ChannelProfile {
  std::string_view name;
  Waveform waveform;
  double amplitude;   // A_c
  double offset;      // O_c
  double phase;       // cycles
};

inline constexpr std::array<ChannelProfile, 4> kChannelProfiles = {{
    {"I_11", Waveform::Sine, 1.0, 0.8, 0.0},
    {"I_hau", Waveform::Triangle, 1.2, -0.6, 0.25},
    {"I_12", Waveform::ClippedSine, 0.9, 0.5, 0.5},
    {"I_RL", Waveform::Sawtooth, 0.04, 0.03, 0.0},
}};

inline double waveform_value(Waveform w, double cycles) {
  const double u = cycles - std::floor(cycles);
  switch (w) {
    case Waveform::Sine: return std::sin(2.0 * std::numbers::pi * u);
    case Waveform::Triangle: return 1.0 - 4.0 * std::abs(u - 0.5);
    case Waveform::ClippedSine: return std::clamp(1.5 * std::sin(2.0 * std::numbers::pi * u), -1.0, 1.0);
    case Waveform::Sawtooth: return 2.0 * u - 1.0;
  }
  return 0.0;
}

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t samples_per_class = 32768;
  std::vector<ClassLabel> classes{kAllClassLabels.begin(), kAllClassLabels.end()};
  double noise_sigma = 0.05;
  double separation = 1.0;
  double sample_rate_hz = 16000.0;
  double fundamental_hz = 100.0;

  void validate() const {
    if (samples_per_class == 0 || samples_per_class % 8 != 0) {
      throw ArgumentError("samples_per_class must be a positive multiple of 8 (3-level dyadic), got " +
                          std::to_string(samples_per_class));
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
      throw ArgumentError("noise_sigma must be >= 0");
    }
    if (!(separation > 0.0) || !std::isfinite(separation)) {
      throw ArgumentError("separation must be > 0");
    }
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
      throw ArgumentError("sample_rate_hz must be > 0");
    }
    if (!(fundamental_hz > 0.0) || !std::isfinite(fundamental_hz)) {
      throw ArgumentError("fundamental_hz must be > 0");
    }
    if (classes.empty()) throw ArgumentError("at least one class must be configured");
  }
};

inline std::vector<std::string> synth_channel_names() {
  std::vector<std::string> out;
  for (const auto& p : kChannelProfiles) out.emplace_back(p.name);
  return out;
}

/// Labeled four-channel recording of one class. Deterministic in
/// (class, cfg); each class draws noise from its own stream.
inline Recording generate_recording(ClassLabel label, const SynthConfig& cfg) {
  cfg.validate();
  const auto& tri = kClassTriples[static_cast<std::size_t>(code(label))];
  const double s = cfg.separation;
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(code(label))));
  const std::size_t n = cfg.samples_per_class;
  const double cycles_per_sample = cfg.fundamental_hz / cfg.sample_rate_hz;
  // Whole-sample periods use modular phase so the clean signal repeats exactly.
  const double period = cfg.sample_rate_hz / cfg.fundamental_hz;
  const bool integral_period = period >= 1.0 && std::abs(period - std::round(period)) < 1e-9;
  const auto period_samples = static_cast<std::size_t>(std::round(period));

  std::vector<std::vector<double>> ch(kChannelProfiles.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double cycles =
        integral_period ? static_cast<double>(i % period_samples) / static_cast<double>(period_samples)
                        : static_cast<double>(i) * cycles_per_sample;
    for (std::size_t c = 0; c < kChannelProfiles.size(); ++c) {
      const auto& p = kChannelProfiles[c];
      const double u = cycles + p.phase;
      const double shape = waveform_value(p.waveform, u) + s * tri.harmonic * waveform_value(p.waveform, 2.0 * u);
      double v = p.amplitude * (1.0 + s * tri.amplitude_delta) * shape + s * p.offset * tri.offset;
      if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * rng.normal();
      ch[c][i] = v;
    }
  }
  return Recording(synth_channel_names(), cfg.sample_rate_hz, std::move(ch),
                   std::vector<int>(n, code(label)));
}

/// One recording per configured class, in configuration order.
inline std::vector<Recording> generate_dataset(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<Recording> out;
  out.reserve(cfg.classes.size());
  for (auto c : cfg.classes) out.push_back(generate_recording(c, cfg));
  return out;
}

}  // namespace wavediag

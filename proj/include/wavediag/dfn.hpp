// Deep feedforward network: tansig hidden layers, a purelin scalar output,
// trained by mini-batch SGD on mean squared error to regress class codes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavediag/diagnose.hpp"
#include "wavediag/error.hpp"
#include "wavediag/preprocess.hpp"
#include "wavediag/random.hpp"
#include "wavediag/signal.hpp"

namespace wavediag {

enum class Activation { Tansig, Purelin };

constexpr std::string_view activation_name(Activation a) noexcept {
  return a == Activation::Tansig ? "tansig" : "purelin";
}

/// Hyperbolic-tangent sigmoid, 2 / (1 + exp(-2x)) - 1. Evaluated as tanh,
/// which is the same function without the cancellation near zero.
inline double tansig(double x) noexcept { return std::tanh(x); }

inline double activate(Activation a, double z) noexcept {
  return a == Activation::Tansig ? tansig(z) : z;
}

struct MLPConfig {
  std::vector<std::size_t> layer_sizes{4, 16, 16, 16, 16, 16, 16, 16, 16, 16, 1};
  Activation hidden_activation = Activation::Tansig;
  Activation output_activation = Activation::Purelin;
  double learning_rate = 0.01;
  double goal_mse = 1e-4;
  std::size_t max_epochs = 2000;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  int class_count = kClassCount;

  std::size_t input_size() const noexcept { return layer_sizes.empty() ? 0 : layer_sizes.front(); }

  void validate() const {
    if (layer_sizes.size() < 3) throw ArgumentError("network needs at least one hidden layer");
    for (auto n : layer_sizes) {
      if (n == 0) throw ArgumentError("layer sizes must be positive");
    }
    if (layer_sizes.back() != 1) throw ArgumentError("output layer must have exactly one neuron");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ArgumentError("learning rate must be positive");
    }
    if (!(goal_mse > 0.0)) throw ArgumentError("goal MSE must be positive");
    if (max_epochs == 0) throw ArgumentError("max_epochs must be >= 1");
    if (batch_size == 0) throw ArgumentError("batch size must be >= 1");
    if (class_count < 1 || class_count > kClassCount) {
      throw ArgumentError("class count must lie in 1.." + std::to_string(kClassCount));
    }
  }
};

/// Fully connected layer; weights are row-major with one row per output
/// neuron.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  Activation activation = Activation::Tansig;
  std::vector<double> weights;
  std::vector<double> biases;

  double& w(std::size_t row, std::size_t col) { return weights[row * inputs + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * inputs + col]; }
};

struct MLPModel {
  MLPConfig config;
  std::vector<DenseLayer> layers;
  NormalizerStats normalizer;
  int class_count = kClassCount;

  /// All parameters zero, shapes taken from `config`.
  static MLPModel zeros(const MLPConfig& config, NormalizerStats normalizer) {
    config.validate();
    MLPModel m;
    m.config = config;
    m.class_count = config.class_count;
    m.normalizer = std::move(normalizer);
    const auto& sz = config.layer_sizes;
    for (std::size_t l = 0; l + 1 < sz.size(); ++l) {
      DenseLayer layer;
      layer.inputs = sz[l];
      layer.outputs = sz[l + 1];
      layer.activation = l + 2 == sz.size() ? config.output_activation : config.hidden_activation;
      layer.weights.assign(layer.inputs * layer.outputs, 0.0);
      layer.biases.assign(layer.outputs, 0.0);
      m.layers.push_back(std::move(layer));
    }
    return m;
  }

  std::size_t input_size() const noexcept { return layers.empty() ? 0 : layers.front().inputs; }

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
  }

  void validate() const {
    if (layers.empty()) throw StructureError("model has no layers");
    if (layers.back().outputs != 1) throw StructureError("model output must be scalar");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      if (layer.weights.size() != layer.inputs * layer.outputs || layer.biases.size() != layer.outputs) {
        throw StructureError("layer " + std::to_string(l) + " parameter shapes are inconsistent");
      }
      if (l > 0 && layers[l - 1].outputs != layer.inputs) {
        throw StructureError("layer " + std::to_string(l) + " does not chain with its predecessor");
      }
      for (double v : layer.weights) {
        if (!std::isfinite(v)) throw StructureError("non-finite weight in layer " + std::to_string(l));
      }
      for (double v : layer.biases) {
        if (!std::isfinite(v)) throw StructureError("non-finite bias in layer " + std::to_string(l));
      }
    }
    normalizer.validate();
    if (normalizer.dimension() != input_size()) {
      throw StructureError("normalizer dimension does not match the input layer");
    }
    if (class_count < 1 || class_count > kClassCount) throw StructureError("bad class count");
  }
};

/// Parameter-shaped gradient buffers.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients like(const MLPModel& m) {
    Gradients g;
    for (const auto& l : m.layers) {
      g.weights.emplace_back(l.weights.size(), 0.0);
      g.biases.emplace_back(l.biases.size(), 0.0);
    }
    return g;
  }

  void zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
  }
};

struct TrainingExample {
  std::vector<double> x;
  double target = 0.0;
};

namespace detail {

/// Per-layer activation and delta buffers, reused across samples. Keeps a
/// column-major copy of the weights so the forward pass accumulates along
/// contiguous memory; call sync() after the model's weights change.
class Workspace {
 public:
  explicit Workspace(const MLPModel& m) {
    acts_.emplace_back(m.input_size(), 0.0);
    for (const auto& l : m.layers) {
      acts_.emplace_back(l.outputs, 0.0);
      deltas_.emplace_back(l.outputs, 0.0);
      transposed_.emplace_back(l.weights.size(), 0.0);
    }
    sync(m);
  }

  void sync(const MLPModel& m) {
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      const auto& layer = m.layers[l];
      double* t = transposed_[l].data();
      for (std::size_t r = 0; r < layer.outputs; ++r) {
        for (std::size_t c = 0; c < layer.inputs; ++c) t[c * layer.outputs + r] = layer.w(r, c);
      }
    }
  }

  double forward(const MLPModel& m, std::span<const double> x) {
    std::copy(x.begin(), x.end(), acts_[0].begin());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      const auto& layer = m.layers[l];
      const std::size_t rows = layer.outputs;
      const double* in = acts_[l].data();
      double* out = acts_[l + 1].data();
      std::copy(layer.biases.begin(), layer.biases.end(), out);
      const double* t = transposed_[l].data();
      for (std::size_t c = 0; c < layer.inputs; ++c, t += rows) {
        const double v = in[c];
        for (std::size_t r = 0; r < rows; ++r) out[r] += t[r] * v;
      }
      if (layer.activation == Activation::Tansig) {
        for (std::size_t r = 0; r < rows; ++r) out[r] = tansig(out[r]);
      }
    }
    return acts_.back()[0];
  }

  /// Adds d(output)/d(params) * `upstream` into `g`. Must follow forward().
  void accumulate(const MLPModel& m, double upstream, Gradients& g) {
    const std::size_t last = m.layers.size() - 1;
    deltas_[last][0] = upstream * derivative(m.layers[last].activation, acts_[last + 1][0]);
    for (std::size_t l = last + 1; l-- > 0;) {
      const auto& layer = m.layers[l];
      const double* in = acts_[l].data();
      const double* delta = deltas_[l].data();
      double* gw = g.weights[l].data();
      double* gb = g.biases[l].data();
      for (std::size_t r = 0; r < layer.outputs; ++r, gw += layer.inputs) {
        const double d = delta[r];
        gb[r] += d;
        for (std::size_t c = 0; c < layer.inputs; ++c) gw[c] += d * in[c];
      }
      if (l == 0) break;
      const auto& below = m.layers[l - 1];
      double* prev = deltas_[l - 1].data();
      std::fill(prev, prev + layer.inputs, 0.0);
      const double* w = layer.weights.data();
      for (std::size_t r = 0; r < layer.outputs; ++r, w += layer.inputs) {
        const double d = delta[r];
        for (std::size_t c = 0; c < layer.inputs; ++c) prev[c] += w[c] * d;
      }
      for (std::size_t c = 0; c < layer.inputs; ++c) {
        prev[c] *= derivative(below.activation, in[c]);
      }
    }
  }

  const std::vector<std::vector<double>>& activations() const noexcept { return acts_; }

 private:
  // In terms of the activation's output y.
  static double derivative(Activation a, double y) noexcept {
    return a == Activation::Tansig ? 1.0 - y * y : 1.0;
  }

  std::vector<std::vector<double>> acts_;
  std::vector<std::vector<double>> deltas_;
  std::vector<std::vector<double>> transposed_;
};

inline void check_input(const MLPModel& m, std::size_t n) {
  if (n != m.input_size()) {
    throw ArgumentError("input has " + std::to_string(n) + " features, network expects " +
                        std::to_string(m.input_size()));
  }
}

}  // namespace detail

/// Network output for an already-normalized input.
inline double forward(const MLPModel& model, std::span<const double> x_normalized) {
  detail::check_input(model, x_normalized.size());
  detail::Workspace ws(model);
  return ws.forward(model, x_normalized);
}

inline double forward(const MLPModel& model, const std::vector<double>& x) {
  return forward(model, std::span<const double>(x));
}

/// Outputs of every layer, input first.
inline std::vector<std::vector<double>> forward_activations(const MLPModel& model,
                                                            std::span<const double> x_normalized) {
  detail::check_input(model, x_normalized.size());
  detail::Workspace ws(model);
  ws.forward(model, x_normalized);
  return ws.activations();
}

/// Exact gradient of (1/|batch|) * sum (f(x) - target)^2.
inline Gradients backprop(const MLPModel& model, std::span<const TrainingExample> batch) {
  if (batch.empty()) throw ArgumentError("backprop needs a non-empty batch");
  detail::Workspace ws(model);
  Gradients g = Gradients::like(model);
  const double scale = 2.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    detail::check_input(model, ex.x.size());
    const double f = ws.forward(model, ex.x);
    ws.accumulate(model, scale * (f - ex.target), g);
  }
  return g;
}

inline Gradients backprop(const MLPModel& model, const std::vector<TrainingExample>& batch) {
  return backprop(model, std::span<const TrainingExample>(batch));
}

/// Mean squared error of the network over normalized examples.
inline double mean_squared_error(const MLPModel& model, std::span<const TrainingExample> data) {
  if (data.empty()) throw ArgumentError("mean squared error of an empty set");
  detail::Workspace ws(model);
  double s = 0.0;
  for (const auto& ex : data) {
    detail::check_input(model, ex.x.size());
    const double e = ws.forward(model, ex.x) - ex.target;
    s += e * e;
  }
  return s / static_cast<double>(data.size());
}

/// Raw classifier output f(x): normalize with the embedded statistics, then
/// run the network. Rounding is left to round_decision().
inline double predict(const MLPModel& model, std::span<const double> raw_point) {
  detail::check_input(model, raw_point.size());
  std::vector<double> x(raw_point.size());
  normalize_into(model.normalizer, raw_point, x);
  return forward(model, x);
}

inline double predict(const MLPModel& model, const std::vector<double>& raw_point) {
  return predict(model, std::span<const double>(raw_point));
}

/// Decisions for every point of a set.
inline std::vector<Decision> classify(const MLPModel& model, const LabeledPointSet& points) {
  detail::check_input(model, points.dimension());
  detail::Workspace ws(model);
  std::vector<double> x(points.dimension());
  std::vector<Decision> out;
  out.reserve(points.size());
  for (const auto& p : points.points()) {
    normalize_into(model.normalizer, p.features, x);
    out.push_back(round_decision(ws.forward(model, x), model.class_count));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

enum class StopReason { GoalReached, MaxEpochs };

constexpr std::string_view stop_reason_name(StopReason r) noexcept {
  return r == StopReason::GoalReached ? "GoalReached" : "MaxEpochs";
}

struct TrainReport {
  std::size_t epochs_run = 0;
  std::vector<double> mse_history;
  double final_train_accuracy = 0.0;
  StopReason stop_reason = StopReason::MaxEpochs;
};

struct TrainResult {
  MLPModel model;
  TrainReport report;
};

/// Parameters uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
inline void initialize(MLPModel& model, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1A1B));
  for (auto& layer : model.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs));
    for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
    for (auto& b : layer.biases) b = rng.uniform(-bound, bound);
  }
}

/// Fits the normalizer on `data`, then runs SGD until the epoch MSE reaches
/// the goal or max_epochs is exhausted. The epoch MSE is the mean of the
/// per-sample squared errors seen during that epoch, before each update.
/// Deterministic in (config, data).
inline TrainResult train(const MLPConfig& config, const LabeledPointSet& data) {
  config.validate();
  if (data.empty()) throw ArgumentError("training set is empty");
  if (data.dimension() != config.input_size()) {
    throw ArgumentError("training set has " + std::to_string(data.dimension()) +
                        " features, network expects " + std::to_string(config.input_size()));
  }
  for (const auto& p : data.points()) {
    if (p.label < 0 || p.label >= config.class_count) {
      throw ArgumentError("label " + std::to_string(p.label) + " outside 0.." +
                          std::to_string(config.class_count - 1));
    }
  }

  MLPModel model = MLPModel::zeros(config, fit_normalizer(data));
  initialize(model, config.seed);

  std::vector<TrainingExample> examples;
  examples.reserve(data.size());
  for (const auto& p : data.points()) {
    examples.push_back({normalize(model.normalizer, p.features), static_cast<double>(p.label)});
  }

  detail::Workspace ws(model);
  Gradients g = Gradients::like(model);
  Rng order_rng(derive_seed(config.seed, 0x5B0F));
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainReport report;
  report.stop_reason = StopReason::MaxEpochs;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double sse = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 2.0 / static_cast<double>(end - start);
      g.zero();
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = examples[order[i]];
        const double e = ws.forward(model, ex.x) - ex.target;
        sse += e * e;
        ws.accumulate(model, scale * e, g);
      }
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        for (std::size_t k = 0; k < layer.weights.size(); ++k) {
          layer.weights[k] -= config.learning_rate * g.weights[l][k];
        }
        for (std::size_t k = 0; k < layer.biases.size(); ++k) {
          layer.biases[k] -= config.learning_rate * g.biases[l][k];
        }
      }
      ws.sync(model);
    }
    const double mse = sse / static_cast<double>(examples.size());
    report.mse_history.push_back(mse);
    report.epochs_run = epoch + 1;
    if (!std::isfinite(mse)) throw ArgumentError("training diverged (non-finite MSE)");
    if (mse <= config.goal_mse) {
      report.stop_reason = StopReason::GoalReached;
      break;
    }
  }

  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const auto d = round_decision(ws.forward(model, ex.x), model.class_count);
    if (d.label && code(*d.label) == static_cast<int>(ex.target)) ++correct;
  }
  report.final_train_accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  return {std::move(model), std::move(report)};
}

inline void write_train_report(std::ostream& out, const TrainReport& r) {
  out << "# training\n";
  out << "epochs_run: " << r.epochs_run << '\n';
  out << "stop_reason: " << stop_reason_name(r.stop_reason) << '\n';
  out << "final_mse: " << (r.mse_history.empty() ? "nan" : format_real(r.mse_history.back())) << '\n';
  out << "final_train_accuracy: " << format_real(r.final_train_accuracy) << '\n';
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------
//
//   DFNMODEL v1
//   layers: 4 16 ... 1
//   activations: tansig ... purelin
//   classes: 7
//   config: <learning_rate> <goal_mse> <max_epochs> <batch_size> <seed>
//   normalizer: <features> <target_lo> <target_hi>
//   feature <name> <min> <max> <degenerate 0|1>      (one per feature)
//   W <layer> <row> : <values>                        (one per neuron)
//   b <layer> : <values>
//   end
//
// Reals carry 17 significant digits. Feature names must not contain
// whitespace.

inline void write_model(std::ostream& out, const MLPModel& m) {
  m.validate();
  out << "DFNMODEL v1\n";
  out << "layers: " << m.input_size();
  for (const auto& l : m.layers) out << ' ' << l.outputs;
  out << "\nactivations:";
  for (const auto& l : m.layers) out << ' ' << activation_name(l.activation);
  out << "\nclasses: " << m.class_count << '\n';
  out << "config: " << format_real(m.config.learning_rate) << ' ' << format_real(m.config.goal_mse)
      << ' ' << m.config.max_epochs << ' ' << m.config.batch_size << ' ' << m.config.seed << '\n';
  const auto& s = m.normalizer;
  out << "normalizer: " << s.dimension() << ' ' << format_real(s.target_lo) << ' '
      << format_real(s.target_hi) << '\n';
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    out << "feature " << s.feature_names[i] << ' ' << format_real(s.x_min[i]) << ' '
        << format_real(s.x_max[i]) << ' ' << (s.degenerate[i] ? 1 : 0) << '\n';
  }
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& layer = m.layers[l];
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      out << "W " << l << ' ' << r << " :";
      for (std::size_t c = 0; c < layer.inputs; ++c) out << ' ' << format_real(layer.w(r, c));
      out << '\n';
    }
    out << "b " << l << " :";
    for (double b : layer.biases) out << ' ' << format_real(b);
    out << '\n';
  }
  out << "end\n";
}

namespace detail {

class ModelParser {
 public:
  explicit ModelParser(std::istream& in) : in_(in) {}

  std::vector<std::string> line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file (truncated model?)");
    ++row_;
    std::istringstream ss(text);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(std::move(t));
    if (tokens.empty()) fail("blank line");
    return tokens;
  }

  std::vector<std::string> keyed(std::string_view key) {
    auto t = line();
    if (t.front() != key) fail("expected '" + std::string(key) + "'");
    return t;
  }

  double real(const std::string& s) const {
    auto v = parse_real(s);
    if (!v) fail("bad number '" + s + "'");
    if (!std::isfinite(*v)) fail("non-finite parameter '" + s + "'");
    return *v;
  }

  std::size_t count(const std::string& s) const {
    auto v = parse_integer(s);
    if (!v || *v < 0) fail("bad integer '" + s + "'");
    return static_cast<std::size_t>(*v);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelLoadError("line " + std::to_string(row_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t row_ = 0;
};

}  // namespace detail

/// Parses a model; throws ModelLoadError without returning a partial model.
inline MLPModel read_model(std::istream& in) {
  detail::ModelParser p(in);
  auto head = p.line();
  if (head.size() != 2 || head[0] != "DFNMODEL") p.fail("not a DFNMODEL file");
  if (head[1] != "v1") p.fail("unsupported model version '" + head[1] + "'");

  auto layers = p.keyed("layers:");
  if (layers.size() < 4) p.fail("need input, at least one hidden, and output layer");
  MLPConfig cfg;
  cfg.layer_sizes.clear();
  for (std::size_t i = 1; i < layers.size(); ++i) cfg.layer_sizes.push_back(p.count(layers[i]));

  auto acts = p.keyed("activations:");
  if (acts.size() != layers.size() - 1) p.fail("activation count does not match layers");
  std::vector<Activation> activations;
  for (std::size_t i = 1; i < acts.size(); ++i) {
    if (acts[i] == "tansig") {
      activations.push_back(Activation::Tansig);
    } else if (acts[i] == "purelin") {
      activations.push_back(Activation::Purelin);
    } else {
      p.fail("unknown activation '" + acts[i] + "'");
    }
  }

  auto classes = p.keyed("classes:");
  if (classes.size() != 2) p.fail("malformed classes line");
  cfg.class_count = static_cast<int>(p.count(classes[1]));

  auto conf = p.keyed("config:");
  if (conf.size() != 6) p.fail("malformed config line");
  cfg.learning_rate = p.real(conf[1]);
  cfg.goal_mse = p.real(conf[2]);
  cfg.max_epochs = p.count(conf[3]);
  cfg.batch_size = p.count(conf[4]);
  {
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(conf[5].data(), conf[5].data() + conf[5].size(), seed);
    if (ec != std::errc{} || ptr != conf[5].data() + conf[5].size()) p.fail("bad seed");
    cfg.seed = seed;
  }
  cfg.hidden_activation = activations.front();
  cfg.output_activation = activations.back();
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    p.fail(e.what());
  }

  auto norm = p.keyed("normalizer:");
  if (norm.size() != 4) p.fail("malformed normalizer line");
  NormalizerStats stats;
  const std::size_t nfeat = p.count(norm[1]);
  stats.target_lo = p.real(norm[2]);
  stats.target_hi = p.real(norm[3]);
  for (std::size_t i = 0; i < nfeat; ++i) {
    auto f = p.keyed("feature");
    if (f.size() != 5) p.fail("malformed feature line");
    stats.feature_names.push_back(f[1]);
    stats.x_min.push_back(p.real(f[2]));
    stats.x_max.push_back(p.real(f[3]));
    if (f[4] != "0" && f[4] != "1") p.fail("degenerate flag must be 0 or 1");
    stats.degenerate.push_back(f[4] == "1");
  }

  MLPModel m = MLPModel::zeros(cfg, std::move(stats));
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    auto& layer = m.layers[l];
    layer.activation = activations[l];
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      auto w = p.keyed("W");
      if (w.size() != 4 + layer.inputs || p.count(w[1]) != l || p.count(w[2]) != r || w[3] != ":") {
        p.fail("weight row " + std::to_string(l) + "/" + std::to_string(r) + " has the wrong shape");
      }
      for (std::size_t c = 0; c < layer.inputs; ++c) layer.w(r, c) = p.real(w[4 + c]);
    }
    auto b = p.keyed("b");
    if (b.size() != 3 + layer.outputs || p.count(b[1]) != l || b[2] != ":") {
      p.fail("bias row " + std::to_string(l) + " has the wrong shape");
    }
    for (std::size_t r = 0; r < layer.outputs; ++r) layer.biases[r] = p.real(b[3 + r]);
  }
  auto tail = p.line();
  if (tail.size() != 1 || tail[0] != "end") p.fail("missing 'end' marker");
  try {
    m.validate();
  } catch (const StructureError& e) {
    throw ModelLoadError(e.what());
  }
  return m;
}

/// Writes to a sibling temporary file, then renames over `path`.
inline void save_model(const MLPModel& model, const std::filesystem::path& path) {
  for (const auto& name : model.normalizer.feature_names) {
    if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
      throw ArgumentError("feature name '" + name + "' cannot be stored in a model file");
    }
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    write_model(out, model);
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move model into '" + path.string() + "': " + ec.message());
}

inline MLPModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace wavediag

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Criteria 7, 8 and 14 share one training run on the default
// synthetic corpus.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavediag/wavediag.hpp"

using namespace wavediag;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Suite {
 public:
  void run(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures_ += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << " -- " << o.detail
              << " (" << std::fixed << std::setprecision(2) << secs << " s)" << std::endl;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo = -10, double hi = 10) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

double energy(std::span<const double> v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

bool all_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (!(std::abs(got[i] - want[i]) <= tol)) return false;
  }
  return true;
}

std::string model_text(const MLPModel& m) {
  std::ostringstream s;
  write_model(s, m);
  return s.str();
}

struct Pipeline {
  Split split;
  TrainResult result;
  double train_seconds = 0;
  std::string rerun_text;
};

Pipeline run_default_pipeline() {
  Pipeline p;
  const auto t0 = std::chrono::steady_clock::now();
  const SynthConfig sc;
  const auto data = generate_dataset(sc);
  const auto pts = compress_to_points(std::span<const Recording>(data), synth_channel_names(), 3);
  p.split = stratified_split(pts, 0.3, sc.seed);
  MLPConfig cfg;
  cfg.seed = sc.seed;
  p.result = train(cfg, p.split.train);
  p.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // Rerun from scratch, corpus included, to check end-to-end determinism.
  const auto data2 = generate_dataset(sc);
  const auto split2 =
      stratified_split(compress_to_points(std::span<const Recording>(data2), synth_channel_names(), 3), 0.3, sc.seed);
  p.rerun_text = model_text(train(cfg, split2.train).model);
  return p;
}

double batch_loss(const MLPModel& m, const std::vector<TrainingExample>& batch) {
  double s = 0;
  for (const auto& ex : batch) {
    const double e = forward(m, ex.x) - ex.target;
    s += e * e;
  }
  return s / static_cast<double>(batch.size());
}

std::vector<Decision> decisions(std::initializer_list<std::pair<int, int>> blocks) {
  std::vector<Decision> out;
  for (auto [cls, n] : blocks) {
    for (int i = 0; i < n; ++i) out.push_back(round_decision(cls));
  }
  return out;
}

// NDJSON verdict lines for a recording, produced through the same streaming
// path the CLI uses.
std::vector<nlohmann::json> stream_verdicts(const MLPModel& model, const Recording& rec) {
  std::stringstream csv;
  write_recording_csv(csv, rec);
  CsvRecordingReader reader(csv);
  const StreamDiagnoser diag(model, reader.channel_names());
  std::ostringstream ndjson;
  std::size_t index = 0;
  while (auto block = reader.next_block(diag.window_raw())) {
    if (block->length() < diag.window_raw()) break;
    ndjson << verdict_to_json(diag.judge(*block), index++).dump() << '\n';
  }
  std::vector<nlohmann::json> out;
  std::istringstream in(ndjson.str());
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

int main() {
  Suite suite;

  suite.run(1, "worked Haar example reproduces every scale", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = decompose(std::vector<double>{48, 34, 24, 60, 72, 28, 55, 121}, 3);
    const auto s2 = haar_forward_step(std::vector<double>{48, 34, 24, 60, 72, 28, 55, 121});
    const auto s1 = haar_forward_step(s2.approx);
    bool ok = all_near(p.details[0], {9.8995, -25.4558, 31.1127, -46.6690}, 1e-3) &&
              all_near(s2.approx, {57.9828, 59.3970, 70.7107, 124.4508}, 1e-3) &&
              all_near(s1.approx, {83, 138}, 1e-3) && all_near(p.details[1], {-1, -38}, 1e-3) &&
              all_near(p.approx, {156.2706}, 1e-3) && all_near(p.details[2], {-38.8909}, 1e-3);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{ok && secs < 1.0, "scale-0 approx " + num(p.approx[0], 7) + ", detail " + num(p.details[2][0], 6)};
  });

  suite.run(2, "Haar round trip and Parseval on 1,000 random sequences", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(2024);
    double worst_err = 0, worst_energy = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 1 + gen() % 12;
      const auto x = random_vector(gen, std::size_t{1} << k);
      const auto pyr = decompose(x, k);
      std::vector<double> running = x;
      for (std::size_t l = 0; l < k; ++l) {
        const auto step = haar_forward_step(running);
        const double before = energy(running);
        const double after = energy(step.approx) + energy(step.detail);
        worst_energy = std::max(worst_energy, std::abs(before - after) / before);
        running = step.approx;
      }
      const auto back = reconstruct(pyr);
      for (std::size_t i = 0; i < x.size(); ++i) worst_err = std::max(worst_err, std::abs(back[i] - x[i]));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{worst_err < 1e-9 && worst_energy < 1e-9 && secs < 5.0,
                   "max error " + num(worst_err, 3) + ", max energy drift " + num(worst_energy, 3)};
  });

  suite.run(3, "compression geometry 160->20 and 300,000->37,500", [] {
    const auto a = compress(std::vector<double>(160, 1.0), 3).size();
    const auto b = compress(std::vector<double>(300000, 1.0), 3).size();
    return Outcome{a == 20 && b == 37500, std::to_string(a) + ", " + std::to_string(b)};
  });

  suite.run(4, "Pearson symmetry, diagonal, bounds, affine invariance, hand case", [] {
    std::mt19937_64 gen(4);
    bool ok = true;
    for (int t = 0; t < 100 && ok; ++t) {
      const std::size_t n = 3 + gen() % 200;
      std::vector<std::vector<double>> ch;
      for (int c = 0; c < 4; ++c) ch.push_back(random_vector(gen, n));
      for (std::size_t i = 0; i < n; ++i) ch[1][i] += 0.8 * ch[0][i];
      const Recording rec({"a", "b", "c", "d"}, 1.0, ch);
      const auto cm = correlation_matrix(rec);
      for (std::size_t i = 0; i < 4; ++i) {
        ok = ok && cm(i, i) == 1.0;
        for (std::size_t j = 0; j < 4; ++j) ok = ok && cm(i, j) == cm(j, i) && std::abs(cm(i, j)) <= 1.0;
      }
      std::uniform_real_distribution<double> coef(0.01, 100.0);
      const double a = coef(gen), b = coef(gen) - 50;
      std::vector<double> scaled(ch[0]);
      for (auto& v : scaled) v = a * v + b;
      ok = ok && std::abs(pearson(scaled, ch[1]) - pearson(ch[0], ch[1])) <= 1e-10;
    }
    const double hand = pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
    ok = ok && std::abs(hand - 0.8) <= 1e-12;
    return Outcome{ok, "pearson([1,2,3,4],[1,3,2,4]) = " + num(hand, 17)};
  });

  suite.run(5, "feature selection trace, identity, affine invariance", [] {
    const CorrelationMatrix three({"A", "B", "C"}, {1, 0.95, 0.1, 0.95, 1, 0.12, 0.1, 0.12, 1});
    const auto rep = select_features(three, 0.5, 0);
    bool ok = rep.kept == std::vector<std::string>{"A", "C"} && rep.removed.size() == 1 &&
              rep.removed[0].removed == "B" && rep.removed[0].by == "A";
    std::vector<double> id(25, 0.0);
    for (int i = 0; i < 5; ++i) id[static_cast<std::size_t>(i * 6)] = 1.0;
    ok = ok && select_features(CorrelationMatrix({"a", "b", "c", "d", "e"}, id)).kept.size() == 5;

    std::mt19937_64 gen(5);
    const std::size_t n = 500;
    auto x = random_vector(gen, n), z = random_vector(gen, n), e = random_vector(gen, n);
    std::vector<double> y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x[i] + 0.3 * e[i];
      w[i] = z[i] - 0.6 * e[i];
    }
    const Recording base({"x", "y", "z", "w"}, 1.0, {x, y, z, w});
    std::vector<std::vector<double>> scaled{x, y, z, w};
    const double a[] = {0.001, 42.0, 3.5, 900.0}, b[] = {7.0, -3.0, 1e4, 0.5};
    for (std::size_t c = 0; c < 4; ++c) {
      for (auto& v : scaled[c]) v = a[c] * v + b[c];
    }
    const auto r1 = select_features(correlation_matrix(base), 0.5, 1);
    const auto r2 = select_features(correlation_matrix(Recording(base.channel_names(), 1.0, scaled)), 0.5, 1);
    ok = ok && r1.selected() == r2.selected() && r1.removed.size() == r2.removed.size();
    std::string sel;
    for (const auto& s : r1.selected()) sel += s + " ";
    return Outcome{ok, "3-feature kept {A, C}; rescaled selection " + sel};
  });

  suite.run(6, "backprop vs central differences on [4,8,8,1]", [] {
    const auto t0 = std::chrono::steady_clock::now();
    MLPConfig cfg;
    cfg.layer_sizes = {4, 8, 8, 1};
    auto m = MLPModel::zeros(cfg, NormalizerStats::identity({"a", "b", "c", "d"}));
    initialize(m, 6);
    std::mt19937_64 gen(6);
    std::vector<TrainingExample> batch;
    for (int i = 0; i < 100; ++i) batch.push_back({random_vector(gen, 4, -1, 1), static_cast<double>(gen() % 7)});
    const auto g = backprop(m, batch);
    const double h = 1e-5;
    double worst = 0;
    std::size_t checked = 0, skipped = 0;
    auto check = [&](double& p, double analytic) {
      const double saved = p;
      p = saved + h;
      const double up = batch_loss(m, batch);
      p = saved - h;
      const double down = batch_loss(m, batch);
      p = saved;
      const double numeric = (up - down) / (2 * h);
      if (std::abs(analytic) < 1e-8 && std::abs(numeric) < 1e-8) {
        ++skipped;
        return;
      }
      ++checked;
      worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric)));
    };
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      for (std::size_t k = 0; k < m.layers[l].weights.size(); ++k) check(m.layers[l].weights[k], g.weights[l][k]);
      for (std::size_t k = 0; k < m.layers[l].biases.size(); ++k) check(m.layers[l].biases[k], g.biases[l][k]);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{worst < 1e-5 && checked > 0 && secs < 10.0,
                   std::to_string(checked) + " parameters, " + std::to_string(skipped) +
                       " dual-small, worst relative error " + num(worst, 3)};
  });

  Pipeline pipe;
  bool pipeline_ok = true;
  std::string pipeline_error;
  try {
    pipe = run_default_pipeline();
  } catch (const std::exception& e) {
    pipeline_ok = false;
    pipeline_error = e.what();
  }
  auto need_pipeline = [&](const std::function<Outcome()>& body) {
    return [&, body] { return pipeline_ok ? body() : Outcome{false, "training failed: " + pipeline_error}; };
  };

  suite.run(7, "end-to-end held-out accuracy >= 0.97, deterministic, <= 5 min", need_pipeline([&] {
    const auto m = evaluate(pipe.result.model, pipe.split.test);
    const auto& h = pipe.result.report.mse_history;
    const bool mse_ok = !h.empty() && h.back() <= h.front() &&
                        std::find(h.begin(), h.end(), *std::min_element(h.begin(), h.end())) != h.end();
    const bool det = model_text(pipe.result.model) == pipe.rerun_text;
    const bool split_ok = pipe.split.train.size() == 7 * 1228;
    return Outcome{m.accuracy >= 0.97 && det && mse_ok && split_ok && pipe.train_seconds <= 300.0,
                   "accuracy " + num(m.accuracy) + " on " + std::to_string(m.total) + " held-out points, " +
                       std::to_string(pipe.result.report.epochs_run) + " epochs (" +
                       std::string(stop_reason_name(pipe.result.report.stop_reason)) + "), train " +
                       num(pipe.train_seconds, 4) + " s, rerun " + (det ? "identical" : "DIFFERS")};
  }));

  suite.run(8, "DFN held-out accuracy >= KNN (k=5) on the same split", need_pipeline([&] {
    const double dfn = evaluate(pipe.result.model, pipe.split.test).accuracy;
    const double knn = evaluate_knn(pipe.result.model.normalizer, pipe.split.train, pipe.split.test, 5, kClassCount).accuracy;
    return Outcome{dfn >= knn, "dfn " + num(dfn) + " vs knn " + num(knn)};
  }));

  suite.run(9, "decision rule rows and rounding window", [] {
    bool ok = round_decision(0.0022).label == ClassLabel::Normal && round_decision(1.0047).label == ClassLabel::S1 &&
              round_decision(1.9998).label == ClassLabel::S2 && round_decision(7.2, 7).is_unknown() &&
              round_decision(-0.5).is_unknown() && round_decision(6.5).is_unknown();
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> eps(-(0.5 - 1e-9), 0.5 - 1e-9);
    for (int k = 1; k <= kClassCount; ++k) {
      for (int y = 0; y < k; ++y) {
        for (int t = 0; t < 1000; ++t) {
          const auto d = round_decision(y + eps(gen), k);
          ok = ok && d.label && code(*d.label) == y;
        }
      }
    }
    return Outcome{ok, "0.0022->Normal, 1.0047->S1, 1.9998->S2, 7.2->Unknown"};
  });

  suite.run(10, "verdict protocol and permanence", [] {
    const auto a = window_verdict(decisions({{0, 14}, {1, 6}}));
    const auto b = window_verdict(decisions({{0, 15}, {3, 5}}));
    const auto c = window_verdict(decisions({{0, 20}}));
    bool ok = a.final == ClassLabel::S1 && a.rule == VerdictRule::TrailingRun && b.final == ClassLabel::S3 &&
              b.rule == VerdictRule::TrailingRun && c.final == ClassLabel::Normal;
    auto grow = decisions({{0, 15}, {3, 5}});
    for (int i = 0; i < 50; ++i) {
      grow.push_back(round_decision(3.0));
      const auto v = window_verdict(grow);
      ok = ok && v.final == ClassLabel::S3 && v.rule == VerdictRule::TrailingRun;
    }
    return Outcome{ok, "[0x14,1x6]->" + std::string(label_name(a.final)) + ", [0x15,3x5]->" +
                           std::string(label_name(b.final)) + ", [0x20]->" + std::string(label_name(c.final))};
  });

  suite.run(11, "normalizer spans [-1, 1] exactly and inverts", [] {
    std::mt19937_64 gen(11);
    LabeledPointSet pts({"a", "b", "c", "d"});
    for (int i = 0; i < 2000; ++i) pts.add(random_vector(gen, 4, -500, 800), i % 7);
    const auto s = fit_normalizer(pts);
    const auto n = normalize(s, pts);
    bool ok = true;
    double worst = 0;
    for (std::size_t f = 0; f < 4; ++f) {
      double lo = 1e300, hi = -1e300;
      for (const auto& p : n.points()) {
        lo = std::min(lo, p.features[f]);
        hi = std::max(hi, p.features[f]);
      }
      ok = ok && lo == -1.0 && hi == 1.0;
    }
    for (const auto& p : pts.points()) {
      const auto back = denormalize(s, normalize(s, p.features));
      for (std::size_t f = 0; f < 4; ++f) worst = std::max(worst, std::abs(back[f] - p.features[f]));
    }
    return Outcome{ok && worst <= 1e-12, "round-trip max error " + num(worst, 3)};
  });

  suite.run(12, "model persistence: identical predictions, truncation rejected", [] {
    std::mt19937_64 gen(12);
    LabeledPointSet pts(synth_channel_names());
    for (int i = 0; i < 100; ++i) pts.add(random_vector(gen, 4, -3, 3), i % 7);
    auto m = MLPModel::zeros(MLPConfig{}, fit_normalizer(pts));
    initialize(m, 12);
    const auto dir = std::filesystem::temp_directory_path() / "wavediag_acceptance";
    std::filesystem::create_directories(dir);
    const auto path = dir / "model.dfn";
    save_model(m, path);
    const auto back = load_model(path);
    bool identical = true;
    for (int q = 0; q < 1000; ++q) {
      const auto x = random_vector(gen, 4, -5, 5);
      identical = identical && predict(back, x) == predict(m, x);
    }
    const std::string text = model_text(m);
    std::size_t rejected = 0, tried = 0;
    for (std::size_t cut = 0; cut + 1 < text.size(); cut += 97) {
      ++tried;
      std::istringstream in(text.substr(0, cut));
      try {
        read_model(in);
      } catch (const ModelLoadError&) {
        ++rejected;
      }
    }
    std::filesystem::remove_all(dir);
    return Outcome{identical && rejected == tried,
                   std::string("1,000 predictions ") + (identical ? "bit-identical" : "DIFFER") + ", " +
                       std::to_string(rejected) + "/" + std::to_string(tried) + " truncations rejected"};
  });

  suite.run(13, "metrics equal a brute-force tally; micro recall == accuracy", [] {
    std::mt19937_64 gen(13);
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + gen() % 500;
      std::vector<int> pred(n), truth(n);
      for (std::size_t i = 0; i < n; ++i) {
        truth[i] = static_cast<int>(gen() % 7);
        pred[i] = static_cast<int>(gen() % 8) - 1;
      }
      const auto m = metrics(pred, truth, 7);
      std::size_t trace = 0;
      for (int t = 0; t < 7; ++t) {
        for (int p = 0; p < 7; ++p) {
          std::size_t c = 0;
          for (std::size_t i = 0; i < n; ++i) c += truth[i] == t && pred[i] == p;
          ok = ok && m.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)] == c;
          if (t == p) trace += c;
        }
      }
      double rec_num = 0, rec_den = 0;
      for (std::size_t c = 0; c < 7; ++c) {
        rec_num += static_cast<double>(m.confusion[c][c]);
        rec_den += static_cast<double>(std::accumulate(m.confusion[c].begin(), m.confusion[c].end(), m.unknown[c]));
      }
      ok = ok && m.accuracy == static_cast<double>(trace) / static_cast<double>(n) &&
           std::abs(rec_num / rec_den - m.accuracy) < 1e-15;
    }
    return Outcome{ok, "200 random label sets"};
  });

  suite.run(14, "stream: 3,200 samples -> 20 verdicts; mid-stream switch -> TrailingRun", need_pipeline([&] {
    SynthConfig sc;
    sc.samples_per_class = 3200;
    sc.seed = 77;  // unseen during training
    const auto normal = generate_recording(ClassLabel::Normal, sc);
    const auto s1 = generate_recording(ClassLabel::S1, sc);
    const auto plain = stream_verdicts(pipe.result.model, normal);
    bool all_normal = true;
    for (const auto& v : plain) all_normal = all_normal && v["final"] == "Normal";

    // The fault starts 14 compressed points into window 10.
    const std::size_t sw = 10 * 160 + 14 * 8;
    std::vector<std::vector<double>> ch(4);
    for (std::size_t c = 0; c < 4; ++c) {
      ch[c].assign(normal.channel(c).begin(), normal.channel(c).begin() + static_cast<std::ptrdiff_t>(sw));
      ch[c].insert(ch[c].end(), s1.channel(c).begin() + static_cast<std::ptrdiff_t>(sw), s1.channel(c).end());
    }
    const auto mixed = stream_verdicts(pipe.result.model, Recording(synth_channel_names(), 16000.0, ch));
    const bool transition = mixed.size() == 20 && mixed[10]["final"] == "S1" && mixed[10]["rule"] == "TrailingRun";
    const bool after = mixed.size() == 20 && mixed[19]["final"] == "S1";
    return Outcome{plain.size() == 20 && all_normal && transition && after,
                   std::to_string(plain.size()) + " verdicts, all-Normal " + (all_normal ? "yes" : "no") +
                       ", transition window " + (mixed.size() > 10 ? mixed[10]["final"].get<std::string>() + "/" +
                                                                        mixed[10]["rule"].get<std::string>()
                                                                  : "missing")};
  }));

  std::cout << (suite.failures() == 0 ? "ALL PASS" : std::to_string(suite.failures()) + " FAILED") << std::endl;
  return suite.failures() == 0 ? 0 : 1;
}

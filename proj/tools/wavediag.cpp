// wavediag: command-line front end for the fault-diagnosis pipeline.
//
//   wavediag synth         write a seeded synthetic corpus (one CSV per class)
//   wavediag features      correlation matrix + redundant-feature removal
//   wavediag compress      Haar-compress a recording (the controller payload)
//   wavediag train         compress, split, normalize, train the network
//   wavediag eval          metrics of a model, optionally against KNN
//   wavediag stream        windowed verdicts as NDJSON
//   wavediag inspect-model summary of a model file
//
// Every subcommand takes `--config FILE` with `key = value` lines whose keys
// are the long option names; flags given on the command line win.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wavediag/wavediag.hpp"

namespace fs = std::filesystem;
using namespace wavediag;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("WAVEDIAG_SEED")) {
    auto v = parse_integer(env);
    if (!v || *v < 0) throw ArgumentError("WAVEDIAG_SEED must be a non-negative integer");
    return static_cast<std::uint64_t>(*v);
  }
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto f : split_fields(s)) {
    auto t = trim(f);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::vector<std::size_t> parse_layers(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& f : split_list(s)) {
    auto v = parse_integer(f);
    if (!v || *v <= 0) throw ArgumentError("bad layer size '" + f + "'");
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

/// Output sink that is stdout unless a path is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<Recording> load_all(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ArgumentError("no input CSV files given");
  std::vector<Recording> out;
  for (const auto& p : paths) out.push_back(load_recording_csv(p));
  return out;
}

ParseError config_error(const std::string& path, std::size_t row, const std::string& what) {
  return ParseError(path + ": row " + std::to_string(row) + ": " + what);
}

/// Fills options absent from the command line with values from --config.
void merge_config(CLI::App& sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& e : load_config(path)) {
    std::string key = e.key;
    for (auto& ch : key) {
      if (ch == '_') ch = '-';
    }
    if (key == "config") throw config_error(path, e.row, "'config' cannot be nested");
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw config_error(path, e.row, "unknown key '" + e.key + "' for '" + sub.get_name() + "'");
    }
    if (opt->count() > 0) continue;
    if (opt->get_expected_max() > 1) {
      for (const auto& v : split_list(e.value)) opt->add_result(v);
    } else {
      opt->add_result(e.value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& err) {
      throw config_error(path, e.row, "bad value for '" + e.key + "': " + err.what());
    }
  }
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out = ".";
  std::uint64_t seed = 0;
  std::size_t samples_per_class = SynthConfig{}.samples_per_class;
  double noise_sigma = SynthConfig{}.noise_sigma;
  double separation = SynthConfig{}.separation;
  double sample_rate = SynthConfig{}.sample_rate_hz;
  double fundamental = SynthConfig{}.fundamental_hz;
  std::string classes;
};

int cmd_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.samples_per_class = a.samples_per_class;
  cfg.noise_sigma = a.noise_sigma;
  cfg.separation = a.separation;
  cfg.sample_rate_hz = a.sample_rate;
  cfg.fundamental_hz = a.fundamental;
  if (!a.classes.empty()) {
    cfg.classes.clear();
    for (const auto& name : split_list(a.classes)) {
      auto l = label_from_name(name);
      if (!l) throw ArgumentError("unknown class '" + name + "'");
      cfg.classes.push_back(*l);
    }
  }
  cfg.validate();
  fs::create_directories(a.out);
  std::ofstream manifest(fs::path(a.out) / "manifest.txt");
  if (!manifest) throw IoError("cannot write manifest in '" + a.out + "'");
  manifest << "class,code,file,samples,seed,noise_sigma,separation\n";
  for (auto label : cfg.classes) {
    const auto rec = generate_recording(label, cfg);
    const std::string file = std::string(label_name(label)) + ".csv";
    save_recording_csv(rec, fs::path(a.out) / file);
    manifest << label_name(label) << ',' << code(label) << ',' << file << ',' << rec.length() << ','
             << cfg.seed << ',' << format_real(cfg.noise_sigma) << ',' << format_real(cfg.separation)
             << '\n';
  }
  return 0;
}

struct FeaturesArgs {
  std::vector<std::string> inputs;
  double threshold = 0.5;
  std::size_t fine_tune = 1;
  std::string matrix_out;
  std::string report_out;
};

int cmd_features(const FeaturesArgs& a) {
  const auto recs = load_all(a.inputs);
  const auto joined = concatenate(recs);
  const auto cm = correlation_matrix(joined);
  const auto report = select_features(cm, a.threshold, a.fine_tune);
  if (!a.matrix_out.empty()) {
    std::ofstream m(a.matrix_out);
    if (!m) throw IoError("cannot write '" + a.matrix_out + "'");
    write_correlation_csv(m, cm);
  }
  Output out(a.report_out);
  write_selection_report(out.stream(), report);
  return 0;
}

struct CompressArgs {
  std::string input;
  std::string out;
  std::size_t levels = 3;
};

int cmd_compress(const CompressArgs& a) {
  if (a.input.empty()) throw ArgumentError("--input is required");
  const auto rec = load_recording_csv(a.input);
  const auto compressed = compress_recording(rec, a.levels);
  Output out(a.out);
  write_recording_csv(out.stream(), compressed);
  return 0;
}

struct ModelArgs {
  std::string layers = "4,16,16,16,16,16,16,16,16,16,1";
  double learning_rate = MLPConfig{}.learning_rate;
  double goal_mse = MLPConfig{}.goal_mse;
  std::size_t max_epochs = MLPConfig{}.max_epochs;
  std::size_t batch_size = MLPConfig{}.batch_size;
};

struct DataArgs {
  std::vector<std::string> inputs;
  std::string features;
  std::size_t levels = 3;
  double split = 0.3;
  std::uint64_t seed = 0;
};

struct Prepared {
  std::vector<std::string> features;
  Split split;
};

Prepared prepare(const DataArgs& d, const std::vector<std::string>& fallback_features) {
  const auto recs = load_all(d.inputs);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].has_labels()) throw ArgumentError("input '" + d.inputs[i] + "' is unlabeled");
  }
  auto features = d.features.empty() ? fallback_features : split_list(d.features);
  if (features.empty()) features = recs.front().channel_names();
  const auto points = compress_to_points(recs, features, d.levels);
  return {features, stratified_split(points, d.split, d.seed)};
}

struct TrainArgs {
  DataArgs data;
  ModelArgs model;
  std::string model_out = "model.dfn";
  std::string report_out;
};

int cmd_train(const TrainArgs& a) {
  auto prep = prepare(a.data, {});
  MLPConfig cfg;
  cfg.layer_sizes = parse_layers(a.model.layers);
  if (!cfg.layer_sizes.empty() && cfg.layer_sizes.front() != prep.features.size()) {
    throw ArgumentError("first layer size " + std::to_string(cfg.layer_sizes.front()) +
                        " does not match " + std::to_string(prep.features.size()) + " features");
  }
  cfg.learning_rate = a.model.learning_rate;
  cfg.goal_mse = a.model.goal_mse;
  cfg.max_epochs = a.model.max_epochs;
  cfg.batch_size = a.model.batch_size;
  cfg.seed = a.data.seed;
  auto [model, report] = train(cfg, prep.split.train);
  save_model(model, a.model_out);
  Output out(a.report_out);
  out.stream() << "train_points: " << prep.split.train.size() << '\n'
               << "test_points: " << prep.split.test.size() << '\n';
  write_train_report(out.stream(), report);
  write_metrics_report(out.stream(), evaluate(model, prep.split.test), "dfn held-out");
  return 0;
}

struct EvalArgs {
  DataArgs data;
  std::string model;
  std::string on = "test";
  std::string baseline = "none";
  std::size_t k = 5;
  std::string report_out;
};

int cmd_eval(const EvalArgs& a) {
  if (a.model.empty()) throw ArgumentError("--model is required");
  const auto model = load_model(a.model);
  const auto prep = prepare(a.data, model.normalizer.feature_names);
  if (prep.features != model.normalizer.feature_names) {
    throw ArgumentError("--features must match the model's features");
  }
  LabeledPointSet target(prep.features);
  if (a.on == "test") {
    target = prep.split.test;
  } else if (a.on == "train") {
    target = prep.split.train;
  } else if (a.on == "all") {
    target = prep.split.train;
    target.append(prep.split.test);
  } else {
    throw ArgumentError("--on must be test, train or all");
  }
  if (target.empty()) throw ArgumentError("evaluation set is empty");
  Output out(a.report_out);
  write_metrics_report(out.stream(), evaluate(model, target), "dfn " + a.on);
  if (a.baseline == "knn") {
    write_metrics_report(out.stream(),
                         evaluate_knn(model.normalizer, prep.split.train, target, a.k, model.class_count),
                         "knn k=" + std::to_string(a.k) + " " + a.on);
  } else if (a.baseline != "none") {
    throw ArgumentError("--baseline must be none or knn");
  }
  return 0;
}

struct StreamArgs {
  std::string model;
  std::string input;
  std::size_t window_raw = 160;
  std::size_t levels = 3;
  std::size_t run_min = 3;
  bool paced = false;
  std::string out;
};

int cmd_stream(const StreamArgs& a) {
  if (a.model.empty()) throw ArgumentError("--model is required");
  if (a.input.empty()) throw ArgumentError("--input is required");
  const auto model = load_model(a.model);
  std::ifstream in(a.input);
  if (!in) throw IoError("cannot open '" + a.input + "'");
  CsvRecordingReader reader(in);
  const StreamDiagnoser diag(model, reader.channel_names(), a.window_raw, a.levels, a.run_min);
  const double window_seconds = static_cast<double>(a.window_raw) / reader.sample_rate_hz();
  Output out(a.out);
  std::size_t index = 0;
  while (auto block = reader.next_block(a.window_raw)) {
    if (block->length() < a.window_raw) break;
    const auto verdict = diag.judge(*block);
    out.stream() << verdict_to_json(verdict, index++).dump() << '\n';
    out.stream().flush();
    if (a.paced) std::this_thread::sleep_for(std::chrono::duration<double>(window_seconds));
  }
  return 0;
}

int cmd_inspect(const std::string& path) {
  if (path.empty()) throw ArgumentError("--model is required");
  const auto m = load_model(path);
  std::cout << "layers:";
  std::cout << ' ' << m.input_size();
  for (const auto& l : m.layers) std::cout << ' ' << l.outputs;
  std::cout << "\nactivations:";
  for (const auto& l : m.layers) std::cout << ' ' << activation_name(l.activation);
  std::cout << "\nparameters: " << m.parameter_count() << '\n';
  std::cout << "classes: " << m.class_count << '\n';
  std::cout << "learning_rate: " << format_real(m.config.learning_rate) << '\n';
  std::cout << "goal_mse: " << format_real(m.config.goal_mse) << '\n';
  std::cout << "seed: " << m.config.seed << '\n';
  write_normalizer_csv(std::cout, m.normalizer);
  return 0;
}

void add_data_options(CLI::App* sub, DataArgs& d) {
  sub->add_option("--inputs,inputs", d.inputs, "Labeled recording CSV files");
  sub->add_option("--features", d.features, "Comma-separated channel names in model input order");
  sub->add_option("--levels", d.levels, "Haar compression levels")->check(CLI::Range(1, 30));
  sub->add_option("--split", d.split, "Per-class training fraction");
  sub->add_option("--seed", d.seed, "Seed for the split and weight initialization");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transient-data fault diagnosis: Haar compression + deep feedforward network"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::map<CLI::App*, std::string> config_paths;
  auto config_flag = [&](CLI::App* sub) {
    sub->add_option("--config", config_paths[sub], "key = value configuration file");
  };

  std::uint64_t seed0 = 0;
  try {
    seed0 = default_seed();
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  }

  SynthArgs synth;
  synth.seed = seed0;
  auto* s_synth = app.add_subcommand("synth", "Write a seeded synthetic corpus");
  s_synth->add_option("--out", synth.out, "Output directory");
  s_synth->add_option("--seed", synth.seed, "Generator seed");
  s_synth->add_option("--samples-per-class", synth.samples_per_class, "Raw samples per class (multiple of 8)");
  s_synth->add_option("--noise-sigma", synth.noise_sigma, "Gaussian noise standard deviation");
  s_synth->add_option("--separation", synth.separation, "Scale of the class-dependent parameters");
  s_synth->add_option("--sample-rate", synth.sample_rate, "Sample rate in Hz");
  s_synth->add_option("--fundamental", synth.fundamental, "Fundamental frequency in Hz");
  s_synth->add_option("--classes", synth.classes, "Comma-separated class names (default: all)");
  config_flag(s_synth);

  FeaturesArgs feat;
  auto* s_feat = app.add_subcommand("features", "Correlation analysis and redundant-feature removal");
  s_feat->add_option("--inputs,inputs", feat.inputs, "Recording CSV files (concatenated)");
  s_feat->add_option("--threshold", feat.threshold, "|r| at or above which two features are redundant");
  s_feat->add_option("--fine-tune", feat.fine_tune, "Removed features to re-add");
  s_feat->add_option("--matrix-out", feat.matrix_out, "Correlation matrix CSV");
  s_feat->add_option("--report-out", feat.report_out, "Selection report (default stdout)");
  config_flag(s_feat);

  CompressArgs comp;
  auto* s_comp = app.add_subcommand("compress", "Haar-compress every channel of a recording");
  s_comp->add_option("--input", comp.input, "Recording CSV");
  s_comp->add_option("--out", comp.out, "Compressed CSV (default stdout)");
  s_comp->add_option("--levels", comp.levels, "Haar levels")->check(CLI::Range(1, 30));
  config_flag(s_comp);

  TrainArgs tr;
  tr.data.seed = seed0;
  auto* s_train = app.add_subcommand("train", "Train the network on compressed, normalized features");
  add_data_options(s_train, tr.data);
  s_train->add_option("--layers", tr.model.layers, "Comma-separated layer sizes, input first");
  s_train->add_option("--learning-rate", tr.model.learning_rate, "SGD learning rate");
  s_train->add_option("--goal-mse", tr.model.goal_mse, "Stop once the epoch MSE reaches this");
  s_train->add_option("--max-epochs", tr.model.max_epochs, "Epoch limit");
  s_train->add_option("--batch-size", tr.model.batch_size, "Mini-batch size");
  s_train->add_option("--model-out", tr.model_out, "Model file to write");
  s_train->add_option("--report-out", tr.report_out, "Training and held-out report (default stdout)");
  config_flag(s_train);

  EvalArgs ev;
  ev.data.seed = seed0;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a model on the held-out split");
  add_data_options(s_eval, ev.data);
  s_eval->add_option("--model", ev.model, "Model file");
  s_eval->add_option("--on", ev.on, "Which split to score: test, train or all");
  s_eval->add_option("--baseline", ev.baseline, "none or knn");
  s_eval->add_option("--k", ev.k, "KNN neighbour count");
  s_eval->add_option("--report-out", ev.report_out, "Report file (default stdout)");
  config_flag(s_eval);

  StreamArgs st;
  auto* s_stream = app.add_subcommand("stream", "Windowed diagnosis of a raw recording, NDJSON out");
  s_stream->add_option("--model", st.model, "Model file");
  s_stream->add_option("--input", st.input, "Raw recording CSV");
  s_stream->add_option("--window-raw", st.window_raw, "Raw samples per window");
  s_stream->add_option("--levels", st.levels, "Haar levels")->check(CLI::Range(1, 30));
  s_stream->add_option("--run-min", st.run_min, "Trailing fault run that decides a window");
  s_stream->add_flag("--paced", st.paced, "Sleep one window duration between verdicts");
  s_stream->add_option("--out", st.out, "NDJSON file (default stdout)");
  config_flag(s_stream);

  std::string inspect_path;
  auto* s_inspect = app.add_subcommand("inspect-model", "Summarize a model file");
  s_inspect->add_option("--model,model", inspect_path, "Model file");
  config_flag(s_inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    for (auto& [sub, path] : config_paths) {
      if (sub->parsed()) merge_config(*sub, path);
    }
    if (s_synth->parsed()) return cmd_synth(synth);
    if (s_feat->parsed()) return cmd_features(feat);
    if (s_comp->parsed()) return cmd_compress(comp);
    if (s_train->parsed()) return cmd_train(tr);
    if (s_eval->parsed()) return cmd_eval(ev);
    if (s_stream->parsed()) return cmd_stream(st);
    if (s_inspect->parsed()) return cmd_inspect(inspect_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

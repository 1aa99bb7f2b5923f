#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "wavediag/config.hpp"
#include "wavediag/pipeline.hpp"
#include "wavediag/synth.hpp"

using namespace wavediag;

namespace {

LabeledPointSet counted_points(std::size_t per_class) {
  LabeledPointSet s({"x"});
  for (int c = 0; c < kClassCount; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) s.add({static_cast<double>(c * 10000 + static_cast<int>(i))}, c);
  }
  return s;
}

MLPModel constant_model(double output, std::vector<std::string> features) {
  MLPConfig cfg;
  cfg.layer_sizes = {features.size(), 2, 1};
  auto m = MLPModel::zeros(cfg, NormalizerStats::identity(std::move(features)));
  m.layers.back().biases[0] = output;
  return m;
}

}  // namespace

TEST(StratifiedSplit, CountsPerClass) {
  EXPECT_EQ(train_count(4096, 0.3), 1228u);
  EXPECT_EQ(train_count(3, 0.1), 1u);
  const auto split = stratified_split(counted_points(4096), 0.3, 0);
  EXPECT_EQ(split.train.size(), 7u * 1228u);
  EXPECT_EQ(split.test.size(), 7u * (4096u - 1228u));
  std::vector<std::size_t> per(kClassCount, 0);
  for (int l : split.train.labels()) ++per[static_cast<std::size_t>(l)];
  for (auto n : per) EXPECT_EQ(n, 1228u);
  EXPECT_THROW(stratified_split(counted_points(10), 0.0, 0), ArgumentError);
  EXPECT_THROW(stratified_split(counted_points(10), 1.0, 0), ArgumentError);
}

TEST(StratifiedSplit, DisjointCoveringAndDeterministic) {
  const auto pts = counted_points(50);
  const auto a = stratified_split(pts, 0.3, 4);
  const auto b = stratified_split(pts, 0.3, 4);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::vector<double> seen;
  for (const auto& p : a.train.points()) seen.push_back(p.features[0]);
  for (const auto& p : a.test.points()) seen.push_back(p.features[0]);
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
  EXPECT_EQ(seen.size(), pts.size());
  EXPECT_NE(stratified_split(pts, 0.3, 5).train, a.train);
}

TEST(CompressToPoints, AssemblesFeatureVectorsInOrder) {
  std::vector<double> a(16), b(16);
  for (std::size_t i = 0; i < 16; ++i) {
    a[i] = static_cast<double>(i);
    b[i] = -static_cast<double>(i);
  }
  const Recording rec({"a", "b"}, 16.0, {a, b}, std::vector<int>(16, 2));
  const auto pts = compress_to_points(rec, {"b", "a"}, 3);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts.feature_names(), (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(pts[0].features[1], compress(a, 3)[0]);
  EXPECT_EQ(pts[1].features[0], compress(b, 3)[1]);
  EXPECT_EQ(pts[1].label, 2);
  EXPECT_THROW(compress_to_points(rec, {"zz"}, 3), ArgumentError);
  const Recording unlabeled({"a"}, 16.0, {a});
  EXPECT_THROW(compress_to_points(unlabeled, {"a"}, 3), ArgumentError);
}

TEST(Evaluate, CountsUnknownAgainstAccuracy) {
  LabeledPointSet pts({"x"});
  pts.add({0.0}, 2);
  pts.add({0.5}, 3);
  const auto hit = evaluate(constant_model(2.0, {"x"}), pts);
  EXPECT_EQ(hit.accuracy, 0.5);
  const auto out_of_range = evaluate(constant_model(9.0, {"x"}), pts);
  EXPECT_EQ(out_of_range.accuracy, 0.0);
  EXPECT_EQ(out_of_range.unknown[2], 1u);
}

TEST(StreamDiagnoser, WindowGeometryAndChannelCheck) {
  const auto m = constant_model(1.0, {"I_11", "I_hau"});
  EXPECT_THROW(StreamDiagnoser(m, {"I_11"}), ArgumentError);
  EXPECT_THROW(StreamDiagnoser(m, {"I_11", "I_hau"}, 100, 3), ArgumentError);
  const StreamDiagnoser diag(m, {"I_hau", "extra", "I_11"});
  EXPECT_EQ(diag.points_per_window(), 20u);
  SynthConfig cfg;
  cfg.samples_per_class = 160;
  const auto rec = generate_recording(ClassLabel::S2, cfg);
  const Recording window({"I_hau", "extra", "I_11"}, 16000.0,
                         {std::vector<double>(rec.channel(1).begin(), rec.channel(1).end()),
                          std::vector<double>(160, 0.0),
                          std::vector<double>(rec.channel(0).begin(), rec.channel(0).end())});
  const auto payload = diag.compress_window(window);
  ASSERT_EQ(payload.size(), 2u);
  EXPECT_EQ(payload[0], compress(rec.channel(0), 3));
  const auto v = diag.judge(window);
  EXPECT_EQ(v.final, ClassLabel::S1);
  EXPECT_EQ(v.rule, VerdictRule::TrailingRun);
  EXPECT_EQ(v.total(), 20u);
  EXPECT_THROW(diag.judge(rec.slice(0, 80)), ArgumentError);
}

TEST(Config, ParsesCommentsAndRejectsMalformed) {
  std::istringstream ok("# comment\n seed = 7 \n\nout=dir/x # trailing comment\n");
  const auto e = parse_config(ok);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].key, "seed");
  EXPECT_EQ(e[0].value, "7");
  EXPECT_EQ(e[0].row, 2u);
  EXPECT_EQ(e[1].value, "dir/x");
  std::istringstream dup("a=1\na=2\n");
  EXPECT_THROW(parse_config(dup), ParseError);
  std::istringstream noeq("just words\n");
  EXPECT_THROW(parse_config(noeq), ParseError);
}

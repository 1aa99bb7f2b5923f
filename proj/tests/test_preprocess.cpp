#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "wavediag/preprocess.hpp"

using namespace wavediag;

namespace {

LabeledPointSet single_feature(std::initializer_list<double> values) {
  LabeledPointSet s({"x"});
  for (double v : values) s.add({v}, 0);
  return s;
}

}  // namespace

TEST(FitNormalizer, Extrema) {
  const auto s = fit_normalizer(single_feature({5, 0, 10}));
  EXPECT_EQ(s.x_min[0], 0.0);
  EXPECT_EQ(s.x_max[0], 10.0);
  EXPECT_FALSE(s.degenerate[0]);
  EXPECT_TRUE(fit_normalizer(single_feature({3, 3})).degenerate[0]);
  EXPECT_THROW(fit_normalizer(LabeledPointSet({"x"})), ArgumentError);
}

TEST(FitNormalizer, MatchesScanOracle) {
  std::mt19937_64 gen(21);
  LabeledPointSet s({"a", "b", "c"});
  for (int i = 0; i < 300; ++i) s.add(testkit::random_vector(gen, 3, -50, 50), i % 7);
  const auto st = fit_normalizer(s);
  for (std::size_t f = 0; f < 3; ++f) {
    double lo = s[0].features[f], hi = lo;
    for (const auto& p : s.points()) {
      lo = std::min(lo, p.features[f]);
      hi = std::max(hi, p.features[f]);
    }
    EXPECT_EQ(st.x_min[f], lo);
    EXPECT_EQ(st.x_max[f], hi);
  }
}

TEST(Normalize, EndpointsMidpointAndExtrapolation) {
  const auto s = fit_normalizer(single_feature({0, 10}));
  EXPECT_EQ(normalize(s, std::vector<double>{0})[0], -1.0);
  EXPECT_EQ(normalize(s, std::vector<double>{5})[0], 0.0);
  EXPECT_EQ(normalize(s, std::vector<double>{10})[0], 1.0);
  EXPECT_NEAR(normalize(s, std::vector<double>{12})[0], 1.4, 1e-15);
  const auto d = fit_normalizer(single_feature({4, 4}));
  EXPECT_EQ(normalize(d, std::vector<double>{123})[0], 0.0);
  EXPECT_THROW(denormalize(d, std::vector<double>{0}), DegenerateInputError);
  EXPECT_THROW(normalize(s, std::vector<double>{1, 2}), ArgumentError);
}

TEST(Normalize, FittedDataSpansTargetExactly) {
  std::mt19937_64 gen(22);
  LabeledPointSet s({"a", "b", "c", "d"});
  for (int i = 0; i < 500; ++i) s.add(testkit::random_vector(gen, 4, -1e3, 1e3), 0);
  const auto st = fit_normalizer(s);
  const auto n = normalize(st, s);
  for (std::size_t f = 0; f < 4; ++f) {
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double v = n[i].features[f];
      if (i == 0 || v < lo) lo = v;
      if (i == 0 || v > hi) hi = v;
    }
    EXPECT_EQ(lo, -1.0);
    EXPECT_EQ(hi, 1.0);
  }
}

TEST(Denormalize, InvertsNormalize) {
  const auto s = fit_normalizer(single_feature({0, 10}));
  EXPECT_NEAR(denormalize(s, normalize(s, std::vector<double>{3.7}))[0], 3.7, 1e-12);
  EXPECT_EQ(denormalize(s, std::vector<double>{-1})[0], 0.0);
  EXPECT_EQ(denormalize(s, std::vector<double>{1})[0], 10.0);

  std::mt19937_64 gen(23);
  LabeledPointSet set({"a", "b"});
  for (int i = 0; i < 50; ++i) set.add(testkit::random_vector(gen, 2, -20, 20), 0);
  const auto st = fit_normalizer(set);
  for (int t = 0; t < 1000; ++t) {
    const auto v = testkit::random_vector(gen, 2, -30, 30);
    const auto back = denormalize(st, normalize(st, v));
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(back[i], v[i], 1e-12);
  }
}

TEST(NormalizerStats, ValidateAndIdentity) {
  const auto id = NormalizerStats::identity({"a", "b"});
  EXPECT_NO_THROW(id.validate());
  const std::vector<double> v{0.25, -0.75};
  EXPECT_EQ(normalize(id, v), v);
  auto bad = id;
  bad.x_min[0] = 5.0;
  EXPECT_THROW(bad.validate(), StructureError);
}

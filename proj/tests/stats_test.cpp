#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cip/error.hpp"
#include "cip/stats.hpp"
#include "cip/rng.hpp"

namespace cip {
namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kMalformedInput;
}

using Vec = std::vector<double>;

// y = (2 + 3x + x*e)^2 with e uniform in [-0.3, 0.3]: the square root is
// linear in x with spread growing in x.
std::pair<Vec, Vec> sqrt_oracle(std::uint64_t seed) {
  Rng rng(seed);
  Vec xs, ys;
  for (int x = 1; x <= 200; ++x) {
    const double e = rng.uniform_real(-0.3, 0.3);
    xs.push_back(x);
    ys.push_back(std::pow(2 + 3.0 * x + x * e, 2));
  }
  return {xs, ys};
}

TEST(Summarize, Examples) {
  const Summary s = summarize(Vec{1, 2, 3});
  EXPECT_EQ(s.count, 3u);
  EXPECT_DOUBLE_EQ(s.max, 3);
  EXPECT_DOUBLE_EQ(s.median, 2);
  EXPECT_NEAR(s.stddev, 1.0, 1e-12);
  EXPECT_NEAR(summarize(Vec{2, 4, 4, 4, 5, 5, 7, 9}).stddev, 2.1381, 1e-4);
  EXPECT_DOUBLE_EQ(summarize(Vec{4, 1, 3, 2}).median, 2.5);
  EXPECT_EQ(code_of([] { summarize(Vec{826}); }), ErrorCode::kInsufficientData);
}

TEST(Summarize, PermutationInvariantAndMatchesTwoPass) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    Vec v(2 + rng.below(50));
    for (double& x : v) x = rng.uniform_real(-1000.0, 1000.0);
    const Summary a = summarize(v);
    rng.shuffle(v);
    const Summary b = summarize(v);
    EXPECT_EQ(a.median, b.median);
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(a.stddev, std::sqrt(ss / static_cast<double>(v.size() - 1)), 1e-9);
  }
}

TEST(Pearson, Examples) {
  EXPECT_NEAR(pearson(Vec{1, 2, 3}, Vec{2, 4, 6}), 1.0, 1e-12);
  EXPECT_NEAR(pearson(Vec{1, 2, 3}, Vec{6, 4, 2}), -1.0, 1e-12);
  EXPECT_NEAR(pearson(Vec{1, 2, 3, 4}, Vec{1, 4, 9, 16}), 25.0 / std::sqrt(645.0), 1e-12);
  EXPECT_NEAR(pearson(Vec{1, 2, 3, 4}, Vec{1, 4, 9, 16}), 0.9844, 1e-4);
  EXPECT_EQ(code_of([] { pearson(Vec{1, 2}, Vec{1, 2, 3}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { pearson(Vec{1, 1, 1}, Vec{1, 2, 3}); }), ErrorCode::kZeroVariance);
}

TEST(Pearson, SymmetricScaleInvariantBounded) {
  Rng rng(13);
  for (int t = 0; t < 200; ++t) {
    Vec x(3 + rng.below(40)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform_real(-50.0, 50.0);
      y[i] = x[i] * rng.uniform_real(-2.0, 2.0) + rng.uniform_real(-10.0, 10.0);
    }
    const double r = pearson(x, y);
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
    EXPECT_NEAR(r, pearson(y, x), 1e-12);
    const double a = rng.uniform_real(0.1, 10.0), b = rng.uniform_real(-5.0, 5.0);
    Vec scaled = x;
    for (double& v : scaled) v = a * v + b;
    EXPECT_NEAR(pearson(scaled, y), r, 1e-12);
  }
}

TEST(Spearman, RanksWithTies) {
  EXPECT_NEAR(spearman(Vec{1, 2, 3, 4}, Vec{10, 20, 30, 1000}), 1.0, 1e-12);
  EXPECT_NEAR(spearman(Vec{1, 2, 3}, Vec{3, 2, 1}), -1.0, 1e-12);
  // Ranks 1.5, 1.5, 3 against 1, 2, 3.
  EXPECT_NEAR(spearman(Vec{5, 5, 7}, Vec{1, 2, 3}), pearson(Vec{1.5, 1.5, 3}, Vec{1, 2, 3}), 1e-12);
}

TEST(Transform, Examples) {
  EXPECT_EQ(transform(Vec{4, 9, 16}, Transform::kSqrt), (Vec{2, 3, 4}));
  EXPECT_EQ(transform(Vec{1}, Transform::kLog), (Vec{0}));
  EXPECT_EQ(transform(Vec{4, 0.5}, Transform::kReciprocal), (Vec{0.25, 2}));
  try {
    transform(Vec{0, 1}, Transform::kReciprocal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomainError);
    EXPECT_NE(std::string(e.what()).find("index 0"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { transform(Vec{1, 0}, Transform::kLog); }), ErrorCode::kDomainError);
  EXPECT_EQ(code_of([] { transform(Vec{1, -1}, Transform::kSqrt); }), ErrorCode::kDomainError);
}

TEST(VarianceConsistency, Examples) {
  Vec xs, flat, fan;
  for (int i = 1; i <= 200; ++i) {
    const double e = i % 2 ? 1.0 : -1.0;
    xs.push_back(i);
    flat.push_back(i + e);
    fan.push_back(i * e);
  }
  EXPECT_NEAR(variance_consistency(xs, flat), 1.0, 1e-9);
  EXPECT_GT(variance_consistency(xs, fan), 50.0);
  EXPECT_EQ(code_of([] { variance_consistency(Vec(9, 1.0), Vec(9, 1.0)); }), ErrorCode::kInsufficientData);
  EXPECT_GE(variance_consistency(Vec{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, Vec{1, 3, 2, 5, 4, 7, 6, 9, 8, 10}), 1.0);
}

TEST(VarianceConsistency, TiedXValuesShareABin) {
  // Three x values with 20 points each: bins cannot split a tie group, so
  // there are three bins whatever the requested count.
  Vec xs, ys;
  for (int g = 1; g <= 3; ++g) {
    for (int i = 0; i < 20; ++i) {
      xs.push_back(g);
      ys.push_back(g * (i % 2 ? 1.0 : -1.0));
    }
  }
  EXPECT_NEAR(variance_consistency(xs, ys), 9.0, 1e-9);
}

TEST(SelectTransforms, SqrtOracle) {
  const auto [xs, ys] = sqrt_oracle(1);
  const TransformSelection s = select_transforms(xs, ys);
  EXPECT_EQ(s.y, Transform::kSqrt);
  EXPECT_EQ(s.x, Transform::kSqrt);
  EXPECT_GT(s.pearson_transformed, 0.95);
  ASSERT_TRUE(s.variance_scores[1]);
  EXPECT_GT(variance_consistency(xs, ys), *s.variance_scores[1]);
}

TEST(SelectTransforms, LinearDataKeepsItsCorrelation) {
  Vec xs, ys;
  for (int i = 1; i <= 200; ++i) {
    xs.push_back(i);
    ys.push_back(100 + 2.0 * i + (i % 2 ? 1.0 : -1.0));
  }
  const TransformSelection s = select_transforms(xs, ys);
  EXPECT_NEAR(s.pearson_transformed, pearson(xs, ys), 0.02);
}

TEST(SelectTransforms, SkipsTransformsOutsideTheDomain) {
  auto [xs, ys] = sqrt_oracle(2);
  ys[0] = 0;
  const TransformSelection s = select_transforms(xs, ys);
  EXPECT_FALSE(s.variance_scores[0]);
  EXPECT_FALSE(s.variance_scores[2]);
  EXPECT_EQ(s.y, Transform::kSqrt);
}

TEST(SelectTransforms, OrderInvariant) {
  auto [xs, ys] = sqrt_oracle(3);
  const TransformSelection a = select_transforms(xs, ys);
  std::vector<std::size_t> idx(xs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(4);
  rng.shuffle(idx);
  Vec px, py;
  for (std::size_t i : idx) {
    px.push_back(xs[i]);
    py.push_back(ys[i]);
  }
  const TransformSelection b = select_transforms(px, py);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.x, b.x);
  EXPECT_NEAR(a.pearson_transformed, b.pearson_transformed, 1e-12);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(*a.variance_scores[t], *b.variance_scores[t], 1e-9);
}

StudyRecord rec(int steps, int cases, std::size_t size) {
  StudyRecord r;
  r.steps = steps;
  r.total_cases = cases;
  r.size_bytes = size;
  return r;
}

TEST(GroupedMedian, Examples) {
  const std::vector<StudyRecord> records = {rec(1, 2, 10), rec(1, 3, 20), rec(2, 4, 7)};
  const auto by_steps = grouped_median(records, GroupBy::kSteps);
  EXPECT_DOUBLE_EQ(by_steps.at(Cell{1, 0}), 15);
  EXPECT_DOUBLE_EQ(by_steps.at(Cell{2, 0}), 7);
  EXPECT_FALSE(by_steps.contains(Cell{3, 0}));
  const auto by_cell = grouped_median(records, GroupBy::kStepsAndCases);
  EXPECT_EQ(by_cell.size(), 3u);
  EXPECT_DOUBLE_EQ(by_cell.at(Cell{1, 3}), 20);
}

TEST(WeightedMeanGrid, Examples) {
  const std::vector<StudyRecord> records = {rec(2, 5, 100), rec(2, 5, 200), rec(3, 4, 42)};
  const auto grid = weighted_mean_grid(records);
  EXPECT_DOUBLE_EQ(grid.at(Cell{2, 5}).mean, 150);
  EXPECT_EQ(grid.at(Cell{2, 5}).count, 2u);
  EXPECT_DOUBLE_EQ(grid.at(Cell{3, 4}).mean, 42);
  EXPECT_FALSE(grid.contains(Cell{1, 1}));
}

TEST(Analyze, ReportFields) {
  std::vector<StudyRecord> records;
  Rng rng(6);
  for (int k = 1; k <= 8; ++k) {
    for (int i = 0; i < 20; ++i) {
      const int cases = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(7 * k + 1)));
      const double root = 3 + 2.0 * cases * (1 + rng.uniform_real(-0.2, 0.2));
      records.push_back(rec(k, cases, static_cast<std::size_t>(root * root)));
    }
  }
  const nlohmann::json j = report_to_json(analyze(records));
  EXPECT_EQ(j["counts"]["records"], 160);
  for (const char* key : {"count", "max_size", "median_size", "stddev_size"}) EXPECT_TRUE(j["summary"].contains(key));
  for (const char* pair : {"size_vs_cases", "size_vs_steps"}) {
    const auto& p = j["pairs"][pair];
    for (const char* key : {"pearson_raw", "y_transform", "x_transform", "pearson_transformed"}) {
      EXPECT_TRUE(p.contains(key)) << pair << "." << key;
    }
    for (const char* t : {"log", "sqrt", "reciprocal"}) EXPECT_TRUE(p["variance_scores"].contains(t));
  }
  EXPECT_EQ(j["grouped_medians"]["by_steps"].size(), 8u);
  EXPECT_FALSE(j["grid"].empty());
  EXPECT_EQ(code_of([] { analyze(std::vector<StudyRecord>{rec(1, 1, 5)}); }), ErrorCode::kInsufficientData);
}

}  // namespace
}  // namespace cip

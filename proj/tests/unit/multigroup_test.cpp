#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairaudit/error.hpp"
#include "fairaudit/multigroup.hpp"
#include "support.hpp"

namespace fairaudit {
namespace {

using K = MetaMetricKind;

double value(std::vector<double> xs, K kind, double alpha = 2.0) {
  return meta(std::span<const double>(xs), kind, alpha).value;
}

TEST(Meta, TwoPointCase) {
  EXPECT_EQ(value({0.5, 1.0}, K::kMaxMinDifference), 0.5);
  EXPECT_EQ(value({0.5, 1.0}, K::kMaxMinRatio), 2.0);
  EXPECT_EQ(value({1.0, 0.5}, K::kMaxAbsDifference), 0.25);
  EXPECT_EQ(value({1.0, 0.5}, K::kMeanAbsDeviation), 0.25);
  EXPECT_EQ(value({1.0, 0.5}, K::kVariance), 0.125);
}

TEST(Meta, GeneralizedEntropyHandValue) {
  // mean 0.3, terms (2/3)^2 - 1 and (4/3)^2 - 1, prefactor 1/(2 * 2 * 1)
  EXPECT_NEAR(value({0.2, 0.4}, K::kGeneralizedEntropy), 1.0 / 18.0, 1e-12);
  // alpha = -1 oracle from the definition
  const std::vector<double> xs{0.1, 0.25, 0.7};
  const double mean = (0.1 + 0.25 + 0.7) / 3.0;
  double sum = 0.0;
  for (const double x : xs) sum += std::pow(x / mean, -1.0) - 1.0;
  EXPECT_NEAR(value(xs, K::kGeneralizedEntropy, -1.0), sum / (3.0 * -1.0 * -2.0), 1e-12);
}

TEST(Meta, AllEqualInputsAreExact) {
  for (const double v : {0.1, 0.17, 1.0 / 3.0, 0.999, 42.5}) {
    for (std::size_t k = 2; k <= 7; ++k) {
      const std::vector<double> xs(k, v);
      EXPECT_EQ(value(xs, K::kMaxMinDifference), 0.0);
      EXPECT_EQ(value(xs, K::kMaxMinRatio), 1.0);
      EXPECT_EQ(value(xs, K::kMaxAbsDifference), 0.0);
      EXPECT_EQ(value(xs, K::kMeanAbsDeviation), 0.0);
      EXPECT_EQ(value(xs, K::kVariance), 0.0);
      EXPECT_EQ(value(xs, K::kGeneralizedEntropy), 0.0);
    }
  }
}

TEST(Meta, OrderInvariantAndScaleBehaviour) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(2 + trial % 6);
    for (auto& x : xs) x = u(rng);
    auto shuffled = xs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto scaled = xs;
    for (auto& x : scaled) x *= 4.0;
    for (const auto kind : kAllMetaMetrics) {
      EXPECT_EQ(value(xs, kind), value(shuffled, kind)) << meta_metric_name(kind);
    }
    EXPECT_EQ(value(scaled, K::kMaxMinRatio), value(xs, K::kMaxMinRatio));
    EXPECT_EQ(value(scaled, K::kGeneralizedEntropy), value(xs, K::kGeneralizedEntropy));
    EXPECT_EQ(value(scaled, K::kMaxMinDifference), 4.0 * value(xs, K::kMaxMinDifference));
    EXPECT_EQ(value(scaled, K::kVariance), 16.0 * value(xs, K::kVariance));
    EXPECT_GE(value(xs, K::kGeneralizedEntropy), 0.0);
  }
}

TEST(Meta, Preconditions) {
  EXPECT_THROW(value({0.3}, K::kVariance), InputError);
  EXPECT_THROW(value({0.0, 0.3}, K::kMaxMinRatio), InputError);
  EXPECT_THROW(value({0.0, 0.3}, K::kGeneralizedEntropy), InputError);
  EXPECT_THROW(value({0.2, 0.3}, K::kGeneralizedEntropy, 1.0), InputError);
  EXPECT_THROW(value({0.2, 0.3}, K::kGeneralizedEntropy, 0.0), InputError);
  EXPECT_EQ(value({0.0, 0.3}, K::kMaxMinDifference), 0.3);
}

TEST(Meta, UndefinedInputAbortsNamingTheGroup) {
  const std::vector<MetricValue> values{0.2, std::nullopt, 0.4};
  const std::vector<std::string> groups{"a", "b", "c"};
  try {
    meta(std::span<const MetricValue>(values), groups, K::kVariance);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
}

TEST(Meta, AcrossGroups) {
  std::vector<Record> r;
  for (int i = 0; i < 4; ++i) r.push_back(testing::decided("x", i < 1, 0));
  for (int i = 0; i < 4; ++i) r.push_back(testing::decided("y", i < 2, 0));
  for (int i = 0; i < 4; ++i) r.push_back(testing::decided("z", i < 3, 0));
  const AuditDataset ds(r, {});
  const auto res = meta_across_groups(ds, MetricId::kPrevalence, K::kMaxMinRatio);
  EXPECT_EQ(res.value, 3.0);
  EXPECT_EQ(res.groups, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(res.values, (std::vector<double>{0.25, 0.5, 0.75}));
  EXPECT_EQ(res.metric, MetricId::kPrevalence);
  EXPECT_THROW(meta_across_groups(ds, MetricId::kTpr, K::kMaxMinRatio), InputError);
}

TEST(Meta, Names) {
  for (const auto kind : kAllMetaMetrics) EXPECT_EQ(parse_meta_metric(meta_metric_name(kind)), kind);
  EXPECT_EQ(parse_meta_metric("GEI"), K::kGeneralizedEntropy);
  EXPECT_THROW(parse_meta_metric("gini"), InputError);
}

}  // namespace
}  // namespace fairaudit

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

/// Scalar summaries of one metric across K >= 2 groups.
enum class MetaMetricKind {
  kMaxMinDifference,
  kMaxMinRatio,
  kMaxAbsDifference,
  kMeanAbsDeviation,
  kVariance,
  kGeneralizedEntropy,
};

inline constexpr std::array<MetaMetricKind, 6> kAllMetaMetrics{
    MetaMetricKind::kMaxMinDifference, MetaMetricKind::kMaxMinRatio,
    MetaMetricKind::kMaxAbsDifference, MetaMetricKind::kMeanAbsDeviation,
    MetaMetricKind::kVariance,         MetaMetricKind::kGeneralizedEntropy,
};

std::string_view meta_metric_name(MetaMetricKind kind);
MetaMetricKind parse_meta_metric(std::string_view name);

inline constexpr double kDefaultEntropyAlpha = 2.0;

struct MetaMetricResult {
  MetaMetricKind kind = MetaMetricKind::kMaxMinDifference;
  std::optional<MetricId> metric;
  std::vector<std::string> groups;
  std::vector<double> values;
  /// Exponent, for the generalized entropy index only.
  std::optional<double> alpha;
  double value = 0.0;
};

/// Evaluates one meta-metric on K group values. The result does not depend
/// on the order of `values`. Throws InputError for K < 2, non-positive
/// values with the ratio and entropy kinds, and alpha in {0, 1}.
MetaMetricResult meta(std::span<const double> values, MetaMetricKind kind,
                      double alpha = kDefaultEntropyAlpha);

/// As above, but UNDEFINED inputs abort with InputError naming the group.
MetaMetricResult meta(std::span<const MetricValue> values, std::span<const std::string> groups,
                      MetaMetricKind kind, double alpha = kDefaultEntropyAlpha);

/// Computes `metric` for every group of the dataset and summarizes it.
MetaMetricResult meta_across_groups(const AuditDataset& dataset, MetricId metric,
                                    MetaMetricKind kind, double alpha = kDefaultEntropyAlpha);

}  // namespace fairaudit

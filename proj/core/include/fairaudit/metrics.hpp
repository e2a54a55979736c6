#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

/// Per-group classification and calibration statistics.
enum class MetricId {
  kTpr,
  kTnr,
  kFpr,
  kFnr,
  kPpv,
  kNpv,
  kAccuracy,
  kBrierScore,
  kMeanAbsoluteError,
  kPositiveRate,
  kMeanScorePositive,
  kMeanScoreNegative,
  kFnFpRatio,
  kPrevalence,
};

inline constexpr std::array<MetricId, 14> kAllMetrics{
    MetricId::kTpr,          MetricId::kTnr,
    MetricId::kFpr,          MetricId::kFnr,
    MetricId::kPpv,          MetricId::kNpv,
    MetricId::kAccuracy,     MetricId::kBrierScore,
    MetricId::kMeanAbsoluteError, MetricId::kPositiveRate,
    MetricId::kMeanScorePositive, MetricId::kMeanScoreNegative,
    MetricId::kFnFpRatio,    MetricId::kPrevalence,
};

/// Canonical upper-case name, e.g. "TPR", "POSITIVE_RATE".
std::string_view metric_name(MetricId id);
/// Case-insensitive inverse of metric_name. Throws InputError.
MetricId parse_metric(std::string_view name);

/// Metrics computed from scores (Brier, MAE, class-conditional means).
bool is_score_metric(MetricId id);
/// Metrics computed from decisions.
bool is_decision_metric(MetricId id);
/// Metrics that are proportions or score averages, i.e. live in [0,1].
bool is_bounded_metric(MetricId id);

/// A metric value; std::nullopt stands for UNDEFINED (zero denominator).
using MetricValue = std::optional<double>;

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// value_a - value_b; UNDEFINED if either side is.
MetricValue metric_difference(MetricValue a, MetricValue b);

/// value_a / value_b; UNDEFINED if either side is or b == 0. The side >= 1
/// is a direct quotient and the other its reciprocal, so swapping the
/// arguments yields the exact IEEE reciprocal.
MetricValue metric_ratio(MetricValue a, MetricValue b);

/// Throws InputError if a record has no decision.
ConfusionCounts confusion_counts(std::span<const Record> records);

/// Sufficient statistics for every MetricId over one set of records.
/// Accumulates in the order records are added.
struct GroupTally {
  ConfusionCounts counts;
  std::size_t n = 0;
  std::size_t positives = 0;  // y = 1
  std::size_t undecided = 0;  // records without a decision
  std::size_t scored = 0;
  std::size_t scored_positives = 0;
  std::size_t scored_negatives = 0;
  double score_sum_positive = 0.0;
  double score_sum_negative = 0.0;
  double squared_error_sum = 0.0;
  double absolute_error_sum = 0.0;

  void add(const Record& record);
};

GroupTally tally(std::span<const Record> records);

/// Evaluates `id` on a tally. Decision metrics on a tally with undecided
/// records throw InputError; zero denominators give UNDEFINED.
MetricValue metric_value(const GroupTally& tally, MetricId id);

/// group_metric over the dataset's group partition.
MetricValue group_metric(const AuditDataset& dataset, std::string_view group, MetricId id);

struct GroupMetrics {
  std::string group;
  std::size_t n = 0;
  std::array<MetricValue, kAllMetrics.size()> values{};

  const MetricValue& operator[](MetricId id) const {
    return values[static_cast<std::size_t>(id)];
  }
};

/// All metrics for one group. Decision metrics are UNDEFINED when the
/// dataset carries no decisions; score metrics when it carries no scores.
GroupMetrics group_metrics(const AuditDataset& dataset, std::string_view group);

/// Mean squared difference between score and outcome. Throws InputError on
/// an empty list or a record without score.
double brier_score(std::span<const Record> records);
/// Mean absolute difference between score and outcome.
double mean_absolute_error(std::span<const Record> records);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  MetricValue mean_score;
  MetricValue observed_rate;
  bool sparse = true;
};

/// Binned reliability curve. Bin 0 is [0, 1/k]; bin i > 0 is (i/k, (i+1)/k].
struct CalibrationCurve {
  std::string group;
  std::size_t min_bin_count = 10;
  std::vector<CalibrationBin> bins;

  std::size_t total() const;
};

/// Index of the equal-width bin holding `score` among `bins` bins.
std::size_t calibration_bin_index(double score, std::size_t bins);

CalibrationCurve calibration_curve(std::span<const Record> records, std::size_t bins,
                                   std::size_t min_bin_count = 10);
/// Throws InputError for bins < 2 or a group with unscored records.
CalibrationCurve calibration_curve(const AuditDataset& dataset, std::string_view group,
                                   std::size_t bins, std::size_t min_bin_count = 10);

}  // namespace fairaudit

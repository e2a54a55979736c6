#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/inference.hpp"
#include "fairaudit/metrics.hpp"
#include "fairaudit/predicate.hpp"

namespace fairaudit {

enum class FairnessCriterion {
  kStatisticalParity,
  kConditionalStatisticalParity,
  kEqualOpportunity,
  kPredictiveEquality,
  kEqualizedOdds,
  kBalancePositive,
  kBalanceNegative,
  kPredictiveParity,
  kConditionalUseAccuracy,
  kWellCalibration,
  kTestFairness,
  kBrierParity,
  kOverallAccuracy,
  kTreatmentEquality,
};

inline constexpr std::array<FairnessCriterion, 14> kAllCriteria{
    FairnessCriterion::kStatisticalParity,   FairnessCriterion::kConditionalStatisticalParity,
    FairnessCriterion::kEqualOpportunity,    FairnessCriterion::kPredictiveEquality,
    FairnessCriterion::kEqualizedOdds,       FairnessCriterion::kBalancePositive,
    FairnessCriterion::kBalanceNegative,     FairnessCriterion::kPredictiveParity,
    FairnessCriterion::kConditionalUseAccuracy, FairnessCriterion::kWellCalibration,
    FairnessCriterion::kTestFairness,        FairnessCriterion::kBrierParity,
    FairnessCriterion::kOverallAccuracy,     FairnessCriterion::kTreatmentEquality,
};

enum class CriterionCategory { kIndependence, kSeparation, kSufficiency, kOther };

CriterionCategory criterion_category(FairnessCriterion criterion);
std::string_view category_name(CriterionCategory category);

/// snake_case identifier used on the command line and in JSON.
std::string_view criterion_name(FairnessCriterion criterion);
/// Human-readable title, e.g. "Statistical Parity".
std::string_view criterion_title(FairnessCriterion criterion);
/// Accepts criterion_name spellings (case-insensitive, '-' or '_').
FairnessCriterion parse_criterion(std::string_view name);

/// Metrics whose group values the criterion equalizes. Compound criteria
/// return two; the calibration criteria return none (they compare binned
/// curves, see compare_calibration).
std::vector<MetricId> criterion_components(FairnessCriterion criterion);

bool criterion_uses_scores(FairnessCriterion criterion);
bool is_calibration_criterion(FairnessCriterion criterion);

/// The nine unconditional criteria of the standard audit table, in
/// display order. Conditional statistical parity joins per condition.
std::vector<FairnessCriterion> table_criteria();

/// One criterion component evaluated on a group pair.
struct Comparison {
  FairnessCriterion criterion = FairnessCriterion::kStatisticalParity;
  MetricId metric = MetricId::kPositiveRate;
  std::string group_a;
  std::string group_b;
  MetricValue value_a;
  MetricValue value_b;
  MetricValue diff;
  MetricValue ratio;
  std::optional<Interval> ci_diff;
  std::optional<Interval> ci_ratio;
  std::vector<std::string> notes;
};

/// Builds a Comparison from point values (diff = a - b, ratio = a / b).
Comparison compare_values(FairnessCriterion criterion, MetricId metric, std::string group_a,
                          std::string group_b, MetricValue value_a, MetricValue value_b);

/// Point estimates for every component of `criterion`. Throws InputError for
/// unknown groups, missing scores or decisions, and calibration criteria.
std::vector<Comparison> compare(const AuditDataset& dataset, FairnessCriterion criterion,
                                std::string_view group_a, std::string_view group_b);

/// Statistical parity within the records satisfying `predicate`.
Comparison compare_conditional(const AuditDataset& dataset, const ConditionPredicate& predicate,
                               std::string_view group_a, std::string_view group_b);

struct CalibrationComparison {
  CalibrationCurve curve_a;
  CalibrationCurve curve_b;
  /// max |observed - mean score| over the group's non-sparse bins.
  MetricValue well_calibration_gap_a;
  MetricValue well_calibration_gap_b;
  /// max |observed_a - observed_b| over bins non-sparse in both groups.
  double test_fairness_gap = 0.0;
  std::size_t shared_bins = 0;
};

/// Throws InputError when no bin is non-sparse in both groups.
CalibrationComparison compare_calibration(const AuditDataset& dataset, std::string_view group_a,
                                          std::string_view group_b, std::size_t bins,
                                          std::size_t min_bin_count = 10);

struct Condition {
  std::string name;
  ConditionPredicate predicate;
};

struct EvaluationOptions {
  std::vector<FairnessCriterion> criteria = table_criteria();
  std::vector<Condition> conditions;
  std::optional<BootstrapConfig> bootstrap;
  std::size_t bins = 10;
  std::size_t min_bin_count = 10;
  /// Groups with fewer positives than this get a low-n note on the
  /// score-balance rows.
  std::size_t low_n = 10;
};

enum class RowStatus { kEvaluated, kNotEvaluated, kError };

std::string_view row_status_name(RowStatus status);

struct ReportRow {
  FairnessCriterion criterion = FairnessCriterion::kStatisticalParity;
  CriterionCategory category = CriterionCategory::kIndependence;
  std::optional<Condition> condition;
  RowStatus status = RowStatus::kEvaluated;
  Comparison comparison;
  /// Set when the bootstrap failed on this row (tolerance exceeded).
  std::optional<std::string> error;
};

struct CalibrationSection {
  RowStatus status = RowStatus::kEvaluated;
  std::optional<CalibrationComparison> comparison;
  std::vector<std::string> notes;
};

struct FairnessReport {
  std::string group_a;
  std::string group_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::vector<ReportRow> rows;
  std::optional<CalibrationSection> calibration;

  bool has_errors() const;
};

/// Evaluates the selected criteria (plus one conditional statistical parity
/// row per condition) on the pair, attaching bootstrap intervals when
/// configured. Row-level failures become row notes; only dataset-level
/// problems (unknown group, undecided records) throw.
FairnessReport evaluate_all(const AuditDataset& dataset, std::string_view group_a,
                            std::string_view group_b, const EvaluationOptions& options = {});

}  // namespace fairaudit

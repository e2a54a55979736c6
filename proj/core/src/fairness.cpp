#include "fairaudit/fairness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fairaudit/error.hpp"

namespace fairaudit {
namespace {

GroupTally tally_group(const AuditDataset& dataset, std::string_view group) {
  GroupTally t;
  const auto& records = dataset.records();
  for (const std::size_t i : dataset.members(group)) t.add(records[i]);
  return t;
}

void add_value_notes(Comparison& c) {
  if (!c.value_a) c.notes.push_back("value for group '" + c.group_a + "' is UNDEFINED");
  if (!c.value_b) c.notes.push_back("value for group '" + c.group_b + "' is UNDEFINED");
  if (c.value_a && c.value_b && !c.ratio) {
    c.notes.push_back("ratio UNDEFINED: value for group '" + c.group_b + "' is 0");
  }
}

std::size_t class_count(const GroupTally& t, MetricId metric) {
  return metric == MetricId::kMeanScorePositive ? t.scored_positives : t.scored_negatives;
}

std::vector<Comparison> compare_tallies(FairnessCriterion criterion, const GroupTally& a,
                                        const GroupTally& b, std::string_view group_a,
                                        std::string_view group_b) {
  std::vector<Comparison> out;
  for (const MetricId metric : criterion_components(criterion)) {
    out.push_back(compare_values(criterion, metric, std::string(group_a), std::string(group_b),
                                 metric_value(a, metric), metric_value(b, metric)));
  }
  return out;
}

void check_pair(const AuditDataset& dataset, std::string_view group_a, std::string_view group_b) {
  if (!dataset.has_group(group_a)) throw InputError("unknown group '" + std::string(group_a) + "'");
  if (!dataset.has_group(group_b)) throw InputError("unknown group '" + std::string(group_b) + "'");
  if (group_a == group_b) throw InputError("comparison needs two distinct groups");
}

void require_capabilities(const AuditDataset& dataset, FairnessCriterion criterion) {
  if (is_calibration_criterion(criterion)) {
    throw InputError(std::string(criterion_name(criterion)) +
                     " compares calibration curves; use compare_calibration");
  }
  if (criterion_uses_scores(criterion) && !dataset.has_scores()) {
    throw InputError(std::string(criterion_name(criterion)) + " requires scores, none loaded");
  }
  const auto components = criterion_components(criterion);
  const bool needs_decisions = std::any_of(components.begin(), components.end(),
                                           [](MetricId m) { return is_decision_metric(m); });
  if (needs_decisions && !dataset.has_decisions()) {
    throw InputError(std::string(criterion_name(criterion)) +
                     " requires decisions; supply a decision column or threshold");
  }
}

struct PairEvaluation {
  const AuditDataset& dataset;
  std::string group_a;
  std::string group_b;
  const EvaluationOptions& options;
  std::optional<BootstrapReplicates> replicates;

  void attach_intervals(ReportRow& row) {
    if (!options.bootstrap) return;
    Comparison& c = row.comparison;
    if (!replicates) {
      replicates = BootstrapReplicates::run(dataset, {group_a, group_b}, *options.bootstrap);
    }
    try {
      if (c.value_a && c.value_b) {
        c.ci_diff = ci_diff(*replicates, c.metric, c.value_a, c.value_b);
      } else {
        c.notes.push_back("difference CI not computed: point value UNDEFINED");
      }
      if (c.value_a && c.value_b && *c.value_a > 0.0 && *c.value_b > 0.0) {
        c.ci_ratio = ci_ratio(*replicates, c.metric, c.value_a, c.value_b);
      } else {
        c.notes.push_back("ratio CI not computed: point values must be positive");
      }
    } catch (const ComputationError& e) {
      row.status = RowStatus::kError;
      row.error = e.what();
      c.notes.push_back(e.what());
    }
  }
};

}  // namespace

CriterionCategory criterion_category(FairnessCriterion criterion) {
  switch (criterion) {
    case FairnessCriterion::kStatisticalParity:
    case FairnessCriterion::kConditionalStatisticalParity:
      return CriterionCategory::kIndependence;
    case FairnessCriterion::kEqualOpportunity:
    case FairnessCriterion::kPredictiveEquality:
    case FairnessCriterion::kEqualizedOdds:
    case FairnessCriterion::kBalancePositive:
    case FairnessCriterion::kBalanceNegative:
      return CriterionCategory::kSeparation;
    case FairnessCriterion::kPredictiveParity:
    case FairnessCriterion::kConditionalUseAccuracy:
    case FairnessCriterion::kWellCalibration:
    case FairnessCriterion::kTestFairness:
      return CriterionCategory::kSufficiency;
    case FairnessCriterion::kBrierParity:
    case FairnessCriterion::kOverallAccuracy:
    case FairnessCriterion::kTreatmentEquality:
      return CriterionCategory::kOther;
  }
  return CriterionCategory::kOther;
}

std::string_view category_name(CriterionCategory category) {
  switch (category) {
    case CriterionCategory::kIndependence: return "independence";
    case CriterionCategory::kSeparation: return "separation";
    case CriterionCategory::kSufficiency: return "sufficiency";
    case CriterionCategory::kOther: return "other";
  }
  return "other";
}

std::string_view criterion_name(FairnessCriterion criterion) {
  switch (criterion) {
    case FairnessCriterion::kStatisticalParity: return "statistical_parity";
    case FairnessCriterion::kConditionalStatisticalParity: return "conditional_statistical_parity";
    case FairnessCriterion::kEqualOpportunity: return "equal_opportunity";
    case FairnessCriterion::kPredictiveEquality: return "predictive_equality";
    case FairnessCriterion::kEqualizedOdds: return "equalized_odds";
    case FairnessCriterion::kBalancePositive: return "balance_positive";
    case FairnessCriterion::kBalanceNegative: return "balance_negative";
    case FairnessCriterion::kPredictiveParity: return "predictive_parity";
    case FairnessCriterion::kConditionalUseAccuracy: return "conditional_use_accuracy";
    case FairnessCriterion::kWellCalibration: return "well_calibration";
    case FairnessCriterion::kTestFairness: return "test_fairness";
    case FairnessCriterion::kBrierParity: return "brier_parity";
    case FairnessCriterion::kOverallAccuracy: return "overall_accuracy";
    case FairnessCriterion::kTreatmentEquality: return "treatment_equality";
  }
  return "?";
}

std::string_view criterion_title(FairnessCriterion criterion) {
  switch (criterion) {
    case FairnessCriterion::kStatisticalParity: return "Statistical Parity";
    case FairnessCriterion::kConditionalStatisticalParity: return "Conditional Statistical Parity";
    case FairnessCriterion::kEqualOpportunity: return "Equal Opportunity";
    case FairnessCriterion::kPredictiveEquality: return "Predictive Equality";
    case FairnessCriterion::kEqualizedOdds: return "Equalized Odds";
    case FairnessCriterion::kBalancePositive: return "Balance for Positive Class";
    case FairnessCriterion::kBalanceNegative: return "Balance for Negative Class";
    case FairnessCriterion::kPredictiveParity: return "Predictive Parity";
    case FairnessCriterion::kConditionalUseAccuracy: return "Conditional Use Accuracy Equality";
    case FairnessCriterion::kWellCalibration: return "Well Calibration";
    case FairnessCriterion::kTestFairness: return "Test Fairness";
    case FairnessCriterion::kBrierParity: return "Brier Score Parity";
    case FairnessCriterion::kOverallAccuracy: return "Overall Accuracy Equality";
    case FairnessCriterion::kTreatmentEquality: return "Treatment Equality";
  }
  return "?";
}

FairnessCriterion parse_criterion(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  for (const auto criterion : kAllCriteria) {
    if (criterion_name(criterion) == key) return criterion;
  }
  throw InputError("unknown criterion '" + std::string(name) + "'");
}

std::vector<MetricId> criterion_components(FairnessCriterion criterion) {
  switch (criterion) {
    case FairnessCriterion::kStatisticalParity:
    case FairnessCriterion::kConditionalStatisticalParity:
      return {MetricId::kPositiveRate};
    case FairnessCriterion::kEqualOpportunity: return {MetricId::kFnr};
    case FairnessCriterion::kPredictiveEquality: return {MetricId::kFpr};
    case FairnessCriterion::kEqualizedOdds: return {MetricId::kFnr, MetricId::kFpr};
    case FairnessCriterion::kBalancePositive: return {MetricId::kMeanScorePositive};
    case FairnessCriterion::kBalanceNegative: return {MetricId::kMeanScoreNegative};
    case FairnessCriterion::kPredictiveParity: return {MetricId::kPpv};
    case FairnessCriterion::kConditionalUseAccuracy: return {MetricId::kPpv, MetricId::kNpv};
    case FairnessCriterion::kWellCalibration:
    case FairnessCriterion::kTestFairness:
      return {};
    case FairnessCriterion::kBrierParity: return {MetricId::kBrierScore};
    case FairnessCriterion::kOverallAccuracy: return {MetricId::kAccuracy};
    case FairnessCriterion::kTreatmentEquality: return {MetricId::kFnFpRatio};
  }
  return {};
}

bool is_calibration_criterion(FairnessCriterion criterion) {
  return criterion == FairnessCriterion::kWellCalibration ||
         criterion == FairnessCriterion::kTestFairness;
}

bool criterion_uses_scores(FairnessCriterion criterion) {
  if (is_calibration_criterion(criterion)) return true;
  const auto components = criterion_components(criterion);
  return std::any_of(components.begin(), components.end(),
                     [](MetricId m) { return is_score_metric(m); });
}

std::vector<FairnessCriterion> table_criteria() {
  return {FairnessCriterion::kStatisticalParity,  FairnessCriterion::kConditionalStatisticalParity,
          FairnessCriterion::kEqualOpportunity,   FairnessCriterion::kPredictiveEquality,
          FairnessCriterion::kBalancePositive,    FairnessCriterion::kBalanceNegative,
          FairnessCriterion::kPredictiveParity,   FairnessCriterion::kBrierParity,
          FairnessCriterion::kOverallAccuracy,    FairnessCriterion::kTreatmentEquality};
}

Comparison compare_values(FairnessCriterion criterion, MetricId metric, std::string group_a,
                          std::string group_b, MetricValue value_a, MetricValue value_b) {
  Comparison c;
  c.criterion = criterion;
  c.metric = metric;
  c.group_a = std::move(group_a);
  c.group_b = std::move(group_b);
  c.value_a = value_a;
  c.value_b = value_b;
  c.diff = metric_difference(value_a, value_b);
  c.ratio = metric_ratio(value_a, value_b);
  add_value_notes(c);
  return c;
}

std::vector<Comparison> compare(const AuditDataset& dataset, FairnessCriterion criterion,
                                std::string_view group_a, std::string_view group_b) {
  check_pair(dataset, group_a, group_b);
  require_capabilities(dataset, criterion);
  return compare_tallies(criterion, tally_group(dataset, group_a), tally_group(dataset, group_b),
                         group_a, group_b);
}

Comparison compare_conditional(const AuditDataset& dataset, const ConditionPredicate& predicate,
                               std::string_view group_a, std::string_view group_b) {
  check_pair(dataset, group_a, group_b);
  const AuditDataset filtered = filter_condition(dataset, predicate);
  auto rows = compare(filtered, FairnessCriterion::kStatisticalParity, group_a, group_b);
  Comparison c = std::move(rows.front());
  c.criterion = FairnessCriterion::kConditionalStatisticalParity;
  return c;
}

CalibrationComparison compare_calibration(const AuditDataset& dataset, std::string_view group_a,
                                          std::string_view group_b, std::size_t bins,
                                          std::size_t min_bin_count) {
  check_pair(dataset, group_a, group_b);
  if (!dataset.has_scores()) throw InputError("calibration requires scores, none loaded");
  CalibrationComparison out;
  out.curve_a = calibration_curve(dataset, group_a, bins, min_bin_count);
  out.curve_b = calibration_curve(dataset, group_b, bins, min_bin_count);

  auto gap = [](const CalibrationCurve& curve) -> MetricValue {
    MetricValue worst;
    for (const auto& bin : curve.bins) {
      if (bin.sparse || !bin.mean_score) continue;
      const double g = std::abs(*bin.observed_rate - *bin.mean_score);
      worst = worst ? std::max(*worst, g) : g;
    }
    return worst;
  };
  out.well_calibration_gap_a = gap(out.curve_a);
  out.well_calibration_gap_b = gap(out.curve_b);

  for (std::size_t i = 0; i < bins; ++i) {
    const auto& a = out.curve_a.bins[i];
    const auto& b = out.curve_b.bins[i];
    if (a.sparse || b.sparse || a.count == 0 || b.count == 0) continue;
    ++out.shared_bins;
    out.test_fairness_gap =
        std::max(out.test_fairness_gap, std::abs(*a.observed_rate - *b.observed_rate));
  }
  if (out.shared_bins == 0) {
    throw InputError("no overlapping non-sparse calibration bins for groups '" +
                     std::string(group_a) + "' and '" + std::string(group_b) + "'");
  }
  return out;
}

std::string_view row_status_name(RowStatus status) {
  switch (status) {
    case RowStatus::kEvaluated: return "evaluated";
    case RowStatus::kNotEvaluated: return "not_evaluated";
    case RowStatus::kError: return "error";
  }
  return "error";
}

bool FairnessReport::has_errors() const {
  return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.error.has_value(); });
}

FairnessReport evaluate_all(const AuditDataset& dataset, std::string_view group_a,
                            std::string_view group_b, const EvaluationOptions& options) {
  check_pair(dataset, group_a, group_b);
  if (options.bootstrap) options.bootstrap->validate();

  FairnessReport report;
  report.group_a = std::string(group_a);
  report.group_b = std::string(group_b);
  report.n_a = dataset.members(group_a).size();
  report.n_b = dataset.members(group_b).size();

  const bool needs_decisions =
      std::any_of(options.criteria.begin(), options.criteria.end(), [](FairnessCriterion c) {
        const auto components = criterion_components(c);
        return std::any_of(components.begin(), components.end(),
                           [](MetricId m) { return is_decision_metric(m); });
      });
  if (needs_decisions && !dataset.has_decisions()) {
    throw InputError("dataset has no decisions; supply a decision column or a threshold");
  }

  const GroupTally tally_a = tally_group(dataset, group_a);
  const GroupTally tally_b = tally_group(dataset, group_b);
  PairEvaluation main{dataset, report.group_a, report.group_b, options, std::nullopt};

  auto make_row = [](FairnessCriterion criterion, Comparison comparison) {
    ReportRow row;
    row.criterion = criterion;
    row.category = criterion_category(criterion);
    row.comparison = std::move(comparison);
    return row;
  };

  bool calibration_requested = false;
  for (const FairnessCriterion criterion : options.criteria) {
    if (is_calibration_criterion(criterion)) {
      calibration_requested = true;
      continue;
    }
    if (criterion == FairnessCriterion::kConditionalStatisticalParity) {
      for (const auto& condition : options.conditions) {
        ReportRow row;
        row.criterion = criterion;
        row.category = criterion_category(criterion);
        row.condition = condition;
        try {
          const AuditDataset filtered = filter_condition(dataset, condition.predicate);
          row.comparison = compare_conditional(dataset, condition.predicate, group_a, group_b);
          PairEvaluation sub{filtered, report.group_a, report.group_b, options, std::nullopt};
          sub.attach_intervals(row);
        } catch (const InputError& e) {
          row.status = RowStatus::kError;
          row.comparison = compare_values(criterion, MetricId::kPositiveRate, report.group_a,
                                          report.group_b, std::nullopt, std::nullopt);
          row.comparison.notes = {e.what()};
        }
        report.rows.push_back(std::move(row));
      }
      continue;
    }
    if (criterion_uses_scores(criterion) && !dataset.has_scores()) {
      for (const MetricId metric : criterion_components(criterion)) {
        ReportRow row = make_row(criterion, compare_values(criterion, metric, report.group_a,
                                                           report.group_b, std::nullopt,
                                                           std::nullopt));
        row.status = RowStatus::kNotEvaluated;
        row.comparison.notes = {"scores not loaded"};
        report.rows.push_back(std::move(row));
      }
      continue;
    }
    for (auto& comparison : compare_tallies(criterion, tally_a, tally_b, group_a, group_b)) {
      if (comparison.metric == MetricId::kMeanScorePositive ||
          comparison.metric == MetricId::kMeanScoreNegative) {
        const std::size_t na = class_count(tally_a, comparison.metric);
        const std::size_t nb = class_count(tally_b, comparison.metric);
        if (na < options.low_n || nb < options.low_n) {
          comparison.notes.push_back("low n: " + std::to_string(na) + " vs " + std::to_string(nb) +
                                     " records in the conditioning class");
        }
      }
      ReportRow row = make_row(criterion, std::move(comparison));
      main.attach_intervals(row);
      report.rows.push_back(std::move(row));
    }
  }

  if (calibration_requested) {
    CalibrationSection section;
    if (!dataset.has_scores()) {
      section.status = RowStatus::kNotEvaluated;
      section.notes.push_back("scores not loaded");
    } else {
      try {
        section.comparison =
            compare_calibration(dataset, group_a, group_b, options.bins, options.min_bin_count);
      } catch (const InputError& e) {
        section.status = RowStatus::kError;
        section.notes.push_back(e.what());
      }
    }
    report.calibration = std::move(section);
  }
  return report;
}

}  // namespace fairaudit

#include "fairaudit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fairaudit/error.hpp"

namespace fairaudit {
namespace {

MetricValue ratio_of(double numerator, std::size_t denominator) {
  if (denominator == 0) return std::nullopt;
  return numerator / static_cast<double>(denominator);
}

MetricValue ratio_of(std::size_t numerator, std::size_t denominator) {
  return ratio_of(static_cast<double>(numerator), denominator);
}

}  // namespace

std::string_view metric_name(MetricId id) {
  switch (id) {
    case MetricId::kTpr: return "TPR";
    case MetricId::kTnr: return "TNR";
    case MetricId::kFpr: return "FPR";
    case MetricId::kFnr: return "FNR";
    case MetricId::kPpv: return "PPV";
    case MetricId::kNpv: return "NPV";
    case MetricId::kAccuracy: return "ACC";
    case MetricId::kBrierScore: return "BS";
    case MetricId::kMeanAbsoluteError: return "MAE";
    case MetricId::kPositiveRate: return "POSITIVE_RATE";
    case MetricId::kMeanScorePositive: return "MEAN_SCORE_POS";
    case MetricId::kMeanScoreNegative: return "MEAN_SCORE_NEG";
    case MetricId::kFnFpRatio: return "FN_FP_RATIO";
    case MetricId::kPrevalence: return "PREVALENCE";
  }
  return "?";
}

MetricId parse_metric(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (const MetricId id : kAllMetrics) {
    if (metric_name(id) == upper) return id;
  }
  throw InputError("unknown metric '" + std::string(name) + "'");
}

bool is_score_metric(MetricId id) {
  return id == MetricId::kBrierScore || id == MetricId::kMeanAbsoluteError ||
         id == MetricId::kMeanScorePositive || id == MetricId::kMeanScoreNegative;
}

bool is_decision_metric(MetricId id) {
  return !is_score_metric(id) && id != MetricId::kPrevalence;
}

bool is_bounded_metric(MetricId id) { return id != MetricId::kFnFpRatio; }

MetricValue metric_difference(MetricValue a, MetricValue b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

MetricValue metric_ratio(MetricValue a, MetricValue b) {
  if (!a || !b || *b == 0.0) return std::nullopt;
  if (*a == 0.0) return 0.0;
  if (std::abs(*a) >= std::abs(*b)) return *a / *b;
  return 1.0 / (*b / *a);
}

ConfusionCounts confusion_counts(std::span<const Record> records) {
  ConfusionCounts counts;
  for (const auto& r : records) {
    if (!r.decision) throw InputError("record without decision; apply a threshold first");
    const bool predicted = *r.decision == 1;
    if (r.outcome == 1) {
      predicted ? ++counts.tp : ++counts.fn;
    } else {
      predicted ? ++counts.fp : ++counts.tn;
    }
  }
  return counts;
}

void GroupTally::add(const Record& r) {
  ++n;
  if (r.outcome == 1) ++positives;
  if (r.decision) {
    const bool predicted = *r.decision == 1;
    if (r.outcome == 1) {
      predicted ? ++counts.tp : ++counts.fn;
    } else {
      predicted ? ++counts.fp : ++counts.tn;
    }
  } else {
    ++undecided;
  }
  if (r.score) {
    const double s = *r.score;
    const double error = s - static_cast<double>(r.outcome);
    ++scored;
    squared_error_sum += error * error;
    absolute_error_sum += std::abs(error);
    if (r.outcome == 1) {
      ++scored_positives;
      score_sum_positive += s;
    } else {
      ++scored_negatives;
      score_sum_negative += s;
    }
  }
}

GroupTally tally(std::span<const Record> records) {
  GroupTally t;
  for (const auto& r : records) t.add(r);
  return t;
}

MetricValue metric_value(const GroupTally& t, MetricId id) {
  if (is_decision_metric(id) && t.undecided > 0) {
    throw InputError("metric " + std::string(metric_name(id)) +
                     " needs decisions; apply a threshold first");
  }
  const ConfusionCounts& c = t.counts;
  switch (id) {
    case MetricId::kTpr: return ratio_of(c.tp, c.tp + c.fn);
    case MetricId::kTnr: return ratio_of(c.tn, c.tn + c.fp);
    case MetricId::kFpr: return ratio_of(c.fp, c.fp + c.tn);
    case MetricId::kFnr: return ratio_of(c.fn, c.tp + c.fn);
    case MetricId::kPpv: return ratio_of(c.tp, c.tp + c.fp);
    case MetricId::kNpv: return ratio_of(c.tn, c.tn + c.fn);
    case MetricId::kAccuracy: return ratio_of(c.tp + c.tn, t.n);
    case MetricId::kPositiveRate: return ratio_of(c.tp + c.fp, t.n);
    case MetricId::kFnFpRatio: return ratio_of(c.fn, c.fp);
    case MetricId::kPrevalence: return ratio_of(t.positives, t.n);
    case MetricId::kBrierScore: return ratio_of(t.squared_error_sum, t.scored);
    case MetricId::kMeanAbsoluteError: return ratio_of(t.absolute_error_sum, t.scored);
    case MetricId::kMeanScorePositive: return ratio_of(t.score_sum_positive, t.scored_positives);
    case MetricId::kMeanScoreNegative: return ratio_of(t.score_sum_negative, t.scored_negatives);
  }
  throw InputError("unknown metric id");
}

MetricValue group_metric(const AuditDataset& dataset, std::string_view group, MetricId id) {
  GroupTally t;
  const auto& records = dataset.records();
  for (const std::size_t i : dataset.members(group)) t.add(records[i]);
  return metric_value(t, id);
}

GroupMetrics group_metrics(const AuditDataset& dataset, std::string_view group) {
  GroupTally t;
  const auto& records = dataset.records();
  for (const std::size_t i : dataset.members(group)) t.add(records[i]);
  GroupMetrics out;
  out.group = std::string(group);
  out.n = t.n;
  for (const MetricId id : kAllMetrics) {
    if (is_decision_metric(id) && t.undecided > 0) continue;
    out.values[static_cast<std::size_t>(id)] = metric_value(t, id);
  }
  return out;
}

double brier_score(std::span<const Record> records) {
  if (records.empty()) throw InputError("Brier score of an empty record list");
  double sum = 0.0;
  for (const auto& r : records) {
    if (!r.score) throw InputError("Brier score needs scores");
    const double e = *r.score - r.outcome;
    sum += e * e;
  }
  return sum / static_cast<double>(records.size());
}

double mean_absolute_error(std::span<const Record> records) {
  if (records.empty()) throw InputError("mean absolute error of an empty record list");
  double sum = 0.0;
  for (const auto& r : records) {
    if (!r.score) throw InputError("mean absolute error needs scores");
    sum += std::abs(*r.score - r.outcome);
  }
  return sum / static_cast<double>(records.size());
}

std::size_t CalibrationCurve::total() const {
  std::size_t sum = 0;
  for (const auto& b : bins) sum += b.count;
  return sum;
}

std::size_t calibration_bin_index(double score, std::size_t bins) {
  // Smallest i with score <= (i+1)/bins; edges are computed the same way
  // as in calibration_curve so bin membership and bounds agree exactly.
  for (std::size_t i = 0; i + 1 < bins; ++i) {
    if (score <= static_cast<double>(i + 1) / static_cast<double>(bins)) return i;
  }
  return bins - 1;
}

CalibrationCurve calibration_curve(std::span<const Record> records, std::size_t bins,
                                   std::size_t min_bin_count) {
  if (bins < 2) throw InputError("calibration needs at least 2 bins");
  std::vector<std::size_t> counts(bins, 0);
  std::vector<double> score_sums(bins, 0.0);
  std::vector<std::size_t> positives(bins, 0);
  for (const auto& r : records) {
    if (!r.score) throw InputError("calibration curve needs scores on every record");
    const std::size_t b = calibration_bin_index(*r.score, bins);
    ++counts[b];
    score_sums[b] += *r.score;
    positives[b] += static_cast<std::size_t>(r.outcome);
  }
  CalibrationCurve curve;
  curve.min_bin_count = min_bin_count;
  curve.bins.reserve(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    CalibrationBin bin;
    bin.lower = static_cast<double>(i) / static_cast<double>(bins);
    bin.upper = static_cast<double>(i + 1) / static_cast<double>(bins);
    bin.count = counts[i];
    bin.mean_score = ratio_of(score_sums[i], counts[i]);
    bin.observed_rate = ratio_of(positives[i], counts[i]);
    bin.sparse = counts[i] < min_bin_count;
    curve.bins.push_back(bin);
  }
  return curve;
}

CalibrationCurve calibration_curve(const AuditDataset& dataset, std::string_view group,
                                   std::size_t bins, std::size_t min_bin_count) {
  const auto records = dataset.group_records(group);
  if (records.empty()) throw InputError("calibration curve of an empty group");
  auto curve = calibration_curve(records, bins, min_bin_count);
  curve.group = std::string(group);
  return curve;
}

}  // namespace fairaudit

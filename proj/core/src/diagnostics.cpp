#include "fairaudit/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "fairaudit/error.hpp"

namespace fairaudit {

std::vector<std::pair<std::string, double>> prevalence_by_group(const AuditDataset& dataset) {
  std::vector<std::pair<std::string, double>> out;
  const auto& records = dataset.records();
  for (const auto& group : dataset.groups()) {
    const auto members = dataset.members(group);
    if (members.empty()) throw InputError("empty group '" + group + "'");
    std::size_t positives = 0;
    for (const std::size_t i : members) positives += static_cast<std::size_t>(records[i].outcome);
    out.emplace_back(group, static_cast<double>(positives) / static_cast<double>(members.size()));
  }
  return out;
}

IndependenceTest chi_square_independence(std::span<const std::array<std::size_t, 2>> table,
                                         double level) {
  if (table.size() < 2) throw InputError("independence test needs at least 2 groups");
  IndependenceTest test;
  test.table.assign(table.begin(), table.end());
  test.level = level;

  std::array<double, 2> col{0.0, 0.0};
  std::vector<double> row(table.size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      row[i] += static_cast<double>(table[i][j]);
      col[j] += static_cast<double>(table[i][j]);
    }
    if (row[i] == 0.0) throw ComputationError("degenerate contingency table: empty group row");
  }
  if (col[0] == 0.0 || col[1] == 0.0) {
    throw ComputationError("degenerate contingency table: outcome is constant");
  }
  const double total = col[0] + col[1];

  bool small_expected = false;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double expected = row[i] * col[j] / total;
      const double delta = static_cast<double>(table[i][j]) - expected;
      test.statistic += delta * delta / expected;
      small_expected = small_expected || expected < 5.0;
    }
  }
  if (small_expected) {
    test.warnings.push_back("expected cell count below 5; chi-square approximation may be poor");
  }
  test.degrees_of_freedom = table.size() - 1;
  const boost::math::chi_squared dist(static_cast<double>(test.degrees_of_freedom));
  test.p_value = boost::math::cdf(boost::math::complement(dist, test.statistic));
  test.reject = test.p_value < level;
  return test;
}

IndependenceTest independence_test(const AuditDataset& dataset, double level) {
  std::vector<std::array<std::size_t, 2>> table;
  const auto& records = dataset.records();
  for (const auto& group : dataset.groups()) {
    std::array<std::size_t, 2> cells{0, 0};
    for (const std::size_t i : dataset.members(group)) {
      ++cells[records[i].outcome == 1 ? 0 : 1];
    }
    table.push_back(cells);
  }
  return chi_square_independence(table, level);
}

std::string_view category_pair_name(CategoryPair pair) {
  switch (pair) {
    case CategoryPair::kIndependenceSufficiency: return "independence_x_sufficiency";
    case CategoryPair::kIndependenceSeparation: return "independence_x_separation";
    case CategoryPair::kSeparationSufficiency: return "separation_x_sufficiency";
  }
  return "?";
}

IncompatibilityVerdict incompatibility_verdict(const AuditDataset& dataset, double level) {
  if (!dataset.has_decisions()) {
    throw InputError("incompatibility diagnostics need decisions; apply a threshold first");
  }
  IncompatibilityVerdict verdict;
  verdict.prevalence = prevalence_by_group(dataset);
  verdict.test = independence_test(dataset, level);

  const auto counts = confusion_counts(dataset.records());
  const auto n = static_cast<double>(counts.total());
  verdict.accuracy = static_cast<double>(counts.tp + counts.tn) / n;
  const std::size_t positives = counts.tp + counts.fn;
  verdict.majority_share =
      static_cast<double>(std::max(positives, counts.total() - positives)) / n;
  verdict.informative = verdict.accuracy != verdict.majority_share;
  verdict.imperfect = counts.fp + counts.fn > 0;

  if (verdict.test.reject) {
    verdict.flagged.push_back(CategoryPair::kIndependenceSufficiency);
    if (verdict.informative) verdict.flagged.push_back(CategoryPair::kIndependenceSeparation);
    if (verdict.imperfect) verdict.flagged.push_back(CategoryPair::kSeparationSufficiency);
  }
  return verdict;
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kUndefined: return "UNDEFINED";
  }
  return "UNDEFINED";
}

EpsilonAssessment epsilon_assessment(const FairnessReport& report, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("epsilon must be a positive finite number");
  }
  EpsilonAssessment out;
  out.epsilon = epsilon;
  for (const auto& row : report.rows) {
    const std::optional<std::string> condition =
        row.condition ? std::optional<std::string>(row.condition->name) : std::nullopt;
    auto it = std::find_if(out.criteria.begin(), out.criteria.end(),
                           [&](const CriterionAssessment& a) {
                             return a.criterion == row.criterion && a.condition == condition;
                           });
    if (it == out.criteria.end()) {
      CriterionAssessment fresh;
      fresh.criterion = row.criterion;
      fresh.condition = condition;
      fresh.verdict = Verdict::kPass;
      out.criteria.push_back(fresh);
      it = std::prev(out.criteria.end());
    }
    const MetricValue& diff = row.comparison.diff;
    if (!diff) {
      it->verdict = Verdict::kUndefined;
      continue;
    }
    const double magnitude = std::abs(*diff);
    it->worst_abs_diff = it->worst_abs_diff ? std::max(*it->worst_abs_diff, magnitude) : magnitude;
    if (it->verdict == Verdict::kPass && !(magnitude < epsilon)) it->verdict = Verdict::kFail;
  }
  return out;
}

}  // namespace fairaudit

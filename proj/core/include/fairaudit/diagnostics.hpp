#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/fairness.hpp"

namespace fairaudit {

/// Per-group base rate mean(y), in group registry order.
std::vector<std::pair<std::string, double>> prevalence_by_group(const AuditDataset& dataset);

/// Pearson chi-square test of independence on a K x 2 table.
struct IndependenceTest {
  /// Rows are groups; columns are {#y=1, #y=0}.
  std::vector<std::array<std::size_t, 2>> table;
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  double level = 0.05;
  bool reject = false;
  std::vector<std::string> warnings;
};

/// Throws InputError for fewer than 2 rows and ComputationError for a
/// degenerate table (an empty row or column).
IndependenceTest chi_square_independence(std::span<const std::array<std::size_t, 2>> table,
                                         double level = 0.05);

/// Outcome x group test over the dataset's groups.
IndependenceTest independence_test(const AuditDataset& dataset, double level = 0.05);

enum class CategoryPair { kIndependenceSufficiency, kIndependenceSeparation, kSeparationSufficiency };

std::string_view category_pair_name(CategoryPair pair);

struct IncompatibilityVerdict {
  std::vector<std::pair<std::string, double>> prevalence;
  IndependenceTest test;
  /// Empirical D not independent of Y: accuracy differs from the larger
  /// class share.
  bool informative = false;
  /// At least one misclassification.
  bool imperfect = false;
  double accuracy = 0.0;
  double majority_share = 0.0;
  std::vector<CategoryPair> flagged;
};

/// Needs decisions on every record.
IncompatibilityVerdict incompatibility_verdict(const AuditDataset& dataset, double level = 0.05);

enum class Verdict { kPass, kFail, kUndefined };

std::string_view verdict_name(Verdict verdict);

struct CriterionAssessment {
  FairnessCriterion criterion = FairnessCriterion::kStatisticalParity;
  std::optional<std::string> condition;
  Verdict verdict = Verdict::kUndefined;
  /// Largest |diff| over the defined components.
  std::optional<double> worst_abs_diff;
};

struct EpsilonAssessment {
  double epsilon = 0.0;
  std::vector<CriterionAssessment> criteria;
};

/// A criterion passes iff every component satisfies |diff| < epsilon; an
/// UNDEFINED component makes it UNDEFINED. Criteria appear in report order;
/// conditional rows are assessed per condition. Throws InputError unless
/// epsilon > 0.
EpsilonAssessment epsilon_assessment(const FairnessReport& report, double epsilon);

}  // namespace fairaudit

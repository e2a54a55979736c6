#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

enum class Comparator { kGreater, kGreaterEqual, kLess, kLessEqual, kEqual, kNotEqual };

std::string_view comparator_symbol(Comparator op);

/// A conjunction of covariate comparisons, e.g. `age>=60 AND sex=="F"`.
///
/// Grammar:
///   predicate  := comparison ( AND comparison )*
///   comparison := identifier op literal
///   op         := > | >= | < | <= | == | !=
///   literal    := number | "text" | 'text'
/// `AND` is case-insensitive; `&&` is accepted as a synonym.
class ConditionPredicate {
 public:
  struct Clause {
    std::string covariate;
    Comparator op = Comparator::kEqual;
    std::variant<double, std::string> literal;
  };

  /// Throws InputError on a syntax error.
  static ConditionPredicate parse(std::string_view text);

  const std::string& text() const { return text_; }
  const std::vector<Clause>& clauses() const { return clauses_; }

  /// Throws InputError when a clause names an unknown covariate, compares a
  /// number against a categorical column (or text against a numeric one), or
  /// orders categorical values.
  void validate(std::span<const CovariateColumn> columns) const;

  /// Evaluates against a record whose covariates follow `columns`. A
  /// referenced covariate that is missing makes the predicate false.
  bool evaluate(const Record& record, std::span<const CovariateColumn> columns) const;

 private:
  std::string text_;
  std::vector<Clause> clauses_;
};

}  // namespace fairaudit

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fairaudit {

class ConditionPredicate;

/// A covariate cell: missing, numeric, or categorical text.
using CovariateValue = std::variant<std::monostate, double, std::string>;

enum class CovariateKind { kNumeric, kCategorical };

struct CovariateColumn {
  std::string name;
  CovariateKind kind = CovariateKind::kNumeric;

  friend bool operator==(const CovariateColumn&, const CovariateColumn&) = default;
};

/// One audited prediction. `covariates` is aligned with the owning
/// dataset's covariate columns.
struct Record {
  int outcome = 0;
  std::optional<double> score;
  std::optional<int> decision;
  std::string group;
  std::vector<CovariateValue> covariates;

  friend bool operator==(const Record&, const Record&) = default;
};

struct ImputationEntry {
  enum class Action { kImputed, kDropped };

  std::string covariate;
  Action action = Action::kImputed;
  double missing_fraction = 0.0;
  std::size_t missing_count = 0;
  std::optional<double> median;  // set for kImputed

  friend bool operator==(const ImputationEntry&, const ImputationEntry&) = default;
};

/// Column bindings for CSV ingestion.
struct Schema {
  std::string outcome;
  std::optional<std::string> score;
  std::optional<std::string> decision;
  std::string group;
  std::vector<std::string> covariates;
};

/// Load-time and preprocessing history carried along with the records.
struct Provenance {
  std::optional<double> threshold;
  std::size_t n_dropped = 0;
  std::vector<ImputationEntry> imputation_log;
};

/// Immutable table of audit records plus the group registry.
///
/// Groups are kept in order of first appearance. Copies share the record
/// storage, so passing datasets by value is cheap.
class AuditDataset {
 public:
  /// Validates the invariants (>= 2 groups, outcome/score/decision ranges,
  /// covariate arity) and throws InputError on violation.
  AuditDataset(std::vector<Record> records, std::vector<CovariateColumn> covariates,
               Provenance provenance = {});

  const std::vector<Record>& records() const { return *records_; }
  std::size_t size() const { return records_->size(); }

  const std::vector<std::string>& groups() const { return groups_; }
  bool has_group(std::string_view group) const;
  /// Record indices belonging to `group`, in record order. Throws
  /// InputError for an unknown group.
  std::span<const std::size_t> members(std::string_view group) const;
  std::vector<Record> group_records(std::string_view group) const;

  const std::vector<CovariateColumn>& covariates() const { return covariates_; }
  std::optional<std::size_t> covariate_index(std::string_view name) const;

  const std::optional<double>& threshold() const { return provenance_.threshold; }
  std::size_t n_dropped() const { return provenance_.n_dropped; }
  const std::vector<ImputationEntry>& imputation_log() const {
    return provenance_.imputation_log;
  }
  const Provenance& provenance() const { return provenance_; }

  /// True when at least one record carries a score.
  bool has_scores() const { return has_scores_; }
  /// True when every record carries a decision.
  bool has_decisions() const { return has_decisions_; }

 private:
  friend AuditDataset filter_condition(const AuditDataset&, const ConditionPredicate&);
  // Reorders groups to follow `order`, which must list every present group.
  void adopt_group_order(const std::vector<std::string>& order);

  std::shared_ptr<const std::vector<Record>> records_;
  std::vector<CovariateColumn> covariates_;
  Provenance provenance_;
  std::vector<std::string> groups_;
  std::vector<std::vector<std::size_t>> members_;
  bool has_scores_ = false;
  bool has_decisions_ = false;
};

/// Reads only the header row of a CSV file.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

/// Checks that every bound column exists in `header` and that the binding
/// is complete. Throws InputError otherwise.
void validate_schema(const Schema& schema, std::span<const std::string> header);

/// Loads a CSV export. Rows with a missing outcome, group, or both score and
/// decision are dropped and counted; malformed values are errors.
AuditDataset load_csv(const std::filesystem::path& path, const Schema& schema);

/// Replaces missing numeric covariate cells by the column median. Columns
/// whose missing fraction exceeds `max_missing_fraction` are dropped.
AuditDataset impute_medians(const AuditDataset& dataset,
                            std::span<const std::string> covariates,
                            double max_missing_fraction = 0.10);

/// Sets every decision to 1 iff score > threshold.
AuditDataset apply_threshold(const AuditDataset& dataset, double threshold);

/// Keeps the records that satisfy `predicate`. Every group present in the
/// input must retain at least one record.
AuditDataset filter_condition(const AuditDataset& dataset,
                              const ConditionPredicate& predicate);

}  // namespace fairaudit

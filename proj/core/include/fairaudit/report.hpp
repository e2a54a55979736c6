#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/diagnostics.hpp"
#include "fairaudit/fairness.hpp"
#include "fairaudit/inference.hpp"
#include "fairaudit/multigroup.hpp"

namespace fairaudit {

std::string_view version();

enum class OutputFormat { kJson, kMarkdown };

/// Everything the audit pipeline needs, as parsed from the command line.
struct AuditRequest {
  std::filesystem::path input;
  Schema columns;
  std::optional<double> threshold;
  /// Group placed first in every comparison; defaults to the first group
  /// in file order.
  std::optional<std::string> reference;
  std::vector<FairnessCriterion> criteria = table_criteria();
  /// (name, expression) pairs; each yields a conditional parity row.
  std::vector<std::pair<std::string, std::string>> conditions;
  std::optional<BootstrapConfig> bootstrap;
  std::size_t bins = 10;
  std::size_t min_bin_count = 10;
  std::vector<double> epsilons;
  /// Covariates to median-impute; defaults to every numeric covariate.
  std::optional<std::vector<std::string>> impute;
  double max_missing_fraction = 0.10;
  /// Emit meta-metrics even for two groups.
  bool meta = false;
  double entropy_alpha = kDefaultEntropyAlpha;
  OutputFormat format = OutputFormat::kJson;
  std::optional<std::filesystem::path> output;

  /// Checks flag-level constraints without reading the input. Throws
  /// InputError.
  void validate() const;
};

struct GroupSummary {
  std::string label;
  std::size_t n = 0;
  double prevalence = 0.0;
};

struct DatasetSummary {
  std::size_t n_records = 0;
  std::size_t n_dropped = 0;
  std::optional<double> threshold;
  std::vector<GroupSummary> groups;
  std::vector<ImputationEntry> imputation_log;
};

struct MetaMetricRow {
  MetricId metric = MetricId::kPositiveRate;
  MetaMetricKind kind = MetaMetricKind::kMaxMinDifference;
  std::optional<MetaMetricResult> result;
  std::optional<std::string> note;
};

struct PairAssessment {
  std::string group_a;
  std::string group_b;
  EpsilonAssessment assessment;
};

struct AuditReportDocument {
  std::string tool_version;
  AuditRequest request;
  DatasetSummary dataset;
  std::vector<FairnessReport> comparisons;
  std::vector<MetaMetricRow> meta_metrics;
  std::variant<std::monostate, IncompatibilityVerdict, std::string> diagnostics;
  std::vector<PairAssessment> epsilon_assessments;

  /// True when a computation failed (exit code 2).
  bool has_computation_errors() const;
};

/// load_csv -> impute_medians -> apply_threshold -> evaluate_all (with
/// conditional rows and bootstrap intervals) -> meta-metrics -> diagnostics
/// -> epsilon assessments. Comparisons pair the reference group with every
/// other group. Throws InputError on input or validation failures.
AuditReportDocument run_audit(const AuditRequest& request);

/// Loads and preprocesses the dataset exactly as run_audit does.
AuditDataset prepare_dataset(const AuditRequest& request);

/// Stable-key-order JSON; numbers at full precision; UNDEFINED values are
/// the string "UNDEFINED".
std::string to_json(const AuditReportDocument& document);

/// GitHub-flavored Markdown. Percent metrics at 0 decimals, ratios and
/// count ratios at 2 decimals with trailing zeros trimmed, UNDEFINED as "—".
std::string to_markdown(const AuditReportDocument& document);

/// The cells of one Markdown fairness row after the metric name, joined
/// by " | ": values, difference, difference CI, ratio, ratio CI.
std::string markdown_row_cells(const ReportRow& row);

/// Percent rendering used in Markdown, e.g. 0.09 -> "9%".
std::string format_percent(double value);
/// Two-decimal rendering with trailing zeros trimmed, e.g. 1.50 -> "1.5".
std::string format_decimal(double value);

/// Writes `content` to a temporary file next to `path` and renames it.
void write_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace fairaudit

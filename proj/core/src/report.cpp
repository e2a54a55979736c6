#include "fairaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fairaudit/error.hpp"
#include "fairaudit/predicate.hpp"

#ifndef FAIRAUDIT_VERSION
#define FAIRAUDIT_VERSION "0.0.0"
#endif

namespace fairaudit {
namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kUndefined = "UNDEFINED";
constexpr std::string_view kDash = "\xE2\x80\x94";  // em dash

json number_or_undefined(const MetricValue& value) {
  if (!value || !std::isfinite(*value)) return std::string(kUndefined);
  return *value;
}

json optional_number(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

json interval_json(const std::optional<Interval>& interval) {
  if (!interval) return nullptr;
  return json{{"lower", interval->lower},
              {"upper", interval->upper},
              {"method", interval_method_name(interval->method)},
              {"standard_error", interval->standard_error},
              {"iterations", interval->iterations},
              {"discarded", interval->discarded}};
}

json condition_json(const std::optional<Condition>& condition) {
  if (!condition) return nullptr;
  return json{{"name", condition->name}, {"expression", condition->predicate.text()}};
}

json request_json(const AuditRequest& r) {
  json columns{{"outcome", r.columns.outcome},
               {"score", r.columns.score ? json(*r.columns.score) : json(nullptr)},
               {"decision", r.columns.decision ? json(*r.columns.decision) : json(nullptr)},
               {"group", r.columns.group},
               {"covariates", r.columns.covariates}};
  json criteria = json::array();
  for (const auto c : r.criteria) criteria.push_back(criterion_name(c));
  json conditions = json::array();
  for (const auto& [name, expr] : r.conditions) {
    conditions.push_back({{"name", name}, {"expression", expr}});
  }
  json bootstrap = nullptr;
  if (r.bootstrap) {
    bootstrap = {{"iterations", r.bootstrap->iterations},
                 {"alpha", r.bootstrap->alpha},
                 {"seed", r.bootstrap->seed},
                 {"degenerate_tolerance", r.bootstrap->degenerate_tolerance}};
  }
  return json{{"input", r.input.generic_string()},
              {"columns", columns},
              {"threshold", optional_number(r.threshold)},
              {"reference", r.reference ? json(*r.reference) : json(nullptr)},
              {"criteria", criteria},
              {"conditions", conditions},
              {"bootstrap", bootstrap},
              {"bins", r.bins},
              {"min_bin_count", r.min_bin_count},
              {"epsilons", r.epsilons},
              {"impute", r.impute ? json(*r.impute) : json(nullptr)},
              {"max_missing_fraction", r.max_missing_fraction},
              {"meta", r.meta},
              {"entropy_alpha", r.entropy_alpha},
              {"format", r.format == OutputFormat::kJson ? "json" : "markdown"}};
}

json dataset_json(const DatasetSummary& d) {
  json groups = json::array();
  for (const auto& g : d.groups) {
    groups.push_back({{"label", g.label}, {"n", g.n}, {"prevalence", g.prevalence}});
  }
  json imputation = json::array();
  for (const auto& e : d.imputation_log) {
    imputation.push_back(
        {{"covariate", e.covariate},
         {"action", e.action == ImputationEntry::Action::kImputed ? "imputed" : "dropped"},
         {"missing_count", e.missing_count},
         {"missing_fraction", e.missing_fraction},
         {"median", optional_number(e.median)}});
  }
  return json{{"n_records", d.n_records},
              {"n_dropped", d.n_dropped},
              {"threshold", optional_number(d.threshold)},
              {"groups", groups},
              {"imputation", imputation}};
}

json row_json(const ReportRow& row) {
  const Comparison& c = row.comparison;
  return json{{"criterion", criterion_name(row.criterion)},
              {"title", criterion_title(row.criterion)},
              {"category", category_name(row.category)},
              {"condition", condition_json(row.condition)},
              {"metric", metric_name(c.metric)},
              {"status", row_status_name(row.status)},
              {"value_a", number_or_undefined(c.value_a)},
              {"value_b", number_or_undefined(c.value_b)},
              {"difference", number_or_undefined(c.diff)},
              {"ratio", number_or_undefined(c.ratio)},
              {"ci_difference", interval_json(c.ci_diff)},
              {"ci_ratio", interval_json(c.ci_ratio)},
              {"notes", c.notes},
              {"error", row.error ? json(*row.error) : json(nullptr)}};
}

json curve_json(const CalibrationCurve& curve) {
  json bins = json::array();
  for (const auto& b : curve.bins) {
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"count", b.count},
                    {"mean_score", number_or_undefined(b.mean_score)},
                    {"observed_rate", number_or_undefined(b.observed_rate)},
                    {"sparse", b.sparse}});
  }
  return json{{"group", curve.group}, {"min_bin_count", curve.min_bin_count}, {"bins", bins}};
}

json calibration_json(const std::optional<CalibrationSection>& section) {
  if (!section) return nullptr;
  json out{{"status", row_status_name(section->status)}, {"notes", section->notes}};
  if (const auto& c = section->comparison) {
    out["well_calibration_gap_a"] = number_or_undefined(c->well_calibration_gap_a);
    out["well_calibration_gap_b"] = number_or_undefined(c->well_calibration_gap_b);
    out["test_fairness_gap"] = c->test_fairness_gap;
    out["shared_bins"] = c->shared_bins;
    out["curves"] = json::array({curve_json(c->curve_a), curve_json(c->curve_b)});
  }
  return out;
}

json verdict_json(const IncompatibilityVerdict& v) {
  json prevalence = json::array();
  for (const auto& [group, mu] : v.prevalence) {
    prevalence.push_back({{"group", group}, {"prevalence", mu}});
  }
  json table = json::array();
  for (std::size_t i = 0; i < v.test.table.size(); ++i) {
    table.push_back({{"group", i < v.prevalence.size() ? v.prevalence[i].first : ""},
                     {"positives", v.test.table[i][0]},
                     {"negatives", v.test.table[i][1]}});
  }
  json flagged = json::array();
  for (const auto pair : v.flagged) flagged.push_back(category_pair_name(pair));
  return json{{"prevalence", prevalence},
              {"test",
               {{"name", "pearson_chi_square"},
                {"statistic", v.test.statistic},
                {"degrees_of_freedom", v.test.degrees_of_freedom},
                {"p_value", v.test.p_value},
                {"level", v.test.level},
                {"reject", v.test.reject},
                {"table", table},
                {"warnings", v.test.warnings}}},
              {"informative", v.informative},
              {"imperfect", v.imperfect},
              {"accuracy", v.accuracy},
              {"majority_share", v.majority_share},
              {"flagged", flagged}};
}

std::string trim_zeros(std::string text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) return text;
  while (text.back() == '0') text.pop_back();
  if (text.back() == '.') text.pop_back();
  return text;
}

std::string drop_negative_zero(std::string text) {
  if (text.size() > 1 && text.front() == '-' &&
      text.find_first_not_of("0.", 1) == std::string::npos) {
    text.erase(0, 1);
  }
  return text;
}

std::string render(const MetricValue& value, bool percent) {
  if (!value) return std::string(kDash);
  return percent ? format_percent(*value) : format_decimal(*value);
}

std::string render_interval(const std::optional<Interval>& interval, bool percent) {
  if (!interval) return std::string(kDash);
  return "[" + render(interval->lower, percent) + ", " + render(interval->upper, percent) + "]";
}

std::string row_label(const ReportRow& row) {
  std::string label(criterion_title(row.criterion));
  if (row.condition) label += " (" + row.condition->predicate.text() + ")";
  if (criterion_components(row.criterion).size() > 1) {
    label += " [" + std::string(metric_name(row.comparison.metric)) + "]";
  }
  return label;
}

std::string escape_cell(std::string text) {
  std::string out;
  for (const char c : text) {
    if (c == '|') out += "\\|";
    else out.push_back(c);
  }
  return out;
}

std::string confidence_label(const AuditRequest& request) {
  const double alpha = request.bootstrap ? request.bootstrap->alpha : 0.05;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%% CI", (1.0 - alpha) * 100.0);
  return buf;
}

std::vector<MetricId> meta_metric_targets(const std::vector<FairnessCriterion>& criteria) {
  std::vector<MetricId> out;
  for (const auto criterion : criteria) {
    for (const MetricId m : criterion_components(criterion)) {
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
  }
  return out;
}

}  // namespace

std::string_view version() { return FAIRAUDIT_VERSION; }

void AuditRequest::validate() const {
  if (input.empty()) throw InputError("--input is required");
  if (columns.outcome.empty()) throw InputError("--outcome is required");
  if (columns.group.empty()) throw InputError("--group is required");
  if (!columns.score && !columns.decision) {
    throw InputError("at least one of --score or --decision is required");
  }
  if (threshold) {
    if (!columns.score) throw InputError("--threshold needs a --score column");
    if (!(*threshold >= 0.0 && *threshold <= 1.0)) throw InputError("threshold outside [0,1]");
  }
  if (!threshold && !columns.decision) {
    throw InputError("scores alone need --threshold to derive decisions");
  }
  if (criteria.empty()) throw InputError("no criteria selected");
  if (bootstrap) bootstrap->validate();
  if (bins < 2) throw InputError("--bins must be at least 2");
  for (const double eps : epsilons) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("--epsilon must be positive");
  }
  if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0)) {
    throw InputError("--max-missing must lie in [0,1]");
  }
  if (entropy_alpha == 0.0 || entropy_alpha == 1.0 || !std::isfinite(entropy_alpha)) {
    throw InputError("--gei-alpha must differ from 0 and 1");
  }
  std::set<std::string> names;
  for (const auto& [name, expr] : conditions) {
    if (name.empty()) throw InputError("condition name must not be empty");
    if (!names.insert(name).second) throw InputError("duplicate condition name '" + name + "'");
    ConditionPredicate::parse(expr);
  }
}

bool AuditReportDocument::has_computation_errors() const {
  return std::any_of(comparisons.begin(), comparisons.end(),
                     [](const FairnessReport& r) { return r.has_errors(); });
}

AuditDataset prepare_dataset(const AuditRequest& request) {
  Schema schema = request.columns;
  for (const auto& [name, expr] : request.conditions) {
    const auto predicate = ConditionPredicate::parse(expr);
    for (const auto& clause : predicate.clauses()) {
      if (std::find(schema.covariates.begin(), schema.covariates.end(), clause.covariate) ==
          schema.covariates.end()) {
        schema.covariates.push_back(clause.covariate);
      }
    }
  }
  validate_schema(schema, read_csv_header(request.input));

  AuditDataset dataset = load_csv(request.input, schema);

  std::vector<std::string> impute;
  if (request.impute) {
    impute = *request.impute;
  } else {
    for (const auto& column : dataset.covariates()) {
      if (column.kind == CovariateKind::kNumeric) impute.push_back(column.name);
    }
  }
  if (!impute.empty()) dataset = impute_medians(dataset, impute, request.max_missing_fraction);

  if (request.threshold) dataset = apply_threshold(dataset, *request.threshold);
  if (!dataset.has_decisions()) {
    throw InputError("records without decisions remain; pass --threshold with a score column");
  }
  return dataset;
}

AuditReportDocument run_audit(const AuditRequest& request) {
  request.validate();
  const AuditDataset dataset = prepare_dataset(request);

  AuditReportDocument doc;
  doc.tool_version = std::string(version());
  doc.request = request;

  doc.dataset.n_records = dataset.size();
  doc.dataset.n_dropped = dataset.n_dropped();
  doc.dataset.threshold = dataset.threshold();
  doc.dataset.imputation_log = dataset.imputation_log();
  for (const auto& [group, mu] : prevalence_by_group(dataset)) {
    doc.dataset.groups.push_back({group, dataset.members(group).size(), mu});
  }

  const std::string reference = request.reference.value_or(dataset.groups().front());
  if (!dataset.has_group(reference)) {
    throw InputError("reference group '" + reference + "' not found in data");
  }

  EvaluationOptions options;
  options.criteria = request.criteria;
  options.bootstrap = request.bootstrap;
  options.bins = request.bins;
  options.min_bin_count = request.min_bin_count;
  for (const auto& [name, expr] : request.conditions) {
    auto predicate = ConditionPredicate::parse(expr);
    predicate.validate(dataset.covariates());
    options.conditions.push_back({name, std::move(predicate)});
  }

  for (const auto& other : dataset.groups()) {
    if (other == reference) continue;
    doc.comparisons.push_back(evaluate_all(dataset, reference, other, options));
  }

  if (dataset.groups().size() > 2 || request.meta) {
    for (const MetricId metric : meta_metric_targets(request.criteria)) {
      for (const MetaMetricKind kind : kAllMetaMetrics) {
        MetaMetricRow row;
        row.metric = metric;
        row.kind = kind;
        try {
          row.result = meta_across_groups(dataset, metric, kind, request.entropy_alpha);
        } catch (const Error& e) {
          row.note = e.what();
        }
        doc.meta_metrics.push_back(std::move(row));
      }
    }
  }

  try {
    doc.diagnostics = incompatibility_verdict(dataset);
  } catch (const Error& e) {
    doc.diagnostics = std::string(e.what());
  }

  for (const auto& report : doc.comparisons) {
    for (const double eps : request.epsilons) {
      doc.epsilon_assessments.push_back(
          {report.group_a, report.group_b, epsilon_assessment(report, eps)});
    }
  }
  return doc;
}

std::string to_json(const AuditReportDocument& doc) {
  json comparisons = json::array();
  for (const auto& report : doc.comparisons) {
    json rows = json::array();
    for (const auto& row : report.rows) rows.push_back(row_json(row));
    comparisons.push_back({{"group_a", report.group_a},
                           {"group_b", report.group_b},
                           {"n_a", report.n_a},
                           {"n_b", report.n_b},
                           {"rows", rows},
                           {"calibration", calibration_json(report.calibration)}});
  }

  json meta = json::array();
  for (const auto& row : doc.meta_metrics) {
    json values = json::array();
    json value = std::string(kUndefined);
    json alpha = nullptr;
    if (row.result) {
      for (std::size_t i = 0; i < row.result->values.size(); ++i) {
        values.push_back({{"group", i < row.result->groups.size() ? row.result->groups[i] : ""},
                          {"value", row.result->values[i]}});
      }
      value = number_or_undefined(row.result->value);
      alpha = optional_number(row.result->alpha);
    }
    meta.push_back({{"metric", metric_name(row.metric)},
                    {"kind", meta_metric_name(row.kind)},
                    {"alpha", alpha},
                    {"values", values},
                    {"value", value},
                    {"note", row.note ? json(*row.note) : json(nullptr)}});
  }

  json diagnostics = nullptr;
  if (const auto* verdict = std::get_if<IncompatibilityVerdict>(&doc.diagnostics)) {
    diagnostics = verdict_json(*verdict);
  } else if (const auto* error = std::get_if<std::string>(&doc.diagnostics)) {
    diagnostics = json{{"error", *error}};
  }

  json assessments = json::array();
  for (const auto& pa : doc.epsilon_assessments) {
    json criteria = json::array();
    for (const auto& c : pa.assessment.criteria) {
      criteria.push_back({{"criterion", criterion_name(c.criterion)},
                          {"condition", c.condition ? json(*c.condition) : json(nullptr)},
                          {"verdict", verdict_name(c.verdict)},
                          {"worst_abs_difference", optional_number(c.worst_abs_diff)}});
    }
    assessments.push_back({{"epsilon", pa.assessment.epsilon},
                           {"group_a", pa.group_a},
                           {"group_b", pa.group_b},
                           {"criteria", criteria}});
  }

  json out{{"tool", {{"name", "fairaudit"}, {"version", doc.tool_version}}},
           {"request", request_json(doc.request)},
           {"dataset", dataset_json(doc.dataset)},
           {"comparisons", comparisons},
           {"meta_metrics", meta},
           {"diagnostics", diagnostics},
           {"epsilon_assessments", assessments}};
  return out.dump(2) + "\n";
}

std::string format_percent(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f", value * 100.0);
  return drop_negative_zero(buf) + "%";
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return drop_negative_zero(trim_zeros(buf));
}

std::string markdown_row_cells(const ReportRow& row) {
  const Comparison& c = row.comparison;
  const bool percent = is_bounded_metric(c.metric);
  std::ostringstream out;
  out << render(c.value_a, percent) << " | " << render(c.value_b, percent) << " | "
      << render(c.diff, percent) << " | " << render_interval(c.ci_diff, percent) << " | "
      << render(c.ratio, false) << " | " << render_interval(c.ci_ratio, false);
  return out.str();
}

std::string to_markdown(const AuditReportDocument& doc) {
  std::ostringstream md;
  md << "# Fairness audit report\n\n";
  md << "fairaudit " << doc.tool_version << ", input `" << doc.request.input.generic_string()
     << "`, " << doc.dataset.n_records << " records (" << doc.dataset.n_dropped << " dropped)";
  if (doc.dataset.threshold) md << ", threshold " << format_decimal(*doc.dataset.threshold);
  md << "\n\n";

  md << "## Groups\n\n| Group | n | Prevalence |\n|---|---|---|\n";
  for (const auto& g : doc.dataset.groups) {
    md << "| " << escape_cell(g.label) << " | " << g.n << " | " << format_percent(g.prevalence)
       << " |\n";
  }
  md << "\n";

  if (!doc.dataset.imputation_log.empty()) {
    md << "## Imputation\n\n| Covariate | Missing | Action |\n|---|---|---|\n";
    for (const auto& e : doc.dataset.imputation_log) {
      md << "| " << escape_cell(e.covariate) << " | " << e.missing_count << " ("
         << format_percent(e.missing_fraction) << ") | ";
      if (e.action == ImputationEntry::Action::kImputed) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", *e.median);
        md << "imputed with median " << buf;
      } else {
        md << "dropped";
      }
      md << " |\n";
    }
    md << "\n";
  }

  const std::string ci = confidence_label(doc.request);
  for (const auto& report : doc.comparisons) {
    md << "## " << escape_cell(report.group_a) << " vs " << escape_cell(report.group_b) << "\n\n";
    md << "| Metric | " << escape_cell(report.group_a) << " | " << escape_cell(report.group_b)
       << " | Difference | " << ci << " | Ratio | " << ci << " |\n";
    md << "|---|---|---|---|---|---|---|\n";
    std::vector<std::string> notes;
    for (const auto& row : report.rows) {
      const std::string label = row_label(row);
      md << "| " << escape_cell(label) << " | " << markdown_row_cells(row) << " |\n";
      for (const auto& note : row.comparison.notes) notes.push_back(label + ": " + note);
    }
    if (!notes.empty()) {
      md << "\n";
      for (const auto& note : notes) md << "- " << note << "\n";
    }
    if (report.calibration) {
      md << "\n### Calibration\n\n";
      const auto& section = *report.calibration;
      if (section.comparison) {
        const auto& c = *section.comparison;
        md << "| Summary | Value |\n|---|---|\n";
        md << "| Well-calibration gap (" << escape_cell(report.group_a) << ") | "
           << render(c.well_calibration_gap_a, true) << " |\n";
        md << "| Well-calibration gap (" << escape_cell(report.group_b) << ") | "
           << render(c.well_calibration_gap_b, true) << " |\n";
        md << "| Test-fairness gap | " << format_percent(c.test_fairness_gap) << " |\n";
        md << "| Shared non-sparse bins | " << c.shared_bins << " |\n";
      }
      for (const auto& note : section.notes) md << "\n- " << note << "\n";
    }
    md << "\n";
  }

  if (!doc.meta_metrics.empty()) {
    md << "## Meta-metrics\n\n| Metric | Meta-metric | Value |\n|---|---|---|\n";
    for (const auto& row : doc.meta_metrics) {
      md << "| " << metric_name(row.metric) << " | " << meta_metric_name(row.kind) << " | ";
      if (row.result) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", row.result->value);
        md << buf;
      } else {
        md << kDash;
      }
      md << " |\n";
    }
    md << "\n";
  }

  md << "## Diagnostics\n\n";
  if (const auto* v = std::get_if<IncompatibilityVerdict>(&doc.diagnostics)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Pearson chi-square = %.3f, df = %zu, p = %.4f", v->test.statistic,
                  v->test.degrees_of_freedom, v->test.p_value);
    md << buf << (v->test.reject ? " (outcome depends on group)" : " (no evidence of dependence)")
       << "\n\n";
    if (v->flagged.empty()) {
      md << "No incompatible criterion categories flagged.\n";
    } else {
      md << "Incompatible category pairs:\n";
      for (const auto pair : v->flagged) md << "- " << category_pair_name(pair) << "\n";
    }
    for (const auto& w : v->test.warnings) md << "\n- warning: " << w << "\n";
  } else if (const auto* error = std::get_if<std::string>(&doc.diagnostics)) {
    md << "Not available: " << *error << "\n";
  }
  md << "\n";

  if (!doc.epsilon_assessments.empty()) {
    md << "## Approximate fairness\n\n| Pair | Epsilon | Criterion | Verdict |\n|---|---|---|---|\n";
    for (const auto& pa : doc.epsilon_assessments) {
      for (const auto& c : pa.assessment.criteria) {
        std::string label(criterion_title(c.criterion));
        if (c.condition) label += " (" + *c.condition + ")";
        char eps[32];
        std::snprintf(eps, sizeof eps, "%g", pa.assessment.epsilon);
        md << "| " << escape_cell(pa.group_a) << " vs " << escape_cell(pa.group_b) << " | " << eps
           << " | " << escape_cell(label) << " | " << verdict_name(c.verdict) << " |\n";
      }
    }
    md << "\n";
  }
  return md.str();
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot write '" + path.string() + "'");
  }
}

}  // namespace fairaudit

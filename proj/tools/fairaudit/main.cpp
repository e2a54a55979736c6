#include <cctype>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairaudit/error.hpp"
#include "fairaudit/report.hpp"

namespace {

using namespace fairaudit;

constexpr int kInputFailure = 1;
constexpr int kComputationFailure = 2;

int fail(int code, const std::string& message) {
  std::cerr << "fairaudit: " << message << "\n";
  return code;
}

std::vector<FairnessCriterion> parse_criteria(const std::vector<std::string>& names) {
  if (names.size() == 1 && names.front() == "table") return table_criteria();
  if (names.size() == 1 && names.front() == "all") {
    return {kAllCriteria.begin(), kAllCriteria.end()};
  }
  std::vector<FairnessCriterion> out;
  for (const auto& name : names) out.push_back(parse_criterion(name));
  return out;
}

bool is_condition_name(const std::string& text) {
  if (text.empty()) return false;
  for (const unsigned char c : text) {
    if (!std::isalnum(c) && c != '_' && c != '-') return false;
  }
  return true;
}

// NAME=EXPR, or a bare expression that doubles as its own name.
std::pair<std::string, std::string> split_condition(const std::string& text) {
  const auto eq = text.find('=');
  if (eq != std::string::npos && is_condition_name(text.substr(0, eq))) {
    return {text.substr(0, eq), text.substr(eq + 1)};
  }
  return {text, text};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group fairness audit for binary risk predictions"};
  app.set_version_flag("--version", std::string(version()));

  std::string input;
  std::string outcome;
  std::string score;
  std::string decision;
  std::string group;
  std::string reference;
  double threshold = 0.0;
  std::vector<std::string> criteria{"table"};
  std::vector<std::string> conditions;
  std::vector<std::string> covariates;
  std::vector<std::string> impute;
  std::size_t iterations = 0;
  BootstrapConfig bootstrap;
  std::size_t bins = 10;
  std::size_t min_bin_count = 10;
  std::vector<double> epsilons;
  double max_missing = 0.10;
  bool meta = false;
  double gei_alpha = kDefaultEntropyAlpha;
  std::string format = "json";
  std::string output;

  app.add_option("--input", input, "CSV file")->required();
  app.add_option("--outcome", outcome, "Binary outcome column")->required();
  auto* score_opt = app.add_option("--score", score, "Risk score column in [0,1]");
  auto* decision_opt = app.add_option("--decision", decision, "Binary decision column");
  app.add_option("--group", group, "Protected attribute column")->required();
  auto* reference_opt = app.add_option("--reference", reference, "Reference group label");
  auto* threshold_opt =
      app.add_option("--threshold", threshold, "Derive decisions as score > threshold");
  app.add_option("--criteria", criteria, "'table', 'all' or a comma-separated list")
      ->delimiter(',');
  app.add_option("--condition", conditions, "Conditional parity stratum, NAME=EXPR");
  app.add_option("--covariates", covariates, "Extra covariate columns to load")->delimiter(',');
  auto* impute_opt =
      app.add_option("--impute", impute, "Covariates to median-impute (default: all numeric)")
          ->delimiter(',');
  app.add_option("--max-missing", max_missing, "Drop a covariate above this missing fraction");
  auto* bootstrap_opt =
      app.add_option("--bootstrap", iterations, "Bootstrap iterations for Wald intervals");
  app.add_option("--alpha", bootstrap.alpha, "Interval level is 1 - alpha");
  app.add_option("--seed", bootstrap.seed, "Bootstrap seed");
  app.add_option("--tolerance", bootstrap.degenerate_tolerance,
                 "Largest tolerated fraction of degenerate resamples");
  app.add_option("--workers", bootstrap.workers, "Bootstrap threads, 0 for all cores");
  app.add_option("--bins", bins, "Calibration bins");
  app.add_option("--min-bin-count", min_bin_count, "Calibration bins below this are sparse");
  app.add_option("--epsilon", epsilons, "Approximate fairness tolerance (repeatable)");
  app.add_flag("--meta", meta, "Emit meta-metrics even for two groups");
  app.add_option("--gei-alpha", gei_alpha, "Generalized entropy exponent");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "markdown"}));
  app.add_option("--output", output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kInputFailure, e.what());
  }

  AuditRequest request;
  try {
    request.input = input;
    request.columns.outcome = outcome;
    if (*score_opt) request.columns.score = score;
    if (*decision_opt) request.columns.decision = decision;
    request.columns.group = group;
    request.columns.covariates = covariates;
    if (*reference_opt) request.reference = reference;
    if (*threshold_opt) request.threshold = threshold;
    request.criteria = parse_criteria(criteria);
    for (const auto& text : conditions) request.conditions.push_back(split_condition(text));
    if (*bootstrap_opt) {
      bootstrap.iterations = iterations;
      request.bootstrap = bootstrap;
    }
    request.bins = bins;
    request.min_bin_count = min_bin_count;
    request.epsilons = epsilons;
    if (*impute_opt) request.impute = impute;
    request.max_missing_fraction = max_missing;
    request.meta = meta;
    request.entropy_alpha = gei_alpha;
    request.format = format == "markdown" ? OutputFormat::kMarkdown : OutputFormat::kJson;
    if (!output.empty()) request.output = output;

    const AuditReportDocument document = run_audit(request);
    const std::string text =
        request.format == OutputFormat::kJson ? to_json(document) : to_markdown(document);
    if (request.output) {
      write_atomically(*request.output, text);
    } else {
      std::cout << text << std::flush;
    }

    if (document.has_computation_errors()) {
      for (const auto& report : document.comparisons) {
        for (const auto& row : report.rows) {
          if (row.error) {
            fail(kComputationFailure, std::string(criterion_name(row.criterion)) + " (" +
                                          report.group_a + " vs " + report.group_b +
                                          "): " + *row.error);
          }
        }
      }
      return kComputationFailure;
    }
  } catch (const InputError& e) {
    return fail(kInputFailure, e.what());
  } catch (const ComputationError& e) {
    return fail(kComputationFailure, e.what());
  } catch (const std::exception& e) {
    return fail(kComputationFailure, e.what());
  }
  return 0;
}

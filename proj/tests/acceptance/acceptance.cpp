// Standalone acceptance runner: one PASS/FAIL line per criterion, non-zero
// exit status if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "fairaudit/diagnostics.hpp"
#include "fairaudit/fairness.hpp"
#include "fairaudit/inference.hpp"
#include "fairaudit/multigroup.hpp"
#include "fairaudit/report.hpp"
#include "properties.hpp"
#include "support.hpp"

namespace {

using namespace fairaudit;
using FC = FairnessCriterion;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void check(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << "  failed: " << what << "\n";
    }
  }
};

struct TableRow {
  FC criterion;
  MetricId metric;
  double a;
  double b;
  std::string diff;
  std::string ratio;
};

// Group values, printed difference and printed ratio of a reference audit
// table.
const TableRow kTable[] = {
    {FC::kStatisticalParity, MetricId::kPositiveRate, 0.17, 0.08, "9%", "2.12"},
    {FC::kConditionalStatisticalParity, MetricId::kPositiveRate, 0.34, 0.21, "13%", "1.62"},
    {FC::kEqualOpportunity, MetricId::kFnr, 0.38, 0.62, "-24%", "0.61"},
    {FC::kPredictiveEquality, MetricId::kFpr, 0.08, 0.03, "5%", "2.67"},
    {FC::kBalancePositive, MetricId::kMeanScorePositive, 0.46, 0.37, "9%", "1.24"},
    {FC::kBalanceNegative, MetricId::kMeanScoreNegative, 0.15, 0.10, "5%", "1.5"},
    {FC::kPredictiveParity, MetricId::kPpv, 0.62, 0.66, "-4%", "0.94"},
    {FC::kBrierParity, MetricId::kBrierScore, 0.09, 0.08, "1%", "1.12"},
    {FC::kOverallAccuracy, MetricId::kAccuracy, 0.87, 0.88, "-1%", "0.99"},
    {FC::kTreatmentEquality, MetricId::kFnFpRatio, 5.11, 13.6, "-8.49", "0.38"},
};

void table_arithmetic(Outcome& out) {
  for (const auto& row : kTable) {
    const auto c = compare_values(row.criterion, row.metric, "Female", "Male", row.a, row.b);
    const bool percent = is_bounded_metric(row.metric);
    const std::string diff = percent ? format_percent(*c.diff) : format_decimal(*c.diff);
    const std::string ratio = format_decimal(*c.ratio);
    out.check(diff == row.diff, std::string(criterion_name(row.criterion)) + " difference " +
                                    diff + " != " + row.diff);
    out.check(ratio == row.ratio, std::string(criterion_name(row.criterion)) + " ratio " + ratio +
                                      " != " + row.ratio);
  }
}

void metric_oracle(Outcome& out) {
  std::mt19937_64 rng(2024);
  std::size_t compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ds = testing::random_dataset(rng);
    for (const auto& g : ds.groups()) {
      const auto records = ds.group_records(g);
      for (const MetricId id : kAllMetrics) {
        const auto got = group_metric(ds, g, id);
        const auto want = testing::brute_metric(records, id);
        ++compared;
        if (got.has_value() != want.has_value()) {
          out.check(false, "UNDEFINED mismatch for " + std::string(metric_name(id)));
        } else if (got) {
          out.check(std::abs(*got - *want) <= 1e-12, std::string(metric_name(id)) + " differs");
        }
      }
    }
  }
  out.detail << "  " << compared << " metric values compared\n";
}

AuditRequest fixture_request(unsigned workers) {
  AuditRequest r;
  r.input = std::filesystem::path(FAIRAUDIT_TEST_DATA_DIR) / "case_study.csv";
  r.columns.outcome = "mortality_28d";
  r.columns.score = "risk_score";
  r.columns.group = "sex";
  r.threshold = 0.41;
  r.conditions = {{"age60", "age >= 60"}};
  r.bootstrap = BootstrapConfig{};
  r.bootstrap->iterations = 1000;
  r.bootstrap->seed = 42;
  r.bootstrap->workers = workers;
  r.epsilons = {0.05};
  return r;
}

void bootstrap_determinism(Outcome& out) {
  const std::string first = to_json(run_audit(fixture_request(1)));
  for (int run = 0; run < 2; ++run) {
    out.check(to_json(run_audit(fixture_request(1))) == first, "repeated run differs");
  }
  for (const unsigned workers : {4u, 0u}) {
    out.check(to_json(run_audit(fixture_request(workers))) == first,
              "worker count " + std::to_string(workers) + " changes the report");
  }
}

void bootstrap_coverage(Outcome& out) {
  std::mt19937_64 rng(4242);
  BootstrapConfig cfg;
  cfg.iterations = 1000;
  cfg.workers = 0;
  const int sims = 1000;
  const std::size_t n = 500;
  int diff_covered = 0;
  int ratio_covered = 0;
  for (int s = 0; s < sims; ++s) {
    std::vector<Record> records;
    for (std::size_t i = 0; i < n; ++i) {
      records.push_back(testing::decided("A", 0, std::bernoulli_distribution(0.30)(rng)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      records.push_back(testing::decided("B", 0, std::bernoulli_distribution(0.20)(rng)));
    }
    const AuditDataset ds(records, {});
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto reps = BootstrapReplicates::run(ds, {"A", "B"}, cfg);
    const auto va = group_metric(ds, "A", MetricId::kPositiveRate);
    const auto vb = group_metric(ds, "B", MetricId::kPositiveRate);
    const auto d = ci_diff(reps, MetricId::kPositiveRate, va, vb);
    const auto r = ci_ratio(reps, MetricId::kPositiveRate, va, vb);
    diff_covered += d.lower <= 0.10 && 0.10 <= d.upper;
    ratio_covered += r.lower <= 1.5 && 1.5 <= r.upper;
  }
  const double dc = static_cast<double>(diff_covered) / sims;
  const double rc = static_cast<double>(ratio_covered) / sims;
  out.detail << "  difference coverage " << dc << ", ratio coverage " << rc << "\n";
  out.check(dc >= 0.92 && dc <= 0.97, "difference coverage outside [0.92, 0.97]");
  out.check(rc >= 0.92 && rc <= 0.97, "ratio coverage outside [0.92, 0.97]");
}

void meta_hand_values(Outcome& out) {
  const std::vector<double> gei_in{0.2, 0.4};
  out.check(std::abs(meta(gei_in, MetaMetricKind::kGeneralizedEntropy, 2.0).value - 1.0 / 18.0) <=
                1e-12,
            "GEI([0.2, 0.4]) != 1/18");
  const std::vector<double> ratio_in{0.5, 1.0};
  out.check(meta(ratio_in, MetaMetricKind::kMaxMinRatio).value == 2.0, "max/min ratio != 2");
  for (const double v : {0.1, 0.3, 0.77}) {
    const std::vector<double> same(4, v);
    for (const auto kind : kAllMetaMetrics) {
      const double want = kind == MetaMetricKind::kMaxMinRatio ? 1.0 : 0.0;
      out.check(meta(same, kind).value == want,
                std::string(meta_metric_name(kind)) + " not exact on equal inputs");
    }
  }
}

AuditDataset prevalence_pair(std::size_t pos_a, std::size_t pos_b, std::size_t n) {
  std::vector<Record> r;
  auto add = [&](const std::string& g, std::size_t positives) {
    for (std::size_t i = 0; i < n; ++i) {
      const int y = i < positives ? 1 : 0;
      // 10% of each class misclassified.
      const int d = (i % 10 == 0) ? 1 - y : y;
      r.push_back(testing::decided(g, y, d));
    }
  };
  add("F", pos_a);
  add("M", pos_b);
  return AuditDataset(r, {});
}

void incompatibility_gating(Outcome& out) {
  const auto balanced = incompatibility_verdict(prevalence_pair(100, 100, 500));
  out.check(balanced.flagged.empty(), "balanced groups flagged a pair");

  const auto unequal = incompatibility_verdict(prevalence_pair(95, 70, 500));
  out.check(unequal.flagged.size() == 3, "0.19 vs 0.14 did not flag all three pairs");
  const double a = 95, b = 405, c = 70, d = 430, n = 1000;
  const double oracle = (a * d - b * c) * (a * d - b * c) * n / ((a + b) * (c + d) * (a + c) * (b + d));
  const double oracle_p = std::erfc(std::sqrt(oracle / 2.0));
  out.detail << "  statistic " << unequal.test.statistic << ", p " << unequal.test.p_value << "\n";
  out.check(std::abs(unequal.test.statistic - oracle) <= 1e-12, "statistic differs from 2x2 oracle");
  out.check(std::abs(unequal.test.p_value - oracle_p) <= 1e-12, "p-value differs from oracle");
  out.check(std::abs(unequal.test.p_value - 0.034) < 0.002, "p-value not near 0.034");
}

void epsilon_on_table(Outcome& out) {
  // Printed differences of the reference table.
  const std::pair<FC, double> diffs[] = {
      {FC::kStatisticalParity, 0.09},  {FC::kConditionalStatisticalParity, 0.13},
      {FC::kEqualOpportunity, -0.24},  {FC::kPredictiveEquality, 0.05},
      {FC::kBalancePositive, 0.09},    {FC::kBalanceNegative, 0.05},
      {FC::kPredictiveParity, -0.04},  {FC::kBrierParity, 0.01},
      {FC::kOverallAccuracy, -0.01},   {FC::kTreatmentEquality, -8.49},
  };
  FairnessReport report;
  report.group_a = "Female";
  report.group_b = "Male";
  for (const auto& [criterion, diff] : diffs) {
    ReportRow row;
    row.criterion = criterion;
    row.category = criterion_category(criterion);
    row.comparison.criterion = criterion;
    row.comparison.diff = diff;
    report.rows.push_back(row);
  }
  const auto assessment = epsilon_assessment(report, 0.05);
  auto verdict_of = [&](FC c) {
    for (const auto& a : assessment.criteria) {
      if (a.criterion == c) return a.verdict;
    }
    return Verdict::kUndefined;
  };
  for (const FC c : {FC::kPredictiveParity, FC::kBrierParity, FC::kOverallAccuracy}) {
    out.check(verdict_of(c) == Verdict::kPass, std::string(criterion_name(c)) + " should PASS");
  }
  for (const FC c : {FC::kStatisticalParity, FC::kConditionalStatisticalParity,
                     FC::kEqualOpportunity, FC::kPredictiveEquality, FC::kBalancePositive,
                     FC::kBalanceNegative}) {
    out.check(verdict_of(c) == Verdict::kFail, std::string(criterion_name(c)) + " should FAIL");
  }
}

void property_suites(Outcome& out) {
  using Suite = testing::PropertyResult (*)(std::size_t, std::uint64_t, std::ostream&);
  const std::pair<const char*, Suite> suites[] = {
      {"swap antisymmetry", testing::swap_antisymmetry},
      {"TPR + FNR = 1", testing::tpr_fnr_identity},
      {"Bayes PPV", testing::bayes_ppv_identity},
      {"calibration partition", testing::calibration_partition},
      {"epsilon monotonicity", testing::epsilon_monotonicity},
      {"threshold monotonicity", testing::threshold_monotonicity},
  };
  std::uint64_t seed = 900;
  for (const auto& [name, suite] : suites) {
    const auto r = suite(1000, seed++, out.detail);
    out.detail << "  " << name << ": " << r.cases << " cases, " << r.failures << " failures\n";
    out.check(r.cases >= 1000 && r.failures == 0, name);
  }
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "difference/ratio arithmetic on the reference table", 1.0, table_arithmetic},
      {2, "metric oracle on 200 random datasets", 5.0, metric_oracle},
      {3, "bootstrap determinism across runs and workers", 10.0, bootstrap_determinism},
      {4, "bootstrap Wald coverage", 120.0, bootstrap_coverage},
      {5, "meta-metric hand values", 1.0, meta_hand_values},
      {6, "incompatibility gating", 1.0, incompatibility_gating},
      {7, "epsilon assessment on the reference table", 1.0, epsilon_on_table},
      {8, "property suites", 60.0, property_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.check(seconds < c.budget_seconds, "runtime over budget");
    std::printf("[%s] criterion %d: %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", c.id, c.title,
                seconds);
    std::cout << out.detail.str() << std::flush;
    failed += !out.ok;
  }
  return failed == 0 ? 0 : 1;
}

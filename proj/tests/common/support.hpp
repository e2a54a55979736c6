#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit::testing {

inline Record rec(std::string group, int y, std::optional<double> s, std::optional<int> d = {}) {
  Record r;
  r.group = std::move(group);
  r.outcome = y;
  r.score = s;
  r.decision = d;
  return r;
}

inline Record decided(std::string group, int y, int d) { return rec(std::move(group), y, {}, d); }

inline std::string group_label(std::size_t g) { return "g" + std::to_string(g); }

struct RandomDatasetOptions {
  std::size_t max_n = 50;
  std::size_t min_groups = 2;
  std::size_t max_groups = 4;
  bool scores = true;
  bool decisions = true;
};

// Every group gets at least one record; scores are snapped to a 1/1000 grid
// so thresholds land on ties now and then.
inline std::vector<Record> random_records(std::mt19937_64& rng,
                                          const RandomDatasetOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> groups_dist(opt.min_groups, opt.max_groups);
  const std::size_t k = groups_dist(rng);
  std::uniform_int_distribution<std::size_t> n_dist(k, std::max(k, opt.max_n));
  const std::size_t n = n_dist(rng);
  std::uniform_int_distribution<std::size_t> group_dist(0, k - 1);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<int> grid(0, 1000);
  std::uniform_real_distribution<double> base(0.05, 0.95);

  std::vector<double> prevalence(k);
  for (auto& p : prevalence) p = base(rng);

  std::vector<Record> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = i < k ? i : group_dist(rng);
    Record r;
    r.group = group_label(g);
    r.outcome = std::bernoulli_distribution(prevalence[g])(rng) ? 1 : 0;
    if (opt.scores) r.score = grid(rng) / 1000.0;
    if (opt.decisions) r.decision = bit(rng);
    out.push_back(std::move(r));
  }
  return out;
}

inline AuditDataset random_dataset(std::mt19937_64& rng, const RandomDatasetOptions& opt = {}) {
  return AuditDataset(random_records(rng, opt), {});
}

// Straight-from-the-definition recomputation, independent of GroupTally.
inline MetricValue brute_metric(const std::vector<Record>& records, MetricId id) {
  auto frac = [](double num, double den) -> MetricValue {
    if (den == 0.0) return std::nullopt;
    return num / den;
  };
  double tp = 0, fp = 0, tn = 0, fn = 0, n = 0, pos = 0;
  double se = 0, ae = 0, scored = 0, s_pos = 0, n_pos = 0, s_neg = 0, n_neg = 0;
  for (const auto& r : records) {
    n += 1;
    pos += r.outcome;
    if (r.decision) {
      if (r.outcome == 1 && *r.decision == 1) tp += 1;
      if (r.outcome == 1 && *r.decision == 0) fn += 1;
      if (r.outcome == 0 && *r.decision == 1) fp += 1;
      if (r.outcome == 0 && *r.decision == 0) tn += 1;
    }
    if (r.score) {
      scored += 1;
      se += (*r.score - r.outcome) * (*r.score - r.outcome);
      ae += std::abs(*r.score - r.outcome);
      if (r.outcome == 1) {
        s_pos += *r.score;
        n_pos += 1;
      } else {
        s_neg += *r.score;
        n_neg += 1;
      }
    }
  }
  switch (id) {
    case MetricId::kTpr: return frac(tp, tp + fn);
    case MetricId::kTnr: return frac(tn, tn + fp);
    case MetricId::kFpr: return frac(fp, fp + tn);
    case MetricId::kFnr: return frac(fn, fn + tp);
    case MetricId::kPpv: return frac(tp, tp + fp);
    case MetricId::kNpv: return frac(tn, tn + fn);
    case MetricId::kAccuracy: return frac(tp + tn, n);
    case MetricId::kPositiveRate: return frac(tp + fp, n);
    case MetricId::kFnFpRatio: return frac(fn, fp);
    case MetricId::kPrevalence: return frac(pos, n);
    case MetricId::kBrierScore: return frac(se, scored);
    case MetricId::kMeanAbsoluteError: return frac(ae, scored);
    case MetricId::kMeanScorePositive: return frac(s_pos, n_pos);
    case MetricId::kMeanScoreNegative: return frac(s_neg, n_neg);
  }
  return std::nullopt;
}

// Scratch file removed on scope exit.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& suffix = ".csv") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fairaudit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix);
    std::ofstream(path_, std::ios::binary) << content;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fairaudit::testing

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

/// Settings for the stratified nonparametric bootstrap.
struct BootstrapConfig {
  std::size_t iterations = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  /// Largest tolerated fraction of discarded (degenerate) iterations.
  double degenerate_tolerance = 0.01;
  /// Worker threads; 0 means hardware concurrency. Results do not depend
  /// on this value.
  unsigned workers = 1;

  /// Throws InputError unless iterations >= 2, 0 < alpha < 1 and the
  /// tolerance lies in [0, 1].
  void validate() const;
};

enum class IntervalMethod { kWaldDiff, kWaldLogRatio };

std::string_view interval_method_name(IntervalMethod method);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  IntervalMethod method = IntervalMethod::kWaldDiff;
  std::size_t discarded = 0;
  std::size_t iterations = 0;
  double standard_error = 0.0;
};

struct GroupPair {
  std::string a;
  std::string b;
};

/// Indices (into a group of `size` records) drawn uniformly with
/// replacement. A pure function of (seed, iteration, group label, size).
std::vector<std::size_t> draw_resample_indices(std::uint64_t seed, std::size_t iteration,
                                               std::string_view group, std::size_t size);

/// Resamples every group independently with replacement, keeping group
/// sizes fixed. Records are emitted group by group in registry order.
AuditDataset resample_within_groups(const AuditDataset& dataset, std::uint64_t seed,
                                    std::size_t iteration);

/// Per-iteration tallies for both groups of a pair. Iteration b of group g
/// uses the same draws as resample_within_groups(dataset, seed, b).
class BootstrapReplicates {
 public:
  static BootstrapReplicates run(const AuditDataset& dataset, const GroupPair& pair,
                                 const BootstrapConfig& config);

  const BootstrapConfig& config() const { return config_; }
  std::size_t iterations() const { return a_.size(); }
  std::span<const GroupTally> group_a() const { return a_; }
  std::span<const GroupTally> group_b() const { return b_; }

 private:
  BootstrapConfig config_;
  std::vector<GroupTally> a_;
  std::vector<GroupTally> b_;
};

/// Running mean and unbiased variance (Welford), accumulated in call order.
class RunningMoments {
 public:
  void push(double x);
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Divisor count - 1; requires count >= 2.
  double sample_variance() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Wald interval for value_a - value_b. Throws InputError when a point value
/// is UNDEFINED and ComputationError when too many resamples are degenerate.
Interval ci_diff(const BootstrapReplicates& replicates, MetricId metric, MetricValue value_a,
                 MetricValue value_b);
/// Wald interval for value_a / value_b built on the log scale. Throws
/// InputError unless both point values are strictly positive.
Interval ci_ratio(const BootstrapReplicates& replicates, MetricId metric, MetricValue value_a,
                  MetricValue value_b);

Interval ci_diff(const AuditDataset& dataset, MetricId metric, const GroupPair& pair,
                 const BootstrapConfig& config);
Interval ci_ratio(const AuditDataset& dataset, MetricId metric, const GroupPair& pair,
                  const BootstrapConfig& config);

/// exp(x) for x >= 0 and 1 / exp(-x) otherwise, so that
/// symmetric_exp(-x) is exactly the reciprocal of symmetric_exp(x).
double symmetric_exp(double x);

}  // namespace fairaudit

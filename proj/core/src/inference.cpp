#include "fairaudit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "fairaudit/error.hpp"
#include "fairaudit/normal.hpp"

namespace fairaudit {
namespace {

std::mt19937_64 substream(std::uint64_t seed, std::size_t iteration, std::string_view group) {
  std::vector<std::uint32_t> key;
  key.reserve(5 + group.size() / 4 + 1);
  const auto iter = static_cast<std::uint64_t>(iteration);
  key.push_back(static_cast<std::uint32_t>(seed));
  key.push_back(static_cast<std::uint32_t>(seed >> 32));
  key.push_back(static_cast<std::uint32_t>(iter));
  key.push_back(static_cast<std::uint32_t>(iter >> 32));
  key.push_back(static_cast<std::uint32_t>(group.size()));
  std::uint32_t word = 0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    word |= static_cast<std::uint32_t>(static_cast<unsigned char>(group[i])) << (8 * (i % 4));
    if (i % 4 == 3) {
      key.push_back(word);
      word = 0;
    }
  }
  if (group.size() % 4 != 0) key.push_back(word);
  std::seed_seq seq(key.begin(), key.end());
  return std::mt19937_64(seq);
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

void check_tolerance(std::size_t discarded, const BootstrapConfig& config, MetricId metric,
                     std::size_t retained) {
  const double limit = config.degenerate_tolerance * static_cast<double>(config.iterations);
  if (static_cast<double>(discarded) > limit || retained < 2) {
    throw ComputationError("bootstrap for " + std::string(metric_name(metric)) + ": " +
                           std::to_string(discarded) + " of " +
                           std::to_string(config.iterations) +
                           " resamples were degenerate (tolerance " +
                           std::to_string(config.degenerate_tolerance) + ")");
  }
}

}  // namespace

void BootstrapConfig::validate() const {
  if (iterations < 2) throw InputError("bootstrap needs at least 2 iterations");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
  if (!(degenerate_tolerance >= 0.0 && degenerate_tolerance <= 1.0)) {
    throw InputError("degenerate tolerance must lie in [0,1]");
  }
}

std::string_view interval_method_name(IntervalMethod method) {
  return method == IntervalMethod::kWaldDiff ? "wald_diff" : "wald_log_ratio";
}

std::vector<std::size_t> draw_resample_indices(std::uint64_t seed, std::size_t iteration,
                                               std::string_view group, std::size_t size) {
  if (size == 0) throw InputError("cannot resample empty group '" + std::string(group) + "'");
  auto rng = substream(seed, iteration, group);
  std::uniform_int_distribution<std::size_t> pick(0, size - 1);
  std::vector<std::size_t> draws(size);
  for (auto& d : draws) d = pick(rng);
  return draws;
}

AuditDataset resample_within_groups(const AuditDataset& dataset, std::uint64_t seed,
                                    std::size_t iteration) {
  const auto& records = dataset.records();
  std::vector<Record> out;
  out.reserve(records.size());
  for (const auto& group : dataset.groups()) {
    const auto members = dataset.members(group);
    for (const std::size_t k : draw_resample_indices(seed, iteration, group, members.size())) {
      out.push_back(records[members[k]]);
    }
  }
  return AuditDataset(std::move(out), dataset.covariates(), dataset.provenance());
}

BootstrapReplicates BootstrapReplicates::run(const AuditDataset& dataset, const GroupPair& pair,
                                             const BootstrapConfig& config) {
  config.validate();
  if (pair.a == pair.b) throw InputError("bootstrap pair needs two distinct groups");
  const auto members_a = dataset.members(pair.a);
  const auto members_b = dataset.members(pair.b);
  const auto& records = dataset.records();

  BootstrapReplicates out;
  out.config_ = config;
  out.a_.resize(config.iterations);
  out.b_.resize(config.iterations);

  auto draw_tally = [&](std::size_t iteration, const std::string& group,
                        std::span<const std::size_t> members) {
    if (members.empty()) throw InputError("cannot resample empty group '" + group + "'");
    auto rng = substream(config.seed, iteration, group);
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    GroupTally t;
    for (std::size_t k = 0; k < members.size(); ++k) t.add(records[members[pick(rng)]]);
    return t;
  };

  parallel_for(config.iterations, resolve_workers(config.workers), [&](std::size_t i) {
    out.a_[i] = draw_tally(i, pair.a, members_a);
    out.b_[i] = draw_tally(i, pair.b, members_b);
  });
  return out;
}

void RunningMoments::push(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

double RunningMoments::sample_variance() const {
  if (count_ < 2) throw ComputationError("sample variance needs at least 2 values");
  return m2_ / static_cast<double>(count_ - 1);
}

double symmetric_exp(double x) { return x >= 0.0 ? std::exp(x) : 1.0 / std::exp(-x); }

Interval ci_diff(const BootstrapReplicates& replicates, MetricId metric, MetricValue value_a,
                 MetricValue value_b) {
  if (!value_a || !value_b) throw InputError("difference CI needs both point values defined");
  const auto& config = replicates.config();
  RunningMoments moments;
  std::size_t discarded = 0;
  for (std::size_t i = 0; i < replicates.iterations(); ++i) {
    const MetricValue a = metric_value(replicates.group_a()[i], metric);
    const MetricValue b = metric_value(replicates.group_b()[i], metric);
    if (!a || !b) {
      ++discarded;
      continue;
    }
    moments.push(*a - *b);
  }
  check_tolerance(discarded, config, metric, moments.count());

  const double se = std::sqrt(moments.sample_variance());
  const double half_width = two_sided_z(config.alpha) * se;
  const double diff = *value_a - *value_b;
  Interval interval;
  interval.method = IntervalMethod::kWaldDiff;
  interval.lower = diff - half_width;
  interval.upper = diff + half_width;
  interval.discarded = discarded;
  interval.iterations = replicates.iterations();
  interval.standard_error = se;
  return interval;
}

Interval ci_ratio(const BootstrapReplicates& replicates, MetricId metric, MetricValue value_a,
                  MetricValue value_b) {
  if (!value_a || !value_b || !(*value_a > 0.0) || !(*value_b > 0.0)) {
    throw InputError("ratio CI needs strictly positive point values");
  }
  const auto& config = replicates.config();
  RunningMoments moments;
  std::size_t discarded = 0;
  for (std::size_t i = 0; i < replicates.iterations(); ++i) {
    const MetricValue a = metric_value(replicates.group_a()[i], metric);
    const MetricValue b = metric_value(replicates.group_b()[i], metric);
    if (!a || !b || !(*a > 0.0) || !(*b > 0.0)) {
      ++discarded;
      continue;
    }
    moments.push(std::log(*a) - std::log(*b));
  }
  check_tolerance(discarded, config, metric, moments.count());

  const double se = std::sqrt(moments.sample_variance());
  const double half_width = two_sided_z(config.alpha) * se;
  const double center = std::log(*value_a) - std::log(*value_b);
  const double ratio = *metric_ratio(value_a, value_b);
  Interval interval;
  interval.method = IntervalMethod::kWaldLogRatio;
  interval.lower = std::min(symmetric_exp(center - half_width), ratio);
  interval.upper = std::max(symmetric_exp(center + half_width), ratio);
  interval.discarded = discarded;
  interval.iterations = replicates.iterations();
  interval.standard_error = se;
  return interval;
}

Interval ci_diff(const AuditDataset& dataset, MetricId metric, const GroupPair& pair,
                 const BootstrapConfig& config) {
  const auto replicates = BootstrapReplicates::run(dataset, pair, config);
  return ci_diff(replicates, metric, group_metric(dataset, pair.a, metric),
                 group_metric(dataset, pair.b, metric));
}

Interval ci_ratio(const AuditDataset& dataset, MetricId metric, const GroupPair& pair,
                  const BootstrapConfig& config) {
  const auto replicates = BootstrapReplicates::run(dataset, pair, config);
  return ci_ratio(replicates, metric, group_metric(dataset, pair.a, metric),
                  group_metric(dataset, pair.b, metric));
}

}  // namespace fairaudit

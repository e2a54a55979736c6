#include "fairaudit/multigroup.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fairaudit/error.hpp"

namespace fairaudit {
namespace {

// Sorted copy so that every reduction below runs in a canonical order.
std::vector<double> canonical(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

// Mean anchored at the minimum: exact when all values are equal.
double anchored_mean(const std::vector<double>& sorted) {
  const double base = sorted.front();
  double excess = 0.0;
  for (const double v : sorted) excess += v - base;
  return base + excess / static_cast<double>(sorted.size());
}

}  // namespace

std::string_view meta_metric_name(MetaMetricKind kind) {
  switch (kind) {
    case MetaMetricKind::kMaxMinDifference: return "max_min_difference";
    case MetaMetricKind::kMaxMinRatio: return "max_min_ratio";
    case MetaMetricKind::kMaxAbsDifference: return "max_abs_difference";
    case MetaMetricKind::kMeanAbsDeviation: return "mean_abs_deviation";
    case MetaMetricKind::kVariance: return "variance";
    case MetaMetricKind::kGeneralizedEntropy: return "generalized_entropy";
  }
  return "?";
}

MetaMetricKind parse_meta_metric(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  if (key == "gei") return MetaMetricKind::kGeneralizedEntropy;
  for (const auto kind : kAllMetaMetrics) {
    if (meta_metric_name(kind) == key) return kind;
  }
  throw InputError("unknown meta-metric '" + std::string(name) + "'");
}

MetaMetricResult meta(std::span<const double> values, MetaMetricKind kind, double alpha) {
  if (values.size() < 2) throw InputError("meta-metrics need at least 2 group values");
  for (const double v : values) {
    if (!std::isfinite(v)) throw InputError("meta-metric input is not finite");
  }
  const auto sorted = canonical(values);
  const double lo = sorted.front();
  const double hi = sorted.back();
  const auto k = static_cast<double>(sorted.size());

  MetaMetricResult result;
  result.kind = kind;
  result.values.assign(values.begin(), values.end());

  switch (kind) {
    case MetaMetricKind::kMaxMinDifference:
      result.value = hi - lo;
      break;
    case MetaMetricKind::kMaxMinRatio:
      if (!(lo > 0.0)) throw InputError("max-min ratio needs strictly positive values");
      result.value = hi / lo;
      break;
    case MetaMetricKind::kMaxAbsDifference: {
      const double mean = anchored_mean(sorted);
      result.value = std::max(std::abs(hi - mean), std::abs(lo - mean));
      break;
    }
    case MetaMetricKind::kMeanAbsDeviation: {
      const double mean = anchored_mean(sorted);
      double sum = 0.0;
      for (const double v : sorted) sum += std::abs(v - mean);
      result.value = sum / k;
      break;
    }
    case MetaMetricKind::kVariance: {
      const double mean = anchored_mean(sorted);
      double sum = 0.0;
      for (const double v : sorted) sum += (v - mean) * (v - mean);
      result.value = sum / (k - 1.0);
      break;
    }
    case MetaMetricKind::kGeneralizedEntropy: {
      if (!std::isfinite(alpha) || alpha == 0.0 || alpha == 1.0) {
        throw InputError("generalized entropy exponent must differ from 0 and 1");
      }
      if (!(lo > 0.0)) throw InputError("generalized entropy needs strictly positive values");
      const double mean = anchored_mean(sorted);
      double sum = 0.0;
      for (const double v : sorted) sum += std::pow(v / mean, alpha) - 1.0;
      result.value = sum / (k * alpha * (alpha - 1.0));
      result.alpha = alpha;
      break;
    }
  }
  return result;
}

MetaMetricResult meta(std::span<const MetricValue> values, std::span<const std::string> groups,
                      MetaMetricKind kind, double alpha) {
  std::vector<double> defined;
  defined.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) {
      const std::string who = i < groups.size() ? "'" + groups[i] + "'" : std::to_string(i);
      throw InputError("meta-metric aborted: value for group " + who + " is UNDEFINED");
    }
    defined.push_back(*values[i]);
  }
  auto result = meta(defined, kind, alpha);
  result.groups.assign(groups.begin(), groups.end());
  return result;
}

MetaMetricResult meta_across_groups(const AuditDataset& dataset, MetricId metric,
                                    MetaMetricKind kind, double alpha) {
  std::vector<MetricValue> values;
  for (const auto& group : dataset.groups()) values.push_back(group_metric(dataset, group, metric));
  auto result = meta(values, dataset.groups(), kind, alpha);
  result.metric = metric;
  return result;
}

}  // namespace fairaudit

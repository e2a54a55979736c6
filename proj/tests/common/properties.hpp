#pragma once

// Randomised invariant checks shared by the unit suite and the acceptance
// runner. Each returns the number of violated cases; messages for the first
// few violations go to `log`.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>

#include "fairaudit/diagnostics.hpp"
#include "fairaudit/fairness.hpp"
#include "support.hpp"

namespace fairaudit::testing {

struct PropertyResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
};

namespace detail {

inline void fail(PropertyResult& r, std::ostream& log, const std::string& what) {
  if (r.failures++ < 5) log << "  violation: " << what << "\n";
}

inline std::vector<FairnessCriterion> pointwise_criteria() {
  std::vector<FairnessCriterion> out;
  for (const auto c : kAllCriteria) {
    if (!is_calibration_criterion(c) && c != FairnessCriterion::kConditionalStatisticalParity) {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Swapping the group order negates every difference and inverts every ratio,
// bit for bit.
inline PropertyResult swap_antisymmetry(std::size_t cases, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 rng(seed);
  PropertyResult r;
  EvaluationOptions opt;
  opt.criteria = detail::pointwise_criteria();
  while (r.cases < cases) {
    const auto ds = random_dataset(rng);
    const auto& g = ds.groups();
    const auto ab = evaluate_all(ds, g[0], g[1], opt);
    const auto ba = evaluate_all(ds, g[1], g[0], opt);
    for (std::size_t i = 0; i < ab.rows.size(); ++i) {
      const auto& x = ab.rows[i].comparison;
      const auto& y = ba.rows[i].comparison;
      ++r.cases;
      if (x.diff.has_value() != y.diff.has_value() || (x.diff && *x.diff != -*y.diff)) {
        detail::fail(r, log, "diff not negated for " + std::string(metric_name(x.metric)));
      }
      if (x.ratio && y.ratio) {
        const bool ok = *x.ratio >= 1.0 ? *y.ratio == 1.0 / *x.ratio : *x.ratio == 1.0 / *y.ratio;
        if (!ok) detail::fail(r, log, "ratio not reciprocal for " + std::string(metric_name(x.metric)));
      } else if (x.ratio && *x.ratio != 0.0) {
        detail::fail(r, log, "ratio defined one way only");
      } else if (y.ratio && *y.ratio != 0.0) {
        detail::fail(r, log, "ratio defined one way only");
      }
    }
  }
  return r;
}

inline PropertyResult tpr_fnr_identity(std::size_t cases, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 rng(seed);
  PropertyResult r;
  while (r.cases < cases) {
    const auto ds = random_dataset(rng);
    for (const auto& g : ds.groups()) {
      const auto tpr = group_metric(ds, g, MetricId::kTpr);
      const auto fnr = group_metric(ds, g, MetricId::kFnr);
      const auto tnr = group_metric(ds, g, MetricId::kTnr);
      const auto fpr = group_metric(ds, g, MetricId::kFpr);
      ++r.cases;
      if (tpr.has_value() != fnr.has_value() || tnr.has_value() != fpr.has_value()) {
        detail::fail(r, log, "definedness differs");
        continue;
      }
      if (tpr && std::abs(*tpr + *fnr - 1.0) > 4e-16) detail::fail(r, log, "TPR + FNR != 1");
      if (tnr && std::abs(*tnr + *fpr - 1.0) > 4e-16) detail::fail(r, log, "TNR + FPR != 1");
    }
  }
  return r;
}

// PPV = TPR mu / (TPR mu + FPR (1 - mu)) whenever both sides are defined.
inline PropertyResult bayes_ppv_identity(std::size_t cases, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 rng(seed);
  PropertyResult r;
  while (r.cases < cases) {
    const auto ds = random_dataset(rng);
    for (const auto& g : ds.groups()) {
      const auto ppv = group_metric(ds, g, MetricId::kPpv);
      const auto tpr = group_metric(ds, g, MetricId::kTpr);
      const auto fpr = group_metric(ds, g, MetricId::kFpr);
      const auto mu = group_metric(ds, g, MetricId::kPrevalence);
      if (!tpr || !fpr) continue;
      const double num = *tpr * *mu;
      const double den = num + *fpr * (1.0 - *mu);
      ++r.cases;
      if (den == 0.0) {
        if (ppv) detail::fail(r, log, "PPV defined with no positive decisions");
        continue;
      }
      if (!ppv || std::abs(*ppv - num / den) > 1e-12) detail::fail(r, log, "Bayes PPV mismatch");
    }
  }
  return r;
}

inline PropertyResult calibration_partition(std::size_t cases, std::uint64_t seed,
                                            std::ostream& log) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> bins_dist(2, 25);
  PropertyResult r;
  while (r.cases < cases) {
    const auto ds = random_dataset(rng, {.max_n = 200});
    const std::size_t bins = bins_dist(rng);
    for (const auto& g : ds.groups()) {
      const auto curve = calibration_curve(ds, g, bins);
      ++r.cases;
      if (curve.total() != ds.members(g).size() || curve.bins.size() != bins) {
        detail::fail(r, log, "bin counts do not partition the group");
      }
      for (const auto& rec : ds.group_records(g)) {
        const auto& b = curve.bins[calibration_bin_index(*rec.score, bins)];
        const bool inside = b.lower == 0.0 ? *rec.score <= b.upper
                                           : *rec.score > b.lower && *rec.score <= b.upper;
        if (!inside) detail::fail(r, log, "score outside its bin");
      }
    }
  }
  return r;
}

// PASS at eps1 implies PASS at every eps2 > eps1; FAIL at eps2 implies FAIL
// at eps1.
inline PropertyResult epsilon_monotonicity(std::size_t cases, std::uint64_t seed,
                                           std::ostream& log) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eps_dist(1e-6, 1.0);
  PropertyResult r;
  EvaluationOptions opt;
  opt.criteria = detail::pointwise_criteria();
  while (r.cases < cases) {
    const auto ds = random_dataset(rng);
    const auto report = evaluate_all(ds, ds.groups()[0], ds.groups()[1], opt);
    double e1 = eps_dist(rng);
    double e2 = eps_dist(rng);
    if (e1 > e2) std::swap(e1, e2);
    const auto lo = epsilon_assessment(report, e1);
    const auto hi = epsilon_assessment(report, e2);
    for (std::size_t i = 0; i < lo.criteria.size(); ++i) {
      ++r.cases;
      const Verdict a = lo.criteria[i].verdict;
      const Verdict b = hi.criteria[i].verdict;
      if ((a == Verdict::kUndefined) != (b == Verdict::kUndefined)) {
        detail::fail(r, log, "definedness depends on epsilon");
      } else if (a == Verdict::kPass && b != Verdict::kPass) {
        detail::fail(r, log, "PASS at smaller epsilon but not at larger");
      }
    }
  }
  return r;
}

// Raising the threshold never raises a group's positive rate, TPR or FPR.
inline PropertyResult threshold_monotonicity(std::size_t cases, std::uint64_t seed,
                                             std::ostream& log) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> grid(0, 1000);
  PropertyResult r;
  while (r.cases < cases) {
    const auto ds = random_dataset(rng, {.decisions = false});
    double c1 = grid(rng) / 1000.0;
    double c2 = grid(rng) / 1000.0;
    if (c1 > c2) std::swap(c1, c2);
    const auto low = apply_threshold(ds, c1);
    const auto high = apply_threshold(ds, c2);
    for (const auto& g : ds.groups()) {
      ++r.cases;
      for (const MetricId id : {MetricId::kPositiveRate, MetricId::kTpr, MetricId::kFpr}) {
        const auto a = group_metric(low, g, id);
        const auto b = group_metric(high, g, id);
        if (a && b && *b > *a) {
          detail::fail(r, log, std::string(metric_name(id)) + " increased with the threshold");
        }
      }
    }
  }
  return r;
}

}  // namespace fairaudit::testing

#pragma once

#include <random>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit::bench {

// Two groups with score-dependent outcomes, decisions at 0.5.
inline std::vector<Record> synthetic_records(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Record> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record r;
    r.group = i % 3 == 0 ? "B" : "A";
    r.score = u(rng);
    r.outcome = u(rng) < *r.score ? 1 : 0;
    r.decision = *r.score > 0.5 ? 1 : 0;
    out.push_back(std::move(r));
  }
  return out;
}

inline AuditDataset synthetic_dataset(std::size_t n) {
  return AuditDataset(synthetic_records(n), {});
}

}  // namespace fairaudit::bench

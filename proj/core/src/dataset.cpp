#include "fairaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "csv.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/predicate.hpp"

namespace fairaudit {
namespace {

std::ifstream open_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file '" + path.string() + "'");
  return in;
}

std::optional<std::size_t> column_of(std::span<const std::string> header, std::string_view name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line);
}

// Parses a {0,1} cell. Empty means missing.
std::optional<int> parse_binary(std::string_view cell, std::string_view what,
                                const std::string& location) {
  if (cell.empty()) return std::nullopt;
  const auto value = detail::parse_double(cell);
  if (!value || (*value != 0.0 && *value != 1.0)) {
    throw InputError(std::string(what) + " value outside {0,1}: '" + std::string(cell) + "' at " +
                     location);
  }
  return static_cast<int>(*value);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return values[mid - 1] + (values[mid] - values[mid - 1]) / 2.0;
}

}  // namespace

AuditDataset::AuditDataset(std::vector<Record> records, std::vector<CovariateColumn> covariates,
                           Provenance provenance)
    : covariates_(std::move(covariates)), provenance_(std::move(provenance)) {
  if (provenance_.threshold) {
    const double c = *provenance_.threshold;
    if (!(c >= 0.0 && c <= 1.0)) throw InputError("threshold outside [0,1]");
  }
  std::unordered_map<std::string, std::size_t> index;
  has_decisions_ = !records.empty();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record& r = records[i];
    if (r.outcome != 0 && r.outcome != 1) throw InputError("outcome value outside {0,1}");
    if (r.score && !(*r.score >= 0.0 && *r.score <= 1.0)) {
      throw InputError("score outside [0,1]");
    }
    if (r.decision && *r.decision != 0 && *r.decision != 1) {
      throw InputError("decision value outside {0,1}");
    }
    if (!r.score && !r.decision) throw InputError("record has neither score nor decision");
    if (r.covariates.size() != covariates_.size()) {
      throw InputError("record covariate count does not match the covariate columns");
    }
    has_scores_ = has_scores_ || r.score.has_value();
    has_decisions_ = has_decisions_ && r.decision.has_value();
    auto [it, inserted] = index.try_emplace(r.group, groups_.size());
    if (inserted) {
      groups_.push_back(r.group);
      members_.emplace_back();
    }
    members_[it->second].push_back(i);
  }
  if (groups_.size() < 2) {
    throw InputError("fewer than 2 groups (found " + std::to_string(groups_.size()) + ")");
  }
  records_ = std::make_shared<const std::vector<Record>>(std::move(records));
}

void AuditDataset::adopt_group_order(const std::vector<std::string>& order) {
  std::vector<std::string> groups;
  std::vector<std::vector<std::size_t>> members;
  for (const auto& g : order) {
    const auto it = std::find(groups_.begin(), groups_.end(), g);
    if (it == groups_.end()) continue;
    groups.push_back(g);
    members.push_back(std::move(members_[static_cast<std::size_t>(it - groups_.begin())]));
  }
  groups_ = std::move(groups);
  members_ = std::move(members);
}

bool AuditDataset::has_group(std::string_view group) const {
  return std::find(groups_.begin(), groups_.end(), group) != groups_.end();
}

std::span<const std::size_t> AuditDataset::members(std::string_view group) const {
  const auto it = std::find(groups_.begin(), groups_.end(), group);
  if (it == groups_.end()) throw InputError("unknown group '" + std::string(group) + "'");
  return members_[static_cast<std::size_t>(it - groups_.begin())];
}

std::vector<Record> AuditDataset::group_records(std::string_view group) const {
  std::vector<Record> out;
  for (const std::size_t i : members(group)) out.push_back((*records_)[i]);
  return out;
}

std::optional<std::size_t> AuditDataset::covariate_index(std::string_view name) const {
  for (std::size_t i = 0; i < covariates_.size(); ++i) {
    if (covariates_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  auto in = open_csv(path);
  detail::CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.read_row(header)) throw InputError("file '" + path.string() + "' has no header row");
  return header;
}

void validate_schema(const Schema& schema, std::span<const std::string> header) {
  if (schema.outcome.empty()) throw InputError("outcome column not named");
  if (schema.group.empty()) throw InputError("group column not named");
  if (!schema.score && !schema.decision) {
    throw InputError("at least one of score or decision columns must be named");
  }
  std::vector<std::string> bound{schema.outcome, schema.group};
  if (schema.score) bound.push_back(*schema.score);
  if (schema.decision) bound.push_back(*schema.decision);
  bound.insert(bound.end(), schema.covariates.begin(), schema.covariates.end());
  for (const auto& name : bound) {
    if (!column_of(header, name)) throw InputError("unknown column name '" + name + "'");
  }
}

AuditDataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  auto in = open_csv(path);
  detail::CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.read_row(header)) throw InputError("file '" + path.string() + "' has no header row");
  validate_schema(schema, header);

  const std::size_t outcome_col = *column_of(header, schema.outcome);
  const std::size_t group_col = *column_of(header, schema.group);
  const auto score_col = schema.score ? column_of(header, *schema.score) : std::nullopt;
  const auto decision_col = schema.decision ? column_of(header, *schema.decision) : std::nullopt;
  std::vector<std::size_t> covariate_cols;
  for (const auto& name : schema.covariates) covariate_cols.push_back(*column_of(header, name));

  std::vector<Record> records;
  std::vector<std::vector<std::string>> raw_covariates;
  std::size_t dropped = 0;
  std::vector<std::string> fields;
  while (reader.read_row(fields)) {
    const std::string location = where(path, reader.line());
    if (fields.size() != header.size()) {
      throw InputError("row has " + std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()) + " at " + location);
    }
    const auto outcome = parse_binary(fields[outcome_col], "outcome", location);
    const std::string& group = fields[group_col];

    std::optional<double> score;
    if (score_col && !fields[*score_col].empty()) {
      score = detail::parse_double(fields[*score_col]);
      if (!score) {
        throw InputError("non-numeric score '" + fields[*score_col] + "' at " + location);
      }
      if (*score < 0.0 || *score > 1.0) {
        throw InputError("score outside [0,1]: " + fields[*score_col] + " at " + location);
      }
    }
    std::optional<int> decision;
    if (decision_col) decision = parse_binary(fields[*decision_col], "decision", location);

    if (!outcome || group.empty() || (!score && !decision)) {
      ++dropped;
      continue;
    }
    Record record;
    record.outcome = *outcome;
    record.score = score;
    record.decision = decision;
    record.group = group;
    records.push_back(std::move(record));
    std::vector<std::string> cells;
    cells.reserve(covariate_cols.size());
    for (const std::size_t c : covariate_cols) cells.push_back(fields[c]);
    raw_covariates.push_back(std::move(cells));
  }

  // A covariate column is numeric when every non-missing cell parses.
  std::vector<CovariateColumn> columns;
  for (std::size_t j = 0; j < schema.covariates.size(); ++j) {
    bool numeric = true;
    for (const auto& row : raw_covariates) {
      if (!row[j].empty() && !detail::parse_double(row[j])) {
        numeric = false;
        break;
      }
    }
    columns.push_back({schema.covariates[j],
                       numeric ? CovariateKind::kNumeric : CovariateKind::kCategorical});
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& cells = records[i].covariates;
    cells.reserve(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const std::string& raw = raw_covariates[i][j];
      if (raw.empty()) {
        cells.emplace_back(std::monostate{});
      } else if (columns[j].kind == CovariateKind::kNumeric) {
        cells.emplace_back(*detail::parse_double(raw));
      } else {
        cells.emplace_back(raw);
      }
    }
  }

  Provenance provenance;
  provenance.n_dropped = dropped;
  return AuditDataset(std::move(records), std::move(columns), std::move(provenance));
}

AuditDataset impute_medians(const AuditDataset& dataset, std::span<const std::string> covariates,
                            double max_missing_fraction) {
  if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0)) {
    throw InputError("missing-value cutoff must lie in [0,1]");
  }
  std::vector<Record> records = dataset.records();
  std::vector<CovariateColumn> columns = dataset.covariates();
  Provenance provenance = dataset.provenance();
  std::vector<std::size_t> drop;

  for (const auto& name : covariates) {
    const bool already_dropped =
        std::any_of(provenance.imputation_log.begin(), provenance.imputation_log.end(),
                    [&](const ImputationEntry& e) {
                      return e.covariate == name && e.action == ImputationEntry::Action::kDropped;
                    });
    const auto index = dataset.covariate_index(name);
    if (!index) {
      if (already_dropped) continue;
      throw InputError("unknown covariate '" + name + "'");
    }
    if (columns[*index].kind != CovariateKind::kNumeric) {
      throw InputError("non-numeric covariate '" + name + "' cannot be median-imputed");
    }
    std::vector<double> present;
    std::size_t missing = 0;
    for (const auto& r : records) {
      if (const auto* v = std::get_if<double>(&r.covariates[*index])) {
        present.push_back(*v);
      } else {
        ++missing;
      }
    }
    if (present.empty()) throw InputError("covariate '" + name + "' is entirely missing");
    if (missing == 0) continue;

    ImputationEntry entry;
    entry.covariate = name;
    entry.missing_count = missing;
    entry.missing_fraction = static_cast<double>(missing) / static_cast<double>(records.size());
    if (entry.missing_fraction > max_missing_fraction) {
      entry.action = ImputationEntry::Action::kDropped;
      drop.push_back(*index);
    } else {
      const double median = median_of(std::move(present));
      entry.action = ImputationEntry::Action::kImputed;
      entry.median = median;
      for (auto& r : records) {
        if (std::holds_alternative<std::monostate>(r.covariates[*index])) {
          r.covariates[*index] = median;
        }
      }
    }
    provenance.imputation_log.push_back(std::move(entry));
  }

  if (!drop.empty()) {
    std::sort(drop.begin(), drop.end());
    drop.erase(std::unique(drop.begin(), drop.end()), drop.end());
    for (auto it = drop.rbegin(); it != drop.rend(); ++it) {
      const auto offset = static_cast<std::ptrdiff_t>(*it);
      columns.erase(columns.begin() + offset);
      for (auto& r : records) r.covariates.erase(r.covariates.begin() + offset);
    }
  }
  return AuditDataset(std::move(records), std::move(columns), std::move(provenance));
}

AuditDataset apply_threshold(const AuditDataset& dataset, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InputError("threshold outside [0,1]");
  }
  std::vector<Record> records = dataset.records();
  for (auto& r : records) {
    if (!r.score) throw InputError("cannot apply threshold: missing scores");
    r.decision = *r.score > threshold ? 1 : 0;
  }
  Provenance provenance = dataset.provenance();
  provenance.threshold = threshold;
  return AuditDataset(std::move(records), dataset.covariates(), std::move(provenance));
}

AuditDataset filter_condition(const AuditDataset& dataset, const ConditionPredicate& predicate) {
  predicate.validate(dataset.covariates());
  std::vector<Record> kept;
  for (const auto& r : dataset.records()) {
    if (predicate.evaluate(r, dataset.covariates())) kept.push_back(r);
  }
  if (kept.empty()) {
    throw InputError("empty result: no records satisfy \"" + predicate.text() + "\"");
  }
  for (const auto& group : dataset.groups()) {
    const bool present =
        std::any_of(kept.begin(), kept.end(), [&](const Record& r) { return r.group == group; });
    if (!present) {
      throw InputError("empty result for group '" + group + "' under \"" + predicate.text() +
                       "\"");
    }
  }
  AuditDataset out(std::move(kept), dataset.covariates(), dataset.provenance());
  out.adopt_group_order(dataset.groups());
  return out;
}

}  // namespace fairaudit

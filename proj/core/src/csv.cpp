#include "csv.hpp"

#include <charconv>
#include <cmath>

#include "fairaudit/error.hpp"

namespace fairaudit::detail {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool CsvReader::read_row(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (first_) {
      first_ = false;
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) break;
  }
  record_line_ = line_;

  std::string field;
  bool quoted = false;      // inside a quoted section
  bool was_quoted = false;  // current field contained a quoted section
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (!quoted) break;
      // Quoted field spans a line break.
      std::string next;
      if (!std::getline(in_, next)) {
        throw InputError("unterminated quoted field starting on line " +
                         std::to_string(record_line_));
      }
      ++line_;
      if (!next.empty() && next.back() == '\r') next.pop_back();
      field.push_back('\n');
      line = std::move(next);
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return true;
}

}  // namespace fairaudit::detail

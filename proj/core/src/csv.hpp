#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairaudit::detail {

/// Minimal RFC 4180 reader: comma separated, double-quote escaping, CRLF or
/// LF line endings, optional UTF-8 BOM on the first line. Unquoted fields
/// are trimmed of surrounding spaces and tabs.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Blank lines are skipped. Throws InputError on an unterminated quote.
  bool read_row(std::vector<std::string>& fields);

  /// 1-based line number where the most recently read record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

/// Parses a finite double from the whole of `text` (after trimming).
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace fairaudit::detail

#include "fairaudit/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "csv.hpp"
#include "fairaudit/error.hpp"

namespace fairaudit {
namespace {

enum class TokenKind { kIdentifier, kNumber, kString, kOperator, kAnd, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  std::size_t offset = 0;
};

bool is_identifier_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void syntax_error(std::string_view text, std::size_t offset,
                               const std::string& what) {
  throw InputError("unparseable condition \"" + std::string(text) + "\" at offset " +
                   std::to_string(offset) + ": " + what);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_identifier_start(c)) {
      while (i < text.size() && is_identifier_char(text[i])) ++i;
      std::string word(text.substr(start, i - start));
      const bool is_and = lower(word) == "and";
      tokens.push_back({is_and ? TokenKind::kAnd : TokenKind::kIdentifier, std::move(word), start});
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      ++i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
              ((text[i] == '-' || text[i] == '+') &&
               (text[i - 1] == 'e' || text[i - 1] == 'E')))) {
        ++i;
      }
      tokens.push_back({TokenKind::kNumber, std::string(text.substr(start, i - start)), start});
    } else if (c == '"' || c == '\'') {
      const char quote = c;
      ++i;
      std::string value;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          value.push_back(text[i + 1]);
          i += 2;
        } else if (text[i] == quote) {
          ++i;
          closed = true;
          break;
        } else {
          value.push_back(text[i++]);
        }
      }
      if (!closed) syntax_error(text, start, "unterminated string literal");
      tokens.push_back({TokenKind::kString, std::move(value), start});
    } else if (c == '&') {
      if (i + 1 < text.size() && text[i + 1] == '&') {
        tokens.push_back({TokenKind::kAnd, "&&", start});
        i += 2;
      } else {
        syntax_error(text, start, "expected '&&'");
      }
    } else if (c == '>' || c == '<' || c == '=' || c == '!') {
      ++i;
      if (i < text.size() && text[i] == '=') ++i;
      std::string op(text.substr(start, i - start));
      if (op == "=" || op == "!") syntax_error(text, start, "unknown operator '" + op + "'");
      tokens.push_back({TokenKind::kOperator, std::move(op), start});
    } else {
      syntax_error(text, start, std::string("unexpected character '") + c + "'");
    }
  }
  tokens.push_back({TokenKind::kEnd, {}, text.size()});
  return tokens;
}

Comparator to_comparator(const std::string& op) {
  if (op == ">") return Comparator::kGreater;
  if (op == ">=") return Comparator::kGreaterEqual;
  if (op == "<") return Comparator::kLess;
  if (op == "<=") return Comparator::kLessEqual;
  if (op == "==") return Comparator::kEqual;
  return Comparator::kNotEqual;
}

template <typename T>
bool apply(Comparator op, const T& lhs, const T& rhs) {
  switch (op) {
    case Comparator::kGreater: return lhs > rhs;
    case Comparator::kGreaterEqual: return lhs >= rhs;
    case Comparator::kLess: return lhs < rhs;
    case Comparator::kLessEqual: return lhs <= rhs;
    case Comparator::kEqual: return lhs == rhs;
    case Comparator::kNotEqual: return lhs != rhs;
  }
  return false;
}

std::optional<std::size_t> find_column(std::span<const CovariateColumn> columns,
                                       std::string_view name) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

}  // namespace

std::string_view comparator_symbol(Comparator op) {
  switch (op) {
    case Comparator::kGreater: return ">";
    case Comparator::kGreaterEqual: return ">=";
    case Comparator::kLess: return "<";
    case Comparator::kLessEqual: return "<=";
    case Comparator::kEqual: return "==";
    case Comparator::kNotEqual: return "!=";
  }
  return "?";
}

ConditionPredicate ConditionPredicate::parse(std::string_view text) {
  const auto tokens = tokenize(text);
  ConditionPredicate predicate;
  predicate.text_ = std::string(detail::trim(text));

  std::size_t pos = 0;
  if (tokens[pos].kind == TokenKind::kEnd) syntax_error(text, 0, "empty expression");
  while (true) {
    const Token& name = tokens[pos];
    if (name.kind != TokenKind::kIdentifier) {
      syntax_error(text, name.offset, "expected covariate name");
    }
    const Token& op = tokens[pos + 1];
    if (op.kind != TokenKind::kOperator) syntax_error(text, op.offset, "expected comparator");
    const Token& literal = tokens[pos + 2];
    Clause clause{name.text, to_comparator(op.text), 0.0};
    if (literal.kind == TokenKind::kNumber) {
      const auto value = detail::parse_double(literal.text);
      if (!value) syntax_error(text, literal.offset, "bad number '" + literal.text + "'");
      clause.literal = *value;
    } else if (literal.kind == TokenKind::kString) {
      clause.literal = literal.text;
    } else {
      syntax_error(text, literal.offset, "expected number or quoted string");
    }
    predicate.clauses_.push_back(std::move(clause));
    pos += 3;
    if (tokens[pos].kind == TokenKind::kEnd) break;
    if (tokens[pos].kind != TokenKind::kAnd) syntax_error(text, tokens[pos].offset, "expected AND");
    ++pos;
  }
  return predicate;
}

void ConditionPredicate::validate(std::span<const CovariateColumn> columns) const {
  for (const auto& clause : clauses_) {
    const auto index = find_column(columns, clause.covariate);
    if (!index) throw InputError("unknown covariate '" + clause.covariate + "' in condition");
    const bool numeric_column = columns[*index].kind == CovariateKind::kNumeric;
    const bool numeric_literal = std::holds_alternative<double>(clause.literal);
    if (numeric_column != numeric_literal) {
      throw InputError("type mismatch in condition: covariate '" + clause.covariate + "' is " +
                       (numeric_column ? "numeric" : "categorical"));
    }
    if (!numeric_column && clause.op != Comparator::kEqual && clause.op != Comparator::kNotEqual) {
      throw InputError("categorical covariate '" + clause.covariate +
                       "' supports only == and !=");
    }
  }
}

bool ConditionPredicate::evaluate(const Record& record,
                                  std::span<const CovariateColumn> columns) const {
  for (const auto& clause : clauses_) {
    const auto index = find_column(columns, clause.covariate);
    if (!index || *index >= record.covariates.size()) {
      throw InputError("unknown covariate '" + clause.covariate + "' in condition");
    }
    const CovariateValue& cell = record.covariates[*index];
    bool ok = false;
    if (const auto* number = std::get_if<double>(&cell)) {
      const auto* rhs = std::get_if<double>(&clause.literal);
      if (!rhs) throw InputError("type mismatch in condition on '" + clause.covariate + "'");
      ok = apply(clause.op, *number, *rhs);
    } else if (const auto* label = std::get_if<std::string>(&cell)) {
      const auto* rhs = std::get_if<std::string>(&clause.literal);
      if (!rhs) throw InputError("type mismatch in condition on '" + clause.covariate + "'");
      ok = apply(clause.op, *label, *rhs);
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace fairaudit

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/error.hpp"
#include "nckg/term.hpp"

namespace nckg {

/// Syntax error with a 1-based position. `snippet` is the offending source line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message, std::string snippet);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::string& snippet() const { return snippet_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::string snippet_;
};

/// A prefixed name whose prefix was never declared.
class UnknownPrefix : public ParseError {
 public:
  using ParseError::ParseError;
};

using PrefixMap = std::map<std::string, std::string>;

struct Document {
  PrefixMap prefixes;
  std::vector<Triple> triples;
};

struct ParseOptions {
  /// Rewrite ckg:hasRiskLabel to ckg:hasRiskCategory everywhere.
  bool normalize_risk_label = false;
};

Document parse(std::string_view text, const ParseOptions& options = {});

/// Prefix block (sorted), then one `s p o .` line per triple in document order.
std::string serialize(const Document& doc);

/// Compact Turtle-star form of a term, using the longest matching prefix.
std::string term_to_string(const Term& term, const PrefixMap& prefixes);
std::string triple_to_string(const Triple& triple, const PrefixMap& prefixes);

/// True when `local` can be written after `prefix:` and read back unchanged.
bool is_valid_local_name(std::string_view local);

}  // namespace nckg

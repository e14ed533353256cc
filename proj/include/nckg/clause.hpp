#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/error.hpp"

namespace nckg {

enum class ClauseSource { FIDIC, NEC, Other };

std::string_view to_string(ClauseSource s);
/// "FIDIC", "NEC" or "Other" (case-insensitive); unknown names map to Other.
ClauseSource parse_clause_source(std::string_view s);

struct Clause {
  std::string id;
  ClauseSource source = ClauseSource::Other;
  std::string section;
  std::string text;

  friend bool operator==(const Clause&, const Clause&) = default;
};

class ClauseFormatError : public Error {
 public:
  using Error::Error;
};

/// Parses one `{"id","source","section","text"}` JSON object.
Clause clause_from_json(std::string_view line);
std::string clause_to_json(const Clause& c);

struct ClauseLine {
  std::size_t line = 0;
  std::optional<Clause> clause;
  std::string error;  // set when clause is empty
};

/// Reads a JSONL corpus line by line; bad lines are reported, not thrown.
std::vector<ClauseLine> read_clause_lines(std::string_view text);

/// Strict reader: throws ClauseFormatError naming the first bad line or duplicate id.
std::vector<Clause> read_clauses(std::string_view text);

}  // namespace nckg

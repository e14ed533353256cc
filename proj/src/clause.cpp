#include "nckg/clause.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"

namespace nckg {

std::string_view to_string(ClauseSource s) {
  switch (s) {
    case ClauseSource::FIDIC:
      return "FIDIC";
    case ClauseSource::NEC:
      return "NEC";
    case ClauseSource::Other:
      return "Other";
  }
  return "Other";
}

ClauseSource parse_clause_source(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "FIDIC") return ClauseSource::FIDIC;
  if (up == "NEC") return ClauseSource::NEC;
  return ClauseSource::Other;
}

Clause clause_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ClauseFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ClauseFormatError("clause record must be a JSON object");
  auto field = [&j](const char* name, bool required) -> std::string {
    if (!j.contains(name)) {
      if (required) throw ClauseFormatError(std::string("missing field '") + name + "'");
      return {};
    }
    if (!j[name].is_string()) throw ClauseFormatError(std::string("field '") + name + "' must be a string");
    return j[name].get<std::string>();
  };
  Clause c;
  c.id = field("id", true);
  c.source = parse_clause_source(field("source", false));
  c.section = field("section", false);
  c.text = field("text", true);
  if (c.id.empty()) throw ClauseFormatError("clause id is empty");
  if (c.text.empty()) throw ClauseFormatError("clause " + c.id + " has empty text");
  return c;
}

std::string clause_to_json(const Clause& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["source"] = to_string(c.source);
  j["section"] = c.section;
  j["text"] = c.text;
  return j.dump();
}

std::vector<ClauseLine> read_clause_lines(std::string_view text) {
  std::vector<ClauseLine> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
      if (end == text.size()) break;
      continue;
    }
    ClauseLine cl;
    cl.line = line_no;
    try {
      auto c = clause_from_json(line);
      if (!ids.insert(c.id).second) throw ClauseFormatError("duplicate clause id " + c.id);
      cl.clause = std::move(c);
    } catch (const ClauseFormatError& e) {
      cl.error = e.what();
    }
    out.push_back(std::move(cl));
    if (end == text.size()) break;
  }
  return out;
}

std::vector<Clause> read_clauses(std::string_view text) {
  std::vector<Clause> out;
  for (auto& cl : read_clause_lines(text)) {
    if (!cl.clause) throw ClauseFormatError("line " + std::to_string(cl.line) + ": " + cl.error);
    out.push_back(std::move(*cl.clause));
  }
  return out;
}

}  // namespace nckg

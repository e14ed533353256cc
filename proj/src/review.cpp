#include "nckg/review.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "nckg/query.hpp"
#include "nckg/vocab.hpp"

namespace nckg {

using ojson = nlohmann::ordered_json;

VerdictParseFailure::VerdictParseFailure(const std::string& message, std::string raw_response)
    : Error(message), raw_(std::move(raw_response)) {}

std::string_view to_string(ReviewMode m) {
  switch (m) {
    case ReviewMode::NCKG:
      return "nckg";
    case ReviewMode::VectorBaseline:
      return "vector";
    case ReviewMode::LLMOnly:
      return "llm-only";
  }
  return "?";
}

std::optional<ReviewMode> parse_review_mode(std::string_view s) {
  for (auto m : {ReviewMode::NCKG, ReviewMode::VectorBaseline, ReviewMode::LLMOnly}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
  return std::string(s);
}

std::size_t word_count(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

}  // namespace

// ---- retrieval ----

std::string RetrievalBundle::triples_text(const PrefixMap& prefixes) const {
  std::string out;
  for (const auto& t : retrieved_triples) {
    out += triple_to_string(t, prefixes);
    out += " .\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string RetrievalBundle::categories_text() const {
  std::string out;
  for (auto c : retrieved_risk_categories) {
    if (!out.empty()) out += ", ";
    out += to_string(c);
  }
  return out;
}

std::vector<Triple> context_triples(const GraphStore& store, const Term& anchor) {
  const auto tmpl = is_quoted(anchor) ? QueryTemplate::EventContext : QueryTemplate::EntityContext;
  const auto table = evaluate(store, bind_template(tmpl, anchor));
  std::vector<Triple> out;
  for (const auto& row : table.rows) {
    std::optional<Term> s, p, o;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == "s") s = row[i];
      if (table.header[i] == "p") p = row[i];
      if (table.header[i] == "o") o = row[i];
    }
    if (!p || !is_iri(*p)) continue;
    Triple t{s ? *s : anchor, std::get<Iri>(*p), o ? *o : anchor};
    out.push_back(std::move(t));
  }
  return out;
}

std::set<RiskCategory> query_risk_categories(const GraphStore& store, const Term& event) {
  std::set<RiskCategory> out;
  const auto table = evaluate(store, bind_template(QueryTemplate::RiskCategory, event));
  for (const auto& row : table.rows) {
    for (const auto& cell : row) {
      if (!cell) continue;
      if (auto c = risk_category_of(*cell)) out.insert(*c);
    }
  }
  return out;
}

std::vector<Term> events_of(const Triple& t) {
  std::vector<Term> out;
  for (const Term* side : {&t.subject, &t.object}) {
    if (const auto* q = std::get_if<QuotedTriple>(side)) {
      out.push_back(*side);
      auto inner = events_of(q->inner());
      out.insert(out.end(), inner.begin(), inner.end());
    }
  }
  return out;
}

RetrievalBundle retrieve(const Clause& clause, const GraphStore& store, const LexicalIndex& index,
                         const OntologyModel& onto, Gateway& gateway, const RetrieveOptions& opts) {
  (void)onto;
  RetrievalBundle b;
  b.clause_id = clause.id;
  b.extracted_terms = parse_term_list(gateway.ask(TemplateId::TERM_EXTRACT, {{"clause", clause.text}}));

  std::vector<Term> anchors;
  std::unordered_set<std::string> anchor_seen;
  for (const auto& term : b.extracted_terms) {
    b.entity_matches.push_back(index.top_k(term, opts.k, DocKind::Entity));
    b.event_matches.push_back(index.top_k(term, opts.k, DocKind::Event));
    for (const auto* list : {&b.entity_matches.back(), &b.event_matches.back()}) {
      for (const auto& m : *list) {
        const auto& doc = index.docs()[m.doc];
        if (doc.term && anchor_seen.insert(m.id).second) anchors.push_back(*doc.term);
      }
    }
  }
  if (anchors.empty()) {
    throw EmptyRetrieval("clause " + clause.id + ": no entity or event matches the extracted terms");
  }

  std::unordered_set<std::string> seen;
  for (const auto& anchor : anchors) {
    for (auto& t : context_triples(store, anchor)) {
      if (seen.insert(canonical(t)).second) b.retrieved_triples.push_back(std::move(t));
    }
  }

  std::unordered_set<std::string> queried;
  for (const auto& t : b.retrieved_triples) {
    for (const auto& ev : events_of(t)) {
      if (!queried.insert(canonical(ev)).second) continue;
      for (auto c : query_risk_categories(store, ev)) b.retrieved_risk_categories.insert(c);
    }
  }
  return b;
}

// ---- verdict parsing ----

std::string category_name(const Assessment& a) {
  return a.category ? std::string(to_string(*a.category)) : a.label;
}

namespace {

const std::regex& assessment_re() {
  static const std::regex re(
      R"(\[?\s*([A-Za-z][A-Za-z '/&]*?)\s*\]?\s*(?:--|-|)" "\u2013|\u2014" R"()\s*\[?\s*(no\s*risks?|unbalanced\s*obligations?|ambiguit(?:y|ies)|ambiguous)\b\s*\]?)",
      std::regex::icase);
  return re;
}

// Category for a label; falls back to the longest known word suffix, so
// "clause is Payment" still reads as Payment.
std::optional<RiskCategory> match_category(const std::string& label) {
  if (auto c = parse_risk_category(label)) return c;
  std::vector<std::string> words;
  std::istringstream in(label);
  for (std::string w; in >> w;) words.push_back(w);
  for (std::size_t start = 1; start < words.size(); ++start) {
    std::string tail;
    for (std::size_t i = start; i < words.size(); ++i) tail += (tail.empty() ? "" : " ") + words[i];
    if (auto c = parse_risk_category(tail)) return c;
  }
  return std::nullopt;
}

bool scan_line(const std::string& line, std::vector<Assessment>& out) {
  bool any = false;
  for (std::sregex_iterator it(line.begin(), line.end(), assessment_re()), end; it != end; ++it) {
    const auto type = parse_risk_type((*it)[2].str());
    if (!type) continue;
    any = true;
    Assessment a;
    a.label = trim((*it)[1].str());
    a.category = match_category(a.label);
    if (a.category) a.label = std::string(to_string(*a.category));
    a.risk_type = *type;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Assessment& b) {
      return a.category ? b.category == a.category : (!b.category && lower(b.label) == lower(a.label));
    });
    if (!dup) out.push_back(std::move(a));
  }
  return any;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != '*' && c != '`') {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

}  // namespace

ParsedVerdict parse_verdict(std::string_view text) {
  ParsedVerdict v;
  const auto lines = split_lines(text);

  std::optional<std::size_t> marker_line;
  std::size_t marker_col = 0;
  for (std::size_t i = 0; i < lines.size() && !marker_line; ++i) {
    const auto pos = lower(lines[i]).find("risk summary");
    if (pos != std::string::npos) {
      marker_line = i;
      marker_col = pos + std::string_view("risk summary").size();
    }
  }

  const std::size_t scan_end = marker_line.value_or(lines.size());
  std::optional<std::size_t> last_assessment;
  for (std::size_t i = 0; i < scan_end; ++i) {
    if (scan_line(lines[i], v.assessments)) last_assessment = i;
  }
  if (v.assessments.empty() && marker_line) {
    for (std::size_t i = *marker_line; i < lines.size(); ++i) {
      if (scan_line(lines[i], v.assessments)) last_assessment = i;
    }
    marker_line.reset();
  }
  if (v.assessments.empty()) {
    throw VerdictParseFailure("no [Risk category]-[Risk type] assessment found", std::string(text));
  }

  std::vector<std::string> summary;
  if (marker_line) {
    std::string first = lines[*marker_line].substr(marker_col);
    const auto start = first.find_first_not_of(" \t:)-.");
    summary.push_back(start == std::string::npos ? "" : first.substr(start));
    for (std::size_t i = *marker_line + 1; i < lines.size(); ++i) summary.push_back(lines[i]);
  } else {
    for (std::size_t i = *last_assessment + 1; i < lines.size(); ++i) summary.push_back(lines[i]);
  }
  std::string joined;
  for (const auto& l : summary) {
    const auto t = trim(l);
    if (t.empty()) continue;
    if (!joined.empty()) joined += '\n';
    joined += t;
  }
  v.summary = joined;
  return v;
}

// ---- review ----

ClauseCatalog::ClauseCatalog(std::vector<Clause> clauses)
    : clauses_(std::move(clauses)), index_(build_clause_index(clauses_)) {}

const Clause* ClauseCatalog::top1(std::string_view text) const {
  const auto m = index_.top_k(text, 1, DocKind::Clause);
  if (m.empty()) return nullptr;
  const auto& id = index_.docs()[m.front().doc].clause_id;
  for (const auto& c : clauses_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

namespace {

void notice(const ReviewDeps& deps, const std::string& msg) {
  if (deps.log) deps.log(msg);
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) throw ConfigError(std::string("review needs ") + what);
  return *p;
}

}  // namespace

RiskVerdict review(const Clause& clause, ReviewMode mode, const ReviewDeps& deps) {
  if (deps.gateway == nullptr) throw ConfigError("review needs a gateway");
  Gateway& gw = *deps.gateway;
  RiskVerdict v;
  v.clause_id = clause.id;
  v.mode = mode;

  if (mode == ReviewMode::NCKG) {
    const auto& store = need(deps.store, "a graph store");
    const auto& index = need(deps.index, "a lexical index");
    const auto& onto = need(deps.onto, "an ontology");
    try {
      auto bundle = retrieve(clause, store, index, onto, gw, deps.retrieve);
      PrefixMap prefixes = store.prefixes();
      if (prefixes.empty()) prefixes["ckg"] = std::string(vocab::kCkg);
      v.raw_response = gw.ask(TemplateId::REVIEW, {{"input_clause", clause.text},
                                                   {"retrieved_triple", bundle.triples_text(prefixes)},
                                                   {"retrieved_risk_category", bundle.categories_text()}});
      v.retrieval = std::move(bundle);
    } catch (const EmptyRetrieval& e) {
      notice(deps, std::string(e.what()) + "; falling back to llm-only review");
      v.mode = ReviewMode::LLMOnly;
      v.degraded = true;
    }
  } else if (mode == ReviewMode::VectorBaseline) {
    const auto& catalog = need(deps.catalog, "a clause catalog");
    std::string provision;
    if (const Clause* best = catalog.top1(clause.text)) {
      provision = best->text;
      v.standard_provision_id = best->id;
    } else {
      notice(deps, "clause " + clause.id + ": no standard provision overlaps the clause");
    }
    v.raw_response = gw.ask(TemplateId::BASELINE_VECTOR, {{"clause", clause.text}, {"standard_provision", provision}});
  }
  if (v.mode == ReviewMode::LLMOnly) {
    v.raw_response = gw.ask(TemplateId::BASELINE_LLM_ONLY, {{"clause", clause.text}});
  }

  auto parsed = parse_verdict(v.raw_response);
  v.assessments = std::move(parsed.assessments);
  v.summary = std::move(parsed.summary);
  if (word_count(v.summary) > 100) {
    notice(deps, "clause " + clause.id + ": summary has " + std::to_string(word_count(v.summary)) +
                     " words, over the requested 100");
  }
  return v;
}

std::string verdict_to_json(const RiskVerdict& v) {
  ojson j;
  j["clause_id"] = v.clause_id;
  j["mode"] = std::string(to_string(v.mode));
  j["assessments"] = ojson::array();
  for (const auto& a : v.assessments) {
    ojson e;
    e["category"] = category_name(a);
    e["risk_type"] = std::string(to_string(a.risk_type));
    j["assessments"].push_back(std::move(e));
  }
  j["summary"] = v.summary;
  j["raw_response"] = v.raw_response;
  return j.dump();
}

RiskVerdict verdict_from_json(std::string_view line) {
  RiskVerdict v;
  try {
    const auto j = ojson::parse(line);
    v.clause_id = j.at("clause_id").get<std::string>();
    const auto mode = parse_review_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error("unknown review mode " + j.at("mode").get<std::string>());
    v.mode = *mode;
    for (const auto& e : j.at("assessments")) {
      Assessment a;
      a.label = e.at("category").get<std::string>();
      a.category = parse_risk_category(a.label);
      const auto type = parse_risk_type(e.at("risk_type").get<std::string>());
      if (!type) throw Error("unknown risk type " + e.at("risk_type").get<std::string>());
      a.risk_type = *type;
      v.assessments.push_back(std::move(a));
    }
    v.summary = j.value("summary", "");
    v.raw_response = j.value("raw_response", "");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad verdict record: ") + e.what());
  }
  return v;
}

}  // namespace nckg

#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/clause.hpp"
#include "nckg/gateway.hpp"
#include "nckg/graph_store.hpp"
#include "nckg/lexical_index.hpp"
#include "nckg/ontology.hpp"
#include "nckg/turtle.hpp"

namespace nckg {

class EmptyRetrieval : public Error {
 public:
  using Error::Error;
};

class VerdictParseFailure : public Error {
 public:
  VerdictParseFailure(const std::string& message, std::string raw_response);
  const std::string& raw_response() const { return raw_; }

 private:
  std::string raw_;
};

enum class ReviewMode { NCKG, VectorBaseline, LLMOnly };

/// "nckg", "vector", "llm-only".
std::string_view to_string(ReviewMode m);
std::optional<ReviewMode> parse_review_mode(std::string_view s);

struct RetrievalBundle {
  std::string clause_id;
  std::vector<std::string> extracted_terms;
  /// Per extracted term.
  std::vector<std::vector<Match>> entity_matches;
  std::vector<std::vector<Match>> event_matches;
  /// Deduplicated, in retrieval order.
  std::vector<Triple> retrieved_triples;
  std::set<RiskCategory> retrieved_risk_categories;

  /// One Turtle-star statement per line.
  std::string triples_text(const PrefixMap& prefixes) const;
  /// Category names joined by ", ", in category order.
  std::string categories_text() const;
};

struct RetrieveOptions {
  std::size_t k = 2;
};

/// Terms -> top-k entity and event anchors -> context queries -> risk queries.
/// Throws EmptyRetrieval when no anchor scores above 0.
RetrievalBundle retrieve(const Clause& clause, const GraphStore& store, const LexicalIndex& index,
                         const OntologyModel& onto, Gateway& gateway, const RetrieveOptions& opts = {});

/// Triples of an anchor's context, rebuilt from EntityContext/EventContext rows.
std::vector<Triple> context_triples(const GraphStore& store, const Term& anchor);

/// Categories from the RiskCategory query on `event`.
std::set<RiskCategory> query_risk_categories(const GraphStore& store, const Term& event);

/// Quoted triples inside `t` (its subject and object, recursively).
std::vector<Term> events_of(const Triple& t);

struct Assessment {
  std::optional<RiskCategory> category;  // empty for labels outside the six categories
  std::string label;                     // label as written by the model
  RiskType risk_type = RiskType::NoRisk;

  friend bool operator==(const Assessment&, const Assessment&) = default;
};

std::string category_name(const Assessment& a);

struct ParsedVerdict {
  std::vector<Assessment> assessments;
  std::string summary;
};

/// Reads `<label> - <risk type>` lines (single or double dash, optional
/// brackets). Throws VerdictParseFailure when none are found.
ParsedVerdict parse_verdict(std::string_view text);

struct RiskVerdict {
  std::string clause_id;
  std::vector<Assessment> assessments;
  std::string summary;
  ReviewMode mode = ReviewMode::LLMOnly;
  std::string raw_response;
  /// Set when an NCKG review fell back to LLMOnly.
  bool degraded = false;
  std::optional<RetrievalBundle> retrieval;
  std::string standard_provision_id;
};

/// Whole-clause TF-IDF catalog for the vector baseline.
class ClauseCatalog {
 public:
  explicit ClauseCatalog(std::vector<Clause> clauses);
  const std::vector<Clause>& clauses() const { return clauses_; }
  const LexicalIndex& index() const { return index_; }
  /// Highest-cosine clause, or nullptr when nothing overlaps.
  const Clause* top1(std::string_view text) const;

 private:
  std::vector<Clause> clauses_;
  LexicalIndex index_;
};

struct ReviewDeps {
  Gateway* gateway = nullptr;
  const GraphStore* store = nullptr;
  const LexicalIndex* index = nullptr;
  const OntologyModel* onto = nullptr;
  const ClauseCatalog* catalog = nullptr;
  RetrieveOptions retrieve;
  /// Notices such as degradation or an over-long summary.
  std::function<void(const std::string&)> log;
};

/// Throws VerdictParseFailure (raw response kept) when the answer has no assessments.
RiskVerdict review(const Clause& clause, ReviewMode mode, const ReviewDeps& deps);

/// `{clause_id, mode, assessments:[{category, risk_type}], summary, raw_response}` on one line.
std::string verdict_to_json(const RiskVerdict& v);
RiskVerdict verdict_from_json(std::string_view line);

}  // namespace nckg

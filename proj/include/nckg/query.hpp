#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/graph_store.hpp"
#include "nckg/turtle.hpp"

namespace nckg {

class AnchorKindMismatch : public Error {
 public:
  using Error::Error;
};

/// SELECT query over a union of basic graph patterns.
struct Query {
  PrefixMap prefixes;
  std::vector<std::string> projection;  // empty when select_all
  bool select_all = false;
  /// UNION alternatives; each is a conjunction of patterns.
  std::vector<std::vector<TriplePattern>> alternatives;
};

struct SolutionTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<Term>>> rows;
};

/// PREFIX*, SELECT (vars | *), WHERE { ... } with nested groups and UNION.
Query parse_query(std::string_view text);

SolutionTable evaluate(const GraphStore& store, const Query& q);

enum class QueryTemplate { EntityContext, EventContext, RiskCategory };

/// EntityContext / EventContext: `{ ?s ?p A } UNION { A ?p ?o }` projecting ?s ?p ?o.
/// RiskCategory: the categories attached to event A via hasRiskCategory, or its
/// hasRiskLabel alias, projecting ?r.
Query bind_template(QueryTemplate id, const Term& anchor);

/// Renders a query back to SPARQL text using its prefix map.
std::string to_sparql(const Query& q);

/// Header row of `?var` names, then tab-separated compact terms; unbound cells empty.
std::string to_tsv(const SolutionTable& table, const PrefixMap& prefixes);

/// One JSON object per row (newline-delimited), keyed by variable name.
std::string to_json_rows(const SolutionTable& table, const PrefixMap& prefixes);

}  // namespace nckg

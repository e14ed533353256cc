#pragma once

// Independent reference implementations used only by tests. They share data
// types with the library but none of its matching, scoring or counting code.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nckg/eval.hpp"
#include "nckg/graph_store.hpp"

namespace nckg::oracle {

// ---- pattern matching -------------------------------------------------------

/// Structural unification written from scratch; extends `b` on success.
bool matches(const TriplePattern& p, const Triple& t, Bindings& b);

/// Canonical forms of every triple in `all` that unifies with `p`.
std::set<std::string> scan(const std::vector<Triple>& all, const TriplePattern& p);

/// Distinct binding rows (projected onto `vars`, canonical strings, "" when
/// unbound) for every triple in `all` unifying with `p`.
std::set<std::vector<std::string>> scan_rows(const std::vector<Triple>& all, const TriplePattern& p,
                                             const std::vector<std::string>& vars);

// ---- TF-IDF -----------------------------------------------------------------

/// Brute-force tf * ln(N / df) over explicit token lists.
class TfIdf {
 public:
  explicit TfIdf(std::vector<std::vector<std::string>> docs);

  double weight(std::size_t doc, const std::string& token) const;
  /// Cosine between the query (split on spaces) and doc `d`.
  double score(std::string_view query, std::size_t doc) const;

 private:
  std::map<std::string, double> query_weights(std::string_view query) const;

  std::vector<std::vector<std::string>> docs_;
  std::map<std::string, std::size_t> df_;
};

double dense_cosine(const std::vector<double>& a, const std::vector<double>& b);

// ---- ontology ---------------------------------------------------------------

/// Breadth-first upward closure over (child, parent) edges, including `start`.
std::set<std::string> ancestors_bfs(const std::vector<std::pair<std::string, std::string>>& edges,
                                    const std::string& start);

// ---- evaluation -------------------------------------------------------------

struct Cell {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Per-category counts by enumerating every (clause, category) pair.
std::map<RiskCategory, Cell> confusion(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred);
/// F1 from counts, 0 on any zero denominator.
double f1(const Cell& c);
double macro_f1(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred);

// ---- store recount ----------------------------------------------------------

struct Recount {
  std::size_t triples = 0;
  std::size_t nested = 0;
  std::size_t entities = 0;
  std::size_t events = 0;
};

/// Counts a serialized store by reading its statement lines as whitespace
/// tokens; assumes one statement per line as the serializer writes them.
Recount recount(std::string_view ttls);

}  // namespace nckg::oracle

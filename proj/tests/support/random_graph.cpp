#include "random_graph.hpp"

#include <array>
#include <string>

namespace nckg::testing {

namespace {

constexpr const char* kCkg = "http://example.org/NCKG/";
constexpr const char* kXsd = "http://www.w3.org/2001/XMLSchema#";

// Some of these cannot be written as prefixed names and must round-trip as <...>.
constexpr std::array<const char*, 12> kEntities = {
    "Contractor", "Employer",  "advancePayment", "Programme", "site",  "e5",
    "e6",         "trailing.", "a-b_c",          "x1.y2",     "Ünïcode", "42days"};
constexpr std::array<const char*, 5> kOtherIris = {"http://other.org/ns#thing", "urn:example:a",
                                                   "http://example.org/NCKG/sub/path",
                                                   "http://example.org/NCKGX", "file:///tmp/x"};
constexpr std::array<const char*, 6> kPredicates = {"hasCondition", "exception", "submit",
                                                    "make",         "within90DaysOf", "hasProperty"};
constexpr std::array<const char*, 9> kPieces = {"plain", " ", "\"quoted\"", "back\\slash", "new\nline",
                                                "tab\t", "café", "<<not a triple>>", "# not a comment"};
constexpr std::array<const char*, 4> kVars = {"x", "y", "z", "w"};

}  // namespace

Iri RandomGraph::iri() {
  if (coin(0.15)) return Iri{kOtherIris[uniform(0, kOtherIris.size() - 1)]};
  return Iri{std::string(kCkg) + kEntities[uniform(0, kEntities.size() - 1)]};
}

Iri RandomGraph::predicate() {
  if (coin(0.1)) return Iri{"http://www.w3.org/1999/02/22-rdf-syntax-ns#type"};
  return Iri{std::string(kCkg) + kPredicates[uniform(0, kPredicates.size() - 1)]};
}

Literal RandomGraph::literal() {
  Literal l;
  const auto n = uniform(0, 3);
  for (std::size_t i = 0; i < n; ++i) l.lexical += kPieces[uniform(0, kPieces.size() - 1)];
  switch (uniform(0, 3)) {
    case 1:
      l.lang = coin() ? "en" : "en-GB";
      break;
    case 2:
      l.datatype = std::string(kXsd) + (coin() ? "string" : "integer");
      break;
    case 3:
      l.datatype = "http://other.org/dt";
      break;
    default:
      break;
  }
  return l;
}

Term RandomGraph::subject(std::size_t depth) {
  if (depth > 0 && coin(0.4)) return quote(subject(depth - 1), predicate(), object(depth - 1));
  return iri();
}

Term RandomGraph::object(std::size_t depth) {
  if (depth > 0 && coin(0.35)) return quote(subject(depth - 1), predicate(), object(depth - 1));
  if (coin(0.25)) return literal();
  return iri();
}

Triple RandomGraph::triple(std::size_t max_depth) {
  const auto inner = max_depth == 0 ? 0 : max_depth - 1;
  return Triple{subject(inner), predicate(), object(inner)};
}

Document RandomGraph::document(std::size_t max_triples, std::size_t max_depth) {
  Document d;
  d.prefixes = {{"ckg", kCkg},
                {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
                {"xsd", kXsd}};
  const auto n = uniform(0, max_triples);
  for (std::size_t i = 0; i < n; ++i) {
    // Repeat an earlier triple now and then to exercise set semantics.
    if (!d.triples.empty() && coin(0.05)) {
      d.triples.push_back(d.triples[uniform(0, d.triples.size() - 1)]);
    } else {
      d.triples.push_back(triple(max_depth));
    }
  }
  return d;
}

PatternTerm RandomGraph::generalize(const Term& t, int level) {
  const auto roll = uniform(0, 9);
  if (roll < 2) return PatternTerm::any();
  if (roll < 5) return PatternTerm::var(kVars[uniform(0, kVars.size() - 1)]);
  if (const auto* q = std::get_if<QuotedTriple>(&t); q != nullptr && level < 3 && roll < 8) {
    const auto& in = q->inner();
    return PatternTerm::quoted(
        TriplePattern{generalize(in.subject, level + 1), generalize(Term{in.predicate}, level + 1),
                      generalize(in.object, level + 1)});
  }
  return PatternTerm(t);
}

TriplePattern RandomGraph::pattern(const std::vector<Triple>& pool) {
  if (pool.empty() || coin(0.2)) {
    // Fresh pattern: may match nothing at all.
    const auto t = triple(3);
    return TriplePattern{generalize(t.subject, 0), generalize(Term{t.predicate}, 0), generalize(t.object, 0)};
  }
  const auto& t = pool[uniform(0, pool.size() - 1)];
  return TriplePattern{generalize(t.subject, 0), generalize(Term{t.predicate}, 0), generalize(t.object, 0)};
}

}  // namespace nckg::testing

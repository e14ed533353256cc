#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "nckg/graph_store.hpp"
#include "nckg/turtle.hpp"

namespace nckg::testing {

/// Random RDF-star content from a small, collision-prone vocabulary so that
/// patterns and queries actually hit stored triples.
class RandomGraph {
 public:
  explicit RandomGraph(std::uint32_t seed) : rng_(seed) {}

  Iri iri();
  Iri predicate();
  Literal literal();
  /// Subject of nesting level at most `depth` (never a literal).
  Term subject(std::size_t depth);
  Term object(std::size_t depth);
  /// A triple whose triple_depth() is at most `max_depth`.
  Triple triple(std::size_t max_depth = 3);

  /// Up to `max_triples` triples (duplicates possible) with ckg/rdf/xsd prefixes.
  Document document(std::size_t max_triples = 200, std::size_t max_depth = 3);

  /// A pattern built from a stored triple by replacing random positions with
  /// variables (some repeated, some anonymous), or a fresh random pattern.
  TriplePattern pattern(const std::vector<Triple>& pool);

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

 private:
  PatternTerm generalize(const Term& t, int level);

  std::mt19937 rng_;
};

}  // namespace nckg::testing

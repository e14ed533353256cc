#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "nckg/error.hpp"
#include "nckg/term.hpp"

namespace nckg {

class DepthExceeded : public Error {
 public:
  using Error::Error;
};

class LiteralSubject : public Error {
 public:
  using Error::Error;
};

/// A named variable. An empty name is an anonymous wildcard that binds nothing.
struct Variable {
  std::string name;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct TriplePattern;

/// One position of a triple pattern: a variable, a concrete term, or a nested
/// quoted-triple pattern that may itself contain variables.
class PatternTerm {
 public:
  PatternTerm() : value_(Variable{}) {}
  PatternTerm(Term term) : value_(std::move(term)) {}  // NOLINT(google-explicit-constructor)
  PatternTerm(Iri iri) : value_(Term{std::move(iri)}) {}  // NOLINT(google-explicit-constructor)
  PatternTerm(Variable var) : value_(std::move(var)) {}  // NOLINT(google-explicit-constructor)

  static PatternTerm any() { return PatternTerm(Variable{}); }
  static PatternTerm var(std::string name) { return PatternTerm(Variable{std::move(name)}); }
  static PatternTerm quoted(TriplePattern inner);

  const Variable* as_variable() const { return std::get_if<Variable>(&value_); }
  const Term* as_term() const { return std::get_if<Term>(&value_); }
  const TriplePattern* as_quoted() const;

  /// The concrete term this position denotes, if it contains no variables.
  std::optional<Term> ground() const;

 private:
  std::variant<Variable, Term, std::shared_ptr<const TriplePattern>> value_;
};

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

/// Variable name → bound term.
using Bindings = std::map<std::string, Term>;

/// Unifies a pattern with a concrete triple, extending `bindings`. Named
/// variables must bind consistently; on failure `bindings` may be partially
/// extended, so callers pass a copy.
bool unify(const TriplePattern& pattern, const Triple& triple, Bindings& bindings);
bool unify(const PatternTerm& pattern, const Term& term, Bindings& bindings);

/// Replaces bound variables by their terms, grounding nested patterns where possible.
TriplePattern substitute(const TriplePattern& pattern, const Bindings& bindings);

/// Names of all named variables in the pattern, in first-occurrence order.
std::vector<std::string> variables_of(const TriplePattern& pattern);

struct StoreStats {
  std::optional<std::size_t> clauses;
  std::size_t triples = 0;
  std::size_t nested = 0;
  std::size_t entities = 0;
  std::size_t events = 0;

  friend bool operator==(const StoreStats&, const StoreStats&) = default;
};

/// Indexed in-memory set of asserted RDF-star triples.
///
/// Terms are interned; three permutation indexes (SPO, POS, OSP) over the
/// top-level term ids answer every combination of bound positions by a prefix
/// range scan. Nested patterns are resolved by post-filtering those candidates.
/// Mutation needs exclusive access; concurrent `match` calls are safe.
class GraphStore {
 public:
  static constexpr std::size_t kDefaultMaxDepth = 8;

  explicit GraphStore(std::size_t max_depth = kDefaultMaxDepth);
  GraphStore(const GraphStore& other);
  GraphStore& operator=(const GraphStore& other);
  GraphStore(GraphStore&&) noexcept;
  GraphStore& operator=(GraphStore&&) noexcept;
  ~GraphStore();

  /// Throws LiteralSubject or DepthExceeded if `t` cannot be stored here.
  void check_insertable(const Triple& t) const;

  /// Returns true iff `t` was not already present.
  bool insert(const Triple& t);
  bool remove(const Triple& t);
  bool contains(const Triple& t) const;

  /// Stored triples unifying with `pattern`, ordered by canonical (s, p, o).
  std::vector<Triple> match(const TriplePattern& pattern) const;

  /// Upper bound on match() size using only the index range; no post-filtering.
  std::size_t estimate(const TriplePattern& pattern) const;

  /// All stored triples in canonical order.
  std::vector<Triple> triples() const;

  std::size_t size() const { return spo_.size(); }
  bool empty() const { return spo_.empty(); }
  std::size_t max_depth() const { return max_depth_; }

  StoreStats stats() const;

  std::map<std::string, std::string>& prefixes() { return prefixes_; }
  const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

  /// Number of match()/estimate() calls served; used to prove mode isolation.
  std::size_t read_count() const { return reads_->load(); }

  /// True when the three permutation indexes hold exactly the same triples.
  bool indexes_consistent() const;

 private:
  using TermId = std::uint32_t;
  using Key = std::array<TermId, 3>;

  TermId intern(const Term& t);
  std::optional<TermId> lookup(const Term& t) const;
  Triple materialize(const Key& spo) const;
  std::vector<Triple> collect(const TriplePattern& pattern) const;
  std::vector<Key> candidates(const TriplePattern& pattern, bool& impossible) const;

  std::size_t max_depth_;
  std::vector<Term> terms_;
  std::vector<std::string> canonical_;
  std::unordered_map<std::string, TermId> ids_;
  std::set<Key> spo_;
  std::set<Key> pos_;
  std::set<Key> osp_;
  std::map<std::string, std::string> prefixes_;
  std::unique_ptr<std::atomic<std::size_t>> reads_;
};

}  // namespace nckg

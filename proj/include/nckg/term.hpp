#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace nckg {

struct Iri {
  std::string value;

  friend bool operator==(const Iri&, const Iri&) = default;
  friend auto operator<=>(const Iri&, const Iri&) = default;
};

/// A plain, language-tagged or datatyped string literal. Never both tagged and typed.
struct Literal {
  std::string lexical;
  std::optional<std::string> datatype;  // expanded IRI
  std::optional<std::string> lang;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct Triple;

/// RDF-star quoted triple: a whole statement usable as a node (an "event").
///
/// Equality is structural, so two independently built quoted triples with the
/// same components compare equal.
class QuotedTriple {
 public:
  explicit QuotedTriple(Triple inner);

  const Triple& inner() const { return *inner_; }

  friend bool operator==(const QuotedTriple& a, const QuotedTriple& b);

 private:
  std::shared_ptr<const Triple> inner_;
};

using Term = std::variant<Iri, Literal, QuotedTriple>;

struct Triple {
  Term subject;
  Iri predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

enum class TripleKind { E2E, E2Evt, Evt2Evt };

std::string_view to_string(TripleKind kind);

/// E2E when no position is quoted, Evt2Evt when both are, E2Evt otherwise.
TripleKind classify_kind(const Triple& t);

inline bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }
inline bool is_literal(const Term& t) { return std::holds_alternative<Literal>(t); }
inline bool is_quoted(const Term& t) { return std::holds_alternative<QuotedTriple>(t); }

/// Nesting level of a term: 0 for Iri/Literal, 1 + inner depth for a quoted triple.
std::size_t nesting_depth(const Term& t);

/// Level of a statement: a plain triple is 1, a triple holding a plain quoted
/// triple is 2, and so on.
std::size_t triple_depth(const Triple& t);

/// True when a literal occupies a subject position anywhere in the triple.
bool has_literal_subject(const Triple& t);

/// Canonical, prefix-free serialization (`<iri>`, `"lex"@lang`, `<< s p o >>`).
/// Results and indexes are ordered lexicographically by this form.
std::string canonical(const Term& t);
std::string canonical(const Triple& t);

/// Escapes a lexical form for double-quoted output (`\"`, `\\`, `\n`, `\t`).
std::string escape_string(std::string_view s);

inline Iri iri(std::string value) { return Iri{std::move(value)}; }
Term quote(Term subject, Iri predicate, Term object);

struct TermHash {
  std::size_t operator()(const Term& t) const;
};

}  // namespace nckg

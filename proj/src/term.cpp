#include "nckg/term.hpp"

#include <algorithm>
#include <functional>

namespace nckg {

QuotedTriple::QuotedTriple(Triple inner)
    : inner_(std::make_shared<const Triple>(std::move(inner))) {}

bool operator==(const QuotedTriple& a, const QuotedTriple& b) {
  return a.inner_ == b.inner_ || *a.inner_ == *b.inner_;
}

std::string_view to_string(TripleKind kind) {
  switch (kind) {
    case TripleKind::E2E:
      return "E2E";
    case TripleKind::E2Evt:
      return "E2Evt";
    case TripleKind::Evt2Evt:
      return "Evt2Evt";
  }
  return "?";
}

TripleKind classify_kind(const Triple& t) {
  const bool s = is_quoted(t.subject);
  const bool o = is_quoted(t.object);
  if (s && o) return TripleKind::Evt2Evt;
  if (s || o) return TripleKind::E2Evt;
  return TripleKind::E2E;
}

std::size_t nesting_depth(const Term& t) {
  if (const auto* q = std::get_if<QuotedTriple>(&t)) {
    return 1 + std::max(nesting_depth(q->inner().subject), nesting_depth(q->inner().object));
  }
  return 0;
}

std::size_t triple_depth(const Triple& t) {
  return 1 + std::max(nesting_depth(t.subject), nesting_depth(t.object));
}

bool has_literal_subject(const Triple& t) {
  if (is_literal(t.subject)) return true;
  if (const auto* q = std::get_if<QuotedTriple>(&t.subject)) {
    if (has_literal_subject(q->inner())) return true;
  }
  if (const auto* q = std::get_if<QuotedTriple>(&t.object)) {
    if (has_literal_subject(q->inner())) return true;
  }
  return false;
}

std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  return out;
}

namespace {

void append_canonical(const Term& t, std::string& out);

void append_canonical(const Triple& t, std::string& out) {
  append_canonical(t.subject, out);
  out += ' ';
  out += '<';
  out += t.predicate.value;
  out += '>';
  out += ' ';
  append_canonical(t.object, out);
}

void append_canonical(const Term& t, std::string& out) {
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Iri>) {
          out += '<';
          out += v.value;
          out += '>';
        } else if constexpr (std::is_same_v<T, Literal>) {
          out += '"';
          out += escape_string(v.lexical);
          out += '"';
          if (v.lang) {
            out += '@';
            out += *v.lang;
          } else if (v.datatype) {
            out += "^^<";
            out += *v.datatype;
            out += '>';
          }
        } else {
          out += "<< ";
          append_canonical(v.inner(), out);
          out += " >>";
        }
      },
      t);
}

}  // namespace

std::string canonical(const Term& t) {
  std::string out;
  append_canonical(t, out);
  return out;
}

std::string canonical(const Triple& t) {
  std::string out;
  append_canonical(t, out);
  return out;
}

Term quote(Term subject, Iri predicate, Term object) {
  return QuotedTriple(Triple{std::move(subject), std::move(predicate), std::move(object)});
}

std::size_t TermHash::operator()(const Term& t) const {
  return std::hash<std::string>{}(canonical(t));
}

}  // namespace nckg

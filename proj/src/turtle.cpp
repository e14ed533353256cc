#include "nckg/turtle.hpp"

#include <cctype>

#include "lexer.hpp"
#include "nckg/vocab.hpp"

namespace nckg {

ParseError::ParseError(std::size_t line, std::size_t column, std::string message, std::string snippet)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(std::move(message)),
      snippet_(std::move(snippet)) {}

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

class TurtleParser {
 public:
  TurtleParser(std::string_view text, const ParseOptions& opts) : lex_(text), opts_(opts) {}

  Document run() {
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::End) break;
      if (t.kind == Tok::AtWord) {
        auto at = lex_.next();
        if (at.text != "prefix") lex_.fail(at, "unsupported directive '@" + at.text + "'");
        prefix_decl();
        expect(Tok::Dot, "'.' after @prefix declaration");
      } else if (t.kind == Tok::Word && iequals(t.text, "PREFIX")) {
        lex_.next();
        prefix_decl();
      } else if (t.kind == Tok::Word && iequals(t.text, "BASE")) {
        lex_.fail(t, "BASE is not supported");
      } else {
        statement();
      }
    }
    return std::move(doc_);
  }

 private:
  Token expect(Tok kind, const char* what) {
    auto t = lex_.next();
    if (t.kind != kind) lex_.fail(t, std::string("expected ") + what);
    return t;
  }

  void prefix_decl() {
    auto name = lex_.next();
    if (name.kind != Tok::PName || name.text.back() != ':' ||
        name.text.find(':') != name.text.size() - 1) {
      lex_.fail(name, "expected a prefix name ending in ':'");
    }
    auto ns = expect(Tok::IriRef, "namespace IRI");
    doc_.prefixes[name.text.substr(0, name.text.size() - 1)] = ns.text;
  }

  Iri predicate() {
    auto t = lex_.next();
    if (t.kind == Tok::Word && t.text == "a") return vocab::rdf_type();
    Iri p = iri_from(t, "a predicate IRI");
    if (opts_.normalize_risk_label && p == vocab::has_risk_label()) p = vocab::has_risk_category();
    return p;
  }

  Iri iri_from(const Token& t, const char* what) {
    if (t.kind == Tok::IriRef) return Iri{t.text};
    if (t.kind == Tok::PName) return detail::resolve_pname(lex_, t, doc_.prefixes);
    reject(t, what);
  }

  [[noreturn]] void reject(const Token& t, const char* what) {
    if (t.kind == Tok::Anon) lex_.fail(t, "blank nodes are not supported");
    if (t.kind == Tok::Word && (t.text == "true" || t.text == "false")) {
      lex_.fail(t, "boolean literals are not supported; quote the value as a string");
    }
    lex_.fail(t, std::string("expected ") + what);
  }

  Term subject() {
    auto t = lex_.next();
    if (t.kind == Tok::QOpen) return quoted();
    if (t.kind == Tok::String) lex_.fail(t, "a literal cannot be a subject");
    return iri_from(t, "a subject (IRI or quoted triple)");
  }

  Term object() {
    auto t = lex_.next();
    if (t.kind == Tok::QOpen) return quoted();
    if (t.kind == Tok::String) {
      Literal lit{t.text, std::nullopt, std::nullopt};
      const Token& nx = lex_.peek();
      if (nx.kind == Tok::AtWord) {
        lit.lang = lex_.next().text;
      } else if (nx.kind == Tok::DoubleCaret) {
        lex_.next();
        auto dt = lex_.next();
        lit.datatype = iri_from(dt, "a datatype IRI").value;
      }
      return lit;
    }
    return iri_from(t, "an object (IRI, literal or quoted triple)");
  }

  Term quoted() {
    Term s = subject();
    Iri p = predicate();
    Term o = object();
    expect(Tok::QClose, "'>>' closing the quoted triple");
    return quote(std::move(s), std::move(p), std::move(o));
  }

  void statement() {
    Term s = subject();
    for (;;) {
      Iri p = predicate();
      for (;;) {
        doc_.triples.push_back(Triple{s, p, object()});
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
      if (lex_.peek().kind != Tok::Semicolon) break;
      while (lex_.peek().kind == Tok::Semicolon) lex_.next();
      if (lex_.peek().kind == Tok::Dot) break;
    }
    expect(Tok::Dot, "'.' ending the statement");
  }

  Lexer lex_;
  ParseOptions opts_;
  Document doc_;
};

std::string compact_iri(const std::string& value, const PrefixMap& prefixes) {
  const std::string* best_prefix = nullptr;
  std::size_t best_len = 0;
  for (const auto& [prefix, ns] : prefixes) {
    if (ns.size() > best_len && value.size() >= ns.size() && value.compare(0, ns.size(), ns) == 0 &&
        is_valid_local_name(std::string_view(value).substr(ns.size()))) {
      best_prefix = &prefix;
      best_len = ns.size();
    }
  }
  if (best_prefix == nullptr) return "<" + value + ">";
  return *best_prefix + ":" + value.substr(best_len);
}

void append_term(const Term& term, const PrefixMap& prefixes, std::string& out);

void append_triple(const Triple& t, const PrefixMap& prefixes, std::string& out) {
  append_term(t.subject, prefixes, out);
  out += ' ';
  out += compact_iri(t.predicate.value, prefixes);
  out += ' ';
  append_term(t.object, prefixes, out);
}

void append_term(const Term& term, const PrefixMap& prefixes, std::string& out) {
  if (const auto* i = std::get_if<Iri>(&term)) {
    out += compact_iri(i->value, prefixes);
  } else if (const auto* l = std::get_if<Literal>(&term)) {
    out += '"';
    out += escape_string(l->lexical);
    out += '"';
    if (l->lang) {
      out += '@';
      out += *l->lang;
    } else if (l->datatype) {
      out += "^^";
      out += compact_iri(*l->datatype, prefixes);
    }
  } else {
    out += "<< ";
    append_triple(std::get<QuotedTriple>(term).inner(), prefixes, out);
    out += " >>";
  }
}

}  // namespace

Document parse(std::string_view text, const ParseOptions& options) {
  return TurtleParser(text, options).run();
}

bool is_valid_local_name(std::string_view local) {
  if (local.empty()) return false;
  const auto first = static_cast<unsigned char>(local.front());
  if (std::isalnum(first) == 0 && local.front() != '_') return false;
  if (local.back() == '.') return false;
  for (char c : local) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) == 0 && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

std::string term_to_string(const Term& term, const PrefixMap& prefixes) {
  std::string out;
  append_term(term, prefixes, out);
  return out;
}

std::string triple_to_string(const Triple& triple, const PrefixMap& prefixes) {
  std::string out;
  append_triple(triple, prefixes, out);
  return out;
}

std::string serialize(const Document& doc) {
  std::string out;
  for (const auto& [prefix, ns] : doc.prefixes) {
    out += "@prefix " + prefix + ": <" + ns + "> .\n";
  }
  if (!doc.triples.empty() && !doc.prefixes.empty()) out += '\n';
  for (const auto& t : doc.triples) {
    append_triple(t, doc.prefixes, out);
    out += " .\n";
  }
  return out;
}

}  // namespace nckg

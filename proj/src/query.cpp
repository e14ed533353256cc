#include "nckg/query.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"

#include "lexer.hpp"
#include "nckg/vocab.hpp"

namespace nckg {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

using Dnf = std::vector<std::vector<TriplePattern>>;

bool is_keyword(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Word || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  }
  return true;
}

Dnf join(const Dnf& a, const Dnf& b) {
  Dnf out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      auto conj = x;
      conj.insert(conj.end(), y.begin(), y.end());
      out.push_back(std::move(conj));
    }
  }
  return out;
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : lex_(text) {}

  Query run() {
    while (is_keyword(lex_.peek(), "PREFIX")) {
      lex_.next();
      auto name = lex_.next();
      if (name.kind != Tok::PName || name.text.find(':') != name.text.size() - 1) {
        lex_.fail(name, "expected a prefix name ending in ':'");
      }
      auto ns = expect(Tok::IriRef, "namespace IRI");
      q_.prefixes[name.text.substr(0, name.text.size() - 1)] = ns.text;
    }
    auto sel = lex_.next();
    if (!is_keyword(sel, "SELECT")) lex_.fail(sel, "expected SELECT");
    if (is_keyword(lex_.peek(), "DISTINCT")) lex_.next();  // results are always distinct
    std::vector<Token> projected;
    if (lex_.peek().kind == Tok::Star) {
      lex_.next();
      q_.select_all = true;
    } else {
      while (lex_.peek().kind == Tok::Var) projected.push_back(lex_.next());
      if (projected.empty()) lex_.fail(lex_.peek(), "expected '*' or at least one variable");
    }
    if (is_keyword(lex_.peek(), "WHERE")) lex_.next();
    expect(Tok::LBrace, "'{' opening the WHERE clause");
    q_.alternatives = group_body();
    auto end = lex_.next();
    if (end.kind != Tok::End) lex_.fail(end, "unexpected input after the query");

    std::vector<std::string> seen;
    for (const auto& alt : q_.alternatives) {
      for (const auto& p : alt) {
        for (auto& v : variables_of(p)) {
          if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
        }
      }
    }
    for (const auto& v : projected) {
      if (std::find(seen.begin(), seen.end(), v.text) == seen.end()) {
        lex_.fail(v, "projected variable ?" + v.text + " does not occur in any pattern");
      }
      if (std::find(q_.projection.begin(), q_.projection.end(), v.text) == q_.projection.end()) {
        q_.projection.push_back(v.text);
      }
    }
    return std::move(q_);
  }

 private:
  Token expect(Tok kind, const char* what) {
    auto t = lex_.next();
    if (t.kind != kind) lex_.fail(t, std::string("expected ") + what);
    return t;
  }

  // Called after '{'; consumes the matching '}'.
  Dnf group_body() {
    Dnf acc(1);
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::RBrace) {
        lex_.next();
        return acc;
      }
      if (t.kind == Tok::End) lex_.fail(t, "unterminated group, expected '}'");
      if (t.kind == Tok::Dot) {
        lex_.next();
        continue;
      }
      if (t.kind == Tok::LBrace) {
        lex_.next();
        Dnf u = group_body();
        while (is_keyword(lex_.peek(), "UNION")) {
          lex_.next();
          expect(Tok::LBrace, "'{' after UNION");
          Dnf rhs = group_body();
          u.insert(u.end(), rhs.begin(), rhs.end());
        }
        acc = join(acc, u);
        continue;
      }
      if (is_keyword(t, "UNION")) lex_.fail(t, "UNION must follow a braced group");
      if (is_keyword(t, "FILTER") || is_keyword(t, "OPTIONAL")) {
        lex_.fail(t, t.text + " is not supported");
      }
      auto block = triples_block();
      for (auto& conj : acc) conj.insert(conj.end(), block.begin(), block.end());
    }
  }

  std::vector<TriplePattern> triples_block() {
    std::vector<TriplePattern> out;
    PatternTerm s = node(true);
    for (;;) {
      PatternTerm p = verb();
      for (;;) {
        out.push_back(TriplePattern{s, p, node(false)});
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
      if (lex_.peek().kind != Tok::Semicolon) break;
      while (lex_.peek().kind == Tok::Semicolon) lex_.next();
      const auto k = lex_.peek().kind;
      if (k == Tok::Dot || k == Tok::RBrace) break;
    }
    return out;
  }

  PatternTerm verb() {
    auto t = lex_.next();
    if (t.kind == Tok::Var) return PatternTerm::var(t.text);
    if (t.kind == Tok::Anon) return PatternTerm::any();
    if (t.kind == Tok::Word && t.text == "a") return PatternTerm(Term{vocab::rdf_type()});
    return iri_from(t, "a predicate (IRI or variable)");
  }

  Iri iri_from(const Token& t, const char* what) {
    if (t.kind == Tok::IriRef) return Iri{t.text};
    if (t.kind == Tok::PName) return detail::resolve_pname(lex_, t, q_.prefixes);
    lex_.fail(t, std::string("expected ") + what);
  }

  PatternTerm node(bool subject_position) {
    auto t = lex_.next();
    if (t.kind == Tok::Var) return PatternTerm::var(t.text);
    if (t.kind == Tok::Anon) return PatternTerm::any();
    if (t.kind == Tok::QOpen) {
      PatternTerm s = node(true);
      PatternTerm p = verb();
      PatternTerm o = node(false);
      expect(Tok::QClose, "'>>' closing the quoted pattern");
      PatternTerm q = PatternTerm::quoted(TriplePattern{s, p, o});
      if (auto g = q.ground()) return PatternTerm(std::move(*g));
      return q;
    }
    if (t.kind == Tok::String) {
      if (subject_position) lex_.fail(t, "a literal cannot be a subject");
      Literal lit{t.text, std::nullopt, std::nullopt};
      if (lex_.peek().kind == Tok::AtWord) {
        lit.lang = lex_.next().text;
      } else if (lex_.peek().kind == Tok::DoubleCaret) {
        lex_.next();
        lit.datatype = iri_from(lex_.next(), "a datatype IRI").value;
      }
      return PatternTerm(Term{std::move(lit)});
    }
    return iri_from(t, "an IRI, variable, literal or quoted pattern");
  }

  Lexer lex_;
  Query q_;
};

struct Row {
  std::vector<std::optional<Term>> cells;
  std::vector<std::string> keys;  // canonical form per cell, "" when unbound
};

}  // namespace

Query parse_query(std::string_view text) { return QueryParser(text).run(); }

SolutionTable evaluate(const GraphStore& store, const Query& q) {
  SolutionTable table;
  if (q.select_all) {
    for (const auto& alt : q.alternatives) {
      for (const auto& p : alt) {
        for (auto& v : variables_of(p)) {
          if (std::find(table.header.begin(), table.header.end(), v) == table.header.end()) {
            table.header.push_back(v);
          }
        }
      }
    }
  } else {
    table.header = q.projection;
  }

  std::set<std::vector<std::string>> seen;
  std::vector<Row> rows;
  for (const auto& alt : q.alternatives) {
    // seed from the most selective pattern, then keep source order
    std::vector<const TriplePattern*> order;
    if (!alt.empty()) {
      std::size_t best = 0;
      std::size_t best_est = store.estimate(alt[0]);
      for (std::size_t i = 1; i < alt.size(); ++i) {
        const auto est = store.estimate(alt[i]);
        if (est < best_est) {
          best = i;
          best_est = est;
        }
      }
      order.push_back(&alt[best]);
      for (std::size_t i = 0; i < alt.size(); ++i) {
        if (i != best) order.push_back(&alt[i]);
      }
    }
    std::vector<Bindings> solutions{Bindings{}};
    for (const auto* pattern : order) {
      std::vector<Bindings> next;
      for (const auto& b : solutions) {
        const auto bound = substitute(*pattern, b);
        for (const auto& t : store.match(bound)) {
          Bindings ext = b;
          if (unify(bound, t, ext)) next.push_back(std::move(ext));
        }
      }
      solutions = std::move(next);
      if (solutions.empty()) break;
    }
    for (const auto& b : solutions) {
      Row row;
      for (const auto& v : table.header) {
        auto it = b.find(v);
        if (it == b.end()) {
          row.cells.emplace_back(std::nullopt);
          row.keys.emplace_back();
        } else {
          row.cells.emplace_back(it->second);
          row.keys.push_back(canonical(it->second));
        }
      }
      if (seen.insert(row.keys).second) rows.push_back(std::move(row));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.keys < b.keys; });
  table.rows.reserve(rows.size());
  for (auto& r : rows) table.rows.push_back(std::move(r.cells));
  return table;
}

Query bind_template(QueryTemplate id, const Term& anchor) {
  Query q;
  q.prefixes["ckg"] = std::string(vocab::kCkg);
  const auto s = PatternTerm::var("s");
  const auto p = PatternTerm::var("p");
  const auto o = PatternTerm::var("o");
  switch (id) {
    case QueryTemplate::EntityContext:
    case QueryTemplate::EventContext: {
      const bool want_event = id == QueryTemplate::EventContext;
      if (want_event != is_quoted(anchor) || is_literal(anchor)) {
        throw AnchorKindMismatch(std::string(want_event ? "EventContext" : "EntityContext") +
                                 " needs " + (want_event ? "a quoted triple" : "an IRI") +
                                 " anchor, got " + canonical(anchor));
      }
      q.projection = {"s", "p", "o"};
      q.alternatives = {{TriplePattern{s, p, anchor}}, {TriplePattern{anchor, p, o}}};
      return q;
    }
    case QueryTemplate::RiskCategory: {
      if (!is_quoted(anchor)) {
        throw AnchorKindMismatch("RiskCategory needs a quoted triple anchor, got " + canonical(anchor));
      }
      const auto r = PatternTerm::var("r");
      q.projection = {"r"};
      q.alternatives = {{TriplePattern{anchor, vocab::has_risk_category(), r}},
                        {TriplePattern{anchor, vocab::has_risk_label(), r}}};
      return q;
    }
  }
  throw AnchorKindMismatch("unknown template");
}

namespace {

void append_pattern_term(const PatternTerm& t, const PrefixMap& prefixes, std::string& out);

void append_pattern(const TriplePattern& p, const PrefixMap& prefixes, std::string& out) {
  append_pattern_term(p.subject, prefixes, out);
  out += ' ';
  append_pattern_term(p.predicate, prefixes, out);
  out += ' ';
  append_pattern_term(p.object, prefixes, out);
}

void append_pattern_term(const PatternTerm& t, const PrefixMap& prefixes, std::string& out) {
  if (const auto* v = t.as_variable()) {
    out += v->name.empty() ? "[]" : "?" + v->name;
  } else if (const auto* term = t.as_term()) {
    out += term_to_string(*term, prefixes);
  } else {
    out += "<< ";
    append_pattern(*t.as_quoted(), prefixes, out);
    out += " >>";
  }
}

std::string cell_text(const std::optional<Term>& cell, const PrefixMap& prefixes) {
  return cell ? term_to_string(*cell, prefixes) : std::string();
}

}  // namespace

std::string to_sparql(const Query& q) {
  std::string out;
  for (const auto& [prefix, ns] : q.prefixes) out += "PREFIX " + prefix + ": <" + ns + ">\n";
  out += "SELECT";
  if (q.select_all) {
    out += " *";
  } else {
    for (const auto& v : q.projection) out += " ?" + v;
  }
  out += " WHERE {";
  for (std::size_t i = 0; i < q.alternatives.size(); ++i) {
    if (q.alternatives.size() > 1) out += i == 0 ? " {" : " UNION {";
    for (const auto& p : q.alternatives[i]) {
      out += ' ';
      append_pattern(p, q.prefixes, out);
      out += " .";
    }
    if (q.alternatives.size() > 1) out += " }";
  }
  out += " }\n";
  return out;
}

std::string to_tsv(const SolutionTable& table, const PrefixMap& prefixes) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) out += '\t';
    out += '?' + table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += '\t';
      out += cell_text(row[i], prefixes);
    }
    out += '\n';
  }
  return out;
}

std::string to_json_rows(const SolutionTable& table, const PrefixMap& prefixes) {
  std::string out;
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[table.header[i]] = row[i] ? nlohmann::ordered_json(term_to_string(*row[i], prefixes))
                                    : nlohmann::ordered_json(nullptr);
    }
    out += obj.dump() + '\n';
  }
  return out;
}

}  // namespace nckg

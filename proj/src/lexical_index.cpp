#include "nckg/lexical_index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "nckg/vocab.hpp"

namespace nckg {

namespace {

enum class CharClass { Lower, Upper, Digit, Sep };

CharClass classify(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x80) return CharClass::Lower;  // non-ASCII letters stay inside words
  if (std::islower(u) != 0) return CharClass::Lower;
  if (std::isupper(u) != 0) return CharClass::Upper;
  if (std::isdigit(u) != 0) return CharClass::Digit;
  return CharClass::Sep;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view label) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      std::transform(cur.begin(), cur.end(), cur.begin(),
                     [](unsigned char c) { return c < 0x80 ? static_cast<char>(std::tolower(c)) : c; });
      out.push_back(std::move(cur));
      cur.clear();
    }
  };
  CharClass prev = CharClass::Sep;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const char c = label[i];
    const auto cls = classify(c);
    if (cls == CharClass::Sep) {
      flush();
    } else if (cls == CharClass::Digit) {
      if (prev != CharClass::Digit) flush();
    } else if (prev == CharClass::Digit) {
      flush();
    } else if (cls == CharClass::Upper && prev == CharClass::Lower) {
      flush();
    } else if (cls == CharClass::Upper && prev == CharClass::Upper && i + 1 < label.size() &&
               classify(label[i + 1]) == CharClass::Lower) {
      flush();  // "XMLFile" -> xml, file
    }
    if (cls != CharClass::Sep) cur += c;
    prev = cls;
  }
  flush();
  return out;
}

std::string_view to_string(DocKind kind) {
  switch (kind) {
    case DocKind::Entity:
      return "entity";
    case DocKind::Event:
      return "event";
    case DocKind::Clause:
      return "clause";
  }
  return "?";
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [_, w] : a) na += w * w;
  for (const auto& [_, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

LexicalIndex::LexicalIndex(std::vector<LabelDoc> docs)
    : docs_(std::move(docs)), reads_(std::make_unique<std::atomic<std::size_t>>(0)) {
  std::vector<std::map<std::uint32_t, std::size_t>> tf(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (const auto& tok : docs_[d].tokens) {
      auto [it, inserted] = vocab_.try_emplace(tok, static_cast<std::uint32_t>(vocab_.size()));
      if (inserted) df_.push_back(0);
      if (tf[d][it->second]++ == 0) ++df_[it->second];
    }
  }
  const auto n = static_cast<double>(docs_.size());
  vectors_.resize(docs_.size());
  norms_.resize(docs_.size());
  postings_.resize(vocab_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    double norm = 0.0;
    for (const auto& [tok, count] : tf[d]) {
      const double w = static_cast<double>(count) * std::log(n / static_cast<double>(df_[tok]));
      vectors_[d].emplace_back(tok, w);
      norm += w * w;
      if (w > 0.0) postings_[tok].emplace_back(d, w);
    }
    norms_[d] = std::sqrt(norm);
  }
}

std::optional<std::uint32_t> LexicalIndex::token_id(std::string_view token) const {
  auto it = vocab_.find(std::string(token));
  if (it == vocab_.end()) return std::nullopt;
  return it->second;
}

std::size_t LexicalIndex::df(std::string_view token) const {
  auto id = token_id(token);
  return id ? df_[*id] : 0;
}

double LexicalIndex::idf(std::string_view token) const {
  const auto d = df(token);
  if (d == 0) return 0.0;
  return std::log(static_cast<double>(docs_.size()) / static_cast<double>(d));
}

double LexicalIndex::weight(std::size_t doc, std::string_view token) const {
  auto id = token_id(token);
  if (!id) return 0.0;
  const auto& v = vectors_.at(doc);
  auto it = std::lower_bound(v.begin(), v.end(), std::pair<std::uint32_t, double>{*id, -1.0},
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  return it != v.end() && it->first == *id ? it->second : 0.0;
}

SparseVector LexicalIndex::query_vector(std::string_view text) const {
  std::map<std::uint32_t, std::size_t> tf;
  for (const auto& tok : tokenize(text)) {
    if (auto id = token_id(tok)) ++tf[*id];
  }
  SparseVector out;
  const auto n = static_cast<double>(docs_.size());
  for (const auto& [id, count] : tf) {
    out.emplace_back(id, static_cast<double>(count) * std::log(n / static_cast<double>(df_[id])));
  }
  return out;
}

std::vector<Match> LexicalIndex::top_k(std::string_view query, std::size_t k,
                                       std::optional<DocKind> kind) const {
  reads_->fetch_add(1);
  const auto q = query_vector(query);
  double qnorm = 0.0;
  for (const auto& [_, w] : q) qnorm += w * w;
  qnorm = std::sqrt(qnorm);
  if (qnorm == 0.0 || k == 0) return {};

  std::map<std::size_t, double> dots;
  for (const auto& [tok, qw] : q) {
    for (const auto& [d, dw] : postings_[tok]) {
      if (!kind || docs_[d].kind == *kind) dots[d] += qw * dw;
    }
  }
  std::vector<Match> out;
  for (const auto& [d, dot] : dots) {
    if (dot <= 0.0 || norms_[d] == 0.0) continue;
    const double score = std::min(1.0, dot / (qnorm * norms_[d]));
    out.push_back(Match{docs_[d].id, score, docs_[d].kind, d});
  }
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<std::string> label_tokens(const Term& term) {
  if (const auto* i = std::get_if<Iri>(&term)) return tokenize(vocab::local_name(i->value));
  if (const auto* l = std::get_if<Literal>(&term)) return tokenize(l->lexical);
  const auto& inner = std::get<QuotedTriple>(term).inner();
  auto out = label_tokens(inner.subject);
  auto p = tokenize(vocab::local_name(inner.predicate.value));
  auto o = label_tokens(inner.object);
  out.insert(out.end(), p.begin(), p.end());
  out.insert(out.end(), o.begin(), o.end());
  return out;
}

LexicalIndex build_index(const GraphStore& store, const OntologyModel& onto) {
  if (store.empty()) throw EmptyStore("cannot index an empty store");
  std::set<std::string> excluded;
  std::map<std::string, Term> entities;
  std::map<std::string, Term> events;
  const std::set<Iri> schema = {vocab::subclass_of(), vocab::subproperty_of()};
  const std::set<Iri> targets = {vocab::rdf_type(), vocab::has_risk_category(), vocab::has_risk_label()};

  auto visit = [&](auto&& self, const Term& t) -> void {
    if (const auto* i = std::get_if<Iri>(&t)) {
      if (!onto.is_class(*i)) entities.emplace(canonical(t), t);
    } else if (const auto* q = std::get_if<QuotedTriple>(&t)) {
      if (events.emplace(canonical(t), t).second) {
        self(self, q->inner().subject);
        self(self, q->inner().object);
      }
    }
  };
  for (const auto& t : store.triples()) {
    if (schema.contains(t.predicate)) continue;
    visit(visit, t.subject);
    if (targets.contains(t.predicate)) {
      if (is_iri(t.object)) excluded.insert(canonical(t.object));
      else visit(visit, t.object);
    } else {
      visit(visit, t.object);
    }
  }
  std::vector<LabelDoc> docs;
  for (const auto& [id, term] : entities) {
    if (excluded.contains(id)) continue;
    auto tokens = label_tokens(term);
    if (tokens.empty()) continue;
    docs.push_back(LabelDoc{id, DocKind::Entity, std::move(tokens), term, {}});
  }
  for (const auto& [id, term] : events) {
    auto tokens = label_tokens(term);
    if (tokens.empty()) continue;
    docs.push_back(LabelDoc{id, DocKind::Event, std::move(tokens), term, {}});
  }
  return LexicalIndex(std::move(docs));
}

LexicalIndex build_clause_index(const std::vector<Clause>& clauses) {
  std::vector<LabelDoc> docs;
  for (const auto& c : clauses) {
    auto tokens = tokenize(c.text);
    if (tokens.empty()) continue;
    docs.push_back(LabelDoc{c.id, DocKind::Clause, std::move(tokens), std::nullopt, c.id});
  }
  return LexicalIndex(std::move(docs));
}

}  // namespace nckg

#include "nckg/graph_store.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <tuple>
#include <unordered_set>

namespace nckg {

PatternTerm PatternTerm::quoted(TriplePattern inner) {
  PatternTerm p;
  p.value_ = std::make_shared<const TriplePattern>(std::move(inner));
  return p;
}

const TriplePattern* PatternTerm::as_quoted() const {
  if (const auto* q = std::get_if<std::shared_ptr<const TriplePattern>>(&value_)) return q->get();
  return nullptr;
}

std::optional<Term> PatternTerm::ground() const {
  if (const auto* t = as_term()) return *t;
  if (const auto* q = as_quoted()) {
    auto s = q->subject.ground();
    auto p = q->predicate.ground();
    auto o = q->object.ground();
    if (!s || !p || !o) return std::nullopt;
    const auto* pi = std::get_if<Iri>(&*p);
    if (pi == nullptr) return std::nullopt;
    return quote(std::move(*s), *pi, std::move(*o));
  }
  return std::nullopt;
}

bool unify(const PatternTerm& pattern, const Term& term, Bindings& bindings) {
  if (const auto* v = pattern.as_variable()) {
    if (v->name.empty()) return true;
    auto [it, inserted] = bindings.try_emplace(v->name, term);
    return inserted || it->second == term;
  }
  if (const auto* t = pattern.as_term()) return *t == term;
  const auto* q = std::get_if<QuotedTriple>(&term);
  return q != nullptr && unify(*pattern.as_quoted(), q->inner(), bindings);
}

bool unify(const TriplePattern& pattern, const Triple& triple, Bindings& bindings) {
  return unify(pattern.subject, triple.subject, bindings) &&
         unify(pattern.predicate, Term{triple.predicate}, bindings) &&
         unify(pattern.object, triple.object, bindings);
}

namespace {

PatternTerm substitute(const PatternTerm& p, const Bindings& b) {
  if (const auto* v = p.as_variable()) {
    if (v->name.empty()) return p;
    auto it = b.find(v->name);
    return it == b.end() ? p : PatternTerm(it->second);
  }
  if (const auto* q = p.as_quoted()) {
    PatternTerm out = PatternTerm::quoted(substitute(*q, b));
    if (auto g = out.ground()) return PatternTerm(std::move(*g));
    return out;
  }
  return p;
}

void collect_vars(const PatternTerm& p, std::vector<std::string>& out) {
  if (const auto* v = p.as_variable()) {
    if (!v->name.empty() && std::find(out.begin(), out.end(), v->name) == out.end()) {
      out.push_back(v->name);
    }
  } else if (const auto* q = p.as_quoted()) {
    collect_vars(q->subject, out);
    collect_vars(q->predicate, out);
    collect_vars(q->object, out);
  }
}

}  // namespace

TriplePattern substitute(const TriplePattern& pattern, const Bindings& bindings) {
  return {substitute(pattern.subject, bindings), substitute(pattern.predicate, bindings),
          substitute(pattern.object, bindings)};
}

std::vector<std::string> variables_of(const TriplePattern& pattern) {
  std::vector<std::string> out;
  collect_vars(pattern.subject, out);
  collect_vars(pattern.predicate, out);
  collect_vars(pattern.object, out);
  return out;
}

GraphStore::GraphStore(std::size_t max_depth)
    : max_depth_(max_depth), reads_(std::make_unique<std::atomic<std::size_t>>(0)) {}

GraphStore::GraphStore(const GraphStore& other)
    : max_depth_(other.max_depth_),
      terms_(other.terms_),
      canonical_(other.canonical_),
      ids_(other.ids_),
      spo_(other.spo_),
      pos_(other.pos_),
      osp_(other.osp_),
      prefixes_(other.prefixes_),
      reads_(std::make_unique<std::atomic<std::size_t>>(other.reads_->load())) {}

GraphStore& GraphStore::operator=(const GraphStore& other) {
  if (this != &other) {
    GraphStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

GraphStore::GraphStore(GraphStore&&) noexcept = default;
GraphStore& GraphStore::operator=(GraphStore&&) noexcept = default;
GraphStore::~GraphStore() = default;

void GraphStore::check_insertable(const Triple& t) const {
  if (has_literal_subject(t)) {
    throw LiteralSubject("literal in subject position: " + canonical(t));
  }
  const auto depth = triple_depth(t);
  if (depth > max_depth_) {
    throw DepthExceeded("nesting depth " + std::to_string(depth) + " exceeds maximum " +
                        std::to_string(max_depth_));
  }
}

GraphStore::TermId GraphStore::intern(const Term& t) {
  auto key = canonical(t);
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.push_back(t);
  canonical_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<GraphStore::TermId> GraphStore::lookup(const Term& t) const {
  auto it = ids_.find(canonical(t));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool GraphStore::insert(const Triple& t) {
  check_insertable(t);
  const Key k{intern(t.subject), intern(Term{t.predicate}), intern(t.object)};
  if (!spo_.insert(k).second) return false;
  pos_.insert({k[1], k[2], k[0]});
  osp_.insert({k[2], k[0], k[1]});
  return true;
}

bool GraphStore::remove(const Triple& t) {
  const auto s = lookup(t.subject);
  const auto p = lookup(Term{t.predicate});
  const auto o = lookup(t.object);
  if (!s || !p || !o) return false;
  if (spo_.erase({*s, *p, *o}) == 0) return false;
  pos_.erase({*p, *o, *s});
  osp_.erase({*o, *s, *p});
  return true;
}

bool GraphStore::contains(const Triple& t) const {
  const auto s = lookup(t.subject);
  const auto p = lookup(Term{t.predicate});
  const auto o = lookup(t.object);
  return s && p && o && spo_.contains({*s, *p, *o});
}

Triple GraphStore::materialize(const Key& spo) const {
  return Triple{terms_[spo[0]], std::get<Iri>(terms_[spo[1]]), terms_[spo[2]]};
}

namespace {

template <typename Set>
auto prefix_range(const Set& set, std::uint32_t a) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  return std::pair{set.lower_bound({a, 0, 0}), set.upper_bound({a, kMax, kMax})};
}

template <typename Set>
auto prefix_range(const Set& set, std::uint32_t a, std::uint32_t b) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  return std::pair{set.lower_bound({a, b, 0}), set.upper_bound({a, b, kMax})};
}

}  // namespace

std::vector<GraphStore::Key> GraphStore::candidates(const TriplePattern& pattern,
                                                    bool& impossible) const {
  impossible = false;
  std::optional<TermId> ids[3];
  const PatternTerm* positions[3] = {&pattern.subject, &pattern.predicate, &pattern.object};
  for (int i = 0; i < 3; ++i) {
    if (auto g = positions[i]->ground()) {
      ids[i] = lookup(*g);
      if (!ids[i]) {
        impossible = true;
        return {};
      }
    }
  }
  const auto& [s, p, o] = ids;
  std::vector<Key> out;
  auto take = [&out](auto range, auto to_spo) {
    for (auto it = range.first; it != range.second; ++it) out.push_back(to_spo(*it));
  };
  auto from_spo = [](const Key& k) { return k; };
  auto from_pos = [](const Key& k) { return Key{k[2], k[0], k[1]}; };
  auto from_osp = [](const Key& k) { return Key{k[1], k[2], k[0]}; };

  if (s && p && o) {
    if (spo_.contains({*s, *p, *o})) out.push_back({*s, *p, *o});
  } else if (s && p) {
    take(prefix_range(spo_, *s, *p), from_spo);
  } else if (p && o) {
    take(prefix_range(pos_, *p, *o), from_pos);
  } else if (s && o) {
    take(prefix_range(osp_, *o, *s), from_osp);
  } else if (s) {
    take(prefix_range(spo_, *s), from_spo);
  } else if (p) {
    take(prefix_range(pos_, *p), from_pos);
  } else if (o) {
    take(prefix_range(osp_, *o), from_osp);
  } else {
    out.assign(spo_.begin(), spo_.end());
  }
  return out;
}

std::vector<Triple> GraphStore::match(const TriplePattern& pattern) const {
  reads_->fetch_add(1);
  return collect(pattern);
}

std::vector<Triple> GraphStore::collect(const TriplePattern& pattern) const {
  bool impossible = false;
  auto keys = candidates(pattern, impossible);
  std::vector<Key> hits;
  hits.reserve(keys.size());
  for (const auto& k : keys) {
    Bindings b;
    if (unify(pattern, materialize(k), b)) hits.push_back(k);
  }
  std::sort(hits.begin(), hits.end(), [this](const Key& a, const Key& b) {
    return std::tie(canonical_[a[0]], canonical_[a[1]], canonical_[a[2]]) <
           std::tie(canonical_[b[0]], canonical_[b[1]], canonical_[b[2]]);
  });
  std::vector<Triple> out;
  out.reserve(hits.size());
  for (const auto& k : hits) out.push_back(materialize(k));
  return out;
}

std::size_t GraphStore::estimate(const TriplePattern& pattern) const {
  reads_->fetch_add(1);
  bool impossible = false;
  return candidates(pattern, impossible).size();
}

std::vector<Triple> GraphStore::triples() const {
  return collect(TriplePattern{});
}

StoreStats GraphStore::stats() const {
  StoreStats st;
  st.triples = spo_.size();
  std::unordered_set<std::string> entities;
  std::unordered_set<std::string> events;
  auto visit = [&](auto&& self, const Term& t) -> void {
    if (const auto* i = std::get_if<Iri>(&t)) {
      entities.insert(i->value);
    } else if (const auto* q = std::get_if<QuotedTriple>(&t)) {
      if (events.insert(canonical(t)).second) {
        self(self, q->inner().subject);
        self(self, q->inner().object);
      }
    }
  };
  for (const auto& k : spo_) {
    const Term& s = terms_[k[0]];
    const Term& o = terms_[k[2]];
    if (is_quoted(s) || is_quoted(o)) ++st.nested;
    visit(visit, s);
    visit(visit, o);
  }
  st.entities = entities.size();
  st.events = events.size();
  return st;
}

bool GraphStore::indexes_consistent() const {
  if (pos_.size() != spo_.size() || osp_.size() != spo_.size()) return false;
  for (const auto& k : spo_) {
    if (!pos_.contains({k[1], k[2], k[0]}) || !osp_.contains({k[2], k[0], k[1]})) return false;
  }
  return true;
}

}  // namespace nckg

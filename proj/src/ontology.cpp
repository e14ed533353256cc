#include "nckg/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <unordered_set>

#include "nckg/vocab.hpp"

namespace nckg {

namespace assets {
extern const std::string_view default_ontology;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string squash(std::string_view s) {
  // lowercase, single spaces, no surrounding blanks or quotes/brackets
  std::string out;
  bool space = false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) != 0 || c == '_' || c == '-') {
      space = !out.empty();
    } else if (std::isalnum(u) != 0) {
      if (space) out += ' ';
      space = false;
      out += static_cast<char>(std::tolower(u));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(RiskCategory c) {
  switch (c) {
    case RiskCategory::Assignment:
      return "Assignment";
    case RiskCategory::Payment:
      return "Payment";
    case RiskCategory::Temporal:
      return "Temporal";
    case RiskCategory::Financial:
      return "Financial";
    case RiskCategory::DSC:
      return "DSC";
    case RiskCategory::Liability:
      return "Liability";
  }
  return "?";
}

std::optional<RiskCategory> parse_risk_category(std::string_view label) {
  const auto key = squash(label);
  for (auto c : kRiskCategories) {
    if (key == lower(to_string(c))) return c;
  }
  if (key == "differing site condition" || key == "differing site conditions") return RiskCategory::DSC;
  return std::nullopt;
}

Iri risk_category_iri(RiskCategory c) { return vocab::ckg(to_string(c)); }

std::optional<RiskCategory> risk_category_of(const Term& t) {
  const auto* i = std::get_if<Iri>(&t);
  if (i == nullptr) return std::nullopt;
  return parse_risk_category(vocab::local_name(i->value));
}

std::string_view to_string(RiskType t) {
  switch (t) {
    case RiskType::Ambiguity:
      return "Ambiguity";
    case RiskType::UnbalancedObligation:
      return "Unbalanced Obligation";
    case RiskType::NoRisk:
      return "No risk";
  }
  return "?";
}

std::optional<RiskType> parse_risk_type(std::string_view text) {
  const auto key = squash(text);
  if (key == "no risk" || key == "norisk" || key == "no risks") return RiskType::NoRisk;
  if (key == "ambiguity" || key == "ambiguous" || key == "ambiguities") return RiskType::Ambiguity;
  if (key == "unbalanced obligation" || key == "unbalanced obligations" || key == "unbalancedobligation") {
    return RiskType::UnbalancedObligation;
  }
  return std::nullopt;
}

namespace {

template <typename Map>
void check_acyclic(const Map& parent, const char* what) {
  for (const auto& [start, _] : parent) {
    std::set<Iri> seen{start};
    auto it = parent.find(start);
    while (it != parent.end()) {
      if (!seen.insert(it->second).second) {
        throw CyclicHierarchy(std::string("cyclic ") + what + " chain through " + it->second.value);
      }
      it = parent.find(it->second);
    }
  }
}

}  // namespace

OntologyModel OntologyModel::load(const Document& doc) {
  OntologyModel m;
  const auto type = vocab::rdf_type();
  const auto klass = vocab::rdfs_class();
  const auto sub_class = vocab::subclass_of();
  const auto sub_prop = vocab::subproperty_of();
  const std::map<Iri, TripleKind> kinds = {{vocab::ckg("E2ERelation"), TripleKind::E2E},
                                           {vocab::ckg("E2EvtRelation"), TripleKind::E2Evt},
                                           {vocab::ckg("Evt2EvtRelation"), TripleKind::Evt2Evt}};
  std::vector<std::pair<Iri, Iri>> subclass_links;
  std::vector<std::pair<Iri, const Term*>> risk_links;

  for (const auto& t : doc.triples) {
    const auto* s = std::get_if<Iri>(&t.subject);
    const auto* o = std::get_if<Iri>(&t.object);
    if (s == nullptr || o == nullptr) {
      if (s != nullptr && (t.predicate == vocab::has_risk_category() || t.predicate == vocab::has_risk_label())) {
        throw OntologyError("risk category of " + s->value + " must be an IRI");
      }
      continue;
    }
    if (t.predicate == type && *o == klass) {
      m.classes_.insert(*s);
    } else if (t.predicate == type && kinds.contains(*o)) {
      m.relation_kind_[*s] = kinds.at(*o);
    } else if (t.predicate == sub_class) {
      subclass_links.emplace_back(*s, *o);
    } else if (t.predicate == sub_prop) {
      auto [it, inserted] = m.subproperty_of_.emplace(*s, *o);
      if (!inserted && it->second != *o) {
        throw OntologyError(s->value + " has more than one super-property");
      }
    } else if (t.predicate == vocab::has_risk_category() || t.predicate == vocab::has_risk_label()) {
      risk_links.emplace_back(*s, &t.object);
    }
  }
  for (const auto& [c, _] : subclass_links) m.classes_.insert(c);
  for (const auto& [c, parent] : subclass_links) {
    if (!m.classes_.contains(parent)) {
      throw UnknownUpperClass(c.value + " is declared under undeclared class " + parent.value);
    }
    auto [it, inserted] = m.subclass_of_.emplace(c, parent);
    if (!inserted && it->second != parent) {
      throw OntologyError(c.value + " has more than one superclass; the hierarchy must be a forest");
    }
  }
  check_acyclic(m.subclass_of_, "subClassOf");
  check_acyclic(m.subproperty_of_, "subPropertyOf");

  for (const auto& upper : {vocab::contract_actor(), vocab::contract_object(), vocab::contract_property(),
                            vocab::contract_constraint(), vocab::contract_event()}) {
    if (!m.classes_.contains(upper)) throw UnknownUpperClass("missing upper class " + upper.value);
  }
  for (const auto& [c, target] : risk_links) {
    if (!m.classes_.contains(c)) {
      throw OntologyError("risk category attached to undeclared class " + c.value);
    }
    auto cat = risk_category_of(*target);
    if (!cat) throw OntologyError("unknown risk category " + canonical(*target) + " on " + c.value);
    m.risk_map_[c].insert(*cat);
  }
  return m;
}

std::string_view OntologyModel::default_source() { return assets::default_ontology; }

const OntologyModel& OntologyModel::load_default() {
  static const OntologyModel model = load(parse(assets::default_ontology));
  return model;
}

std::vector<Iri> OntologyModel::ancestors(const Iri& c) const {
  std::vector<Iri> out{c};
  for (auto it = subclass_of_.find(c); it != subclass_of_.end(); it = subclass_of_.find(it->second)) {
    out.push_back(it->second);
  }
  return out;
}

bool OntologyModel::is_subclass(const Iri& c, const Iri& ancestor) const {
  const auto chain = ancestors(c);
  return std::find(chain.begin(), chain.end(), ancestor) != chain.end();
}

bool OntologyModel::is_subproperty(const Iri& p, const Iri& ancestor) const {
  if (p == ancestor) return true;
  for (auto it = subproperty_of_.find(p); it != subproperty_of_.end(); it = subproperty_of_.find(it->second)) {
    if (it->second == ancestor) return true;
  }
  return false;
}

std::optional<TripleKind> OntologyModel::relation_kind(const Iri& p) const {
  if (auto k = relation_kind_.find(p); k != relation_kind_.end()) return k->second;
  for (auto it = subproperty_of_.find(p); it != subproperty_of_.end(); it = subproperty_of_.find(it->second)) {
    if (auto k = relation_kind_.find(it->second); k != relation_kind_.end()) return k->second;
  }
  if (is_contractual_relation(p)) return TripleKind::Evt2Evt;
  return std::nullopt;
}

bool OntologyModel::is_contractual_relation(const Iri& p) const {
  if (is_subproperty(p, vocab::has_contractual_relation())) return true;
  static const std::regex temporal(R"(^(within|before|after|until)[A-Za-z0-9]*Of$)");
  const auto local = vocab::local_name(p.value);
  return p.value.starts_with(vocab::kCkg) && std::regex_match(local.begin(), local.end(), temporal);
}

bool OntologyModel::is_constraint_relation(const Iri& p) const {
  return is_subproperty(p, vocab::has_constraint());
}

bool OntologyModel::is_property_relation(const Iri& p) const {
  return is_subproperty(p, vocab::has_property());
}

std::set<Iri> classes_of(const Term& term, const GraphStore& store, const OntologyModel& onto) {
  std::set<Iri> out;
  for (const auto& t : store.match(TriplePattern{term, vocab::rdf_type(), PatternTerm::any()})) {
    if (const auto* c = std::get_if<Iri>(&t.object)) {
      for (auto& a : onto.ancestors(*c)) out.insert(std::move(a));
    }
  }
  return out;
}

std::set<RiskCategory> risk_categories_for(const Term& term, const GraphStore& store,
                                           const OntologyModel& onto) {
  std::set<RiskCategory> out;
  auto add = [&](const Term& t) {
    for (const auto& c : classes_of(t, store, onto)) {
      if (auto it = onto.risk_map().find(c); it != onto.risk_map().end()) {
        out.insert(it->second.begin(), it->second.end());
      }
    }
  };
  add(term);
  if (const auto* q = std::get_if<QuotedTriple>(&term)) add(Term{q->inner().predicate});
  return out;
}

std::vector<Diagnostic> validate(const GraphStore& store, const OntologyModel& onto,
                                 const ValidateOptions& opts) {
  std::vector<Diagnostic> out;
  std::unordered_set<std::string> checked_events;
  const Iri actor = vocab::contract_actor();

  auto check_event = [&](auto&& self, const Term& term) -> void {
    const auto* q = std::get_if<QuotedTriple>(&term);
    if (q == nullptr || !checked_events.insert(canonical(term)).second) return;
    const Triple& inner = q->inner();
    if (const auto* s = std::get_if<Iri>(&inner.subject)) {
      if (!onto.is_property_relation(inner.predicate) && !classes_of(*s, store, onto).contains(actor)) {
        out.push_back({Severity::Warning, term,
                       "event subject " + s->value + " is not typed as a ContractActor"});
      }
    }
    self(self, inner.subject);
    self(self, inner.object);
  };

  const std::set<Iri> exempt = {vocab::rdf_type(), vocab::has_risk_category(), vocab::has_risk_label()};
  for (const auto& t : store.triples()) {
    if (has_literal_subject(t)) {
      out.push_back({Severity::Error, t.subject, "literal in subject position"});
    }
    if (triple_depth(t) > opts.max_depth) {
      out.push_back({Severity::Error, t.subject,
                     "nesting depth " + std::to_string(triple_depth(t)) + " exceeds " +
                         std::to_string(opts.max_depth)});
    }
    if (classify_kind(t) == TripleKind::E2Evt && !exempt.contains(t.predicate) &&
        !onto.is_constraint_relation(t.predicate) && !onto.is_contractual_relation(t.predicate)) {
      out.push_back({Severity::Warning, t.subject,
                     "predicate " + t.predicate.value +
                         " links an event and an entity but is neither a constraint nor a contractual relation"});
    }
    check_event(check_event, t.subject);
    check_event(check_event, t.object);
  }
  return out;
}

}  // namespace nckg

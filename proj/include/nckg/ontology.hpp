#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/graph_store.hpp"
#include "nckg/turtle.hpp"

namespace nckg {

class OntologyError : public Error {
 public:
  using Error::Error;
};

class CyclicHierarchy : public OntologyError {
 public:
  using OntologyError::OntologyError;
};

class UnknownUpperClass : public OntologyError {
 public:
  using OntologyError::OntologyError;
};

enum class RiskCategory { Assignment, Payment, Temporal, Financial, DSC, Liability };

inline constexpr std::array<RiskCategory, 6> kRiskCategories = {
    RiskCategory::Assignment, RiskCategory::Payment, RiskCategory::Temporal,
    RiskCategory::Financial,  RiskCategory::DSC,     RiskCategory::Liability};

std::string_view to_string(RiskCategory c);
/// Case-insensitive; also accepts "differing site condition(s)" for DSC.
std::optional<RiskCategory> parse_risk_category(std::string_view label);
/// ckg:<Name>, the object of hasRiskCategory assertions.
Iri risk_category_iri(RiskCategory c);
/// Category named by an IRI's local name, if any.
std::optional<RiskCategory> risk_category_of(const Term& t);

enum class RiskType { Ambiguity, UnbalancedObligation, NoRisk };

/// "Ambiguity", "Unbalanced Obligation", "No risk".
std::string_view to_string(RiskType t);
/// Case-insensitive; tolerates plurals and "ambiguous".
std::optional<RiskType> parse_risk_type(std::string_view text);

class OntologyModel {
 public:
  /// Builds the model from schema triples:
  ///   C rdf:type rdfs:Class, C rdfs:subClassOf D,
  ///   P rdf:type ckg:E2ERelation|E2EvtRelation|Evt2EvtRelation, P rdfs:subPropertyOf Q,
  ///   C ckg:hasRiskCategory ckg:<Category>  (ckg:hasRiskLabel accepted).
  static OntologyModel load(const Document& doc);
  /// The shipped ontology compiled into the library.
  static const OntologyModel& load_default();  // parsed once, shared
  static std::string_view default_source();

  const std::set<Iri>& classes() const { return classes_; }
  const std::map<Iri, Iri>& subclass_of() const { return subclass_of_; }
  const std::map<Iri, TripleKind>& relation_taxonomy() const { return relation_kind_; }
  const std::map<Iri, Iri>& subproperty_of() const { return subproperty_of_; }
  const std::map<Iri, std::set<RiskCategory>>& risk_map() const { return risk_map_; }

  bool is_class(const Iri& c) const { return classes_.contains(c); }
  /// `c` and all its ancestors, nearest first.
  std::vector<Iri> ancestors(const Iri& c) const;
  bool is_subclass(const Iri& c, const Iri& ancestor) const;
  /// Reflexive-transitive subPropertyOf.
  bool is_subproperty(const Iri& p, const Iri& ancestor) const;
  /// Declared kind of `p` or of its nearest declared ancestor.
  std::optional<TripleKind> relation_kind(const Iri& p) const;
  /// Conditional or temporal event relation, including `within…Of` style names.
  bool is_contractual_relation(const Iri& p) const;
  bool is_constraint_relation(const Iri& p) const;
  bool is_property_relation(const Iri& p) const;

 private:
  std::set<Iri> classes_;
  std::map<Iri, Iri> subclass_of_;
  std::map<Iri, TripleKind> relation_kind_;
  std::map<Iri, Iri> subproperty_of_;
  std::map<Iri, std::set<RiskCategory>> risk_map_;
};

/// rdf:type assertions on `term` in the store, closed upward through the hierarchy.
std::set<Iri> classes_of(const Term& term, const GraphStore& store, const OntologyModel& onto);

/// Risk categories of the term's classes; for a quoted triple, also of its predicate's classes.
std::set<RiskCategory> risk_categories_for(const Term& term, const GraphStore& store,
                                           const OntologyModel& onto);

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity;
  Term subject;
  std::string message;
};

struct ValidateOptions {
  std::size_t max_depth = GraphStore::kDefaultMaxDepth;
};

/// Shape checks: actor-less events and stray E2Evt predicates are warnings,
/// literal subjects and over-deep nesting are errors.
std::vector<Diagnostic> validate(const GraphStore& store, const OntologyModel& onto,
                                 const ValidateOptions& opts = {});

}  // namespace nckg

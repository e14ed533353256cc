#pragma once

#include <string>
#include <string_view>

#include "nckg/term.hpp"

namespace nckg::vocab {

inline constexpr std::string_view kCkg = "http://example.org/NCKG/";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";

inline Iri ckg(std::string_view local) { return Iri{std::string(kCkg) + std::string(local)}; }
inline Iri rdf(std::string_view local) { return Iri{std::string(kRdf) + std::string(local)}; }
inline Iri rdfs(std::string_view local) { return Iri{std::string(kRdfs) + std::string(local)}; }

inline Iri rdf_type() { return rdf("type"); }
inline Iri rdfs_class() { return rdfs("Class"); }
inline Iri subclass_of() { return rdfs("subClassOf"); }
inline Iri subproperty_of() { return rdfs("subPropertyOf"); }

inline Iri has_risk_category() { return ckg("hasRiskCategory"); }
inline Iri has_risk_label() { return ckg("hasRiskLabel"); }

inline Iri contract_actor() { return ckg("ContractActor"); }
inline Iri contract_object() { return ckg("ContractObject"); }
inline Iri contract_property() { return ckg("ContractProperty"); }
inline Iri contract_constraint() { return ckg("ContractConstraint"); }
inline Iri contract_event() { return ckg("ContractEvent"); }

inline Iri has_property() { return ckg("hasProperty"); }
inline Iri has_constraint() { return ckg("hasConstraint"); }
inline Iri has_contractual_relation() { return ckg("hasContractualRelation"); }

/// Local part of an IRI: the text after the last '/' or '#'.
inline std::string_view local_name(std::string_view iri) {
  const auto pos = iri.find_last_of("/#");
  return pos == std::string_view::npos ? iri : iri.substr(pos + 1);
}

}  // namespace nckg::vocab

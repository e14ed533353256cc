#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/clause.hpp"
#include "nckg/gateway.hpp"
#include "nckg/graph_store.hpp"
#include "nckg/ontology.hpp"
#include "nckg/term.hpp"

namespace nckg {

class EmptyExtraction : public Error {
 public:
  using Error::Error;
};

/// An extraction step failed; the message names the clause and step.
/// Gateway errors are attached as the nested exception.
class ExtractionError : public Error {
 public:
  ExtractionError(std::string step, const std::string& message);
  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

class StagingError : public Error {
 public:
  using Error::Error;
};

class StatusMissing : public StagingError {
 public:
  using StagingError::StagingError;
};

class NotApproved : public Error {
 public:
  using Error::Error;
};

enum class EntityRole { Actor, Object, Property, Constraint };

std::string_view to_string(EntityRole r);
std::optional<EntityRole> parse_entity_role(std::string_view s);
/// Upper ontology class an entity of this role is typed with.
Iri upper_class(EntityRole r);

// Provenance tags for extracted triples.
inline constexpr std::string_view kStepRelationLink = "relation_link";
inline constexpr std::string_view kStepPropertyLink = "property_link";
inline constexpr std::string_view kStepNestedLink = "nested_link";
inline constexpr std::string_view kStepManual = "manual";

struct ClauseGraph {
  std::string clause_id;
  std::vector<Triple> triples;
  /// canonical(triple) -> step tag
  std::map<std::string, std::string> provenance;
  /// Entity Iri -> role of the NER step that first produced it.
  std::map<Iri, EntityRole> roles;
  /// Minting log: surface span -> Iri.
  std::map<std::string, Iri> minted;

  std::set<Iri> entities() const;
  /// Predicates used by events and nested triples.
  std::set<Iri> relations() const;
  /// Distinct quoted triples, in first-use order.
  std::vector<Term> events() const;
  std::set<Iri> constraints() const;
  std::string step_of(const Triple& t) const;
  std::size_t nested_count() const;

  friend bool operator==(const ClauseGraph&, const ClauseGraph&) = default;
};

enum class ReviewStatus { Pending, Approved, Rejected };

std::string_view to_string(ReviewStatus s);
std::optional<ReviewStatus> parse_review_status(std::string_view s);

struct StagedExtraction {
  Clause clause;
  ClauseGraph graph;
  ReviewStatus status = ReviewStatus::Pending;
  std::string reviewer_note;
  /// Dropped or rewritten model output, kept for the reviewer.
  std::vector<std::string> warnings;

  friend bool operator==(const StagedExtraction&, const StagedExtraction&) = default;
};

struct ExtractOptions {
  /// Manual alias table: lowercased surface form -> local name, so that
  /// "the Client" and "Employer" can share one Iri.
  std::map<std::string, std::string> aliases;
};

/// camelCase local name for a span: "advance payment" -> "advancePayment",
/// "the Project Manager" -> "ProjectManager", "within 90 days of" -> "within90DaysOf".
/// Empty when the span has no letters or digits.
std::string mint_local_name(std::string_view span);

/// Short description of each upper class, sent with the NER prompt.
std::string_view class_description(EntityRole r);

StagedExtraction extract_clause(const Clause& clause, const OntologyModel& onto, Gateway& gateway,
                                const ExtractOptions& opts = {});

std::string staging_to_string(const StagedExtraction& staged);
StagedExtraction staging_from_string(std::string_view text);
void write_staging(const StagedExtraction& staged, const std::filesystem::path& path);
StagedExtraction read_staging(const std::filesystem::path& path);

struct CommitDelta {
  std::size_t triples_added = 0;
  std::size_t nested_added = 0;

  friend bool operator==(const CommitDelta&, const CommitDelta&) = default;
};

/// The triples a commit would add: the graph plus typing links for untyped
/// entities and subPropertyOf links for contractual predicates.
std::vector<Triple> commit_plan(const StagedExtraction& staged, const GraphStore& store,
                                const OntologyModel& onto);

/// All-or-nothing merge: nothing is inserted when any triple is too deep.
CommitDelta commit(const StagedExtraction& staged, GraphStore& store, const OntologyModel& onto);

struct SourceRow {
  std::size_t clauses = 0;
  std::size_t staged = 0;
  std::size_t failed = 0;
  std::size_t triples = 0;
  std::size_t nested = 0;
};

struct IngestFailure {
  std::size_t line = 0;
  std::string clause_id;
  std::string message;
};

struct IngestSummary {
  std::map<ClauseSource, SourceRow> rows;
  std::vector<IngestFailure> failures;
  std::vector<std::filesystem::path> files;

  SourceRow total() const;
  /// Markdown table: Source | Clauses | Staged | Failed | Triples | Nested triples.
  std::string to_markdown() const;
};

struct IngestOptions {
  /// Parallel extractions; 0 means the gateway's in-flight cap.
  std::size_t workers = 0;
  ExtractOptions extract;
};

/// File name used for a clause's staging file.
std::string staging_file_name(std::string_view clause_id);

/// Extracts every clause of a JSONL corpus into `out_dir`, one staging file
/// per clause. Bad lines and failed clauses are recorded, not thrown.
IngestSummary ingest_corpus(std::string_view jsonl, const OntologyModel& onto, Gateway& gateway,
                            const std::filesystem::path& out_dir, const IngestOptions& opts = {});

}  // namespace nckg

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nckg/clause.hpp"
#include "nckg/graph_store.hpp"
#include "nckg/ontology.hpp"

namespace nckg {

class EmptyStore : public Error {
 public:
  using Error::Error;
};

/// Splits on camelCase, digit runs, '_', '-', whitespace and punctuation; lowercases.
std::vector<std::string> tokenize(std::string_view label);

enum class DocKind { Entity, Event, Clause };

std::string_view to_string(DocKind kind);

struct LabelDoc {
  std::string id;
  DocKind kind = DocKind::Entity;
  std::vector<std::string> tokens;
  std::optional<Term> term;  // Entity and Event docs
  std::string clause_id;     // Clause docs
};

/// Sorted by token id.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

double cosine(const SparseVector& a, const SparseVector& b);

struct Match {
  std::string id;
  double score = 0.0;
  DocKind kind = DocKind::Entity;
  std::size_t doc = 0;  // index into LexicalIndex::docs()
};

/// TF-IDF weighted label catalog: w(t, d) = tf(t, d) * ln(N / df(t)).
class LexicalIndex {
 public:
  explicit LexicalIndex(std::vector<LabelDoc> docs);

  const std::vector<LabelDoc>& docs() const { return docs_; }
  std::size_t n_docs() const { return docs_.size(); }
  /// Document frequency, 0 for unseen tokens.
  std::size_t df(std::string_view token) const;
  double idf(std::string_view token) const;
  const SparseVector& vector(std::size_t doc) const { return vectors_[doc]; }
  /// Weight of `token` in document `doc`.
  double weight(std::size_t doc, std::string_view token) const;
  std::optional<std::uint32_t> token_id(std::string_view token) const;

  /// Query tokens weighted with this index's idf; unseen tokens are dropped.
  SparseVector query_vector(std::string_view text) const;

  /// Best `k` docs (optionally of one kind) by cosine, score descending then id
  /// ascending. Docs scoring 0 are not returned.
  std::vector<Match> top_k(std::string_view query, std::size_t k,
                           std::optional<DocKind> kind = std::nullopt) const;

  std::size_t read_count() const { return reads_->load(); }

 private:
  std::vector<LabelDoc> docs_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::size_t> df_;
  std::vector<SparseVector> vectors_;
  std::vector<double> norms_;
  std::vector<std::vector<std::pair<std::size_t, double>>> postings_;
  std::unique_ptr<std::atomic<std::size_t>> reads_;
};

/// One doc per entity IRI and per event (quoted triple) in the store. Ontology
/// classes, type/risk targets and schema triples are left out.
LexicalIndex build_index(const GraphStore& store, const OntologyModel& onto);

/// Whole-clause word docs for the vector baseline.
LexicalIndex build_clause_index(const std::vector<Clause>& clauses);

/// Tokens of a term's label: local name for IRIs, lexical form for literals,
/// concatenated component labels for quoted triples.
std::vector<std::string> label_tokens(const Term& term);

}  // namespace nckg

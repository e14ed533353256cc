#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "nckg/gateway.hpp"

namespace nckg::testing {

/// Answers prompts from a per-clause answer sheet:
///   {"clauses": [{"id", "text", "terms", "review", "llm_only", "vector",
///                 "ner": {"ContractActor": [...], ...},
///                 "links": {"relation_link": [[h, r, t], ...], ...}}]}
/// The clause is found by its text inside the prompt, the step by the
/// template tag and the prompt's class or link-type line. A string in place
/// of a list is returned verbatim, which lets a sheet script malformed output.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(nlohmann::json answers);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  ChatResponse complete(const ChatRequest& req) override;

 private:
  nlohmann::json answers_;
};

/// Passes requests through and remembers prompt hash -> response.
class RecordingBackend : public ChatBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}

  ChatResponse complete(const ChatRequest& req) override;

  /// Mock script with one prompt_sha256 entry per distinct prompt, sorted by hash.
  std::string mock_json() const;

 private:
  std::shared_ptr<ChatBackend> inner_;
  mutable std::mutex mu_;
  std::map<std::string, std::pair<std::string, std::string>> seen_;  // sha -> (template, response)
};

/// Mock script for extracting every clause of `corpus` with the answers in `answers`.
std::string generate_extract_mock(const std::filesystem::path& answers, const std::filesystem::path& corpus);

/// Mock script for an nckg-mode review of `clauses` over the store in `seed`.
std::string generate_review_mock(const std::filesystem::path& answers, const std::filesystem::path& clauses,
                                 const std::filesystem::path& seed, std::size_t k = 2);

struct SyntheticCorpus {
  std::string jsonl;
  nlohmann::json answers;
};

/// `fidic` + `nec` clauses, each extracting to one asserted event and two
/// nested triples.
SyntheticCorpus make_synthetic_corpus(std::size_t fidic = 57, std::size_t nec = 86);

}  // namespace nckg::testing

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/error.hpp"

namespace nckg {

enum class TemplateId { TERM_EXTRACT, NER, RELATION_LINK, REVIEW, BASELINE_LLM_ONLY, BASELINE_VECTOR };

inline constexpr std::array<TemplateId, 6> kTemplateIds = {
    TemplateId::TERM_EXTRACT, TemplateId::NER,               TemplateId::RELATION_LINK,
    TemplateId::REVIEW,       TemplateId::BASELINE_LLM_ONLY, TemplateId::BASELINE_VECTOR};

std::string_view to_string(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view name);

class MissingSlot : public Error {
 public:
  MissingSlot(std::string template_name, std::string slot);
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

class UnknownTemplate : public Error {
 public:
  using Error::Error;
};

using Slots = std::map<std::string, std::string>;

/// Template bodies with `{name}` slots. Braces not enclosing an identifier are literal text.
class PromptLibrary {
 public:
  /// Bodies compiled into the library.
  static const PromptLibrary& builtin();
  /// Builtin bodies overridden by `<dir>/<lowercase id>.txt` where present.
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const std::string& body(TemplateId id) const;
  /// Slot names in first-occurrence order.
  std::vector<std::string> slots(TemplateId id) const;

  /// Literal substitution; values are never re-scanned for slots. Extra slots are ignored.
  std::string render(TemplateId id, const Slots& slots) const;
  std::string render(std::string_view id_name, const Slots& slots) const;

 private:
  std::map<TemplateId, std::string> bodies_;
};

std::string render(TemplateId id, const Slots& slots);

/// File name used for a template inside a prompt directory, e.g. "term_extract.txt".
std::string template_file_name(TemplateId id);

}  // namespace nckg

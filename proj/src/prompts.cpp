#include "nckg/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace nckg {

namespace assets {
extern const std::string_view prompt_term_extract;
extern const std::string_view prompt_ner;
extern const std::string_view prompt_relation_link;
extern const std::string_view prompt_review;
extern const std::string_view prompt_baseline_llm_only;
extern const std::string_view prompt_baseline_vector;
}  // namespace assets

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::TERM_EXTRACT:
      return "TERM_EXTRACT";
    case TemplateId::NER:
      return "NER";
    case TemplateId::RELATION_LINK:
      return "RELATION_LINK";
    case TemplateId::REVIEW:
      return "REVIEW";
    case TemplateId::BASELINE_LLM_ONLY:
      return "BASELINE_LLM_ONLY";
    case TemplateId::BASELINE_VECTOR:
      return "BASELINE_VECTOR";
  }
  return "?";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
  for (auto id : kTemplateIds) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::string template_file_name(TemplateId id) {
  std::string name(to_string(id));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name + ".txt";
}

MissingSlot::MissingSlot(std::string template_name, std::string slot)
    : Error("template " + template_name + " needs slot {" + slot + "}"), slot_(std::move(slot)) {}

namespace {

bool is_slot_char(char c, bool first) {
  const auto u = static_cast<unsigned char>(c);
  return std::islower(u) != 0 || c == '_' || (!first && std::isdigit(u) != 0);
}

// Calls on_text for literal runs and on_slot for each `{name}`.
template <typename Text, typename Slot>
void scan_template(std::string_view body, Text on_text, Slot on_slot) {
  std::size_t i = 0;
  std::size_t lit = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_slot_char(body[j], j == i + 1)) ++j;
      if (j > i + 1 && j < body.size() && body[j] == '}') {
        on_text(body.substr(lit, i - lit));
        on_slot(std::string(body.substr(i + 1, j - i - 1)));
        i = j + 1;
        lit = i;
        continue;
      }
    }
    ++i;
  }
  on_text(body.substr(lit));
}

}  // namespace

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib = [] {
    PromptLibrary l;
    l.bodies_[TemplateId::TERM_EXTRACT] = std::string(assets::prompt_term_extract);
    l.bodies_[TemplateId::NER] = std::string(assets::prompt_ner);
    l.bodies_[TemplateId::RELATION_LINK] = std::string(assets::prompt_relation_link);
    l.bodies_[TemplateId::REVIEW] = std::string(assets::prompt_review);
    l.bodies_[TemplateId::BASELINE_LLM_ONLY] = std::string(assets::prompt_baseline_llm_only);
    l.bodies_[TemplateId::BASELINE_VECTOR] = std::string(assets::prompt_baseline_vector);
    return l;
  }();
  return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  PromptLibrary l = builtin();
  for (auto id : kTemplateIds) {
    const auto path = dir / template_file_name(id);
    std::ifstream in(path, std::ios::binary);
    if (!in) continue;
    std::ostringstream ss;
    ss << in.rdbuf();
    l.bodies_[id] = ss.str();
  }
  return l;
}

const std::string& PromptLibrary::body(TemplateId id) const {
  auto it = bodies_.find(id);
  if (it == bodies_.end()) throw UnknownTemplate("no body for template " + std::string(to_string(id)));
  return it->second;
}

std::vector<std::string> PromptLibrary::slots(TemplateId id) const {
  std::vector<std::string> out;
  scan_template(
      body(id), [](std::string_view) {},
      [&out](std::string name) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
      });
  return out;
}

std::string PromptLibrary::render(TemplateId id, const Slots& slots) const {
  const auto& b = body(id);
  std::string out;
  out.reserve(b.size());
  scan_template(
      b, [&out](std::string_view text) { out.append(text); },
      [&](const std::string& name) {
        auto it = slots.find(name);
        if (it == slots.end()) throw MissingSlot(std::string(to_string(id)), name);
        out += it->second;
      });
  return out;
}

std::string PromptLibrary::render(std::string_view id_name, const Slots& slots) const {
  auto id = parse_template_id(id_name);
  if (!id) throw UnknownTemplate("unknown template " + std::string(id_name));
  return render(*id, slots);
}

std::string render(TemplateId id, const Slots& slots) { return PromptLibrary::builtin().render(id, slots); }

}  // namespace nckg

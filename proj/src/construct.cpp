#include "nckg/construct.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "nckg/io.hpp"
#include "nckg/turtle.hpp"
#include "nckg/vocab.hpp"

namespace nckg {

using json = nlohmann::json;
using namespace vocab;

ExtractionError::ExtractionError(std::string step, const std::string& message)
    : Error(message), step_(std::move(step)) {}

std::string_view to_string(EntityRole r) {
  switch (r) {
    case EntityRole::Actor:
      return "actor";
    case EntityRole::Object:
      return "object";
    case EntityRole::Property:
      return "property";
    case EntityRole::Constraint:
      return "constraint";
  }
  return "?";
}

std::optional<EntityRole> parse_entity_role(std::string_view s) {
  for (auto r : {EntityRole::Actor, EntityRole::Object, EntityRole::Property, EntityRole::Constraint}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

Iri upper_class(EntityRole r) {
  switch (r) {
    case EntityRole::Actor:
      return contract_actor();
    case EntityRole::Object:
      return contract_object();
    case EntityRole::Property:
      return contract_property();
    case EntityRole::Constraint:
      return contract_constraint();
  }
  return contract_object();
}

std::string_view class_description(EntityRole r) {
  switch (r) {
    case EntityRole::Actor:
      return "a party or role that acts under the contract, such as Employer, Contractor or Project Manager";
    case EntityRole::Object:
      return "a thing a contract actor acts on, such as a document, a payment, a part of the works, the site or "
             "a piece of information";
    case EntityRole::Property:
      return "a definition, status or inclusion that describes a contract object, such as not needed or "
             "submitted";
    case EntityRole::Constraint:
      return "a time, amount, result or condition that limits when or how an event happens, such as within 28 "
             "days";
  }
  return "";
}

std::string_view to_string(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::Pending:
      return "pending";
    case ReviewStatus::Approved:
      return "approved";
    case ReviewStatus::Rejected:
      return "rejected";
  }
  return "?";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
  return s;
}

bool word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::optional<ReviewStatus> parse_review_status(std::string_view s) {
  const auto l = lower(trim(s));
  for (auto st : {ReviewStatus::Pending, ReviewStatus::Approved, ReviewStatus::Rejected}) {
    if (to_string(st) == l) return st;
  }
  return std::nullopt;
}

std::string mint_local_name(std::string_view span) {
  std::string s(trim(span));
  // possessives: "Employer's" -> "Employer"
  for (const std::string_view apos : {"'s", "\xE2\x80\x99s"}) {
    for (auto pos = s.find(apos); pos != std::string::npos; pos = s.find(apos, pos)) {
      const auto end = pos + apos.size();
      if (end == s.size() || !word_char(static_cast<unsigned char>(s[end]))) {
        s.erase(pos, apos.size());
      } else {
        pos = end;
      }
    }
  }
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (word_char(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  while (words.size() > 1) {
    const auto w = lower(words.front());
    if (w != "the" && w != "a" && w != "an") break;
    words.erase(words.begin());
  }
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (i > 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
  }
  return out;
}

// ---- ClauseGraph ----

std::set<Iri> ClauseGraph::entities() const {
  std::set<Iri> out;
  for (const auto& [iri, role] : roles) out.insert(iri);
  return out;
}

std::set<Iri> ClauseGraph::relations() const {
  std::set<Iri> out;
  for (const auto& t : triples) {
    out.insert(t.predicate);
    for (const Term* side : {&t.subject, &t.object}) {
      if (const auto* q = std::get_if<QuotedTriple>(side)) out.insert(q->inner().predicate);
    }
  }
  return out;
}

std::vector<Term> ClauseGraph::events() const {
  std::vector<Term> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : triples) {
    for (const Term* side : {&t.subject, &t.object}) {
      if (is_quoted(*side) && seen.insert(canonical(*side)).second) out.push_back(*side);
    }
  }
  return out;
}

std::set<Iri> ClauseGraph::constraints() const {
  std::set<Iri> out;
  for (const auto& [iri, role] : roles) {
    if (role == EntityRole::Constraint) out.insert(iri);
  }
  return out;
}

std::string ClauseGraph::step_of(const Triple& t) const {
  auto it = provenance.find(canonical(t));
  return it == provenance.end() ? std::string(kStepManual) : it->second;
}

std::size_t ClauseGraph::nested_count() const {
  return static_cast<std::size_t>(std::count_if(triples.begin(), triples.end(), [](const Triple& t) {
    return is_quoted(t.subject) || is_quoted(t.object);
  }));
}

// ---- extraction ----

namespace {

struct Extractor {
  const Clause& clause;
  const OntologyModel& onto;
  Gateway& gateway;
  const ExtractOptions& opts;
  StagedExtraction out;

  std::string ask(TemplateId id, const Slots& slots, const std::string& step) {
    try {
      return gateway.ask(id, slots);
    } catch (const GatewayError& e) {
      std::throw_with_nested(ExtractionError(step, "clause " + clause.id + ", step " + step + ": " + e.what()));
    }
  }

  json parse_array(const std::string& content, const std::string& step) {
    const auto open = content.find('[');
    const auto close = content.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      throw ExtractionError(step, "clause " + clause.id + ", step " + step + ": model output has no JSON array");
    }
    try {
      return json::parse(content.substr(open, close - open + 1));
    } catch (const json::exception& e) {
      throw ExtractionError(step,
                            "clause " + clause.id + ", step " + step + ": malformed model output: " + e.what());
    }
  }

  Iri mint(const std::string& span, EntityRole role) {
    const auto alias = opts.aliases.find(lower(trim(span)));
    const std::string local = alias != opts.aliases.end() ? alias->second : mint_local_name(span);
    Iri id = ckg(local);
    out.graph.minted.emplace(std::string(trim(span)), id);
    out.graph.roles.emplace(id, role);
    return id;
  }

  // NER: returns the minted entities in answer order, deduplicated.
  std::vector<std::pair<std::string, Iri>> ner(EntityRole role) {
    const std::string cls(local_name(upper_class(role).value));
    const std::string step = "ner:" + cls;
    const auto arr = parse_array(ask(TemplateId::NER,
                                     {{"target_class", cls},
                                      {"class_description", std::string(class_description(role))},
                                      {"clause", clause.text}},
                                     step),
                                 step);
    std::vector<std::pair<std::string, Iri>> found;
    for (const auto& item : arr) {
      if (!item.is_string()) {
        out.warnings.push_back(step + ": ignored non-string item " + item.dump());
        continue;
      }
      const std::string span(trim(item.get<std::string>()));
      if (mint_local_name(span).empty()) {
        out.warnings.push_back(step + ": ignored span without letters or digits: \"" + span + "\"");
        continue;
      }
      const Iri id = mint(span, role);
      const bool dup = std::any_of(found.begin(), found.end(), [&](const auto& f) { return f.second == id; });
      if (!dup) found.emplace_back(span, id);
    }
    return found;
  }

  using Allowed = std::map<std::string, Term>;  // lookup key -> term

  static std::string key(std::string_view s) { return lower(mint_local_name(s)); }

  static void allow(Allowed& a, const std::string& label, const Term& t) {
    a.emplace(key(label), t);
    if (const auto* i = std::get_if<Iri>(&t)) a.emplace(lower(std::string(local_name(i->value))), t);
  }

  static std::string listing(const std::vector<std::string>& labels) {
    std::string s;
    for (const auto& l : labels) s += l + "\n";
    if (!s.empty()) s.pop_back();
    return s;
  }

  struct Link {
    Term head;
    Iri relation;
    Term tail;
  };

  std::vector<Link> link(const std::string& step, const std::string& link_type, const std::string& guidance,
                         const std::vector<std::string>& head_labels, const Allowed& heads,
                         const std::vector<std::string>& tail_labels, const Allowed& tails) {
    const auto arr = parse_array(ask(TemplateId::RELATION_LINK,
                                     {{"link_type", link_type},
                                      {"link_guidance", guidance},
                                      {"clause", clause.text},
                                      {"heads", listing(head_labels)},
                                      {"tails", listing(tail_labels)}},
                                     step),
                                 step);
    std::vector<Link> links;
    for (const auto& item : arr) {
      if (!item.is_array() || item.size() != 3 || !item[0].is_string() || !item[1].is_string() ||
          !item[2].is_string()) {
        out.warnings.push_back(step + ": ignored malformed tuple " + item.dump());
        continue;
      }
      auto label_key = [](const std::string& s) {
        const auto eq = s.find('=');
        return key(eq == std::string::npos ? s : s.substr(0, eq));
      };
      const auto h = heads.find(label_key(item[0].get<std::string>()));
      const auto t = tails.find(label_key(item[2].get<std::string>()));
      const auto rel = mint_local_name(item[1].get<std::string>());
      if (h == heads.end() || t == tails.end() || rel.empty()) {
        out.warnings.push_back(step + ": dropped tuple outside the allowed elements " + item.dump());
        continue;
      }
      if (h->second == t->second) {
        out.warnings.push_back(step + ": dropped self link " + item.dump());
        continue;
      }
      links.push_back({h->second, ckg(rel), t->second});
    }
    return links;
  }

  std::string label_of(const Term& t) const {
    if (const auto* i = std::get_if<Iri>(&t)) return std::string(local_name(i->value));
    const auto& in = std::get<QuotedTriple>(t).inner();
    return "<<" + label_of(in.subject) + " " + std::string(local_name(in.predicate.value)) + " " +
           label_of(in.object) + ">>";
  }

  void add(const Triple& t, std::string_view step) {
    const auto c = canonical(t);
    if (out.graph.provenance.emplace(c, std::string(step)).second) out.graph.triples.push_back(t);
  }

  void run() {
    out.clause = clause;
    out.graph.clause_id = clause.id;

    // (1) actors and objects
    const auto actors = ner(EntityRole::Actor);
    const auto objects = ner(EntityRole::Object);
    if (actors.empty() && objects.empty()) {
      throw EmptyExtraction("clause " + clause.id + ": no contract actor or object recognized");
    }

    // events in creation order, with the step that made them
    std::vector<std::pair<Term, std::string>> events;
    auto add_event = [&](const Link& l, std::string_view step) {
      Term ev = quote(l.head, l.relation, l.tail);
      const bool dup = std::any_of(events.begin(), events.end(), [&](const auto& e) { return e.first == ev; });
      if (!dup) events.emplace_back(std::move(ev), std::string(step));
    };

    // (2) actor -> object events
    if (!actors.empty() && !objects.empty()) {
      Allowed heads, tails;
      std::vector<std::string> hl, tl;
      for (const auto& [span, id] : actors) {
        allow(heads, span, id);
        hl.push_back(span);
      }
      for (const auto* list : {&objects, &actors}) {
        for (const auto& [span, id] : *list) {
          allow(tails, span, id);
          tl.push_back(span);
        }
      }
      const auto links = link(std::string(kStepRelationLink), "ContractActor -> relation -> ContractObject",
                              "Heads are contract actors. Tails are contract objects, or other actors when the "
                              "action is directed at them. The relation is the action, for example submit or "
                              "makePaymentTo.",
                              hl, heads, tl, tails);
      for (const auto& l : links) add_event(l, kStepRelationLink);
    }

    // (3) object properties
    const auto props = ner(EntityRole::Property);
    if (!objects.empty() && !props.empty()) {
      Allowed heads, tails;
      std::vector<std::string> hl, tl;
      for (const auto& [span, id] : objects) {
        allow(heads, span, id);
        hl.push_back(span);
      }
      for (const auto& [span, id] : props) {
        allow(tails, span, id);
        tl.push_back(span);
      }
      auto links = link(std::string(kStepPropertyLink), "ContractObject -> hasProperty -> ContractProperty",
                        "Use hasProperty, or hasDefinition, hasInclusion or hasStatus when the clause is that "
                        "specific.",
                        hl, heads, tl, tails);
      for (auto& l : links) {
        if (!onto.is_property_relation(l.relation)) {
          out.warnings.push_back(std::string(kStepPropertyLink) + ": relation " +
                                 std::string(local_name(l.relation.value)) + " replaced by hasProperty");
          l.relation = has_property();
        }
        add_event(l, kStepPropertyLink);
      }
    }

    // (4) constraints
    const auto constraints = ner(EntityRole::Constraint);

    // (5) nested links
    std::vector<Triple> nested;
    if (!events.empty() && (events.size() >= 2 || !constraints.empty())) {
      Allowed heads, tails;
      std::vector<std::string> hl, tl;
      for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string label = "E" + std::to_string(i + 1);
        heads.emplace(lower(label), events[i].first);
        tails.emplace(lower(label), events[i].first);
        hl.push_back(label + " = " + label_of(events[i].first));
        tl.push_back(label + " = " + label_of(events[i].first));
      }
      for (const auto& [span, id] : constraints) {
        allow(tails, span, id);
        tl.push_back(span);
      }
      const auto links =
          link(std::string(kStepNestedLink), "ContractEvent -> relation -> ContractEvent or ContractConstraint",
               "Heads and event tails are the labelled events. Link an event to a constraint with hasConstraint, "
               "hasTimeConstraint, hasAmountConstraint, hasResultConstraint or hasConditionConstraint. Link two "
               "events with a concrete conditional or temporal relation such as hasCondition, exception, unless, "
               "before, after or within90DaysOf.",
               hl, heads, tl, tails);
      for (auto l : links) {
        if (is_quoted(l.tail)) {
          if (l.relation == has_contractual_relation()) {
            out.warnings.push_back(std::string(kStepNestedLink) +
                                   ": dropped abstract hasContractualRelation link, a concrete relation is needed");
            continue;
          }
        } else if (!onto.is_constraint_relation(l.relation)) {
          out.warnings.push_back(std::string(kStepNestedLink) + ": relation " +
                                 std::string(local_name(l.relation.value)) + " replaced by hasConstraint");
          l.relation = has_constraint();
        }
        nested.push_back(Triple{l.head, l.relation, l.tail});
      }
    }

    // events quoted by a nested triple stay quoted; the rest are asserted
    std::set<std::string> quoted;
    for (const auto& t : nested) {
      for (const Term* side : {&t.subject, &t.object}) {
        if (is_quoted(*side)) quoted.insert(canonical(*side));
      }
    }
    for (const auto& [ev, step] : events) {
      if (!quoted.contains(canonical(ev))) add(std::get<QuotedTriple>(ev).inner(), step);
    }
    for (const auto& t : nested) add(t, kStepNestedLink);

    if (out.graph.triples.empty()) {
      throw EmptyExtraction("clause " + clause.id + ": no events could be linked");
    }
  }
};

}  // namespace

StagedExtraction extract_clause(const Clause& clause, const OntologyModel& onto, Gateway& gateway,
                                const ExtractOptions& opts) {
  Extractor ex{clause, onto, gateway, opts, {}};
  ex.run();
  return std::move(ex.out);
}

// ---- staging files ----

namespace {

constexpr std::string_view kStepMarker = "  # step:";

PrefixMap staging_prefixes() {
  return {{"ckg", std::string(kCkg)}, {"rdf", std::string(kRdf)}, {"rdfs", std::string(kRdfs)}};
}

void header(std::string& out, std::string_view key, const json& value) {
  out += "# ";
  out += key;
  out += ": ";
  out += value.dump();
  out += '\n';
}

}  // namespace

std::string staging_to_string(const StagedExtraction& s) {
  std::string out;
  header(out, "clause", s.clause.id);
  out += "# source: " + std::string(to_string(s.clause.source)) + "\n";
  header(out, "section", s.clause.section);
  out += "# status: " + std::string(to_string(s.status)) + "\n";
  header(out, "note", s.reviewer_note);
  header(out, "text", s.clause.text);
  for (const auto& w : s.warnings) header(out, "warning", w);
  for (const auto& [id, role] : s.graph.roles) header(out, "role", json::array({std::string(to_string(role)), id.value}));
  for (const auto& [span, id] : s.graph.minted) header(out, "mint", json::array({span, id.value}));
  out += '\n';
  const auto prefixes = staging_prefixes();
  out += serialize(Document{prefixes, {}});
  out += '\n';
  for (const auto& t : s.graph.triples) {
    out += triple_to_string(t, prefixes);
    out += " .";
    out += kStepMarker;
    out += s.graph.step_of(t);
    out += '\n';
  }
  return out;
}

StagedExtraction staging_from_string(std::string_view text) {
  StagedExtraction s;
  bool have_clause = false;
  bool have_text = false;
  std::optional<ReviewStatus> status;
  std::vector<std::pair<std::string, std::string>> tagged;  // triple text, step

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ", 2);
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string value = line.substr(colon + 2);
      auto js = [&]() {
        try {
          return json::parse(value);
        } catch (const json::exception& e) {
          throw StagingError("staging line " + std::to_string(lineno) + ": bad " + key + " header: " + e.what());
        }
      };
      try {
        if (key == "clause") {
          s.clause.id = js().get<std::string>();
          have_clause = true;
        } else if (key == "source") {
          s.clause.source = parse_clause_source(trim(value));
        } else if (key == "section") {
          s.clause.section = js().get<std::string>();
        } else if (key == "status") {
          status = parse_review_status(value);
          if (!status) {
            throw StagingError("staging line " + std::to_string(lineno) + ": unknown status \"" + value + "\"");
          }
        } else if (key == "note") {
          s.reviewer_note = js().get<std::string>();
        } else if (key == "text") {
          s.clause.text = js().get<std::string>();
          have_text = true;
        } else if (key == "warning") {
          s.warnings.push_back(js().get<std::string>());
        } else if (key == "role") {
          const auto v = js();
          const auto role = parse_entity_role(v.at(0).get<std::string>());
          if (!role) throw StagingError("staging line " + std::to_string(lineno) + ": unknown role");
          s.graph.roles.emplace(Iri{v.at(1).get<std::string>()}, *role);
        } else if (key == "mint") {
          const auto v = js();
          s.graph.minted.emplace(v.at(0).get<std::string>(), Iri{v.at(1).get<std::string>()});
        }
      } catch (const json::exception& e) {
        throw StagingError("staging line " + std::to_string(lineno) + ": bad " + key + " header: " + e.what());
      }
      continue;
    }
    const auto mark = line.rfind(kStepMarker);
    if (mark != std::string::npos) {
      tagged.emplace_back(line.substr(0, mark), std::string(trim(line.substr(mark + kStepMarker.size()))));
    }
  }
  if (!status) throw StatusMissing("staging file has no '# status:' header");
  if (!have_clause) throw StagingError("staging file has no '# clause:' header");
  if (!have_text) throw StagingError("staging file has no '# text:' header");
  s.status = *status;

  const Document doc = parse(text);
  s.graph.clause_id = s.clause.id;
  std::string prefix_block;
  for (const auto& [p, ns] : doc.prefixes) prefix_block += "@prefix " + p + ": <" + ns + "> .\n";
  std::map<std::string, std::string> steps;
  for (const auto& [body, step] : tagged) {
    try {
      for (const auto& t : parse(prefix_block + body).triples) steps.emplace(canonical(t), step);
    } catch (const ParseError&) {
      // a line the full parse accepted only in context; it falls back to "manual"
    }
  }
  for (const auto& t : doc.triples) {
    const auto c = canonical(t);
    if (s.graph.provenance.contains(c)) continue;
    auto it = steps.find(c);
    s.graph.provenance.emplace(c, it == steps.end() ? std::string(kStepManual) : it->second);
    s.graph.triples.push_back(t);
  }
  return s;
}

void write_staging(const StagedExtraction& staged, const std::filesystem::path& path) {
  write_file_atomic(path, staging_to_string(staged));
}

StagedExtraction read_staging(const std::filesystem::path& path) { return staging_from_string(read_file(path)); }

// ---- commit ----

std::vector<Triple> commit_plan(const StagedExtraction& staged, const GraphStore& store,
                                const OntologyModel& onto) {
  std::vector<Triple> plan;
  std::unordered_set<std::string> seen;
  auto push = [&](Triple t) {
    if (store.contains(t)) return;
    if (seen.insert(canonical(t)).second) plan.push_back(std::move(t));
  };
  for (const auto& t : staged.graph.triples) push(t);

  // typing links for entities the graph actually uses
  std::set<Iri> used;
  std::function<void(const Term&)> visit = [&](const Term& term) {
    if (const auto* i = std::get_if<Iri>(&term)) {
      used.insert(*i);
    } else if (const auto* q = std::get_if<QuotedTriple>(&term)) {
      visit(q->inner().subject);
      visit(q->inner().object);
    }
  };
  for (const auto& t : staged.graph.triples) {
    visit(t.subject);
    visit(t.object);
  }
  for (const auto& [id, role] : staged.graph.roles) {
    if (!used.contains(id) || onto.is_class(id)) continue;
    if (!store.match(TriplePattern{id, rdf_type(), PatternTerm::any()}).empty()) continue;
    push(Triple{id, rdf_type(), upper_class(role)});
  }

  // concrete event-to-event predicates are annotated under the abstract relation
  for (const auto& t : staged.graph.triples) {
    if (classify_kind(t) != TripleKind::Evt2Evt || t.predicate == has_contractual_relation()) continue;
    push(Triple{t.predicate, subproperty_of(), has_contractual_relation()});
  }
  return plan;
}

CommitDelta commit(const StagedExtraction& staged, GraphStore& store, const OntologyModel& onto) {
  if (staged.status != ReviewStatus::Approved) {
    throw NotApproved("clause " + staged.clause.id + " is " + std::string(to_string(staged.status)) +
                      ", only approved extractions can be committed");
  }
  const auto plan = commit_plan(staged, store, onto);
  for (const auto& t : plan) store.check_insertable(t);
  CommitDelta d;
  for (const auto& t : plan) {
    if (!store.insert(t)) continue;
    ++d.triples_added;
    if (is_quoted(t.subject) || is_quoted(t.object)) ++d.nested_added;
  }
  return d;
}

// ---- corpus ingestion ----

SourceRow IngestSummary::total() const {
  SourceRow t;
  for (const auto& [src, r] : rows) {
    t.clauses += r.clauses;
    t.staged += r.staged;
    t.failed += r.failed;
    t.triples += r.triples;
    t.nested += r.nested;
  }
  return t;
}

std::string IngestSummary::to_markdown() const {
  std::ostringstream os;
  os << "| Source | Clauses | Staged | Failed | Triples | Nested triples |\n";
  os << "|---|---:|---:|---:|---:|---:|\n";
  auto row = [&os](std::string_view name, const SourceRow& r) {
    os << "| " << name << " | " << r.clauses << " | " << r.staged << " | " << r.failed << " | " << r.triples
       << " | " << r.nested << " |\n";
  };
  for (const auto& [src, r] : rows) row(to_string(src), r);
  row("Total", total());
  return os.str();
}

std::string staging_file_name(std::string_view clause_id) {
  std::string name;
  for (char c : clause_id) {
    const auto u = static_cast<unsigned char>(c);
    name += (std::isalnum(u) != 0 || c == '.' || c == '-' || c == '_') ? c : '_';
  }
  if (name.empty() || name.front() == '.') name.insert(name.begin(), '_');
  return name + ".stage.ttls";
}

IngestSummary ingest_corpus(std::string_view jsonl, const OntologyModel& onto, Gateway& gateway,
                            const std::filesystem::path& out_dir, const IngestOptions& opts) {
  IngestSummary summary;
  std::vector<ClauseLine> lines = read_clause_lines(jsonl);
  std::vector<std::size_t> todo;
  std::vector<std::filesystem::path> paths(lines.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].clause) {
      summary.failures.push_back({lines[i].line, "", lines[i].error});
      continue;
    }
    summary.rows[lines[i].clause->source].clauses++;
    std::string name = staging_file_name(lines[i].clause->id);
    for (int n = 2; names.contains(name); ++n) {
      name = staging_file_name(lines[i].clause->id + "-" + std::to_string(n));
    }
    names.insert(name);
    paths[i] = out_dir / name;
    todo.push_back(i);
  }

  std::vector<std::optional<StagedExtraction>> results(lines.size());
  std::vector<std::string> errors(lines.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto k = next.fetch_add(1); k < todo.size(); k = next.fetch_add(1)) {
      const auto i = todo[k];
      try {
        auto staged = extract_clause(*lines[i].clause, onto, gateway, opts.extract);
        write_staging(staged, paths[i]);
        results[i] = std::move(staged);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t workers = opts.workers != 0 ? opts.workers : gateway.max_in_flight();
  workers = std::max<std::size_t>(1, std::min(workers, todo.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto i : todo) {
    auto& row = summary.rows[lines[i].clause->source];
    if (results[i]) {
      ++row.staged;
      row.triples += results[i]->graph.triples.size();
      row.nested += results[i]->graph.nested_count();
      summary.files.push_back(paths[i]);
    } else {
      ++row.failed;
      summary.failures.push_back({lines[i].line, lines[i].clause->id, errors[i]});
    }
  }
  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const IngestFailure& a, const IngestFailure& b) { return a.line < b.line; });
  return summary;
}

}  // namespace nckg

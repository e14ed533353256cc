#include "nckg/eval.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace nckg {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

MissingVerdict::MissingVerdict(std::vector<std::string> clause_ids)
    : Error("no verdict for clause(s): " + join(clause_ids, ", ")), ids_(std::move(clause_ids)) {}

std::vector<ConfusionCell> confusion(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  if (gold.size() != pred.size()) {
    throw LengthMismatch("gold has " + std::to_string(gold.size()) + " entries, predictions " +
                         std::to_string(pred.size()));
  }
  std::vector<ConfusionCell> cells;
  for (auto label : kRiskCategories) {
    ConfusionCell c;
    c.label = label;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i].contains(label);
      const bool p = pred[i].contains(label);
      if (g && p) {
        ++c.tp;
      } else if (p) {
        ++c.fp;
      } else if (g) {
        ++c.fn;
      } else {
        ++c.tn;
      }
    }
    cells.push_back(c);
  }
  return cells;
}

LabelMetrics metrics(const ConfusionCell& cell) {
  LabelMetrics m;
  const auto tp = static_cast<double>(cell.tp);
  if (cell.tp + cell.fp > 0) m.precision = tp / static_cast<double>(cell.tp + cell.fp);
  if (cell.tp + cell.fn > 0) m.recall = tp / static_cast<double>(cell.tp + cell.fn);
  if (m.precision + m.recall > 0) m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double macro_f1(const std::vector<ConfusionCell>& cells) {
  double sum = 0;
  for (auto label : kRiskCategories) {
    for (const auto& c : cells) {
      if (c.label == label) {
        sum += metrics(c).f1;
        break;
      }
    }
  }
  return sum / static_cast<double>(kRiskCategories.size());
}

std::vector<AnnotatedClause> read_gold(std::string_view jsonl) {
  std::vector<AnnotatedClause> out;
  std::set<std::string> ids;
  std::size_t lineno = 0;
  for (auto line : lines_of(jsonl)) {
    ++lineno;
    if (blank(line)) continue;
    auto fail = [&](const std::string& msg) { return GoldFormatError("gold line " + std::to_string(lineno) + ": " + msg); };
    AnnotatedClause a;
    try {
      const auto j = json::parse(line);
      a.clause.id = j.at("id").get<std::string>();
      a.clause.text = j.value("text", "");
      a.clause.section = j.value("section", "");
      a.clause.source = parse_clause_source(j.value("source", "Other"));
      for (const auto& c : j.at("categories")) {
        const auto cat = parse_risk_category(c.get<std::string>());
        if (!cat) throw fail("unknown category " + c.get<std::string>());
        a.gold_categories.insert(*cat);
      }
      const auto type = parse_risk_type(j.at("risk_type").get<std::string>());
      if (!type) throw fail("unknown risk type " + j.at("risk_type").get<std::string>());
      a.gold_risk_type = *type;
      a.gold_summary = j.value("summary", "");
      if (j.contains("category_types")) {
        for (const auto& [k, v] : j.at("category_types").items()) {
          const auto cat = parse_risk_category(k);
          const auto t = parse_risk_type(v.get<std::string>());
          if (!cat || !t) throw fail("bad category_types entry " + k);
          a.category_types[*cat] = *t;
        }
      }
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    if (a.clause.id.empty()) throw fail("empty id");
    if (a.gold_categories.empty() && a.gold_risk_type != RiskType::NoRisk) {
      throw fail("no categories given for a risky clause");
    }
    if (!ids.insert(a.clause.id).second) throw fail("duplicate id " + a.clause.id);
    out.push_back(std::move(a));
  }
  return out;
}

std::map<std::string, double> read_rs_scores(std::string_view jsonl) {
  std::map<std::string, double> out;
  std::size_t lineno = 0;
  for (auto line : lines_of(jsonl)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      const auto j = json::parse(line);
      out[j.at("id").get<std::string>()] = j.at("score").get<double>();
    } catch (const json::exception& e) {
      throw GoldFormatError("score line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RiskVerdict> read_verdicts(std::string_view jsonl) {
  std::vector<RiskVerdict> out;
  std::size_t lineno = 0;
  for (auto line : lines_of(jsonl)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      out.push_back(verdict_from_json(line));
    } catch (const Error& e) {
      throw Error("verdict line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Report evaluate_run(const std::vector<AnnotatedClause>& dataset, const std::vector<RiskVerdict>& verdicts,
                    const std::optional<std::map<std::string, double>>& rs_scores) {
  std::map<std::string, const RiskVerdict*> by_id;
  for (const auto& v : verdicts) by_id.emplace(v.clause_id, &v);

  std::vector<std::string> missing;
  for (const auto& a : dataset) {
    if (!by_id.contains(a.clause.id)) missing.push_back(a.clause.id);
  }
  if (!missing.empty()) throw MissingVerdict(missing);

  Report r;
  r.n = dataset.size();
  if (!verdicts.empty()) r.mode = verdicts.front().mode;
  std::vector<LabelSet> gold, pred;
  std::size_t exact = 0;
  for (const auto& a : dataset) {
    const auto& v = *by_id.at(a.clause.id);
    LabelSet p;
    std::set<std::pair<RiskCategory, RiskType>> pairs, gold_pairs;
    for (const auto& as : v.assessments) {
      if (!as.category) {
        ++r.unknown_labels;
        continue;
      }
      p.insert(*as.category);
      pairs.emplace(*as.category, as.risk_type);
    }
    for (auto c : a.gold_categories) {
      auto it = a.category_types.find(c);
      gold_pairs.emplace(c, it == a.category_types.end() ? a.gold_risk_type : it->second);
    }
    if (pairs == gold_pairs) ++exact;
    gold.push_back(a.gold_categories);
    pred.push_back(std::move(p));
  }

  r.cells = confusion(gold, pred);
  for (const auto& c : r.cells) {
    r.per_label[c.label] = metrics(c);
    if (c.tp + c.fp == 0 || c.tp + c.fn == 0) r.degenerate.emplace_back(to_string(c.label));
  }
  r.macro_f1 = macro_f1(r.cells);
  r.exact_match = r.n == 0 ? 0.0 : static_cast<double>(exact) / static_cast<double>(r.n);

  if (rs_scores) {
    double sum = 0;
    std::size_t k = 0;
    for (const auto& a : dataset) {
      auto it = rs_scores->find(a.clause.id);
      if (it == rs_scores->end()) continue;
      sum += it->second;
      ++k;
    }
    if (k > 0) r.rs_mean = sum / static_cast<double>(k);
  }
  return r;
}

std::string report_to_json(const Report& r) {
  ojson j;
  j["mode"] = std::string(to_string(r.mode));
  j["n"] = r.n;
  j["macro_f1"] = r.macro_f1;
  j["rs_mean"] = r.rs_mean ? ojson(*r.rs_mean) : ojson(nullptr);
  ojson labels = ojson::object();
  for (const auto& c : r.cells) {
    const auto& m = r.per_label.at(c.label);
    ojson e;
    e["precision"] = m.precision;
    e["recall"] = m.recall;
    e["f1"] = m.f1;
    e["tp"] = c.tp;
    e["fp"] = c.fp;
    e["tn"] = c.tn;
    e["fn"] = c.fn;
    labels[std::string(to_string(c.label))] = std::move(e);
  }
  j["per_label"] = std::move(labels);
  j["exact_match"] = r.exact_match;
  j["unknown_labels"] = r.unknown_labels;
  j["degenerate_labels"] = r.degenerate;
  return j.dump(2) + "\n";
}

std::string report_to_markdown(const Report& r) {
  std::ostringstream os;
  os << "| Setting | n | RE-score (macro-F1) | RS-score |\n";
  os << "|---|---:|---:|---:|\n";
  os << "| " << to_string(r.mode) << " | " << r.n << " | " << fmt(100 * r.macro_f1, 1) << "% | "
     << (r.rs_mean ? fmt(*r.rs_mean, 1) + "%" : std::string("n/a")) << " |\n\n";
  os << "| Label | Precision | Recall | F1 | TP | FP | FN | TN |\n";
  os << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& c : r.cells) {
    const auto& m = r.per_label.at(c.label);
    os << "| " << to_string(c.label) << " | " << fmt(m.precision, 4) << " | " << fmt(m.recall, 4) << " | "
       << fmt(m.f1, 4) << " | " << c.tp << " | " << c.fp << " | " << c.fn << " | " << c.tn << " |\n";
  }
  os << "\nAuxiliary (category, risk type) exact match: " << fmt(100 * r.exact_match, 1) << "%\n";
  os << "Unknown predicted labels (excluded): " << r.unknown_labels << "\n";
  if (!r.degenerate.empty()) {
    os << "Labels with a zero denominator (metric taken as 0): " << join(r.degenerate, ", ") << "\n";
  }
  return os.str();
}

}  // namespace nckg

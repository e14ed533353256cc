// Acceptance harness: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "nckg/construct.hpp"
#include "nckg/eval.hpp"
#include "nckg/io.hpp"
#include "nckg/lexical_index.hpp"
#include "nckg/query.hpp"
#include "nckg/review.hpp"
#include "nckg/turtle.hpp"
#include "nckg/vocab.hpp"
#include "oracles.hpp"
#include "random_graph.hpp"
#include "scripted.hpp"

namespace fs = std::filesystem;
using namespace nckg;
using vocab::ckg;

namespace {

const std::string kFixtures = std::string(NCKG_DATA_DIR) + "/fixtures/";

// Collects failures for one criterion; the first few are reported.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Criterion {
  int number;
  const char* title;
  double budget_s;  // 0 means no time bound
  std::function<void(Check&)> body;
};

std::string scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("nckg_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::set<std::string> triple_set(const std::vector<Triple>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(canonical(t));
  return out;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "nckg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, [](const char*) -> const char* {
    return nullptr;
  });
  if (out_text) *out_text = out.str();
  if (code != 0) std::cerr << err.str();
  return code;
}

void parser_conformance(Check& c) {
  const std::vector<std::pair<const char*, std::vector<TripleKind>>> snippets = {
      {"patterns/conditional.ttls", {TripleKind::Evt2Evt}},
      {"patterns/exception.ttls", {TripleKind::Evt2Evt, TripleKind::Evt2Evt}},
      {"patterns/coordinating.ttls", {TripleKind::E2E, TripleKind::E2E, TripleKind::E2E}},
  };
  for (const auto& [file, kinds] : snippets) {
    const auto d = parse(read_file(kFixtures + file));
    c.expect(d.triples.size() == kinds.size(), std::string(file) + ": wrong triple count");
    for (std::size_t i = 0; i < std::min(kinds.size(), d.triples.size()); ++i) {
      c.expect(classify_kind(d.triples[i]) == kinds[i], std::string(file) + ": wrong kind");
    }
  }
  testing::RandomGraph g(1001);
  for (int i = 0; i < 1000; ++i) {
    const auto d = g.document(200, 3);
    const auto text = serialize(d);
    try {
      c.expect(triple_set(parse(text).triples) == triple_set(d.triples), "round trip differs on doc " + std::to_string(i));
    } catch (const std::exception& e) {
      c.expect(false, "round trip of doc " + std::to_string(i) + " failed to parse: " + e.what());
    }
  }
}

void store_query_oracle(Check& c) {
  testing::RandomGraph g(2002);
  int patterns = 0, queries = 0;
  while (patterns < 1000 || queries < 200) {
    GraphStore st;
    std::vector<Triple> all;
    for (const auto& t : g.document(static_cast<std::size_t>(g.uniform(1, 500)), 3).triples) {
      if (st.insert(t)) all.push_back(t);
    }
    st.prefixes() = {{"ckg", std::string(vocab::kCkg)}};
    for (int i = 0; i < 50 && patterns < 1000; ++i, ++patterns) {
      const auto p = g.pattern(all);
      c.expect(triple_set(st.match(p)) == oracle::scan(all, p), "pattern " + std::to_string(patterns));
    }
    for (int i = 0; i < 10 && queries < 200; ++i, ++queries) {
      Query q;
      q.select_all = true;
      q.prefixes = st.prefixes();
      q.alternatives = {{g.pattern(all)}};
      const auto table = evaluate(st, parse_query(to_sparql(q)));
      std::set<std::vector<std::string>> rows;
      for (const auto& r : table.rows) {
        std::vector<std::string> row;
        for (const auto& cell : r) row.push_back(cell ? canonical(*cell) : "");
        rows.insert(std::move(row));
      }
      c.expect(rows == oracle::scan_rows(all, q.alternatives[0][0], table.header), "query " + std::to_string(queries));
    }
  }
}

void advance_retrieval(Check& c) {
  GraphStore store;
  const auto doc = parse(read_file(kFixtures + "advance_seed.ttls"));
  store.prefixes() = doc.prefixes;
  for (const auto& t : doc.triples) store.insert(t);
  const auto& onto = OntologyModel::load_default();
  const auto index = build_index(store, onto);
  Gateway gw(MockBackend::from_file(kFixtures + "advance_mock.json"), "gpt-4o");
  const auto clause = read_clauses(read_file(kFixtures + "advance_clause.jsonl")).at(0);
  const auto b = retrieve(clause, store, index, onto, gw);

  c.expect(b.extracted_terms == std::vector<std::string>{"commencement date", "advance payment"}, "extracted terms");
  const auto advance = quote(ckg("Employer"), ckg("make"), ckg("advancePayment"));
  const Triple want{ckg("commencement"), ckg("hasCondition"), advance};
  c.expect(std::find(b.retrieved_triples.begin(), b.retrieved_triples.end(), want) != b.retrieved_triples.end(),
           "commencement hasCondition triple missing");
  c.expect(b.retrieved_risk_categories == std::set<RiskCategory>{RiskCategory::Payment, RiskCategory::Financial},
           "risk categories are not {Payment, Financial}");
  const auto term = std::find(b.extracted_terms.begin(), b.extracted_terms.end(), "advance payment");
  if (term == b.extracted_terms.end()) return;
  const auto i = static_cast<std::size_t>(term - b.extracted_terms.begin());
  const auto& ents = b.entity_matches.at(i);
  c.expect(!ents.empty() && ents[0].id == canonical(ckg("advancePayment")), "advancePayment is not entity rank 1");
  c.expect(!ents.empty() && std::abs(ents[0].score - 1.0) < 1e-9, "entity rank-1 score is not 1.0");
  const auto& evs = b.event_matches.at(i);
  bool top2 = false;
  for (std::size_t k = 0; k < std::min<std::size_t>(2, evs.size()); ++k) top2 |= evs[k].id == canonical(advance);
  c.expect(top2, "advance payment event not in top-2 events");
}

void tfidf_numerics(Check& c) {
  const SparseVector x{{0, 1}, {1, 2}, {2, 3}};
  const SparseVector y{{0, 4}, {1, 5}, {2, 6}};
  c.expect(std::abs(cosine(x, y) - 0.974632) < 1e-6, "cosine((1,2,3),(4,5,6))");

  std::mt19937 rng(4004);
  const std::vector<std::string> words = {"payment", "advance", "date",     "notice", "site",   "works",   "contractor",
                                          "employer", "within", "days",     "90",     "guarantee", "engineer", "defects"};
  for (std::size_t n : {1u, 7u, 100u, 1000u}) {
    std::vector<std::vector<std::string>> toks;
    std::vector<LabelDoc> docs;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> t;
      const int len = std::uniform_int_distribution<int>(1, 6)(rng);
      for (int j = 0; j < len; ++j) t.push_back(words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)]);
      LabelDoc d;
      d.id = "d" + std::to_string(i);
      d.tokens = t;
      docs.push_back(std::move(d));
      toks.push_back(std::move(t));
    }
    const LexicalIndex idx(docs);
    const oracle::TfIdf ref(toks);
    for (std::size_t d = 0; d < n; ++d) {
      for (const auto& w : words) {
        if (std::abs(idx.weight(d, w) - ref.weight(d, w)) > 1e-9) {
          c.expect(false, "weight differs: n=" + std::to_string(n) + " doc " + std::to_string(d) + " " + w);
        }
      }
    }
    for (int q = 0; q < 20; ++q) {
      const std::string query = words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)] + " " +
                                words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
      for (const auto& m : idx.top_k(query, n)) {
        c.expect(std::abs(m.score - ref.score(query, m.doc)) < 1e-9, "cosine differs for '" + query + "'");
      }
    }
  }
}

void verdict_formats(Check& c) {
  using P = std::pair<std::optional<RiskCategory>, RiskType>;
  const std::vector<std::pair<const char*, P>> cases = {
      {"Payment--Unbalanced Obligation", {RiskCategory::Payment, RiskType::UnbalancedObligation}},
      {"Payment-No risk", {RiskCategory::Payment, RiskType::NoRisk}},
      {"[Assignment]-[No risk]", {RiskCategory::Assignment, RiskType::NoRisk}},
  };
  for (const auto& [text, want] : cases) {
    try {
      const auto v = parse_verdict(text);
      c.expect(v.assessments.size() == 1 && P{v.assessments[0].category, v.assessments[0].risk_type} == want,
               std::string("wrong pair for ") + text);
    } catch (const std::exception& e) {
      c.expect(false, std::string(text) + ": " + e.what());
    }
  }
}

LabelSet subset(unsigned bits) {
  LabelSet s;
  for (std::size_t i = 0; i < kRiskCategories.size(); ++i) {
    if ((bits >> i) & 1U) s.insert(kRiskCategories[i]);
  }
  return s;
}

void eval_oracle(Check& c) {
  using C = RiskCategory;
  const std::vector<LabelSet> gold = {{C::Payment, C::Financial}, {C::Payment}, {C::Liability}};
  const std::vector<LabelSet> pred = {{C::Payment}, {C::Payment, C::Temporal}, {C::DSC}};
  // Hand-enumerated: label -> (tp, fp, tn, fn).
  const std::map<C, std::array<std::size_t, 4>> hand = {
      {C::Payment, {2, 0, 1, 0}},   {C::Financial, {0, 0, 2, 1}}, {C::Temporal, {0, 1, 2, 0}},
      {C::Liability, {0, 0, 2, 1}}, {C::DSC, {0, 1, 2, 0}},       {C::Assignment, {0, 0, 3, 0}},
  };
  const auto cells = confusion(gold, pred);
  c.expect(cells.size() == 6, "six confusion cells");
  for (const auto& cell : cells) {
    const auto& h = hand.at(cell.label);
    c.expect(cell.tp == h[0] && cell.fp == h[1] && cell.tn == h[2] && cell.fn == h[3], "worked example cell");
  }
  c.expect(macro_f1(cells) == 1.0 / 6.0, "worked example macro-F1");

  for (unsigned g = 0; g < 64; ++g) {
    for (unsigned p = 0; p < 64; ++p) {
      const std::vector<LabelSet> gs{subset(g)}, ps{subset(p)};
      if (macro_f1(confusion(gs, ps)) != oracle::macro_f1(gs, ps)) c.expect(false, "exhaustive single-clause instance");
    }
  }
  std::mt19937 rng(6006);
  std::uniform_int_distribution<unsigned> bits(0, 63);
  for (int i = 0; i < 2000; ++i) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    std::vector<LabelSet> gs, ps;
    for (std::size_t k = 0; k < n; ++k) {
      gs.push_back(subset(bits(rng)));
      ps.push_back(subset(bits(rng)));
    }
    const double f = macro_f1(confusion(gs, ps));
    if (f != oracle::macro_f1(gs, ps)) c.expect(false, "random instance differs from oracle");
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<LabelSet> g2, p2;
    for (auto k : order) {
      g2.push_back(gs[k]);
      p2.push_back(ps[k]);
    }
    if (macro_f1(confusion(g2, p2)) != f) c.expect(false, "macro-F1 changes under permutation");
  }
}

void review_determinism(Check& c) {
  const auto dir = scratch("determinism");
  const auto store = dir + "/store.ttls";
  c.expect(cli({"--store", store, "import", kFixtures + "advance_seed.ttls"}) == 0, "import seed");
  std::vector<std::string> outputs;
  for (int run = 0; run < 3; ++run) {
    const auto out = dir + "/run" + std::to_string(run);
    const int code = cli({"--store", store, "--backend", "mock:" + kFixtures + "review6_mock.json", "-o", out, "review",
                          kFixtures + "review6.jsonl", "--mode", "nckg"});
    c.expect(code == 0, "review run " + std::to_string(run) + " exited " + std::to_string(code));
    outputs.push_back(fs::exists(out + "/verdicts.jsonl") ? read_file(out + "/verdicts.jsonl") : "");
  }
  c.expect(std::count(outputs[0].begin(), outputs[0].end(), '\n') == 6, "expected 6 verdict lines");
  c.expect(outputs[0] == outputs[1] && outputs[1] == outputs[2], "verdicts.jsonl differs between runs");
  fs::remove_all(dir);
}

void scale_sanity(Check& c) {
  const auto dir = scratch("scale");
  const auto corpus = testing::make_synthetic_corpus(57, 86);
  Gateway gw(std::make_shared<testing::ScriptedBackend>(corpus.answers), "gpt-4o");
  const auto& onto = OntologyModel::load_default();
  const auto sum = ingest_corpus(corpus.jsonl, onto, gw, dir);
  c.expect(sum.failures.empty(), std::to_string(sum.failures.size()) + " clauses failed to ingest");
  c.expect(sum.files.size() == 143, "expected 143 staged files, got " + std::to_string(sum.files.size()));

  GraphStore store;
  for (const auto& f : sum.files) {
    auto staged = read_staging(f);
    staged.status = ReviewStatus::Approved;
    commit(staged, store, onto);
  }
  const auto index = build_index(store, onto);
  c.expect(index.docs().size() > 0, "empty index");

  const auto s = store.stats();
  c.expect(s.triples >= 335, "only " + std::to_string(s.triples) + " triples");
  c.expect(s.nested >= 179, "only " + std::to_string(s.nested) + " nested triples");
  const auto text = serialize(Document{store.prefixes(), store.triples()});
  const auto r = oracle::recount(text);
  c.expect(r.triples == s.triples, "recount triples " + std::to_string(r.triples) + " vs " + std::to_string(s.triples));
  c.expect(r.nested == s.nested, "recount nested " + std::to_string(r.nested) + " vs " + std::to_string(s.nested));
  c.expect(r.entities == s.entities,
           "recount entities " + std::to_string(r.entities) + " vs " + std::to_string(s.entities));
  c.expect(r.events == s.events, "recount events " + std::to_string(r.events) + " vs " + std::to_string(s.events));
  fs::remove_all(dir);
}

void report_shape(Check& c) {
  const auto dir = scratch("report");
  std::string out;
  const int code = cli({"-o", dir, "eval", kFixtures + "gold4.jsonl", kFixtures + "verdicts4_perfect.jsonl", "--rs",
                        kFixtures + "rs4.jsonl"},
                       &out);
  c.expect(code == 0, "eval exited " + std::to_string(code));
  const auto md = fs::exists(dir + "/report.md") ? read_file(dir + "/report.md") : "";
  c.expect(md.rfind("| Setting | n | RE-score (macro-F1) | RS-score |", 0) == 0, "report.md header");
  c.expect(md.find("| nckg | 4 | 66.7% | 85.0% |") != std::string::npos, "report.md summary row");
  c.expect(fs::exists(dir + "/report.json"), "report.json missing");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "parser conformance and random round trips", 5.0, parser_conformance},
      {2, "store and query match the linear-scan oracle", 10.0, store_query_oracle},
      {3, "golden retrieval for the advance payment clause", 1.0, advance_retrieval},
      {4, "TF-IDF and cosine numerics", 0.0, tfidf_numerics},
      {5, "verdict formats", 0.0, verdict_formats},
      {6, "evaluation oracle", 0.0, eval_oracle},
      {7, "end-to-end review determinism", 0.0, review_determinism},
      {8, "scale sanity on a 143-clause corpus", 5.0, scale_sanity},
      {9, "report for supplied gold and verdicts", 0.0, report_shape},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_s > 0 && secs >= cr.budget_s) {
      check.failures.push_back("took " + std::to_string(secs) + " s, budget " + std::to_string(cr.budget_s) + " s");
    }
    const bool ok = check.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("criterion %d: %s  %s (%.3f s)\n", cr.number, ok ? "PASS" : "FAIL", cr.title, secs);
    for (std::size_t i = 0; i < std::min<std::size_t>(5, check.failures.size()); ++i) {
      std::printf("    %s\n", check.failures[i].c_str());
    }
    if (check.failures.size() > 5) std::printf("    ... %zu more\n", check.failures.size() - 5);
  }
  return failed == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "json.hpp"
#include "nckg/eval.hpp"
#include "nckg/io.hpp"
#include "oracles.hpp"

namespace nckg {
namespace {

using C = RiskCategory;

const std::string kFixtures = std::string(NCKG_DATA_DIR) + "/fixtures/";

ConfusionCell cell_of(const std::vector<ConfusionCell>& cells, C label) {
  for (const auto& c : cells) {
    if (c.label == label) return c;
  }
  throw std::runtime_error("missing label");
}

ConfusionCell cell(C label, std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  return ConfusionCell{label, tp, fp, tn, fn};
}

const std::vector<LabelSet> kGold = {{C::Payment, C::Financial}, {C::Payment}, {C::Liability}};
const std::vector<LabelSet> kPred = {{C::Payment}, {C::Payment, C::Temporal}, {C::DSC}};

TEST(Confusion, WorkedExample) {
  const auto cells = confusion(kGold, kPred);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cell_of(cells, C::Payment), cell(C::Payment, 2, 0, 1, 0));
  EXPECT_EQ(cell_of(cells, C::Financial), cell(C::Financial, 0, 0, 2, 1));
  EXPECT_EQ(cell_of(cells, C::Temporal), cell(C::Temporal, 0, 1, 2, 0));
  EXPECT_EQ(cell_of(cells, C::Liability), cell(C::Liability, 0, 0, 2, 1));
  EXPECT_EQ(cell_of(cells, C::DSC), cell(C::DSC, 0, 1, 2, 0));
  EXPECT_EQ(cell_of(cells, C::Assignment), cell(C::Assignment, 0, 0, 3, 0));
  // Only Payment has a nonzero f1.
  EXPECT_DOUBLE_EQ(macro_f1(cells), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(macro_f1(cells), oracle::macro_f1(kGold, kPred));
}

TEST(Confusion, PerfectAndMismatched) {
  for (const auto& c : confusion(kGold, kGold)) {
    EXPECT_EQ(c.fp, 0u);
    EXPECT_EQ(c.fn, 0u);
  }
  EXPECT_THROW(confusion(kGold, {kPred[0]}), LengthMismatch);
}

TEST(Metrics, Arithmetic) {
  auto m = metrics(cell(C::Payment, 2, 0, 0, 0));
  EXPECT_DOUBLE_EQ(m.precision, 1.0);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_DOUBLE_EQ(m.f1, 1.0);
  m = metrics(cell(C::Payment, 0, 0, 0, 1));
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  m = metrics(cell(C::Payment, 3, 1, 0, 2));
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.6);
  EXPECT_NEAR(m.f1, 0.6667, 1e-4);
}

LabelSet subset(unsigned bits) {
  LabelSet s;
  for (std::size_t i = 0; i < kRiskCategories.size(); ++i) {
    if ((bits >> i) & 1U) s.insert(kRiskCategories[i]);
  }
  return s;
}

TEST(Confusion, AgreesWithExhaustiveOracle) {
  // Every (gold, pred) subset pair for one clause, then random instances up to 4 clauses.
  for (unsigned g = 0; g < 64; ++g) {
    for (unsigned p = 0; p < 64; ++p) {
      const std::vector<LabelSet> gold{subset(g)}, pred{subset(p)};
      const auto cells = confusion(gold, pred);
      const auto ref = oracle::confusion(gold, pred);
      for (const auto& c : cells) {
        const auto& r = ref.at(c.label);
        ASSERT_EQ(std::tie(c.tp, c.fp, c.fn, c.tn), std::tie(r.tp, r.fp, r.fn, r.tn));
      }
      ASSERT_DOUBLE_EQ(macro_f1(cells), oracle::macro_f1(gold, pred));
    }
  }
  std::mt19937 rng(3);
  std::uniform_int_distribution<unsigned> bits(0, 63);
  for (int i = 0; i < 5000; ++i) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<LabelSet> gold, pred;
    for (std::size_t k = 0; k < n; ++k) {
      gold.push_back(subset(bits(rng)));
      pred.push_back(subset(bits(rng)));
    }
    const auto cells = confusion(gold, pred);
    for (const auto& c : cells) ASSERT_EQ(c.tp + c.fp + c.fn + c.tn, n);
    const auto f = macro_f1(cells);
    ASSERT_DOUBLE_EQ(f, oracle::macro_f1(gold, pred));
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<LabelSet> g2, p2;
    for (auto k : order) {
      g2.push_back(gold[k]);
      p2.push_back(pred[k]);
    }
    ASSERT_EQ(macro_f1(confusion(g2, p2)), f);

    // A perfectly predicted extra clause never lowers recall.
    const auto extra = subset(bits(rng));
    auto g3 = gold, p3 = pred;
    g3.push_back(extra);
    p3.push_back(extra);
    const auto after = confusion(g3, p3);
    for (std::size_t k = 0; k < cells.size(); ++k) ASSERT_GE(metrics(after[k]).recall, metrics(cells[k]).recall);
  }
}

TEST(EvaluateRun, PerfectFixtureInAnyOrder) {
  const auto gold = read_gold(read_file(kFixtures + "gold_cover.jsonl"));
  auto verdicts = read_verdicts(read_file(kFixtures + "verdicts_cover_perfect.jsonl"));
  const auto r = evaluate_run(gold, verdicts);
  EXPECT_EQ(r.n, 4u);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
  EXPECT_DOUBLE_EQ(r.exact_match, 1.0);
  EXPECT_TRUE(r.degenerate.empty());
  std::reverse(verdicts.begin(), verdicts.end());
  const auto r2 = evaluate_run(gold, verdicts);
  EXPECT_EQ(report_to_json(r2), report_to_json(r));
  EXPECT_EQ(report_to_markdown(r2), report_to_markdown(r));
}

TEST(EvaluateRun, AbsentLabelsScoreZero) {
  // The four annotated examples never use Assignment or Temporal, so even a
  // perfect run scores 4/6 under the zero-denominator rule.
  const auto gold = read_gold(read_file(kFixtures + "gold4.jsonl"));
  const auto r = evaluate_run(gold, read_verdicts(read_file(kFixtures + "verdicts4_perfect.jsonl")));
  EXPECT_DOUBLE_EQ(r.macro_f1, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.exact_match, 1.0);
  EXPECT_EQ(r.degenerate, (std::vector<std::string>{"Assignment", "Temporal"}));
}

TEST(EvaluateRun, RsMean) {
  const auto gold = read_gold(read_file(kFixtures + "gold4.jsonl"));
  const auto verdicts = read_verdicts(read_file(kFixtures + "verdicts4_perfect.jsonl"));
  const auto r = evaluate_run(gold, verdicts, read_rs_scores(read_file(kFixtures + "rs4.jsonl")));
  ASSERT_TRUE(r.rs_mean.has_value());
  EXPECT_DOUBLE_EQ(*r.rs_mean, 85.0);

  std::vector<AnnotatedClause> two(gold.begin(), gold.begin() + 2);
  const std::map<std::string, double> rs = {{two[0].clause.id, 80}, {two[1].clause.id, 90}, {"elsewhere", 0}};
  EXPECT_DOUBLE_EQ(*evaluate_run(two, verdicts, rs).rs_mean, 85.0);
}

TEST(EvaluateRun, MissingVerdictsAreNamed) {
  const auto gold = read_gold(read_file(kFixtures + "gold4.jsonl"));
  auto verdicts = read_verdicts(read_file(kFixtures + "verdicts4_perfect.jsonl"));
  const auto dropped = verdicts.back().clause_id;
  verdicts.pop_back();
  try {
    evaluate_run(gold, verdicts);
    FAIL();
  } catch (const MissingVerdict& e) {
    EXPECT_EQ(e.clause_ids(), std::vector<std::string>{dropped});
  }
}

TEST(EvaluateRun, UnknownLabelsAreCountedNotScored) {
  const auto gold = read_gold(read_file(kFixtures + "gold_cover.jsonl"));
  auto verdicts = read_verdicts(read_file(kFixtures + "verdicts_cover_perfect.jsonl"));
  verdicts[0].assessments.push_back({std::nullopt, "Weather", RiskType::NoRisk});
  const auto r = evaluate_run(gold, verdicts);
  EXPECT_EQ(r.unknown_labels, 1u);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
}

TEST(Gold, FormatErrors) {
  EXPECT_THROW(read_gold(R"({"id":"a","categories":["Weather"],"risk_type":"No risk"})"), GoldFormatError);
  EXPECT_THROW(read_gold(R"({"id":"a","categories":[],"risk_type":"Ambiguity"})"), GoldFormatError);
  EXPECT_THROW(read_gold("{\"id\":\"a\",\"categories\":[],\"risk_type\":\"No risk\"}\n"
                         "{\"id\":\"a\",\"categories\":[],\"risk_type\":\"No risk\"}"),
               GoldFormatError);
  EXPECT_THROW(read_gold("not json"), GoldFormatError);
  EXPECT_EQ(read_gold(R"({"id":"a","categories":[],"risk_type":"No risk"})").size(), 1u);
}

TEST(Report, TableShape) {
  const auto gold = read_gold(read_file(kFixtures + "gold4.jsonl"));
  const auto verdicts = read_verdicts(read_file(kFixtures + "verdicts4_perfect.jsonl"));
  const auto r = evaluate_run(gold, verdicts, read_rs_scores(read_file(kFixtures + "rs4.jsonl")));
  const auto md = report_to_markdown(r);
  EXPECT_EQ(md.rfind("| Setting | n | RE-score (macro-F1) | RS-score |", 0), 0u);
  EXPECT_NE(md.find("| nckg | 4 | 66.7% | 85.0% |"), std::string::npos);
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j.at("per_label").size(), 6u);
  EXPECT_EQ(j.at("rs_mean"), 85.0);
}

}  // namespace
}  // namespace nckg

#include <gtest/gtest.h>

#include <random>

#include "nckg/io.hpp"
#include "nckg/lexical_index.hpp"
#include "nckg/vocab.hpp"
#include "oracles.hpp"

namespace nckg {
namespace {

using vocab::ckg;

GraphStore seed_store() {
  GraphStore st;
  for (const auto& t : parse(read_file(std::string(NCKG_DATA_DIR) + "/fixtures/advance_seed.ttls")).triples) {
    st.insert(t);
  }
  return st;
}

LabelDoc doc(std::string id, std::vector<std::string> tokens) {
  LabelDoc d;
  d.id = std::move(id);
  d.tokens = std::move(tokens);
  return d;
}

TEST(Tokenize, SplitsLabels) {
  EXPECT_EQ(tokenize("advancePayment"), (std::vector<std::string>{"advance", "payment"}));
  EXPECT_EQ(tokenize("DSC"), (std::vector<std::string>{"dsc"}));
  EXPECT_EQ(tokenize("within2weeksOf"), (std::vector<std::string>{"within", "2", "weeks", "of"}));
  EXPECT_EQ(tokenize("Employer-side_party"), (std::vector<std::string>{"employer", "side", "party"}));
}

TEST(Cosine, Basics) {
  const SparseVector a{{0, 1.0}, {2, 2.0}};
  const SparseVector b{{1, 3.0}};
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
  EXPECT_EQ(cosine(a, b), 0.0);
  EXPECT_EQ(cosine(a, {}), 0.0);
  const SparseVector x{{0, 1}, {1, 2}, {2, 3}};
  const SparseVector y{{0, 4}, {1, 5}, {2, 6}};
  EXPECT_NEAR(cosine(x, y), 0.974632, 1e-6);
  EXPECT_NEAR(cosine(x, y), oracle::dense_cosine({1, 2, 3}, {4, 5, 6}), 1e-12);
  EXPECT_NEAR(cosine(x, y), cosine(y, x), 1e-12);
}

TEST(LexicalIndex, ToyCorpusWeights) {
  const std::vector<std::vector<std::string>> toks = {{"advance", "payment"},
                                                      {"payment", "application", "payment"},
                                                      {"commencement", "date"},
                                                      {"commencement"},
                                                      {"notice", "to", "proceed"}};
  std::vector<LabelDoc> docs;
  for (std::size_t i = 0; i < toks.size(); ++i) docs.push_back(doc("d" + std::to_string(i), toks[i]));
  const LexicalIndex idx(docs);
  const oracle::TfIdf ref(toks);
  for (std::size_t d = 0; d < toks.size(); ++d) {
    for (const auto* t : {"advance", "payment", "application", "commencement", "date", "notice", "to", "zzz"}) {
      EXPECT_NEAR(idx.weight(d, t), ref.weight(d, t), 1e-9) << d << " " << t;
    }
  }
  EXPECT_EQ(idx.df("payment"), 2u);
  EXPECT_EQ(idx.df("zzz"), 0u);
}

TEST(LexicalIndex, SeedCatalog) {
  const auto st = seed_store();
  const auto idx = build_index(st, OntologyModel::load_default());
  bool entity = false, event = false;
  for (const auto& d : idx.docs()) {
    if (d.kind == DocKind::Entity && d.term == Term{ckg("advancePayment")}) entity = true;
    if (d.kind == DocKind::Event && d.term == quote(ckg("Employer"), ckg("make"), ckg("advancePayment"))) event = true;
    EXPECT_NE(d.term, Term{ckg("Payment")}) << "risk targets are not indexed";
  }
  EXPECT_TRUE(entity);
  EXPECT_TRUE(event);
}

TEST(LexicalIndex, SeedTopK) {
  const auto idx = build_index(seed_store(), OntologyModel::load_default());
  const auto ents = idx.top_k("advance payment", 2, DocKind::Entity);
  ASSERT_FALSE(ents.empty());
  EXPECT_EQ(idx.docs()[ents[0].doc].term, Term{ckg("advancePayment")});
  EXPECT_NEAR(ents[0].score, 1.0, 1e-9);

  const auto evs = idx.top_k("advance payment", 2, DocKind::Event);
  bool found = false;
  for (const auto& m : evs) {
    found = found || idx.docs()[m.doc].term == quote(ckg("Employer"), ckg("make"), ckg("advancePayment"));
  }
  EXPECT_TRUE(found);

  const auto comm = idx.top_k("commencement", 2, DocKind::Entity);
  ASSERT_EQ(comm.size(), 2u);
  std::set<Term, decltype([](const Term& a, const Term& b) { return canonical(a) < canonical(b); })> got;
  for (const auto& m : comm) got.insert(*idx.docs()[m.doc].term);
  EXPECT_TRUE(got.contains(ckg("commencement")));
  EXPECT_TRUE(got.contains(ckg("commencementDate")));
}

TEST(LexicalIndex, EmptyStore) {
  EXPECT_THROW(build_index(GraphStore(), OntologyModel::load_default()), EmptyStore);
}

TEST(LexicalIndex, RandomCorporaMatchBruteForce) {
  std::mt19937 rng(99);
  const std::vector<std::string> vocab_words = {"payment", "advance", "date", "notice", "site", "works",
                                                "contractor", "employer", "within", "days", "90", "guarantee"};
  for (int round = 0; round < 10; ++round) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 1000)(rng);
    std::vector<std::vector<std::string>> toks;
    std::vector<LabelDoc> docs;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> t;
      const auto len = std::uniform_int_distribution<int>(1, 5)(rng);
      for (int j = 0; j < len; ++j) {
        t.push_back(vocab_words[std::uniform_int_distribution<std::size_t>(0, vocab_words.size() - 1)(rng)]);
      }
      toks.push_back(t);
      docs.push_back(doc("d" + std::to_string(i), t));
    }
    const LexicalIndex idx(docs);
    const oracle::TfIdf ref(toks);
    for (int q = 0; q < 5; ++q) {
      std::string query;
      for (int j = 0; j < 2; ++j) {
        if (j > 0) query += ' ';
        query += vocab_words[std::uniform_int_distribution<std::size_t>(0, vocab_words.size() - 1)(rng)];
      }
      const auto top = idx.top_k(query, 5);
      for (const auto& m : top) EXPECT_NEAR(m.score, ref.score(query, m.doc), 1e-9);
      // Nothing outside the top-k outscores its last entry.
      if (top.size() == 5) {
        std::set<std::size_t> in_top;
        for (const auto& m : top) in_top.insert(m.doc);
        for (std::size_t d = 0; d < n; ++d) {
          if (!in_top.contains(d)) EXPECT_LE(ref.score(query, d), top.back().score + 1e-9);
        }
      }
      // Prefix property.
      const auto top6 = idx.top_k(query, 6);
      for (std::size_t i = 0; i < top.size(); ++i) EXPECT_EQ(top[i].doc, top6[i].doc);
    }
  }
}

TEST(LexicalIndex, SelfRetrieval) {
  const auto idx = build_index(seed_store(), OntologyModel::load_default());
  for (std::size_t d = 0; d < idx.n_docs(); ++d) {
    const auto& doc = idx.docs()[d];
    bool informative = false;
    for (const auto& t : doc.tokens) informative = informative || idx.idf(t) > 0;
    if (!informative) continue;
    std::string q;
    for (const auto& t : doc.tokens) q += t + " ";
    const auto top = idx.top_k(q, 1, doc.kind);
    ASSERT_FALSE(top.empty());
    EXPECT_NEAR(top[0].score, 1.0, 1e-9) << doc.id;
  }
}

}  // namespace
}  // namespace nckg

// Copyright 2026 The kpagg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kpagg/corpus.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "kpagg/errors.h"
#include "oracles/reference.h"

namespace kpagg {
namespace {

std::string Record(const std::string& id, const std::string& title, const std::string& body,
                   const std::string& kps) {
  return R"({"id": ")" + id + R"(", "title": ")" + title + R"(", "abstract": ")" + body +
         R"(", "keyphrases": )" + kps + "}\n";
}

TEST(CorpusTest, LoadsInFileOrderWithLimit) {
  std::istringstream in(Record("a", "t", "b", "[]") + Record("b", "t", "b", "[]") +
                        Record("c", "t", "b", "[]"));
  LoadOptions opts;
  opts.limit = 2;
  const auto loaded = read_corpus(in, opts);
  ASSERT_EQ(loaded.documents.size(), 2u);
  EXPECT_EQ(loaded.documents[0].id, "a");
  EXPECT_EQ(loaded.documents[1].id, "b");
}

TEST(CorpusTest, SkipsMalformedLinesWithWarning) {
  std::istringstream in(Record("a", "t", "b", "[\"x\"]") + "{not json\n" +
                        Record("b", "t", "b", "[]"));
  const auto loaded = read_corpus(in);
  EXPECT_EQ(loaded.documents.size(), 2u);
  EXPECT_EQ(loaded.skipped_lines, 1u);
  EXPECT_EQ(loaded.warnings.size(), 1u);
}

TEST(CorpusTest, SkipsDuplicateIdsAndMissingFields) {
  std::istringstream in(Record("a", "t", "b", "[]") + Record("a", "t2", "b2", "[]") +
                        R"({"id": "", "title": "t", "abstract": "b", "keyphrases": []})" "\n" +
                        R"({"id": "z", "title": "t", "keyphrases": []})" "\n" +
                        R"({"id": "y", "title": "t", "abstract": "b", "keyphrases": [1]})" "\n");
  const auto loaded = read_corpus(in);
  EXPECT_EQ(loaded.documents.size(), 1u);
  EXPECT_EQ(loaded.skipped_lines, 4u);
}

TEST(CorpusTest, DomainDefaultsFromOptions) {
  std::istringstream in(Record("a", "t", "b", "[]") +
                        R"({"id": "n", "title": "t", "abstract": "b", "keyphrases": [], "domain": "news"})" "\n");
  LoadOptions opts;
  opts.default_domain = Domain::kNews;
  const auto loaded = read_corpus(in, opts);
  ASSERT_EQ(loaded.documents.size(), 2u);
  EXPECT_EQ(loaded.documents[0].domain, Domain::kNews);
  EXPECT_EQ(loaded.documents[1].domain, Domain::kNews);
}

TEST(CorpusTest, ZeroValidRecordsIsFatal) {
  std::istringstream in("garbage\n\n");
  EXPECT_THROW(read_corpus(in), CorpusError);
  EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), CorpusError);
}

TEST(CorpusTest, RoundTrip) {
  std::vector<Document> docs = {
      {"d1", "Title \"quoted\"", "Body with\nnewline and ünïcode", {"k1", "k 2"}, Domain::kScientific},
      {"d2", "News", "Body", {}, Domain::kNews},
  };
  std::stringstream buf;
  write_corpus(buf, docs);
  const auto loaded = read_corpus(buf);
  EXPECT_EQ(loaded.documents, docs);
}

TEST(CorpusTest, LoadsFixtureFile) {
  const auto loaded = load_corpus(KPAGG_TEST_DATA_DIR "/e2e/corpus.jsonl");
  ASSERT_EQ(loaded.documents.size(), 5u);
  EXPECT_EQ(loaded.documents[2].domain, Domain::kNews);
}

TEST(PartitionGoldTest, Examples) {
  Document doc{"d", "", "graph coloring based time division", {"graph coloring", "tdma"}, {}};
  auto part = partition_gold(doc);
  ASSERT_EQ(part.present.size(), 1u);
  EXPECT_EQ(part.present[0].normalized, "graph color");
  ASSERT_EQ(part.absent.size(), 1u);
  EXPECT_EQ(part.absent[0].normalized, "tdma");

  doc.gold = {};
  part = partition_gold(doc);
  EXPECT_TRUE(part.present.empty());
  EXPECT_TRUE(part.absent.empty());

  Document nets{"n", "", "a network of agents", {"Networks"}, {}};
  part = partition_gold(nets);
  ASSERT_EQ(part.present.size(), 1u);
  EXPECT_TRUE(part.absent.empty());
}

TEST(PartitionGoldTest, DisjointPermutationOfDedupedGold) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> words = {"graph", "graphs", "color", "network", "tdma",
                                          "sensor", "Sensors", "time", "energy"};
  for (int i = 0; i < 500; ++i) {
    Document doc;
    doc.id = "d";
    for (int k = 0; k < 12; ++k) doc.body += words[rng() % words.size()] + " ";
    const int n_gold = static_cast<int>(rng() % 6);
    for (int g = 0; g < n_gold; ++g) {
      std::string p = words[rng() % words.size()];
      if (rng() % 2) p += " " + words[rng() % words.size()];
      doc.gold.push_back(p);
    }
    const auto part = partition_gold(doc);
    const auto source = source_tokens(doc);
    ref::List expected;
    for (const auto& g : doc.gold) expected.push_back(normalize_phrase(g).normalized);
    expected = ref::Dedup(expected);
    ref::List got;
    for (const auto& p : part.present) {
      got.push_back(p.normalized);
      EXPECT_TRUE(ref::WindowScan(source, phrase_tokens(p.normalized)));
    }
    for (const auto& p : part.absent) {
      EXPECT_FALSE(ref::Contains(got, p.normalized));
      got.push_back(p.normalized);
      EXPECT_FALSE(ref::WindowScan(source, phrase_tokens(p.normalized)));
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(got, expected);
  }
}

TEST(CorpusStatsTest, SingleDocumentArithmetic) {
  const std::vector<Document> docs = {{"d", "alpha beta", "gamma delta", {"alpha", "gamma"}, {}}};
  const auto s = corpus_stats(docs);
  EXPECT_DOUBLE_EQ(s.avg_input_words, 4.0);
  ASSERT_TRUE(s.avg_words_per_present_kp.has_value());
  EXPECT_DOUBLE_EQ(*s.avg_words_per_present_kp, 1.0);
  EXPECT_FALSE(s.avg_words_per_absent_kp.has_value());
  EXPECT_DOUBLE_EQ(s.avg_present_per_doc, 2.0);
  EXPECT_DOUBLE_EQ(s.avg_absent_per_doc, 0.0);
}

TEST(CorpusStatsTest, EmptyIsAnError) {
  EXPECT_THROW(corpus_stats(std::vector<Document>{}), std::invalid_argument);
}

TEST(CorpusStatsTest, PermutationInvariant) {
  auto docs = load_corpus(KPAGG_TEST_DATA_DIR "/e2e/corpus.jsonl").documents;
  const auto base = corpus_stats(docs);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(docs.begin(), docs.end(), rng);
    const auto s = corpus_stats(docs);
    EXPECT_NEAR(s.avg_input_words, base.avg_input_words, 1e-12);
    EXPECT_NEAR(s.avg_present_per_doc, base.avg_present_per_doc, 1e-12);
    EXPECT_NEAR(s.avg_absent_per_doc, base.avg_absent_per_doc, 1e-12);
    EXPECT_NEAR(*s.avg_words_per_present_kp, *base.avg_words_per_present_kp, 1e-12);
    EXPECT_NEAR(*s.avg_words_per_absent_kp, *base.avg_words_per_absent_kp, 1e-12);
  }
}

TEST(CorpusTest, CountWordsUsesWhitespace) {
  EXPECT_EQ(count_words("  a  b\tc\nd-e "), 4u);
  EXPECT_EQ(count_words(""), 0u);
}

}  // namespace
}  // namespace kpagg

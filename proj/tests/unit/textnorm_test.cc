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

#include "kpagg/textnorm.h"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/reference.h"

namespace kpagg {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeTokensTest, Examples) {
  EXPECT_EQ(normalize_tokens("Graph Coloring-based TDMA"),
            (Tokens{"graph", "color", "base", "tdma"}));
  EXPECT_EQ(normalize_tokens(""), Tokens{});
  EXPECT_EQ(normalize_tokens("networks"), Tokens{"network"});
  EXPECT_EQ(normalize_tokens("distance-2 coloring"), (Tokens{"distanc", "2", "color"}));
}

TEST(NormalizeTokensTest, SplitsOnAnyNonAlphanumericRun) {
  EXPECT_EQ(normalize_tokens("  a--b//c  "), (Tokens{"a", "b", "c"}));
  EXPECT_EQ(normalize_tokens("x_y"), (Tokens{"x", "y"}));
  EXPECT_EQ(normalize_tokens("3D-printing"), (Tokens{"3d", "print"}));
}

TEST(NormalizeTokensTest, UnicodeLettersAreTokenCharacters) {
  // Non-ASCII tokens are lowercased but not stemmed.
  EXPECT_EQ(normalize_tokens("Über Networks"), (Tokens{"über", "network"}));
  EXPECT_EQ(normalize_tokens("ΑΒΓ-test"), (Tokens{"αβγ", "test"}));
  // "bayes" -> "bay" -> "bai": the stemmer runs until the token is stable.
  EXPECT_EQ(normalize_tokens("naïve bayes"), (Tokens{"naïve", "bai"}));
}

TEST(NormalizeTokensTest, MalformedUtf8DoesNotCrash) {
  const std::string bad = "abc\xC3\x28 def\xFF";
  const Tokens toks = normalize_tokens(bad);
  EXPECT_FALSE(toks.empty());
}

TEST(NormalizeTokensTest, IdempotentOnOwnOutput) {
  // Single-pass Porter would fail here: "agreed" -> "agre" -> "agr".
  for (const char* text : {"agreed", "accusations", "abused", "Graph Coloring-based TDMA",
                           "generalizations of hopefulness"}) {
    const Tokens once = normalize_tokens(text);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    EXPECT_EQ(normalize_tokens(joined), once) << text;
  }
}

TEST(NormalizePhraseTest, Examples) {
  EXPECT_EQ(normalize_phrase("Wireless Sensor Networks").normalized, "wireless sensor network");
  EXPECT_EQ(normalize_phrase("TDMA").normalized, "tdma");
  const auto empty = normalize_phrase("  ---  ");
  EXPECT_EQ(empty.normalized, "");
  EXPECT_EQ(empty.surface, "  ---  ");
  EXPECT_EQ(normalize_phrase("Wireless Sensor Networks").surface, "Wireless Sensor Networks");
}

TEST(NormalizePhraseTest, Idempotent) {
  for (const char* p : {"Wireless Sensor Networks", "agreed upon", "Accidentally",
                        "learning-to-rank", "seq2seq"}) {
    const auto once = normalize_phrase(p).normalized;
    EXPECT_EQ(normalize_phrase(once).normalized, once) << p;
  }
}

TEST(IsPresentTest, Examples) {
  const auto source = normalize_tokens("we study distributed graph coloring based scheduling");
  EXPECT_TRUE(is_present(normalize_phrase("graph coloring"), source));
  EXPECT_FALSE(is_present(normalize_phrase("graph coloring"), Tokens{}));
  EXPECT_FALSE(is_present(normalize_phrase("sensor network"),
                          normalize_tokens("network of sensors reversed order")));
  // Token containment, not substring containment.
  EXPECT_FALSE(is_present(normalize_phrase("art"), normalize_tokens("an artifact")));
}

TEST(IsPresentTest, EmptyPhraseIsAnError) {
  EXPECT_THROW(is_present(normalize_phrase("--"), Tokens{"a"}), std::invalid_argument);
}

TEST(DedupTest, Examples) {
  auto n = [](const char* s) { return normalize_phrase(s); };
  const std::vector<NormalizedPhrase> in = {n("a"), n("b"), n("a"), n("c")};
  const auto out = dedup_preserve_order(in);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].normalized, "a");
  EXPECT_EQ(out[1].normalized, "b");
  EXPECT_EQ(out[2].normalized, "c");

  const std::vector<NormalizedPhrase> nets = {n("Networks"), n("network")};
  const auto merged = dedup_preserve_order(nets);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].surface, "Networks");

  EXPECT_TRUE(dedup_preserve_order(std::vector<NormalizedPhrase>{}).empty());
  EXPECT_TRUE(dedup_preserve_order(std::vector<NormalizedPhrase>{n("??")}).empty());
}

TEST(IsPresentTest, AgreesWithWindowScanAndIsMonotone) {
  std::mt19937_64 rng(7);
  const Tokens alphabet = {"a", "b", "c", "d"};
  auto random_tokens = [&](std::size_t max_len) {
    Tokens t(rng() % (max_len + 1));
    for (auto& x : t) x = alphabet[rng() % alphabet.size()];
    return t;
  };
  for (int i = 0; i < 2000; ++i) {
    Tokens needle = random_tokens(3);
    if (needle.empty()) needle.push_back("a");
    const Tokens hay = random_tokens(8);
    NormalizedPhrase p;
    for (const auto& t : needle) p.normalized += (p.normalized.empty() ? "" : " ") + t;
    const bool got = is_present(p, hay);
    ASSERT_EQ(got, ref::WindowScan(hay, needle));
    if (got) {
      Tokens longer = hay;
      const Tokens extra = random_tokens(3);
      longer.insert(longer.end(), extra.begin(), extra.end());
      EXPECT_TRUE(is_present(p, longer));
      Tokens prefixed = extra;
      prefixed.insert(prefixed.end(), hay.begin(), hay.end());
      EXPECT_TRUE(is_present(p, prefixed));
    }
  }
}

}  // namespace
}  // namespace kpagg

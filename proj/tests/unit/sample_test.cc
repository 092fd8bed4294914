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

#include "kpagg/sample.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace kpagg {
namespace {

using Phrases = std::vector<std::string>;

TEST(PerplexityTest, ClosedForms) {
  const double ln2 = std::log(2.0);
  EXPECT_NEAR(*perplexity(std::vector<double>{-ln2, -ln2}), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(*perplexity(std::vector<double>{0, 0, 0}), 1.0);
  EXPECT_FALSE(perplexity(std::vector<double>{}).has_value());
  RawSample s;
  EXPECT_FALSE(perplexity(s).has_value());
  s.token_logprobs = std::vector<double>{};
  EXPECT_FALSE(perplexity(s).has_value());
  s.token_logprobs = std::vector<double>{-ln2};
  EXPECT_NEAR(*perplexity(s), 2.0, 1e-12);
}

TEST(PerplexityTest, PermutationInvariantAndDecreasingInEachLogprob) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lp(-5.0, -0.01);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(1 + rng() % 20);
    for (auto& x : v) x = lp(rng);
    const double base = *perplexity(v);
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(*perplexity(shuffled), base, 1e-9 * base);
    // Moving one logprob towards 0 makes the sample more likely.
    auto raised = v;
    const std::size_t k = rng() % v.size();
    raised[k] = v[k] / 2.0;
    EXPECT_LT(*perplexity(raised), base);
  }
}

TEST(ParseSampleTest, Examples) {
  EXPECT_EQ(parse_sample(R"("graph coloring", "tdma"])", true).phrases,
            (Phrases{"graph coloring", "tdma"}));
  EXPECT_EQ(parse_sample(R"(["a", "b", "c"] Extra prose.)", false).phrases,
            (Phrases{"a", "b", "c"}));
  const auto fb = parse_sample("keyphrase one, keyphrase two", false);
  EXPECT_EQ(fb.phrases, (Phrases{"keyphrase one", "keyphrase two"}));
  EXPECT_TRUE(fb.fallback);
}

TEST(ParseSampleTest, PrefillToleratesRepeatedBracket) {
  EXPECT_EQ(parse_sample(R"(["a", "b"])", true).phrases, (Phrases{"a", "b"}));
  EXPECT_EQ(parse_sample(R"(  ["a"])", true).phrases, (Phrases{"a"}));
}

TEST(ParseSampleTest, CommasInsideQuotesAndNewlines) {
  EXPECT_EQ(parse_sample(R"(["graphs, colorings", "b"])", false).phrases,
            (Phrases{"graphs, colorings", "b"}));
  EXPECT_EQ(parse_sample("[\"a\"\n\"b\",\n 'c']", false).phrases, (Phrases{"a", "b", "c"}));
  EXPECT_EQ(parse_sample(R"(Sure! Here they are: ["x", "y"])", false).phrases,
            (Phrases{"x", "y"}));
}

TEST(ParseSampleTest, TruncatedOutput) {
  // A completion cut off by max_tokens has no closing bracket.
  EXPECT_EQ(parse_sample(R"("a", "b", "c)", true).phrases, (Phrases{"a", "b", "c"}));
}

TEST(ParseSampleTest, EmptyAndGarbage) {
  EXPECT_TRUE(parse_sample("", false).phrases.empty());
  EXPECT_TRUE(parse_sample("", false).fallback);
  EXPECT_TRUE(parse_sample("]", true).phrases.empty());
  EXPECT_TRUE(parse_sample("[]", false).phrases.empty());
}

TEST(ParseSampleTest, NumberedListFallback) {
  EXPECT_EQ(parse_sample("1. alpha\n2. beta\n- gamma\n* delta", false).phrases,
            (Phrases{"alpha", "beta", "gamma", "delta"}));
}

TEST(ParseSampleTest, NeverThrowsAndItemsAreClean) {
  std::mt19937_64 rng(9);
  const std::string alphabet = "ab ,\"'[]\n\t`{}x";
  for (int i = 0; i < 20000; ++i) {
    std::string text(rng() % 30, ' ');
    for (auto& c : text) c = alphabet[rng() % alphabet.size()];
    const bool prefill = rng() % 2;
    ParseOutcome out;
    ASSERT_NO_THROW(out = parse_sample(text, prefill));
    for (const auto& p : out.phrases) {
      ASSERT_FALSE(p.empty()) << text;
      for (char edge : {p.front(), p.back()}) {
        ASSERT_TRUE(edge != '[' && edge != ']' && edge != '"' && edge != ' ' &&
                    edge != '\n' && edge != '\t' && edge != '\'')
            << "[" << text << "] -> [" << p << "]";
      }
    }
  }
}

TEST(RawSampleTest, JsonRoundTripIsBitExact) {
  RawSample s;
  s.doc_id = "doc-ü";
  s.prompt_hash = std::string(64, 'a');
  s.sample_index = 7;
  s.text = "[\"a\",\n\"b\"]";
  s.token_logprobs = std::vector<double>{-0.1, -1e-300, -123.456789012345678, 0.0,
                                         std::nextafter(-0.3, 0.0)};
  s.finish_reason = "stop";
  EXPECT_EQ(raw_sample_from_json(nlohmann::json::parse(to_json(s).dump())), s);
  s.token_logprobs.reset();
  EXPECT_EQ(raw_sample_from_json(nlohmann::json::parse(to_json(s).dump())), s);
}

TEST(RawSampleTest, FailureMarker) {
  RawSample s;
  s.finish_reason = "error:http_503";
  EXPECT_TRUE(s.failed());
  s.finish_reason = "length";
  EXPECT_FALSE(s.failed());
}

}  // namespace
}  // namespace kpagg

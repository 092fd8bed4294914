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

// Invariants that span aggregation, selection and scoring.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kpagg/aggregation.h"
#include "kpagg/metrics.h"
#include "oracles/reference.h"

namespace kpagg {
namespace {

using Lists = std::vector<ref::List>;

const ref::List kAlphabet = {"a", "b", "c", "d"};

// Every duplicate-free ordered list of at most `max_len` symbols.
void OrderedSubsets(const ref::List& alphabet, std::size_t max_len, ref::List& cur,
                    std::vector<ref::List>& out) {
  out.push_back(cur);
  if (cur.size() == max_len) return;
  for (const auto& s : alphabet) {
    if (ref::Contains(cur, s)) continue;
    cur.push_back(s);
    OrderedSubsets(alphabet, max_len, cur, out);
    cur.pop_back();
  }
}

SampleSet MakeSet(const Lists& samples, std::mt19937_64* rng = nullptr) {
  SampleSet ss;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    RankedSample r;
    for (const auto& sym : samples[i]) {
      const bool present = rng ? (*rng)() % 2 == 0 : (sym < "c");
      r.phrases.push_back({sym, sym, present});
    }
    r.perplexity = 1.0 + static_cast<double>(i);
    r.request_index = i;
    ss.samples.push_back(std::move(r));
  }
  return ss;
}

ref::List Forms(const std::vector<NormalizedPhrase>& phrases) {
  ref::List out;
  for (const auto& p : phrases) out.push_back(p.normalized);
  return out;
}

TEST(AggregationPropertyTest, ExhaustiveSmallInstances) {
  std::vector<ref::List> lists;
  ref::List cur;
  OrderedSubsets(kAlphabet, 3, cur, lists);
  ASSERT_EQ(lists.size(), 1u + 4 + 12 + 24);
  std::size_t checked = 0;
  for (const auto& s1 : lists) {
    for (const auto& s2 : lists) {
      const Lists samples = {s1, s2};
      const auto ss = MakeSet(samples);
      ASSERT_EQ(Forms(aggregate_union(ss)), ref::Union(samples));
      ASSERT_EQ(Forms(aggregate_union_concat(ss)), ref::Concat(samples));
      ASSERT_EQ(Forms(aggregate_union_interleaf(ss)), ref::Interleaf(samples));
      ASSERT_EQ(Forms(aggregate_frequency_order(ss)), ref::FrequencyOrder(samples));
      ++checked;
    }
  }
  EXPECT_EQ(checked, lists.size() * lists.size());
}

TEST(AggregationPropertyTest, OutputsAreDuplicateFreeSubsetsOfTheInput) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 2000; ++iter) {
    Lists samples(1 + rng() % 6);
    for (auto& s : samples) {
      for (std::size_t k = rng() % 7; k > 0; --k) s.push_back(std::string(1, char('a' + rng() % 9)));
      s = ref::Dedup(s);
    }
    const auto ss = MakeSet(samples);
    const auto all = ref::Union(samples);
    for (Strategy st : {Strategy::kUnion, Strategy::kUnionConcat, Strategy::kUnionInterleaf,
                        Strategy::kFrequencyOrder}) {
      const auto out = Forms(aggregate(ss, st));
      EXPECT_EQ(std::set<std::string>(out.begin(), out.end()).size(), out.size());
      // Every strategy keeps the whole union, only the order differs.
      ref::List sorted = out;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(sorted, all);
    }
  }
}

TEST(AggregationPropertyTest, InputOrderIrrelevantWithDistinctPerplexities) {
  std::mt19937_64 rng(6);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<ParsedSample> parsed;
    const std::size_t n = 2 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      ParsedSample p;
      for (std::size_t k = rng() % 5; k > 0; --k) p.phrases.push_back(std::string(1, char('a' + rng() % 7)));
      p.perplexity = 1.0 + static_cast<double>(i) * 0.5;
      parsed.push_back(std::move(p));
    }
    const std::vector<std::string> source = {"a", "c", "e", "g"};
    std::vector<ParsedSample> shuffled = parsed;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (Strategy st : {Strategy::kSingle, Strategy::kUnion, Strategy::kUnionConcat,
                        Strategy::kUnionInterleaf, Strategy::kFrequencyOrder}) {
      const auto a = predict(rank_samples(parsed, source), st);
      const auto b = predict(rank_samples(shuffled, source), st);
      EXPECT_EQ(a.present, b.present);
      EXPECT_EQ(a.absent, b.absent);
      EXPECT_EQ(a.ranked_present, b.ranked_present);
    }
  }
}

// Is `sub` a subsequence of `seq`?
bool IsSubsequence(const std::vector<NormalizedPhrase>& sub,
                   const std::vector<NormalizedPhrase>& seq) {
  std::size_t j = 0;
  for (const auto& x : seq) {
    if (j < sub.size() && sub[j] == x) ++j;
  }
  return j == sub.size();
}

TEST(SelectionPropertyTest, PrefixOfPartitionWithinBudget) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 2000; ++iter) {
    Lists samples(1 + rng() % 6);
    for (auto& s : samples) {
      for (std::size_t k = rng() % 8; k > 0; --k) s.push_back(std::string(1, char('a' + rng() % 12)));
      s = ref::Dedup(s);
    }
    // Presence is a property of the phrase, so draw it once per symbol.
    auto ss = MakeSet(samples);
    std::vector<bool> present(12);
    for (auto&& b : present) b = rng() % 2 == 0;
    std::size_t pre_total = 0, abs_total = 0;
    for (auto& r : ss.samples) {
      for (auto& p : r.phrases) {
        p.is_present = present[static_cast<std::size_t>(p.normalized[0] - 'a')];
        (p.is_present ? pre_total : abs_total) += 1;
      }
    }
    const auto n = ss.n();
    for (Strategy st : {Strategy::kUnion, Strategy::kUnionConcat, Strategy::kUnionInterleaf,
                        Strategy::kFrequencyOrder}) {
      const auto agg = aggregate(ss, st);
      const auto pred = dynamic_select(agg, ss);
      EXPECT_EQ(pred.m_pre, (pre_total + n - 1) / n);
      EXPECT_EQ(pred.m_abs, (abs_total + n - 1) / n);
      EXPECT_LE(pred.present.size(), pred.m_pre);
      EXPECT_LE(pred.absent.size(), pred.m_abs);
      EXPECT_TRUE(IsSubsequence(pred.present, agg));
      EXPECT_TRUE(IsSubsequence(pred.absent, agg));
      EXPECT_TRUE(std::equal(pred.present.begin(), pred.present.end(),
                             pred.ranked_present.begin()));
      for (const auto& p : pred.ranked_present) EXPECT_TRUE(p.is_present);
      for (const auto& p : pred.ranked_absent) EXPECT_FALSE(p.is_present);
      EXPECT_EQ(pred.ranked_present.size() + pred.ranked_absent.size(), agg.size());
    }
  }
}

TEST(SelectionPropertyTest, SingleSampleAllStrategiesScoreAlike) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 300; ++iter) {
    ref::List s;
    for (std::size_t k = rng() % 8; k > 0; --k) s.push_back(std::string(1, char('a' + rng() % 10)));
    const auto ss = MakeSet({ref::Dedup(s)}, &rng);
    GoldPartition gold;
    for (char c = 'a'; c < 'k'; ++c) {
      if (rng() % 3 == 0) gold.present.push_back({std::string(1, c), std::string(1, c), true});
      if (rng() % 3 == 0) gold.absent.push_back({std::string(1, c), std::string(1, c), false});
    }
    const auto base = score_document("d", gold, predict(ss, Strategy::kSingle));
    for (Strategy st : {Strategy::kUnionConcat, Strategy::kUnionInterleaf,
                        Strategy::kFrequencyOrder}) {
      const auto other = score_document("d", gold, predict(ss, st));
      ASSERT_EQ(other.size(), base.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        EXPECT_EQ(other[i].excluded, base[i].excluded);
        EXPECT_EQ(other[i].value(), base[i].value());
      }
    }
  }
}

}  // namespace
}  // namespace kpagg

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

// Multi-sample keyphrase aggregation.
//
// Pipeline for one document:
//   1. rank_samples: normalize + presence-classify every phrase, dedup each
//      sample, sort samples by ascending perplexity (unknown last, stable).
//   2. aggregate: merge the ranked samples into one ranked list
//        union            set union, emitted in lexicographic normalized order
//        union-concat     S1 ++ S2 ++ ... then first-occurrence dedup
//        union-interleaf  all first phrases, all second phrases, ... then dedup
//        frequency        number of samples containing a phrase, descending;
//                         ties keep their union-interleaf order
//   3. dynamic_select: keep the first ceil(mean present count per sample)
//      present phrases and ceil(mean absent count) absent phrases.
// The `single` strategy skips 2 and 3 and returns the top-ranked sample as is.

#ifndef KPAGG_AGGREGATION_H_
#define KPAGG_AGGREGATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpagg/corpus.h"
#include "kpagg/sample.h"
#include "kpagg/textnorm.h"

namespace kpagg {

enum class Strategy {
  kSingle,
  kUnion,
  kUnionConcat,
  kUnionInterleaf,
  kFrequencyOrder,
};

// CLI names: single, union, union-concat, union-interleaf, frequency.
std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

struct RankedSample {
  std::vector<NormalizedPhrase> phrases;  // deduplicated, presence-flagged
  std::optional<double> perplexity;
  std::size_t request_index = 0;  // position in the input list
};

struct SampleSet {
  std::vector<RankedSample> samples;  // best (lowest perplexity) first
  std::size_t n() const { return samples.size(); }
};

struct Prediction {
  std::vector<NormalizedPhrase> present;  // after dynamic selection
  std::vector<NormalizedPhrase> absent;
  std::size_t m_pre = 0;
  std::size_t m_abs = 0;
  // The aggregated list split by presence, before truncation.
  std::vector<NormalizedPhrase> ranked_present;
  std::vector<NormalizedPhrase> ranked_absent;
};

SampleSet rank_samples(std::span<const ParsedSample> parsed,
                       std::span<const std::string> source_tokens);
SampleSet rank_samples(std::span<const ParsedSample> parsed, const Document& doc);

std::vector<NormalizedPhrase> aggregate_union(const SampleSet& ss);
std::vector<NormalizedPhrase> aggregate_union_concat(const SampleSet& ss);
std::vector<NormalizedPhrase> aggregate_union_interleaf(const SampleSet& ss);
std::vector<NormalizedPhrase> aggregate_frequency_order(const SampleSet& ss);

// Dispatches on strategy. `single` returns the top-ranked sample.
std::vector<NormalizedPhrase> aggregate(const SampleSet& ss, Strategy strategy);

// ceil(total / n) in integer arithmetic; 0 when n == 0.
std::size_t ceil_mean(std::size_t total, std::size_t n);

Prediction dynamic_select(std::span<const NormalizedPhrase> aggregated,
                          const SampleSet& ss);

Prediction predict(const SampleSet& ss, Strategy strategy);
Prediction predict(std::span<const ParsedSample> parsed, const Document& doc,
                   Strategy strategy);

}  // namespace kpagg

#endif  // KPAGG_AGGREGATION_H_

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

#include "kpagg/aggregation.h"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace kpagg {
namespace {

// Accumulates phrases keeping the first occurrence of each normalized form.
class FirstOccurrence {
 public:
  void Add(const NormalizedPhrase& p) {
    if (seen_.insert(p.normalized).second) out_.push_back(p);
  }
  std::vector<NormalizedPhrase> Take() && { return std::move(out_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<NormalizedPhrase> out_;
};

bool RanksBefore(const RankedSample& a, const RankedSample& b) {
  if (a.perplexity && b.perplexity) return *a.perplexity < *b.perplexity;
  return a.perplexity.has_value() && !b.perplexity.has_value();
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kSingle:
      return "single";
    case Strategy::kUnion:
      return "union";
    case Strategy::kUnionConcat:
      return "union-concat";
    case Strategy::kUnionInterleaf:
      return "union-interleaf";
    case Strategy::kFrequencyOrder:
      return "frequency";
  }
  return "single";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kSingle, Strategy::kUnion, Strategy::kUnionConcat,
                 Strategy::kUnionInterleaf, Strategy::kFrequencyOrder}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

SampleSet rank_samples(std::span<const ParsedSample> parsed,
                       std::span<const std::string> source_tokens) {
  SampleSet ss;
  ss.samples.reserve(parsed.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    std::vector<NormalizedPhrase> phrases;
    phrases.reserve(parsed[i].phrases.size());
    for (const auto& surface : parsed[i].phrases) {
      phrases.push_back(normalize_phrase(surface));
    }
    RankedSample sample;
    sample.phrases = dedup_preserve_order(phrases);
    for (auto& p : sample.phrases) p.is_present = is_present(p, source_tokens);
    sample.perplexity = parsed[i].perplexity;
    sample.request_index = i;
    ss.samples.push_back(std::move(sample));
  }
  std::stable_sort(ss.samples.begin(), ss.samples.end(), RanksBefore);
  return ss;
}

SampleSet rank_samples(std::span<const ParsedSample> parsed, const Document& doc) {
  const auto tokens = source_tokens(doc);
  return rank_samples(parsed, tokens);
}

std::vector<NormalizedPhrase> aggregate_union(const SampleSet& ss) {
  std::map<std::string, const NormalizedPhrase*> by_form;
  for (const auto& sample : ss.samples) {
    for (const auto& p : sample.phrases) by_form.try_emplace(p.normalized, &p);
  }
  std::vector<NormalizedPhrase> out;
  out.reserve(by_form.size());
  for (const auto& [form, phrase] : by_form) out.push_back(*phrase);
  return out;
}

std::vector<NormalizedPhrase> aggregate_union_concat(const SampleSet& ss) {
  FirstOccurrence acc;
  for (const auto& sample : ss.samples) {
    for (const auto& p : sample.phrases) acc.Add(p);
  }
  return std::move(acc).Take();
}

std::vector<NormalizedPhrase> aggregate_union_interleaf(const SampleSet& ss) {
  FirstOccurrence acc;
  std::size_t longest = 0;
  for (const auto& sample : ss.samples) {
    longest = std::max(longest, sample.phrases.size());
  }
  for (std::size_t pos = 0; pos < longest; ++pos) {
    for (const auto& sample : ss.samples) {
      if (pos < sample.phrases.size()) acc.Add(sample.phrases[pos]);
    }
  }
  return std::move(acc).Take();
}

std::vector<NormalizedPhrase> aggregate_frequency_order(const SampleSet& ss) {
  // Samples are deduplicated, so each contributes at most one vote per form.
  std::unordered_map<std::string, std::size_t> votes;
  for (const auto& sample : ss.samples) {
    std::unordered_set<std::string_view> in_sample;
    for (const auto& p : sample.phrases) {
      if (in_sample.insert(p.normalized).second) ++votes[p.normalized];
    }
  }
  auto out = aggregate_union_interleaf(ss);
  std::stable_sort(out.begin(), out.end(),
                   [&](const NormalizedPhrase& a, const NormalizedPhrase& b) {
                     return votes[a.normalized] > votes[b.normalized];
                   });
  return out;
}

std::vector<NormalizedPhrase> aggregate(const SampleSet& ss, Strategy strategy) {
  switch (strategy) {
    case Strategy::kSingle:
      if (ss.samples.empty()) return {};
      return ss.samples.front().phrases;
    case Strategy::kUnion:
      return aggregate_union(ss);
    case Strategy::kUnionConcat:
      return aggregate_union_concat(ss);
    case Strategy::kUnionInterleaf:
      return aggregate_union_interleaf(ss);
    case Strategy::kFrequencyOrder:
      return aggregate_frequency_order(ss);
  }
  return {};
}

std::size_t ceil_mean(std::size_t total, std::size_t n) {
  if (n == 0) return 0;
  return total / n + (total % n != 0 ? 1 : 0);
}

Prediction dynamic_select(std::span<const NormalizedPhrase> aggregated,
                          const SampleSet& ss) {
  Prediction pred;
  if (ss.n() == 0) return pred;
  std::size_t present_total = 0;
  std::size_t absent_total = 0;
  for (const auto& sample : ss.samples) {
    for (const auto& p : sample.phrases) {
      (p.is_present ? present_total : absent_total) += 1;
    }
  }
  pred.m_pre = ceil_mean(present_total, ss.n());
  pred.m_abs = ceil_mean(absent_total, ss.n());
  for (const auto& p : aggregated) {
    if (p.is_present) {
      pred.ranked_present.push_back(p);
      if (pred.present.size() < pred.m_pre) pred.present.push_back(p);
    } else {
      pred.ranked_absent.push_back(p);
      if (pred.absent.size() < pred.m_abs) pred.absent.push_back(p);
    }
  }
  return pred;
}

Prediction predict(const SampleSet& ss, Strategy strategy) {
  if (strategy != Strategy::kSingle) {
    return dynamic_select(aggregate(ss, strategy), ss);
  }
  Prediction pred;
  if (ss.samples.empty()) return pred;
  for (const auto& p : ss.samples.front().phrases) {
    (p.is_present ? pred.present : pred.absent).push_back(p);
  }
  pred.m_pre = pred.present.size();
  pred.m_abs = pred.absent.size();
  pred.ranked_present = pred.present;
  pred.ranked_absent = pred.absent;
  return pred;
}

Prediction predict(std::span<const ParsedSample> parsed, const Document& doc,
                   Strategy strategy) {
  return predict(rank_samples(parsed, doc), strategy);
}

}  // namespace kpagg

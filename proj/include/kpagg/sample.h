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

// Sample records produced by the chat client and the pure functions that turn
// them into ranked keyphrase lists: perplexity and output parsing.

#ifndef KPAGG_SAMPLE_H_
#define KPAGG_SAMPLE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace kpagg {

// finish_reason values written for samples that never produced a completion
// start with this prefix, e.g. "error:http_503".
inline constexpr std::string_view kFailurePrefix = "error:";

struct RawSample {
  std::string doc_id;
  std::string prompt_hash;
  int sample_index = 0;
  std::string text;
  // Natural-log probability of each generated token, when the endpoint
  // reports them.
  std::optional<std::vector<double>> token_logprobs;
  std::string finish_reason;

  bool failed() const { return finish_reason.starts_with(kFailurePrefix); }

  friend bool operator==(const RawSample&, const RawSample&) = default;
};

nlohmann::json to_json(const RawSample& sample);
// Throws nlohmann::json::exception on missing or mistyped fields.
RawSample raw_sample_from_json(const nlohmann::json& j);

struct ParsedSample {
  std::vector<std::string> phrases;
  // nullopt means unknown (no logprobs).
  std::optional<double> perplexity;
};

// exp(-mean(logprobs)); nullopt for an empty list.
std::optional<double> perplexity(std::span<const double> token_logprobs);
std::optional<double> perplexity(const RawSample& sample);

struct ParseOutcome {
  std::vector<std::string> phrases;
  // Set when no bracketed list was found or nothing survived parsing.
  bool fallback = false;
};

// Recovers the keyphrase list from a completion. With `had_prefill` the opening
// "[" lives in the prompt, so it is put back before parsing. Reads up to the
// first unmatched "]", splits on top-level commas and newlines and strips
// whitespace, quotes and brackets from each item. Text without any bracket is
// split on commas/newlines as a whole. Never throws.
ParseOutcome parse_sample(std::string_view raw_text, bool had_prefill);

}  // namespace kpagg

#endif  // KPAGG_SAMPLE_H_

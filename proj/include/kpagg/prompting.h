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

#ifndef KPAGG_PROMPTING_H_
#define KPAGG_PROMPTING_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kpagg/corpus.h"

namespace kpagg {

enum class PromptVariant {
  kBaseline,
  kPresentSpecialist,
  kAbsentSpecialist,
  kOrderControl,
  kLengthControl,
  kCombinedControl,
};

// CLI names: baseline, present, absent, order, length, combined.
std::string_view to_string(PromptVariant variant);
std::optional<PromptVariant> parse_variant(std::string_view name);

// The editable prompt strings. Keys in the JSON configuration file match the
// field names; the two specialist sentences are optional there.
struct PromptConfig {
  std::string system_prompt;
  std::string user_prompt_baseline;
  std::string user_prompt_present;
  std::string user_prompt_absent;
  std::string instruction_formatting;
  std::string instruction_order;
  std::string instruction_length;

  static PromptConfig defaults();
  // Throws ConfigError when the file is missing, unparsable or lacks a
  // required key.
  static PromptConfig load(const std::filesystem::path& path);
  static PromptConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  friend bool operator==(const PromptConfig&, const PromptConfig&) = default;
};

struct RenderedPrompt {
  std::string system;
  std::string user;
  // "[" when the endpoint accepts a partial assistant turn, empty otherwise.
  std::string assistant_prefill;
  std::string prompt_hash;
};

// The instruction block of the user turn. Baseline and the specialists use the
// bare formatting instruction; control variants use a numbered list.
std::string instruction_block(PromptVariant variant, const PromptConfig& config);

RenderedPrompt build_prompt(const Document& doc, PromptVariant variant,
                            bool prefill_supported,
                            const PromptConfig& config = PromptConfig::defaults());

// Hex SHA-256 over the length-prefixed (system, user, assistant_prefill).
std::string prompt_digest(const RenderedPrompt& prompt);

// Hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view data);

}  // namespace kpagg

#endif  // KPAGG_PROMPTING_H_

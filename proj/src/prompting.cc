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

#include "kpagg/prompting.h"

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpagg/default_prompts.h"
#include "kpagg/errors.h"

namespace kpagg {
namespace {

using nlohmann::json;

constexpr std::string_view kScientificNoun = "scientific document";
constexpr std::string_view kNewsNoun = "news article";

std::string ReplaceAll(std::string text, std::string_view from,
                       std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string NumberedList(const std::vector<const std::string*>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(i + 1) + ". " + *items[i];
  }
  return out;
}

const std::string& UserPrompt(PromptVariant variant, const PromptConfig& c) {
  switch (variant) {
    case PromptVariant::kPresentSpecialist:
      return c.user_prompt_present;
    case PromptVariant::kAbsentSpecialist:
      return c.user_prompt_absent;
    default:
      return c.user_prompt_baseline;
  }
}

void AppendLengthPrefixed(std::string& out, std::string_view field) {
  const auto n = static_cast<std::uint64_t>(field.size());
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((n >> shift) & 0xFF));
  }
  out.append(field);
}

}  // namespace

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::kBaseline:
      return "baseline";
    case PromptVariant::kPresentSpecialist:
      return "present";
    case PromptVariant::kAbsentSpecialist:
      return "absent";
    case PromptVariant::kOrderControl:
      return "order";
    case PromptVariant::kLengthControl:
      return "length";
    case PromptVariant::kCombinedControl:
      return "combined";
  }
  return "baseline";
}

std::optional<PromptVariant> parse_variant(std::string_view name) {
  for (auto v : {PromptVariant::kBaseline, PromptVariant::kPresentSpecialist,
                 PromptVariant::kAbsentSpecialist, PromptVariant::kOrderControl,
                 PromptVariant::kLengthControl,
                 PromptVariant::kCombinedControl}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

PromptConfig PromptConfig::defaults() {
  static const PromptConfig config =
      from_json(json::parse(internal::kDefaultPromptsJson));
  return config;
}

PromptConfig PromptConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("prompt configuration must be an object");
  auto required = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ConfigError(std::string("prompt configuration lacks string key '") +
                        key + "'");
    }
    return j[key].get<std::string>();
  };
  PromptConfig c;
  c.system_prompt = required("system_prompt");
  c.user_prompt_baseline = required("user_prompt_baseline");
  c.instruction_formatting = required("instruction_formatting");
  c.instruction_order = required("instruction_order");
  c.instruction_length = required("instruction_length");
  c.user_prompt_present = j.value(
      "user_prompt_present",
      std::string("Extract present keyphrases from the following title and "
                  "abstract of a scientific document."));
  c.user_prompt_absent = j.value(
      "user_prompt_absent",
      std::string("Generate absent keyphrases from the following title and "
                  "abstract of a scientific document."));
  return c;
}

PromptConfig PromptConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read prompt configuration " + path.string());
  const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw ConfigError("prompt configuration " + path.string() +
                      " is not valid JSON");
  }
  return from_json(j);
}

json PromptConfig::to_json() const {
  return {{"system_prompt", system_prompt},
          {"user_prompt_baseline", user_prompt_baseline},
          {"user_prompt_present", user_prompt_present},
          {"user_prompt_absent", user_prompt_absent},
          {"instruction_formatting", instruction_formatting},
          {"instruction_order", instruction_order},
          {"instruction_length", instruction_length}};
}

std::string instruction_block(PromptVariant variant, const PromptConfig& c) {
  switch (variant) {
    case PromptVariant::kOrderControl:
      return NumberedList({&c.instruction_order, &c.instruction_formatting});
    case PromptVariant::kLengthControl:
      return NumberedList({&c.instruction_length, &c.instruction_formatting});
    case PromptVariant::kCombinedControl:
      return NumberedList({&c.instruction_length, &c.instruction_order,
                           &c.instruction_formatting});
    default:
      return c.instruction_formatting;
  }
}

RenderedPrompt build_prompt(const Document& doc, PromptVariant variant,
                            bool prefill_supported, const PromptConfig& config) {
  RenderedPrompt p;
  p.system = config.system_prompt;
  p.user = UserPrompt(variant, config) + "\n" +
           instruction_block(variant, config) + "\n\nTitle: " + doc.title +
           "\nAbstract: " + doc.body;
  if (doc.domain == Domain::kNews) {
    p.system = ReplaceAll(std::move(p.system), kScientificNoun, kNewsNoun);
    p.user = ReplaceAll(std::move(p.user), kScientificNoun, kNewsNoun);
  }
  p.assistant_prefill = prefill_supported ? "[" : "";
  p.prompt_hash = prompt_digest(p);
  return p;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0F]);
  }
  return out;
}

std::string prompt_digest(const RenderedPrompt& prompt) {
  std::string buffer;
  AppendLengthPrefixed(buffer, prompt.system);
  AppendLengthPrefixed(buffer, prompt.user);
  AppendLengthPrefixed(buffer, prompt.assistant_prefill);
  return sha256_hex(buffer);
}

}  // namespace kpagg

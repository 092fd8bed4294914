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

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace kpagg {
namespace {

using nlohmann::json;

struct QuotePair {
  std::string_view open;
  std::string_view close;
};

constexpr QuotePair kQuotes[] = {
    {"\"", "\""},
    {"'", "'"},
    {"\xE2\x80\x9C", "\xE2\x80\x9D"},  // “ ”
    {"\xE2\x80\x98", "\xE2\x80\x99"},  // ‘ ’
    {"`", "`"},
};

// Characters stripped from both ends of every item.
constexpr std::string_view kEdgeAscii = " \t\r\n\"'`[]";
constexpr std::string_view kEdgeUtf8[] = {"\xE2\x80\x9C", "\xE2\x80\x9D",
                                          "\xE2\x80\x98", "\xE2\x80\x99"};

bool IsBlank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view StripEdges(std::string_view s) {
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    if (kEdgeAscii.find(s.front()) != std::string_view::npos) {
      s.remove_prefix(1);
      changed = true;
      continue;
    }
    if (kEdgeAscii.find(s.back()) != std::string_view::npos) {
      s.remove_suffix(1);
      changed = true;
      continue;
    }
    for (auto q : kEdgeUtf8) {
      if (s.starts_with(q)) {
        s.remove_prefix(q.size());
        changed = true;
      } else if (s.ends_with(q)) {
        s.remove_suffix(q.size());
        changed = true;
      }
    }
  }
  return s;
}

// "1. foo", "2) foo", "- foo", "* foo" -> "foo". Only used on fallback text.
std::string_view StripListMarker(std::string_view s) {
  while (!s.empty() && IsBlank(s.front())) s.remove_prefix(1);
  if (s.starts_with("- ") || s.starts_with("* ")) return s.substr(2);
  if (s.starts_with("\xE2\x80\xA2")) return s.substr(3);  // •
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') &&
      s[i + 1] == ' ') {
    return s.substr(i + 2);
  }
  return s;
}

bool IsDelimiter(char c) { return c == ',' || c == '\n'; }

// Splits `text` starting at `pos` into items. With `stop_at_bracket`, an
// unmatched ']' ends the list.
std::vector<std::string> SplitItems(std::string_view text, std::size_t pos,
                                    bool stop_at_bracket) {
  std::vector<std::string> items;
  const std::size_t n = text.size();
  bool done = false;
  while (pos < n && !done) {
    while (pos < n && IsBlank(text[pos])) ++pos;
    if (pos >= n) break;

    // Quoted item: the closing quote must be followed by a delimiter, a
    // closing bracket or the end of text, so apostrophes inside survive.
    bool quoted = false;
    for (const auto& q : kQuotes) {
      if (!text.substr(pos).starts_with(q.open)) continue;
      const std::size_t content = pos + q.open.size();
      std::size_t close = text.find(q.close, content);
      while (close != std::string_view::npos) {
        std::size_t after = close + q.close.size();
        while (after < n && IsBlank(text[after])) ++after;
        if (after >= n || IsDelimiter(text[after]) ||
            (stop_at_bracket && text[after] == ']')) {
          items.emplace_back(text.substr(content, close - content));
          if (after >= n) {
            done = true;
          } else if (text[after] == ']') {
            done = true;
          }
          pos = after + 1;
          quoted = true;
          break;
        }
        close = text.find(q.close, close + q.close.size());
      }
      if (quoted) break;
    }
    if (quoted) continue;

    int depth = 0;
    const std::size_t start = pos;
    while (pos < n) {
      const char c = text[pos];
      if (IsDelimiter(c) && depth == 0) break;
      if (c == '[') {
        ++depth;
      } else if (c == ']') {
        if (depth == 0 && stop_at_bracket) {
          done = true;
          break;
        }
        if (depth > 0) --depth;
      }
      ++pos;
    }
    items.emplace_back(text.substr(start, pos - start));
    ++pos;
  }
  return items;
}

}  // namespace

json to_json(const RawSample& s) {
  json j = {{"doc_id", s.doc_id},
            {"prompt_hash", s.prompt_hash},
            {"sample_index", s.sample_index},
            {"text", s.text},
            {"token_logprobs", nullptr},
            {"finish_reason", s.finish_reason}};
  if (s.token_logprobs) j["token_logprobs"] = *s.token_logprobs;
  return j;
}

RawSample raw_sample_from_json(const json& j) {
  RawSample s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.prompt_hash = j.at("prompt_hash").get<std::string>();
  s.sample_index = j.at("sample_index").get<int>();
  s.text = j.at("text").get<std::string>();
  const auto& lp = j.at("token_logprobs");
  if (!lp.is_null()) s.token_logprobs = lp.get<std::vector<double>>();
  s.finish_reason = j.at("finish_reason").get<std::string>();
  return s;
}

std::optional<double> perplexity(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) return std::nullopt;
  double sum = 0.0;
  for (double lp : token_logprobs) sum += lp;
  return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

std::optional<double> perplexity(const RawSample& sample) {
  if (!sample.token_logprobs) return std::nullopt;
  return perplexity(std::span<const double>(*sample.token_logprobs));
}

ParseOutcome parse_sample(std::string_view raw_text, bool had_prefill) {
  std::string full;
  std::string_view lead = raw_text;
  while (!lead.empty() && std::isspace(static_cast<unsigned char>(lead.front()))) {
    lead.remove_prefix(1);
  }
  // Some models repeat the bracket even when it was prefilled.
  if (had_prefill && !lead.starts_with('[')) full = "[";
  full.append(raw_text);

  ParseOutcome outcome;
  std::vector<std::string> items;
  const std::size_t open = full.find('[');
  if (open == std::string::npos) {
    outcome.fallback = true;
    items = SplitItems(full, 0, /*stop_at_bracket=*/false);
    for (auto& item : items) item = std::string(StripListMarker(item));
  } else {
    items = SplitItems(full, open + 1, /*stop_at_bracket=*/true);
  }
  for (const auto& item : items) {
    const auto cleaned = StripEdges(item);
    if (!cleaned.empty()) outcome.phrases.emplace_back(cleaned);
  }
  if (outcome.phrases.empty()) outcome.fallback = true;
  return outcome;
}

}  // namespace kpagg

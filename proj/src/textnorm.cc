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

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kpagg/porter_stemmer.h"

namespace kpagg {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one UTF-8 code point starting at text[pos] and advances pos.
// Malformed sequences consume one byte and yield U+FFFD.
char32_t DecodeUtf8(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + static_cast<std::size_t>(extra) >= text.size()) {
    ++pos;
    return kReplacement;
  }
  for (int i = 1; i <= extra; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + static_cast<std::size_t>(i)]);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  // Reject overlong forms and surrogates.
  static constexpr char32_t kMinByLength[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMinByLength[extra] || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += static_cast<std::size_t>(extra) + 1;
  return cp;
}

void AppendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool InRange(char32_t cp, char32_t lo, char32_t hi) {
  return cp >= lo && cp <= hi;
}

// Letters and digits. Outside ASCII this is a block-level approximation:
// punctuation, symbol, space and emoji blocks separate tokens, everything
// else (scripts, combining marks) is a token character.
bool IsAlnum(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  if (InRange(cp, 0x80, 0xBF)) {
    return cp == 0xAA || cp == 0xB2 || cp == 0xB3 || cp == 0xB5 ||
           cp == 0xB9 || cp == 0xBA;
  }
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (InRange(cp, 0x2000, 0x2BFF)) return false;  // punctuation .. symbols
  if (InRange(cp, 0x2E00, 0x2E7F)) return false;
  if (InRange(cp, 0x3000, 0x303F)) return false;
  if (InRange(cp, 0xE000, 0xF8FF)) return false;  // private use
  if (InRange(cp, 0xFE30, 0xFE4F)) return false;
  if (InRange(cp, 0xFF00, 0xFF0F) || InRange(cp, 0xFF1A, 0xFF20) ||
      InRange(cp, 0xFF3B, 0xFF40) || InRange(cp, 0xFF5B, 0xFF65)) {
    return false;
  }
  if (cp == 0xFEFF || cp == kReplacement) return false;
  if (InRange(cp, 0x1F000, 0x1FAFF)) return false;  // emoji, pictographs
  return true;
}

char32_t ToLower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  }
  if (InRange(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (InRange(cp, 0x100, 0x137) || InRange(cp, 0x14A, 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (InRange(cp, 0x139, 0x148) || InRange(cp, 0x179, 0x17E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x178) return 0xFF;
  if (InRange(cp, 0x391, 0x3AB) && cp != 0x3A2) return cp + 0x20;
  if (InRange(cp, 0x410, 0x42F)) return cp + 0x20;
  if (InRange(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

bool IsAsciiLetters(std::string_view token) {
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

// A single Porter pass is not idempotent ("agreed" -> "agre" -> "agr"), so the
// stemmer is reapplied until the token stops changing. Every word in the
// reference vocabulary settles within four passes.
std::string StemToFixedPoint(std::string token) {
  for (int pass = 0; pass < 16; ++pass) {
    std::string next = porter_stem(token);
    if (next == token) break;
    token = std::move(next);
  }
  return token;
}

void FlushToken(std::string& token, std::vector<std::string>& out) {
  if (token.empty()) return;
  if (IsAsciiLetters(token)) {
    out.push_back(StemToFixedPoint(std::move(token)));
  } else {
    out.push_back(std::move(token));
  }
  token.clear();
}

std::string Join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string token;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = DecodeUtf8(text, pos);
    if (IsAlnum(cp)) {
      AppendUtf8(token, ToLower(cp));
    } else {
      FlushToken(token, out);
    }
  }
  FlushToken(token, out);
  return out;
}

NormalizedPhrase normalize_phrase(std::string_view phrase) {
  return NormalizedPhrase{std::string(phrase), Join(normalize_tokens(phrase)),
                          false};
}

std::vector<std::string> phrase_tokens(std::string_view normalized) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    if (end > start) out.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

bool contains_sequence(std::span<const std::string> haystack,
                       std::span<const std::string> needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

bool is_present(const NormalizedPhrase& phrase,
                std::span<const std::string> source_tokens) {
  if (phrase.normalized.empty()) {
    throw std::invalid_argument("is_present: phrase '" + phrase.surface +
                                "' has an empty normalized form");
  }
  const auto tokens = phrase_tokens(phrase.normalized);
  return contains_sequence(source_tokens, tokens);
}

std::vector<NormalizedPhrase> dedup_preserve_order(
    std::span<const NormalizedPhrase> phrases) {
  std::vector<NormalizedPhrase> out;
  std::unordered_set<std::string_view> seen;
  out.reserve(phrases.size());
  for (const auto& p : phrases) {
    if (p.normalized.empty()) continue;
    if (seen.insert(p.normalized).second) out.push_back(p);
  }
  return out;
}

}  // namespace kpagg

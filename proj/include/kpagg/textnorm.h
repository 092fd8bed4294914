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

// Text normalization shared by gold partitioning, prediction normalization and
// present/absent classification. Every function here is pure.

#ifndef KPAGG_TEXTNORM_H_
#define KPAGG_TEXTNORM_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kpagg {

// A keyphrase as generated or annotated, plus its stemmed form.
struct NormalizedPhrase {
  std::string surface;
  // Stemmed lowercase tokens joined by single spaces. Empty iff `surface` has
  // no alphanumeric content.
  std::string normalized;
  bool is_present = false;

  friend bool operator==(const NormalizedPhrase&,
                         const NormalizedPhrase&) = default;
};

// Lowercases, splits on every maximal run of non-alphanumeric code points and
// Porter-stems each token, repeating the stemmer until the token is stable so
// that normalizing normalized text is a no-op. UTF-8 aware: letters and digits outside ASCII are
// token characters, but only all-ASCII-letter tokens are stemmed. Hyphens
// split ("distance-2" -> {"distanc", "2"}).
std::vector<std::string> normalize_tokens(std::string_view text);

NormalizedPhrase normalize_phrase(std::string_view phrase);

// Splits a normalized form back into its tokens.
std::vector<std::string> phrase_tokens(std::string_view normalized);

// True iff `needle` occurs as a contiguous run inside `haystack`. An empty
// needle is contained everywhere.
bool contains_sequence(std::span<const std::string> haystack,
                       std::span<const std::string> needle);

// Token-sequence containment of `phrase` in `source_tokens`.
// Throws std::invalid_argument when phrase.normalized is empty.
bool is_present(const NormalizedPhrase& phrase,
                std::span<const std::string> source_tokens);

// Keeps the first occurrence of each normalized form, dropping phrases whose
// normalized form is empty.
std::vector<NormalizedPhrase> dedup_preserve_order(
    std::span<const NormalizedPhrase> phrases);

}  // namespace kpagg

#endif  // KPAGG_TEXTNORM_H_

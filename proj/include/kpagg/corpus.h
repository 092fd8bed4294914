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

// Benchmark corpora in JSON-lines form, gold present/absent partitioning and
// descriptive corpus statistics.
//
// Record format, one object per line:
//   {"id": "...", "title": "...", "abstract": "...",
//    "keyphrases": ["...", ...], "domain": "scientific" | "news"}
// `domain` is optional and falls back to LoadOptions::default_domain.

#ifndef KPAGG_CORPUS_H_
#define KPAGG_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpagg/textnorm.h"

namespace kpagg {

enum class Domain { kScientific, kNews };

std::string_view to_string(Domain domain);
std::optional<Domain> parse_domain(std::string_view name);

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> gold;
  Domain domain = Domain::kScientific;

  friend bool operator==(const Document&, const Document&) = default;
};

struct GoldPartition {
  std::vector<NormalizedPhrase> present;
  std::vector<NormalizedPhrase> absent;
};

struct CorpusStats {
  std::size_t documents = 0;
  double avg_input_words = 0.0;
  // Undefined when the corpus has no keyphrase of that kind.
  std::optional<double> avg_words_per_present_kp;
  std::optional<double> avg_words_per_absent_kp;
  double avg_present_per_doc = 0.0;
  double avg_absent_per_doc = 0.0;
};

struct LoadOptions {
  std::optional<std::size_t> limit;
  Domain default_domain = Domain::kScientific;
};

struct LoadedCorpus {
  std::vector<Document> documents;
  std::size_t skipped_lines = 0;
  // One human-readable message per skipped line.
  std::vector<std::string> warnings;
};

// Reads records in file order, stopping after `limit` documents. Malformed
// lines and duplicate ids are skipped and counted. Throws CorpusError when the
// file cannot be read or yields no document.
LoadedCorpus load_corpus(const std::filesystem::path& path,
                         const LoadOptions& options = {});
LoadedCorpus read_corpus(std::istream& in, const LoadOptions& options = {});

void write_corpus(std::ostream& out, std::span<const Document> documents);

// Stemmed tokens of title + " " + body, the text presence is tested against.
std::vector<std::string> source_tokens(const Document& doc);

GoldPartition partition_gold(const Document& doc);
GoldPartition partition_gold(const Document& doc,
                             std::span<const std::string> source);

// Whitespace-delimited word count of raw text.
std::size_t count_words(std::string_view text);

// Throws std::invalid_argument on an empty document list.
CorpusStats corpus_stats(std::span<const Document> documents);

}  // namespace kpagg

#endif  // KPAGG_CORPUS_H_

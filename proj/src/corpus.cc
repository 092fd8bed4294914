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

#include "kpagg/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "json.hpp"
#include "kpagg/errors.h"
#include "spdlog/spdlog.h"

namespace kpagg {
namespace {

using nlohmann::json;

// Returns an error message, or an empty string when `record` is usable.
std::string ParseRecord(const json& record, Domain default_domain,
                        Document& doc) {
  if (!record.is_object()) return "record is not a JSON object";
  for (const char* key : {"id", "title", "abstract"}) {
    if (!record.contains(key) || !record[key].is_string()) {
      return std::string("missing or non-string '") + key + "'";
    }
  }
  if (!record.contains("keyphrases") || !record["keyphrases"].is_array()) {
    return "missing or non-array 'keyphrases'";
  }
  doc.id = record["id"].get<std::string>();
  if (doc.id.empty()) return "empty 'id'";
  doc.title = record["title"].get<std::string>();
  doc.body = record["abstract"].get<std::string>();
  doc.gold.clear();
  for (const auto& kp : record["keyphrases"]) {
    if (!kp.is_string()) return "non-string keyphrase";
    doc.gold.push_back(kp.get<std::string>());
  }
  doc.domain = default_domain;
  if (record.contains("domain") && !record["domain"].is_null()) {
    if (!record["domain"].is_string()) return "non-string 'domain'";
    const auto domain = parse_domain(record["domain"].get<std::string>());
    if (!domain) return "unknown domain '" + record["domain"].get<std::string>() + "'";
    doc.domain = *domain;
  }
  return {};
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

std::string_view to_string(Domain domain) {
  return domain == Domain::kNews ? "news" : "scientific";
}

std::optional<Domain> parse_domain(std::string_view name) {
  if (name == "scientific") return Domain::kScientific;
  if (name == "news") return Domain::kNews;
  return std::nullopt;
}

LoadedCorpus read_corpus(std::istream& in, const LoadOptions& options) {
  LoadedCorpus result;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.limit && result.documents.size() >= *options.limit) break;
    if (IsBlank(line)) continue;
    Document doc;
    std::string error;
    const json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded()) {
      error = "invalid JSON";
    } else {
      error = ParseRecord(record, options.default_domain, doc);
    }
    if (error.empty() && !ids.insert(doc.id).second) {
      error = "duplicate id '" + doc.id + "'";
    }
    if (!error.empty()) {
      ++result.skipped_lines;
      result.warnings.push_back("line " + std::to_string(line_no) + ": " +
                                error);
      continue;
    }
    result.documents.push_back(std::move(doc));
  }
  if (result.documents.empty()) {
    throw CorpusError("corpus contains no valid record (" +
                      std::to_string(result.skipped_lines) +
                      " malformed lines)");
  }
  return result;
}

LoadedCorpus load_corpus(const std::filesystem::path& path,
                         const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read corpus file " + path.string());
  LoadedCorpus result;
  try {
    result = read_corpus(in, options);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
  for (const auto& w : result.warnings) {
    spdlog::warn("{}: skipped {}", path.string(), w);
  }
  if (result.skipped_lines > 0) {
    spdlog::warn("{}: {} malformed line(s) skipped", path.string(),
                 result.skipped_lines);
  }
  return result;
}

void write_corpus(std::ostream& out, std::span<const Document> documents) {
  for (const auto& doc : documents) {
    json record = {{"id", doc.id},
                   {"title", doc.title},
                   {"abstract", doc.body},
                   {"keyphrases", doc.gold},
                   {"domain", std::string(to_string(doc.domain))}};
    out << record.dump() << '\n';
  }
}

std::vector<std::string> source_tokens(const Document& doc) {
  return normalize_tokens(doc.title + " " + doc.body);
}

GoldPartition partition_gold(const Document& doc) {
  const auto source = source_tokens(doc);
  return partition_gold(doc, source);
}

GoldPartition partition_gold(const Document& doc,
                             std::span<const std::string> source) {
  std::vector<NormalizedPhrase> normalized;
  normalized.reserve(doc.gold.size());
  for (const auto& kp : doc.gold) normalized.push_back(normalize_phrase(kp));
  GoldPartition partition;
  for (auto& phrase : dedup_preserve_order(normalized)) {
    phrase.is_present = is_present(phrase, source);
    (phrase.is_present ? partition.present : partition.absent)
        .push_back(std::move(phrase));
  }
  return partition;
}

std::size_t count_words(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (const char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                       c == '\f' || c == '\v';
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

CorpusStats corpus_stats(std::span<const Document> documents) {
  if (documents.empty()) {
    throw std::invalid_argument("corpus_stats: empty document list");
  }
  std::size_t input_words = 0;
  std::size_t present_kps = 0, present_words = 0;
  std::size_t absent_kps = 0, absent_words = 0;
  for (const auto& doc : documents) {
    input_words += count_words(doc.title) + count_words(doc.body);
    const auto partition = partition_gold(doc);
    present_kps += partition.present.size();
    absent_kps += partition.absent.size();
    for (const auto& p : partition.present) present_words += count_words(p.surface);
    for (const auto& p : partition.absent) absent_words += count_words(p.surface);
  }
  const auto n = static_cast<double>(documents.size());
  CorpusStats stats;
  stats.documents = documents.size();
  stats.avg_input_words = static_cast<double>(input_words) / n;
  stats.avg_present_per_doc = static_cast<double>(present_kps) / n;
  stats.avg_absent_per_doc = static_cast<double>(absent_kps) / n;
  if (present_kps > 0) {
    stats.avg_words_per_present_kp =
        static_cast<double>(present_words) / static_cast<double>(present_kps);
  }
  if (absent_kps > 0) {
    stats.avg_words_per_absent_kp =
        static_cast<double>(absent_words) / static_cast<double>(absent_kps);
  }
  return stats;
}

}  // namespace kpagg

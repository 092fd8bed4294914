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

// End-to-end runs: corpus -> prompts -> cached samples -> aggregation ->
// metrics, and grids of such runs.

#ifndef KPAGG_HARNESS_H_
#define KPAGG_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpagg/aggregation.h"
#include "kpagg/corpus.h"
#include "kpagg/llm_client.h"
#include "kpagg/metrics.h"
#include "kpagg/prompting.h"

namespace kpagg {

struct RunConfig {
  std::filesystem::path corpus_path;
  std::string corpus_name;  // defaults to the corpus file stem
  PromptVariant variant = PromptVariant::kBaseline;
  Strategy strategy = Strategy::kFrequencyOrder;
  int n_samples = 10;
  double temperature = 0.8;
  int max_tokens = 500;
  std::string model = "default";
  std::string endpoint;  // empty: cache only
  std::string api_key;   // never serialized
  std::optional<std::size_t> limit;
  // Picks the `limit` documents at random (file order kept) instead of the
  // first ones. Has no effect on what a remote model generates.
  std::optional<std::uint64_t> seed;
  std::filesystem::path cache_dir = "cache";  // empty: no cache
  EmptyGoldPolicy empty_gold = EmptyGoldPolicy::kExclude;
  std::filesystem::path out_csv;  // empty: no file output
  std::filesystem::path prompts_file;  // empty: built-in defaults
  bool prefill = false;  // send "[" as a partial assistant turn
  RequestMode request_mode = RequestMode::kBatched;
  int max_in_flight = 4;
  bool offline = false;  // never touch the network
  Domain default_domain = Domain::kScientific;
  int max_retries = 5;
  int initial_backoff_ms = 500;
  int max_backoff_ms = 8000;
  int timeout_s = 120;

  std::string resolved_corpus_name() const;
  // Every field except api_key.
  nlohmann::json to_json() const;
  // Unknown keys and bad values throw ConfigError. Missing keys keep the
  // values already in `base`.
  static RunConfig from_json(const nlohmann::json& j, const RunConfig& base);
  static RunConfig from_json(const nlohmann::json& j);
};

struct DocumentOutcome {
  std::string doc_id;
  bool errored = false;
  std::size_t samples_used = 0;
  std::size_t parse_fallbacks = 0;
  Prediction prediction;
};

struct RunSummary {
  std::size_t attempted = 0;
  std::size_t processed = 0;
  std::size_t errored = 0;
  std::size_t parse_fallbacks = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t requests = 0;
  std::size_t retries = 0;
  std::size_t failed_samples = 0;
  std::size_t skipped_lines = 0;  // malformed corpus lines
  double wall_seconds = 0.0;
  MetricReport report;
  std::vector<DocumentOutcome> documents;

  // Counters only; no timing, so it is stable across replays.
  nlohmann::json counters_json() const;
};

// Picks the documents a run evaluates. Without a seed: the first `limit`.
// With one: `limit` documents chosen uniformly at random, in file order.
std::vector<Document> select_documents(std::vector<Document> docs,
                                       std::optional<std::size_t> limit,
                                       std::optional<std::uint64_t> seed);

// Throws ConfigError for invalid settings or when samples are missing from
// the cache and no endpoint may be used; AuthError when the endpoint rejects
// the credentials. Per-document sampling failures are counted, not thrown.
// Writes `out_csv` and `<out_csv>.meta.json` when out_csv is set.
RunSummary run(const RunConfig& config);

void print_summary(std::ostream& out, const RunSummary& summary);

// Grid file:
//   {"base": {<RunConfig keys>},
//    "runs": [{"variant": "present", "strategy": "single"}, ...],
//    "out": "grid.csv"}
struct GridConfig {
  std::vector<RunConfig> runs;
  std::filesystem::path out_csv;

  // Relative paths resolve against `base_dir`.
  static GridConfig from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
  static GridConfig load(const std::filesystem::path& path);
};

struct GridResult {
  std::vector<RunSummary> runs;
  std::vector<MetricReport> reports;
};

// Throws ConfigError on an empty run list or clashing output paths, before
// any run starts.
GridResult grid(const GridConfig& config);

void write_stats_table(std::ostream& out, const CorpusStats& stats);
void write_stats_csv(std::ostream& out, const CorpusStats& stats);

}  // namespace kpagg

#endif  // KPAGG_HARNESS_H_

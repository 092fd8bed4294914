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

#include "kpagg/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <thread>
#include <tuple>
#include <utility>

#include "kpagg/errors.h"
#include "kpagg/sample.h"
#include "kpagg/sample_cache.h"
#include "spdlog/spdlog.h"

namespace kpagg {
namespace {

using nlohmann::json;

template <typename T, typename Parse>
T ParseEnum(const json& j, std::string_view key, Parse parse) {
  if (!j.is_string()) throw ConfigError(std::string(key) + " must be a string");
  auto v = parse(j.get<std::string>());
  if (!v) {
    throw ConfigError("invalid " + std::string(key) + " '" + j.get<std::string>() + "'");
  }
  return *v;
}

std::filesystem::path Resolve(const std::filesystem::path& p,
                              const std::filesystem::path& base_dir) {
  if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string OptionalFixed(const std::optional<double>& v, int decimals) {
  return v ? Fixed(*v, decimals) : "n/a";
}

void Validate(const RunConfig& c) {
  if (c.corpus_path.empty()) throw ConfigError("no corpus given");
  if (c.n_samples < 1) throw ConfigError("n_samples must be at least 1");
  if (c.temperature < 0) throw ConfigError("temperature must be non-negative");
  if (c.max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
  if (c.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (c.max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (c.limit && *c.limit == 0) throw ConfigError("limit must be at least 1");
}

// Samples of one document: cached ones first, fetched ones added later.
struct DocWork {
  const Document* doc = nullptr;
  RenderedPrompt prompt;
  std::vector<std::optional<RawSample>> samples;  // by sample index
  std::vector<int> missing;
};

}  // namespace

std::string RunConfig::resolved_corpus_name() const {
  if (!corpus_name.empty()) return corpus_name;
  return corpus_path.stem().string();
}

json RunConfig::to_json() const {
  json j = {{"corpus", corpus_path.string()},
            {"corpus_name", resolved_corpus_name()},
            {"variant", std::string(to_string(variant))},
            {"strategy", std::string(to_string(strategy))},
            {"n_samples", n_samples},
            {"temperature", temperature},
            {"max_tokens", max_tokens},
            {"model", model},
            {"endpoint", endpoint},
            {"limit", limit ? json(*limit) : json(nullptr)},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"cache_dir", cache_dir.string()},
            {"empty_gold", std::string(to_string(empty_gold))},
            {"out", out_csv.string()},
            {"prompts", prompts_file.string()},
            {"prefill", prefill},
            {"request_mode", std::string(to_string(request_mode))},
            {"max_in_flight", max_in_flight},
            {"offline", offline},
            {"domain", std::string(to_string(default_domain))},
            {"max_retries", max_retries},
            {"initial_backoff_ms", initial_backoff_ms},
            {"max_backoff_ms", max_backoff_ms},
            {"timeout_s", timeout_s}};
  return j;
}

RunConfig RunConfig::from_json(const json& j, const RunConfig& base) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c = base;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "corpus") {
        c.corpus_path = v.get<std::string>();
      } else if (key == "corpus_name") {
        c.corpus_name = v.get<std::string>();
      } else if (key == "variant") {
        c.variant = ParseEnum<PromptVariant>(v, key, parse_variant);
      } else if (key == "strategy" || key == "aggregate") {
        c.strategy = ParseEnum<Strategy>(v, key, parse_strategy);
      } else if (key == "n_samples") {
        c.n_samples = v.get<int>();
      } else if (key == "temperature") {
        c.temperature = v.get<double>();
      } else if (key == "max_tokens") {
        c.max_tokens = v.get<int>();
      } else if (key == "model") {
        c.model = v.get<std::string>();
      } else if (key == "endpoint") {
        c.endpoint = v.get<std::string>();
      } else if (key == "limit") {
        c.limit = v.is_null() ? std::nullopt : std::optional(v.get<std::size_t>());
      } else if (key == "seed") {
        c.seed = v.is_null() ? std::nullopt : std::optional(v.get<std::uint64_t>());
      } else if (key == "cache_dir") {
        c.cache_dir = v.get<std::string>();
      } else if (key == "empty_gold") {
        c.empty_gold = ParseEnum<EmptyGoldPolicy>(v, key, parse_empty_gold_policy);
      } else if (key == "out") {
        c.out_csv = v.get<std::string>();
      } else if (key == "prompts") {
        c.prompts_file = v.get<std::string>();
      } else if (key == "prefill") {
        c.prefill = v.get<bool>();
      } else if (key == "request_mode") {
        c.request_mode = ParseEnum<RequestMode>(v, key, parse_request_mode);
      } else if (key == "max_in_flight") {
        c.max_in_flight = v.get<int>();
      } else if (key == "offline") {
        c.offline = v.get<bool>();
      } else if (key == "domain") {
        c.default_domain = ParseEnum<Domain>(v, key, parse_domain);
      } else if (key == "max_retries") {
        c.max_retries = v.get<int>();
      } else if (key == "initial_backoff_ms") {
        c.initial_backoff_ms = v.get<int>();
      } else if (key == "max_backoff_ms") {
        c.max_backoff_ms = v.get<int>();
      } else if (key == "timeout_s") {
        c.timeout_s = v.get<int>();
      } else {
        throw ConfigError("unknown run config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad run config value: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json(const json& j) { return from_json(j, RunConfig{}); }

json RunSummary::counters_json() const {
  return {{"attempted", attempted},         {"processed", processed},
          {"errored", errored},             {"parse_fallbacks", parse_fallbacks},
          {"cache_hits", cache_hits},       {"cache_misses", cache_misses},
          {"requests", requests},           {"retries", retries},
          {"failed_samples", failed_samples}, {"skipped_lines", skipped_lines}};
}

std::vector<Document> select_documents(std::vector<Document> docs,
                                       std::optional<std::size_t> limit,
                                       std::optional<std::uint64_t> seed) {
  if (!limit || *limit >= docs.size()) return docs;
  if (!seed) {
    docs.resize(*limit);
    return docs;
  }
  // Selection sampling (Knuth's Algorithm S). Raw engine output keeps the
  // choice identical across standard libraries.
  std::mt19937_64 rng(*seed);
  std::vector<Document> out;
  out.reserve(*limit);
  const std::size_t total = docs.size();
  for (std::size_t i = 0; i < total && out.size() < *limit; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (static_cast<double>(total - i) * u < static_cast<double>(*limit - out.size())) {
      out.push_back(std::move(docs[i]));
    }
  }
  return out;
}

RunSummary run(const RunConfig& config) {
  Validate(config);
  const auto started = std::chrono::steady_clock::now();
  const PromptConfig prompts = config.prompts_file.empty()
                                   ? PromptConfig::defaults()
                                   : PromptConfig::load(config.prompts_file);
  LoadOptions load_opts;
  load_opts.default_domain = config.default_domain;
  LoadedCorpus loaded = load_corpus(config.corpus_path, load_opts);
  const std::vector<Document> docs =
      select_documents(std::move(loaded.documents), config.limit, config.seed);

  RunSummary summary;
  summary.skipped_lines = loaded.skipped_lines;
  summary.attempted = docs.size();

  std::unique_ptr<SampleCache> cache;
  if (!config.cache_dir.empty()) {
    cache = std::make_unique<SampleCache>(SampleCache::path_for(
        config.cache_dir, config.resolved_corpus_name(), to_string(config.variant),
        config.model));
  }

  std::vector<DocWork> work(docs.size());
  std::size_t total_missing = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    DocWork& w = work[d];
    w.doc = &docs[d];
    w.prompt = build_prompt(docs[d], config.variant, config.prefill, prompts);
    w.samples.resize(static_cast<std::size_t>(config.n_samples));
    for (int i = 0; i < config.n_samples; ++i) {
      std::optional<RawSample> hit;
      if (cache) hit = cache->get({docs[d].id, w.prompt.prompt_hash, i});
      if (hit && !hit->failed()) {
        w.samples[static_cast<std::size_t>(i)] = std::move(hit);
        ++summary.cache_hits;
      } else {
        w.missing.push_back(i);
        ++summary.cache_misses;
      }
    }
    total_missing += w.missing.size();
  }

  if (total_missing > 0 && (config.offline || config.endpoint.empty())) {
    throw ConfigError(std::to_string(total_missing) + " sample(s) are not cached and " +
                      (config.offline ? "the run is offline" : "no endpoint is configured"));
  }

  if (total_missing > 0) {
    ClientOptions opts;
    opts.endpoint = config.endpoint;
    opts.api_key = config.api_key;
    opts.model = config.model;
    opts.mode = config.request_mode;
    opts.max_retries = config.max_retries;
    opts.initial_backoff = std::chrono::milliseconds(config.initial_backoff_ms);
    opts.max_backoff = std::chrono::milliseconds(config.max_backoff_ms);
    opts.timeout = std::chrono::seconds(config.timeout_s);
    ChatClient client(opts);  // validates the endpoint before any request
    const SamplingParams params{config.n_samples, config.temperature, config.max_tokens};

    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr fatal;
    std::mutex fatal_mu;
    auto worker = [&] {
      while (!abort) {
        const std::size_t d = next++;
        if (d >= work.size()) return;
        DocWork& w = work[d];
        if (w.missing.empty()) continue;
        try {
          auto fetched = client.sample_completions(w.prompt, w.doc->id, params, w.missing);
          for (auto& s : fetched) {
            if (!s.failed() && cache) cache->put(s);
            w.samples[static_cast<std::size_t>(s.sample_index)] = std::move(s);
          }
        } catch (...) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          abort = true;
        }
      }
    };
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.max_in_flight), work.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (fatal) std::rethrow_exception(fatal);

    const auto counters = client.counters();
    summary.requests = counters.requests;
    summary.retries = counters.retries;
    summary.failed_samples = counters.failed_samples;
  }

  std::vector<DocScore> scores;
  for (const DocWork& w : work) {
    DocumentOutcome outcome;
    outcome.doc_id = w.doc->id;
    std::vector<ParsedSample> parsed;
    for (const auto& s : w.samples) {
      if (!s || s->failed()) continue;
      ParseOutcome po = parse_sample(s->text, !w.prompt.assistant_prefill.empty());
      if (po.fallback) ++outcome.parse_fallbacks;
      parsed.push_back({std::move(po.phrases), perplexity(*s)});
    }
    outcome.samples_used = parsed.size();
    summary.parse_fallbacks += outcome.parse_fallbacks;
    if (parsed.empty()) {
      outcome.errored = true;
      ++summary.errored;
      spdlog::warn("doc {}: every sample failed; excluded from metrics", w.doc->id);
    } else {
      ++summary.processed;
      outcome.prediction = predict(parsed, *w.doc, config.strategy);
      auto doc_scores = score_document(*w.doc, outcome.prediction, config.empty_gold);
      scores.insert(scores.end(), doc_scores.begin(), doc_scores.end());
    }
    summary.documents.push_back(std::move(outcome));
  }

  summary.report = build_report(config.resolved_corpus_name(),
                                std::string(to_string(config.variant)),
                                std::string(to_string(config.strategy)), scores);

  if (!config.out_csv.empty()) {
    if (config.out_csv.has_parent_path()) {
      std::filesystem::create_directories(config.out_csv.parent_path());
    }
    std::ofstream csv(config.out_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error("cannot write " + config.out_csv.string());
    write_csv(csv, std::span(&summary.report, 1));
    std::ofstream meta(config.out_csv.string() + ".meta.json",
                       std::ios::binary | std::ios::trunc);
    if (!meta) throw Error("cannot write " + config.out_csv.string() + ".meta.json");
    meta << json{{"config", config.to_json()}, {"summary", summary.counters_json()}}.dump(2)
         << '\n';
  }

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

void print_summary(std::ostream& out, const RunSummary& s) {
  out << "documents: " << s.attempted << " attempted, " << s.processed << " processed, "
      << s.errored << " errored\n"
      << "samples: " << s.cache_hits << " cache hits, " << s.cache_misses
      << " cache misses, " << s.failed_samples << " failed, " << s.parse_fallbacks
      << " parse fallbacks\n"
      << "requests: " << s.requests << " (" << s.retries << " retries)\n";
  if (s.skipped_lines > 0) out << "corpus lines skipped: " << s.skipped_lines << '\n';
  out << "wall time: " << Fixed(s.wall_seconds, 2) << " s\n";
}

GridConfig GridConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("grid config must be a JSON object");
  RunConfig base;
  if (j.contains("base")) base = RunConfig::from_json(j["base"]);
  GridConfig g;
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("grid 'out' must be a string");
    g.out_csv = Resolve(j["out"].get<std::string>(), base_dir);
  }
  if (!j.contains("runs") || !j["runs"].is_array()) {
    throw ConfigError("grid config needs a 'runs' array");
  }
  for (const auto& r : j["runs"]) {
    RunConfig c = RunConfig::from_json(r, base);
    c.corpus_path = Resolve(c.corpus_path, base_dir);
    c.cache_dir = Resolve(c.cache_dir, base_dir);
    c.out_csv = Resolve(c.out_csv, base_dir);
    c.prompts_file = Resolve(c.prompts_file, base_dir);
    g.runs.push_back(std::move(c));
  }
  for (const auto& key : j.items()) {
    if (key.key() != "base" && key.key() != "runs" && key.key() != "out") {
      throw ConfigError("unknown grid config key '" + key.key() + "'");
    }
  }
  return g;
}

GridConfig GridConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read grid config " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("grid config " + path.string() + " is not JSON");
  return from_json(j, path.parent_path());
}

GridResult grid(const GridConfig& config) {
  if (config.runs.empty()) throw ConfigError("grid has no runs");
  std::set<std::filesystem::path> outputs;
  if (!config.out_csv.empty()) outputs.insert(config.out_csv.lexically_normal());
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& r : config.runs) {
    Validate(r);
    if (!r.out_csv.empty() && !outputs.insert(r.out_csv.lexically_normal()).second) {
      throw ConfigError("output path " + r.out_csv.string() + " is used more than once");
    }
    if (!keys.insert({r.resolved_corpus_name(), std::string(to_string(r.variant)),
                      std::string(to_string(r.strategy))})
             .second) {
      throw ConfigError("grid lists " + r.resolved_corpus_name() + "/" +
                        std::string(to_string(r.variant)) + "/" +
                        std::string(to_string(r.strategy)) + " more than once");
    }
  }

  GridResult result;
  for (const auto& r : config.runs) {
    spdlog::info("grid: {} {} {}", r.resolved_corpus_name(), to_string(r.variant),
                 to_string(r.strategy));
    result.runs.push_back(run(r));
    result.reports.push_back(result.runs.back().report);
  }
  if (!config.out_csv.empty()) {
    if (config.out_csv.has_parent_path()) {
      std::filesystem::create_directories(config.out_csv.parent_path());
    }
    std::ofstream csv(config.out_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error("cannot write " + config.out_csv.string());
    write_csv(csv, result.reports);
  }
  return result;
}

void write_stats_table(std::ostream& out, const CorpusStats& s) {
  const std::pair<std::string, std::string> rows[] = {
      {"documents", std::to_string(s.documents)},
      {"avg words in title+abstract", Fixed(s.avg_input_words, 2)},
      {"avg words per present keyphrase", OptionalFixed(s.avg_words_per_present_kp, 2)},
      {"avg words per absent keyphrase", OptionalFixed(s.avg_words_per_absent_kp, 2)},
      {"avg present keyphrases per doc", Fixed(s.avg_present_per_doc, 2)},
      {"avg absent keyphrases per doc", Fixed(s.avg_absent_per_doc, 2)},
  };
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) {
    out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
}

void write_stats_csv(std::ostream& out, const CorpusStats& s) {
  out << "statistic,value\n"
      << "documents," << s.documents << '\n'
      << "avg_input_words," << Fixed(s.avg_input_words, 6) << '\n'
      << "avg_words_per_present_kp," << OptionalFixed(s.avg_words_per_present_kp, 6) << '\n'
      << "avg_words_per_absent_kp," << OptionalFixed(s.avg_words_per_absent_kp, 6) << '\n'
      << "avg_present_per_doc," << Fixed(s.avg_present_per_doc, 6) << '\n'
      << "avg_absent_per_doc," << Fixed(s.avg_absent_per_doc, 6) << '\n';
}

}  // namespace kpagg

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

// kpagg: keyphrase generation runs, corpus statistics and a mock endpoint.
//
// The API key is read from KPAGG_API_KEY only. The endpoint comes from
// --endpoint or KPAGG_ENDPOINT.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpagg/corpus.h"
#include "kpagg/errors.h"
#include "kpagg/harness.h"
#include "kpagg/mock_server.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAuth = 3;

std::string Env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

template <typename T>
std::vector<std::string> Names(std::initializer_list<T> values) {
  std::vector<std::string> names;
  for (T v : values) names.emplace_back(kpagg::to_string(v));
  return names;
}

template <typename T, typename Parse>
T Parsed(const std::string& name, Parse parse) {
  // Values were checked against Names() during command-line parsing.
  return *parse(name);
}

struct RunFlags {
  std::string corpus;
  std::string corpus_name;
  std::string variant = "baseline";
  std::string strategy = "frequency";
  int n_samples = 10;
  double temperature = 0.8;
  int max_tokens = 500;
  std::string model = "default";
  std::string endpoint;
  std::optional<std::size_t> limit;
  std::optional<std::uint64_t> seed;
  std::string cache_dir = "cache";
  std::string empty_gold = "exclude";
  std::string out;
  std::string prompts;
  bool prefill = false;
  std::string request_mode = "batched";
  int max_in_flight = 4;
  bool offline = false;
  std::string domain = "scientific";
  int max_retries = 5;
};

void AddRunCommand(CLI::App& app, RunFlags& f) {
  using namespace kpagg;
  auto* run = app.add_subcommand("run", "Sample, aggregate and score one configuration");
  run->add_option("--corpus", f.corpus, "JSON-lines corpus file")->required()->check(CLI::ExistingFile);
  run->add_option("--corpus-name", f.corpus_name, "Name used in reports and the cache (default: file stem)");
  run->add_option("--variant", f.variant, "Prompt variant")
      ->check(CLI::IsMember(Names({PromptVariant::kBaseline, PromptVariant::kPresentSpecialist,
                   PromptVariant::kAbsentSpecialist, PromptVariant::kOrderControl,
                   PromptVariant::kLengthControl, PromptVariant::kCombinedControl})))
      ->capture_default_str();
  run->add_option("--aggregate", f.strategy, "Aggregation strategy")
      ->check(CLI::IsMember(Names({Strategy::kSingle, Strategy::kUnion, Strategy::kUnionConcat,
                   Strategy::kUnionInterleaf, Strategy::kFrequencyOrder})))
      ->capture_default_str();
  run->add_option("--n-samples", f.n_samples, "Samples per document")
      ->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--temperature", f.temperature)->check(CLI::NonNegativeNumber)->capture_default_str();
  run->add_option("--max-tokens", f.max_tokens)->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--model", f.model, "Model name sent to the endpoint")->capture_default_str();
  run->add_option("--endpoint", f.endpoint,
                  "Chat-completions base URL, e.g. http://host:8000/v1 (default: $KPAGG_ENDPOINT)");
  run->add_option("--limit", f.limit, "Evaluate at most this many documents")->check(CLI::PositiveNumber);
  run->add_option("--seed", f.seed, "Pick --limit documents at random with this seed");
  run->add_option("--cache-dir", f.cache_dir, "Sample cache root (empty disables caching)")->capture_default_str();
  run->add_option("--empty-gold", f.empty_gold, "Documents without gold in a partition")
      ->check(CLI::IsMember(Names({EmptyGoldPolicy::kExclude, EmptyGoldPolicy::kZero})))
      ->capture_default_str();
  run->add_option("--out", f.out, "Metric CSV path");
  run->add_option("--prompts", f.prompts, "Prompt configuration JSON")->check(CLI::ExistingFile);
  run->add_flag("--prefill", f.prefill, "Send \"[\" as a partial assistant turn");
  run->add_option("--request-mode", f.request_mode, "One n-choice request or n single requests")
      ->check(CLI::IsMember(Names({RequestMode::kBatched, RequestMode::kSingle})))
      ->capture_default_str();
  run->add_option("--max-in-flight", f.max_in_flight, "Concurrent documents")
      ->check(CLI::PositiveNumber)->capture_default_str();
  run->add_flag("--offline", f.offline, "Fail instead of contacting the endpoint on a cache miss");
  run->add_option("--domain", f.domain, "Domain for records without one")
      ->check(CLI::IsMember(Names({Domain::kScientific, Domain::kNews})))
      ->capture_default_str();
  run->add_option("--max-retries", f.max_retries, "Retries for transient HTTP failures")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
}

kpagg::RunConfig ToConfig(const RunFlags& f) {
  kpagg::RunConfig c;
  c.corpus_path = f.corpus;
  c.corpus_name = f.corpus_name;
  c.variant = Parsed<kpagg::PromptVariant>(f.variant, kpagg::parse_variant);
  c.strategy = Parsed<kpagg::Strategy>(f.strategy, kpagg::parse_strategy);
  c.n_samples = f.n_samples;
  c.temperature = f.temperature;
  c.max_tokens = f.max_tokens;
  c.model = f.model;
  c.endpoint = f.endpoint.empty() ? Env("KPAGG_ENDPOINT") : f.endpoint;
  c.api_key = Env("KPAGG_API_KEY");
  c.limit = f.limit;
  c.seed = f.seed;
  c.cache_dir = f.cache_dir;
  c.empty_gold = Parsed<kpagg::EmptyGoldPolicy>(f.empty_gold, kpagg::parse_empty_gold_policy);
  c.out_csv = f.out;
  c.prompts_file = f.prompts;
  c.prefill = f.prefill;
  c.request_mode = Parsed<kpagg::RequestMode>(f.request_mode, kpagg::parse_request_mode);
  c.max_in_flight = f.max_in_flight;
  c.offline = f.offline;
  c.default_domain = Parsed<kpagg::Domain>(f.domain, kpagg::parse_domain);
  c.max_retries = f.max_retries;
  return c;
}

int RunMain(const RunFlags& flags) {
  const kpagg::RunConfig config = ToConfig(flags);
  const kpagg::RunSummary summary = kpagg::run(config);
  kpagg::write_text_table(std::cout, std::span(&summary.report, 1));
  std::cout << '\n';
  kpagg::print_summary(std::cout, summary);
  if (!config.out_csv.empty()) std::cout << "wrote " << config.out_csv.string() << '\n';
  return summary.processed == 0 ? kExitFailure : 0;
}

int StatsMain(const std::string& corpus, const std::string& csv, const std::string& domain) {
  kpagg::LoadOptions opts;
  opts.default_domain = Parsed<kpagg::Domain>(domain, kpagg::parse_domain);
  const auto loaded = kpagg::load_corpus(corpus, opts);
  const auto stats = kpagg::corpus_stats(loaded.documents);
  kpagg::write_stats_table(std::cout, stats);
  if (loaded.skipped_lines > 0) {
    std::cout << "skipped lines" << "  " << loaded.skipped_lines << '\n';
  }
  if (!csv.empty()) {
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    if (!out) throw kpagg::Error("cannot write " + csv);
    kpagg::write_stats_csv(out, stats);
  }
  return 0;
}

int GridMain(const std::string& path) {
  const kpagg::GridConfig config = kpagg::GridConfig::load(path);
  kpagg::GridConfig with_key = config;
  for (auto& r : with_key.runs) {
    if (r.endpoint.empty()) r.endpoint = Env("KPAGG_ENDPOINT");
    r.api_key = Env("KPAGG_API_KEY");
  }
  const auto result = kpagg::grid(with_key);
  kpagg::write_text_table(std::cout, result.reports);
  int errored_runs = 0;
  for (const auto& s : result.runs) errored_runs += s.processed == 0 ? 1 : 0;
  if (!config.out_csv.empty()) std::cout << "wrote " << config.out_csv.string() << '\n';
  return errored_runs > 0 ? kExitFailure : 0;
}

int MockMain(const std::string& fixture_path, int port, std::uint64_t seed) {
  nlohmann::json fixture = nlohmann::json::object();
  if (!fixture_path.empty()) {
    std::ifstream in(fixture_path);
    if (!in) throw kpagg::ConfigError("cannot read fixture " + fixture_path);
    fixture = nlohmann::json::parse(in, nullptr, false);
    if (fixture.is_discarded()) throw kpagg::ConfigError(fixture_path + " is not JSON");
  }
  kpagg::MockChatServer server(fixture, seed);
  server.start(port);
  std::cout << server.url() << std::endl;
  server.wait();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("kpagg"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Keyphrase generation with multi-sample aggregation"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  RunFlags run_flags;
  AddRunCommand(app, run_flags);

  std::string stats_corpus;
  std::string stats_csv;
  std::string stats_domain = "scientific";
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--corpus", stats_corpus)->required()->check(CLI::ExistingFile);
  stats->add_option("--csv", stats_csv, "Also write the statistics as CSV");
  stats->add_option("--domain", stats_domain)
      ->check(CLI::IsMember(Names({kpagg::Domain::kScientific, kpagg::Domain::kNews})));

  std::string grid_path;
  auto* grid = app.add_subcommand("grid", "Run a grid of configurations from a JSON file");
  grid->add_option("--config", grid_path)->required()->check(CLI::ExistingFile);

  std::string fixture;
  int port = 8089;
  std::uint64_t seed = 0;
  auto* mock = app.add_subcommand("mock-server", "Serve a fixture-driven chat-completions endpoint");
  mock->add_option("--fixture", fixture, "Fixture JSON")->check(CLI::ExistingFile);
  mock->add_option("--port", port, "Port on 127.0.0.1 (0 picks one)")->capture_default_str();
  mock->add_option("--seed", seed, "Seed for synthesized completions")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (verbose) spdlog::set_level(spdlog::level::debug);
  if (quiet) spdlog::set_level(spdlog::level::err);

  try {
    if (app.got_subcommand("run")) return RunMain(run_flags);
    if (*stats) return StatsMain(stats_corpus, stats_csv, stats_domain);
    if (*grid) return GridMain(grid_path);
    if (*mock) return MockMain(fixture, port, seed);
  } catch (const kpagg::AuthError& e) {
    spdlog::error("{}", e.what());
    return kExitAuth;
  } catch (const kpagg::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

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

// Client for OpenAI-compatible chat-completions endpoints.
//
// A request carries the system and user turns plus, when the prompt has one,
// an assistant prefill turn that the server continues. Per-token logprobs are
// requested so perplexity can rank samples.

#ifndef KPAGG_LLM_CLIENT_H_
#define KPAGG_LLM_CLIENT_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kpagg/prompting.h"
#include "kpagg/sample.h"

namespace kpagg {

// How the n samples of one prompt are requested.
enum class RequestMode {
  kBatched,  // one request with "n": k
  kSingle,   // k requests with "n": 1
};

std::string_view to_string(RequestMode mode);
std::optional<RequestMode> parse_request_mode(std::string_view name);

struct Endpoint {
  std::string scheme_host_port;  // "http://127.0.0.1:8080"
  std::string base_path;         // "/v1", no trailing slash
  std::string completions_path() const { return base_path + "/chat/completions"; }
};

// Accepts "http(s)://host[:port][/prefix]". Throws ConfigError otherwise.
Endpoint parse_endpoint(std::string_view url);

struct ClientOptions {
  std::string endpoint;
  std::string api_key;  // sent as a bearer token when non-empty
  std::string model = "default";
  RequestMode mode = RequestMode::kBatched;
  bool request_logprobs = true;
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  std::chrono::seconds timeout{120};
};

struct SamplingParams {
  int n = 10;
  double temperature = 0.8;
  int max_tokens = 500;
};

struct ClientCounters {
  std::size_t requests = 0;
  std::size_t retries = 0;
  std::size_t failed_samples = 0;
};

// Request body for `count` choices of `prompt`.
nlohmann::json build_request_body(const RenderedPrompt& prompt,
                                  std::string_view model,
                                  const SamplingParams& params, int count,
                                  bool request_logprobs);

// Extracts one RawSample per choice, ordered by choice index. Choices without
// message content become failed samples.
std::vector<RawSample> parse_completion_response(const nlohmann::json& body,
                                                 std::string_view doc_id,
                                                 std::string_view prompt_hash,
                                                 std::span<const int> indices);

// Safe to share between threads; each call opens its own connection.
class ChatClient {
 public:
  explicit ChatClient(ClientOptions options);

  // Draws params.n samples with indices 0..n-1.
  std::vector<RawSample> sample_completions(const RenderedPrompt& prompt,
                                            std::string_view doc_id,
                                            const SamplingParams& params);

  // Draws one sample per entry of `indices`. Transient failures (429, 5xx,
  // network errors) are retried with exponential backoff; samples that still
  // fail come back with an "error:..." finish_reason. Throws AuthError on 401
  // or 403.
  std::vector<RawSample> sample_completions(const RenderedPrompt& prompt,
                                            std::string_view doc_id,
                                            const SamplingParams& params,
                                            std::span<const int> indices);

  ClientCounters counters() const;
  const ClientOptions& options() const { return options_; }

 private:
  struct Attempt {
    int status = 0;  // 0 on transport failure
    std::string body;
    std::string error;
  };

  Attempt Post(const nlohmann::json& body) const;
  std::vector<RawSample> Request(const RenderedPrompt& prompt,
                                 std::string_view doc_id,
                                 const SamplingParams& params,
                                 std::span<const int> indices);

  ClientOptions options_;
  Endpoint endpoint_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> failed_samples_{0};
};

}  // namespace kpagg

#endif  // KPAGG_LLM_CLIENT_H_

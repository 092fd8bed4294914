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

#include "kpagg/llm_client.h"

#include <algorithm>
#include <string>
#include <thread>
#include <utility>

#include "httplib.h"
#include "kpagg/errors.h"
#include "spdlog/spdlog.h"

namespace kpagg {
namespace {

using nlohmann::json;

bool IsTransient(int status) {
  return status == 0 || status == 408 || status == 429 || status >= 500;
}

RawSample FailedSample(std::string_view doc_id, std::string_view prompt_hash,
                       int index, std::string reason) {
  RawSample s;
  s.doc_id = std::string(doc_id);
  s.prompt_hash = std::string(prompt_hash);
  s.sample_index = index;
  s.finish_reason = std::string(kFailurePrefix) + std::move(reason);
  return s;
}

}  // namespace

std::string_view to_string(RequestMode mode) {
  return mode == RequestMode::kSingle ? "single" : "batched";
}

std::optional<RequestMode> parse_request_mode(std::string_view name) {
  if (name == "batched") return RequestMode::kBatched;
  if (name == "single") return RequestMode::kSingle;
  return std::nullopt;
}

Endpoint parse_endpoint(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw ConfigError("endpoint '" + std::string(url) +
                      "' must start with http:// or https://");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported endpoint scheme '" + std::string(scheme) + "'");
  }
  const auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  const auto host = rest.substr(0, slash);
  if (host.empty()) throw ConfigError("endpoint '" + std::string(url) + "' has no host");
  Endpoint e;
  e.scheme_host_port = std::string(url.substr(0, scheme_end + 3)) + std::string(host);
  if (slash != std::string_view::npos) {
    std::string path(rest.substr(slash));
    while (!path.empty() && path.back() == '/') path.pop_back();
    // Accept a full ".../chat/completions" URL as well as a base URL.
    constexpr std::string_view kSuffix = "/chat/completions";
    if (path.ends_with(kSuffix)) path.resize(path.size() - kSuffix.size());
    e.base_path = std::move(path);
  }
  return e;
}

json build_request_body(const RenderedPrompt& prompt, std::string_view model,
                        const SamplingParams& params, int count,
                        bool request_logprobs) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", prompt.system}});
  messages.push_back({{"role", "user"}, {"content", prompt.user}});
  json body = {{"model", std::string(model)},
               {"temperature", params.temperature},
               {"n", count},
               {"max_tokens", params.max_tokens}};
  if (!prompt.assistant_prefill.empty()) {
    messages.push_back(
        {{"role", "assistant"}, {"content", prompt.assistant_prefill}});
    // vLLM-style servers need these to continue the partial assistant turn.
    body["continue_final_message"] = true;
    body["add_generation_prompt"] = false;
  }
  body["messages"] = std::move(messages);
  if (request_logprobs) body["logprobs"] = true;
  return body;
}

std::vector<RawSample> parse_completion_response(const json& body,
                                                 std::string_view doc_id,
                                                 std::string_view prompt_hash,
                                                 std::span<const int> indices) {
  std::vector<RawSample> out;
  out.reserve(indices.size());
  std::vector<const json*> choices;
  if (body.is_object() && body.contains("choices") && body["choices"].is_array()) {
    for (const auto& c : body["choices"]) choices.push_back(&c);
    std::stable_sort(choices.begin(), choices.end(),
                     [](const json* a, const json* b) {
                       return a->value("index", 0) < b->value("index", 0);
                     });
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i >= choices.size()) {
      out.push_back(FailedSample(doc_id, prompt_hash, indices[i], "missing_choice"));
      continue;
    }
    const json& choice = *choices[i];
    const json* content = nullptr;
    if (choice.contains("message") && choice["message"].is_object() &&
        choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      content = &choice["message"]["content"];
    }
    if (content == nullptr) {
      out.push_back(FailedSample(doc_id, prompt_hash, indices[i], "no_content"));
      continue;
    }
    RawSample s;
    s.doc_id = std::string(doc_id);
    s.prompt_hash = std::string(prompt_hash);
    s.sample_index = indices[i];
    s.text = content->get<std::string>();
    s.finish_reason = choice.contains("finish_reason") &&
                              choice["finish_reason"].is_string()
                          ? choice["finish_reason"].get<std::string>()
                          : "unknown";
    if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("content") &&
        choice["logprobs"]["content"].is_array()) {
      std::vector<double> lps;
      for (const auto& tok : choice["logprobs"]["content"]) {
        if (tok.is_object() && tok.contains("logprob") &&
            tok["logprob"].is_number()) {
          lps.push_back(tok["logprob"].get<double>());
        }
      }
      s.token_logprobs = std::move(lps);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ChatClient::ChatClient(ClientOptions options)
    : options_(std::move(options)), endpoint_(parse_endpoint(options_.endpoint)) {}

ChatClient::Attempt ChatClient::Post(const json& body) const {
  httplib::Client client(endpoint_.scheme_host_port);
  const auto timeout = static_cast<time_t>(options_.timeout.count());
  client.set_connection_timeout(timeout, 0);
  client.set_read_timeout(timeout, 0);
  client.set_write_timeout(timeout, 0);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  Attempt attempt;
  auto res = client.Post(endpoint_.completions_path(), headers, body.dump(),
                         "application/json");
  if (!res) {
    attempt.error = httplib::to_string(res.error());
    return attempt;
  }
  attempt.status = res->status;
  attempt.body = std::move(res->body);
  return attempt;
}

std::vector<RawSample> ChatClient::Request(const RenderedPrompt& prompt,
                                           std::string_view doc_id,
                                           const SamplingParams& params,
                                           std::span<const int> indices) {
  const json body =
      build_request_body(prompt, options_.model, params,
                         static_cast<int>(indices.size()), options_.request_logprobs);
  auto backoff = options_.initial_backoff;
  std::string reason;
  for (int attempt = 0;; ++attempt) {
    ++requests_;
    Attempt result = Post(body);
    if (result.status == 401 || result.status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " +
                      std::to_string(result.status) + ")");
    }
    if (result.status == 200) {
      const json parsed = json::parse(result.body, nullptr, false);
      if (parsed.is_discarded()) {
        reason = "bad_response";
        break;
      }
      auto samples = parse_completion_response(parsed, doc_id, prompt.prompt_hash, indices);
      for (const auto& s : samples) {
        if (s.failed()) ++failed_samples_;
      }
      return samples;
    }
    reason = result.status == 0 ? "connection" : "http_" + std::to_string(result.status);
    if (!IsTransient(result.status) || attempt >= options_.max_retries) break;
    ++retries_;
    spdlog::warn("doc {}: {} ({}), retry {}/{} in {} ms", doc_id, reason,
                 result.error, attempt + 1, options_.max_retries, backoff.count());
    std::this_thread::sleep_for(backoff);
    backoff = std::min(backoff * 2, options_.max_backoff);
  }
  spdlog::error("doc {}: giving up on {} sample(s): {}", doc_id, indices.size(), reason);
  std::vector<RawSample> out;
  for (int index : indices) out.push_back(FailedSample(doc_id, prompt.prompt_hash, index, reason));
  failed_samples_ += out.size();
  return out;
}

std::vector<RawSample> ChatClient::sample_completions(const RenderedPrompt& prompt,
                                                      std::string_view doc_id,
                                                      const SamplingParams& params) {
  std::vector<int> indices(static_cast<std::size_t>(std::max(params.n, 0)));
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
  return sample_completions(prompt, doc_id, params, indices);
}

std::vector<RawSample> ChatClient::sample_completions(const RenderedPrompt& prompt,
                                                      std::string_view doc_id,
                                                      const SamplingParams& params,
                                                      std::span<const int> indices) {
  if (indices.empty()) return {};
  if (options_.mode == RequestMode::kBatched) {
    return Request(prompt, doc_id, params, indices);
  }
  std::vector<RawSample> out;
  out.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto one = Request(prompt, doc_id, params, indices.subspan(i, 1));
    out.push_back(std::move(one.front()));
  }
  return out;
}

ClientCounters ChatClient::counters() const {
  return ClientCounters{requests_.load(), retries_.load(), failed_samples_.load()};
}

}  // namespace kpagg

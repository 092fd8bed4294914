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

#include "kpagg/mock_server.h"

#include <cctype>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "httplib.h"
#include "kpagg/errors.h"
#include "spdlog/spdlog.h"

namespace kpagg {
namespace {

using nlohmann::json;

constexpr std::size_t kSynthBit = std::size_t{1} << (sizeof(std::size_t) * 8 - 1);

// Words used for synthesized absent keyphrases.
constexpr std::string_view kInventedWords[] = {
    "framework", "optimization", "retrieval", "inference", "protocol",
    "simulation", "benchmark",  "ontology",  "topology",  "scheduling",
};

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string MessageContent(const json& request, std::string_view role) {
  if (!request.contains("messages") || !request["messages"].is_array()) return {};
  std::string out;
  for (const auto& m : request["messages"]) {
    if (m.value("role", "") == role && m.contains("content") && m["content"].is_string()) {
      out = m["content"].get<std::string>();
    }
  }
  return out;
}

std::vector<std::string> Words(std::string_view text) {
  const auto pos = text.find("Title:");
  if (pos != std::string_view::npos) text.remove_prefix(pos + 6);
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      if (cur.size() > 2 && cur != "abstract" && cur != "title") words.push_back(cur);
      cur.clear();
    }
  }
  if (cur.size() > 2) words.push_back(cur);
  return words;
}

// One synthetic completion: a bracketed list of quoted phrases.
json SynthesizeChoice(std::string_view user, std::uint64_t seed, std::size_t index) {
  std::mt19937_64 rng(seed ^ Fnv1a(user) ^ ((index + 1) * 0x9E3779B97F4A7C15ULL));
  const auto words = Words(user);
  const std::size_t count = 3 + rng() % 5;
  std::string content = "[";
  std::vector<double> logprobs;
  for (std::size_t i = 0; i < count; ++i) {
    std::string phrase;
    if (words.empty() || rng() % 4 == 0) {
      phrase = std::string(kInventedWords[rng() % std::size(kInventedWords)]) + " " +
               std::string(kInventedWords[rng() % std::size(kInventedWords)]);
    } else {
      const std::size_t len = 1 + rng() % 2;
      const std::size_t start = rng() % words.size();
      for (std::size_t k = start; k < std::min(words.size(), start + len); ++k) {
        if (!phrase.empty()) phrase += ' ';
        phrase += words[k];
      }
    }
    if (i > 0) content += ", ";
    content += "\"" + phrase + "\"";
    for (int t = 0; t < 3; ++t) {
      logprobs.push_back(-0.01 - static_cast<double>(rng() % 1000) / 1000.0);
    }
  }
  content += "]";
  return {{"content", content}, {"logprobs", logprobs}, {"finish_reason", "stop"}};
}

json WireChoice(const json& canned, std::size_t index, bool prefilled, bool want_logprobs) {
  std::string content = canned.value("content", "");
  // With a "[" prefill the model continues after the bracket.
  if (prefilled && content.starts_with("[")) content.erase(0, 1);
  json choice = {{"index", index},
                 {"message", {{"role", "assistant"}, {"content", content}}},
                 {"finish_reason", canned.value("finish_reason", "stop")}};
  if (want_logprobs && canned.contains("logprobs") && canned["logprobs"].is_array()) {
    json tokens = json::array();
    for (const auto& lp : canned["logprobs"]) {
      tokens.push_back({{"token", ""}, {"logprob", lp}});
    }
    choice["logprobs"] = {{"content", std::move(tokens)}};
  } else {
    choice["logprobs"] = nullptr;
  }
  return choice;
}

}  // namespace

MockChatServer::MockChatServer(json fixture, std::uint64_t seed)
    : fixture_(std::move(fixture)), seed_(seed) {
  if (!fixture_.is_object()) throw ConfigError("mock fixture must be a JSON object");
}

MockChatServer::~MockChatServer() { stop(); }

json MockChatServer::respond(const json& request) {
  const std::string user = MessageContent(request, "user");
  const bool prefilled = MessageContent(request, "assistant") == "[";
  const bool want_logprobs = request.value("logprobs", false);
  const std::size_t n = std::max<std::int64_t>(1, request.value("n", std::int64_t{1}));

  const json* entry = nullptr;
  std::size_t entry_index = 0;
  if (fixture_.contains("entries") && fixture_["entries"].is_array()) {
    const auto& entries = fixture_["entries"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string match = entries[i].value("match", "");
      if (!match.empty() && user.find(match) != std::string::npos) {
        entry = &entries[i];
        entry_index = i;
        break;
      }
    }
  }

  std::size_t first = 0;
  if (n == 1) {
    // Successive single-choice requests walk through the choices.
    const std::size_t key = entry ? entry_index : (Fnv1a(user) | kSynthBit);
    std::lock_guard lock(mu_);
    first = cursor_[key]++;
  }

  json choices = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t which = first + i;
    json canned;
    if (entry != nullptr && entry->contains("choices") && !(*entry)["choices"].empty()) {
      const auto& list = (*entry)["choices"];
      canned = list[which % list.size()];
    } else {
      canned = SynthesizeChoice(user, seed_, which);
    }
    choices.push_back(WireChoice(canned, i, prefilled, want_logprobs));
  }
  return {{"id", "mock-" + std::to_string(requests_.load())},
          {"object", "chat.completion"},
          {"model", request.value("model", "mock")},
          {"choices", std::move(choices)}};
}

int MockChatServer::start(int port) {
  if (server_) return port_;
  server_ = std::make_unique<httplib::Server>();
  server_->Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    const std::size_t nth = requests_++;
    if (fixture_.contains("require_api_key")) {
      const std::string want = "Bearer " + fixture_["require_api_key"].get<std::string>();
      if (req.get_header_value("Authorization") != want) {
        res.status = 401;
        res.set_content(R"({"error":{"message":"invalid api key"}})", "application/json");
        return;
      }
    }
    if (nth < fixture_.value("fail_first", std::size_t{0})) {
      res.status = fixture_.value("fail_status", 429);
      res.set_content(R"({"error":{"message":"injected failure"}})", "application/json");
      return;
    }
    const json request = json::parse(req.body, nullptr, false);
    if (request.is_discarded() || !request.is_object()) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"bad json"}})", "application/json");
      return;
    }
    res.set_content(respond(request).dump(), "application/json");
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else {
    port_ = server_->bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (port_ <= 0) {
    server_.reset();
    throw Error("mock server could not bind 127.0.0.1:" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  spdlog::debug("mock server listening on {}", url());
  return port_;
}

void MockChatServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

void MockChatServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string MockChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
}

}  // namespace kpagg

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

// Fixture-driven chat-completions server for offline tests.
//
// Fixture JSON:
//   {
//     "require_api_key": "secret",   // optional; otherwise 401
//     "fail_first": 2,               // optional; first N requests fail
//     "fail_status": 429,            // status used for those failures
//     "entries": [
//       {"match": "substring of the user turn",
//        "choices": [{"content": "...", "logprobs": [-0.1, ...],
//                     "finish_reason": "stop"}, ...]}
//     ]
//   }
// A request is answered from the first entry whose `match` occurs in the user
// turn. Batched requests get choices[0..n-1] (cycling); "n": 1 requests walk
// through the choices one per request. Unmatched requests get phrases drawn
// deterministically from the user turn, seeded by `seed`.

#ifndef KPAGG_MOCK_SERVER_H_
#define KPAGG_MOCK_SERVER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "json.hpp"

namespace httplib {
class Server;
}

namespace kpagg {

class MockChatServer {
 public:
  explicit MockChatServer(nlohmann::json fixture = nlohmann::json::object(),
                          std::uint64_t seed = 0);
  ~MockChatServer();

  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  // Binds 127.0.0.1 (port 0 picks a free one) and serves on a background
  // thread. Returns the bound port. Throws Error when binding fails.
  int start(int port = 0);
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

  // Base URL including the "/v1" prefix.
  std::string url() const;
  int port() const { return port_; }
  std::size_t requests() const { return requests_.load(); }

  // Builds a completion body for a parsed request. Exposed for tests.
  nlohmann::json respond(const nlohmann::json& request);

 private:
  nlohmann::json fixture_;
  std::uint64_t seed_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::mutex mu_;
  std::unordered_map<std::size_t, std::size_t> cursor_;  // entry -> next choice
};

}  // namespace kpagg

#endif  // KPAGG_MOCK_SERVER_H_

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

#include "kpagg/sample_cache.h"

#include <stdexcept>
#include <string>
#include <utility>

#include "kpagg/errors.h"
#include "spdlog/spdlog.h"

namespace kpagg {

SampleCache::SampleCache(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) {
    std::filesystem::create_directories(file_.parent_path());
  }
  {
    std::ifstream in(file_);
    std::string line;
    std::size_t line_no = 0;
    while (in && std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      try {
        if (j.is_discarded()) throw std::runtime_error("invalid JSON");
        RawSample s = raw_sample_from_json(j);
        CacheKey key{s.doc_id, s.prompt_hash, s.sample_index};
        entries_.insert_or_assign(std::move(key), std::move(s));
      } catch (const std::exception& e) {
        ++corrupt_lines_;
        spdlog::warn("{}:{}: skipping corrupt cache line ({})", file_.string(),
                     line_no, e.what());
      }
    }
  }
  writer_.open(file_, std::ios::app | std::ios::binary);
  if (!writer_) throw Error("cannot open cache file " + file_.string());
}

std::filesystem::path SampleCache::path_for(const std::filesystem::path& root,
                                            std::string_view corpus,
                                            std::string_view variant,
                                            std::string_view model) {
  std::string file(model.empty() ? "default" : model);
  for (char& c : file) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return root / std::string(corpus) / std::string(variant) / (file + ".jsonl");
}

std::optional<RawSample> SampleCache::get(const CacheKey& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SampleCache::put(const RawSample& sample) {
  const std::string line = to_json(sample).dump();
  std::lock_guard lock(mu_);
  writer_ << line << '\n';
  writer_.flush();
  entries_.insert_or_assign(
      CacheKey{sample.doc_id, sample.prompt_hash, sample.sample_index}, sample);
}

std::size_t SampleCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace kpagg

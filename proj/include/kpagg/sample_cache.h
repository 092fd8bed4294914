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

#ifndef KPAGG_SAMPLE_CACHE_H_
#define KPAGG_SAMPLE_CACHE_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "kpagg/sample.h"

namespace kpagg {

struct CacheKey {
  std::string doc_id;
  std::string prompt_hash;
  int sample_index = 0;

  auto operator<=>(const CacheKey&) const = default;
};

// Append-only JSON-lines store of RawSamples, one file per
// (corpus, variant, model). The whole file is indexed in memory on open;
// later entries for an existing key win. Thread-safe.
class SampleCache {
 public:
  // Creates parent directories as needed. Corrupt lines are skipped and
  // counted.
  explicit SampleCache(std::filesystem::path file);

  SampleCache(const SampleCache&) = delete;
  SampleCache& operator=(const SampleCache&) = delete;

  // <root>/<corpus>/<variant>/<model>.jsonl, with path separators in the
  // model name replaced by '_'.
  static std::filesystem::path path_for(const std::filesystem::path& root,
                                        std::string_view corpus,
                                        std::string_view variant,
                                        std::string_view model);

  std::optional<RawSample> get(const CacheKey& key) const;
  // Appends and flushes one line. Failed samples are accepted but callers
  // normally keep them out so a rerun retries them.
  void put(const RawSample& sample);

  std::size_t size() const;
  std::size_t corrupt_lines() const { return corrupt_lines_; }
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mu_;
  std::map<CacheKey, RawSample> entries_;
  std::ofstream writer_;
  std::size_t corrupt_lines_ = 0;
};

}  // namespace kpagg

#endif  // KPAGG_SAMPLE_CACHE_H_

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

#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

namespace kpagg {
namespace {

std::filesystem::path FreshDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("kpagg_cache_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

RawSample Sample(int index) {
  RawSample s;
  s.doc_id = "d1";
  s.prompt_hash = "h";
  s.sample_index = index;
  s.text = "[\"x\"]";
  s.token_logprobs = std::vector<double>{-0.25, -0.5};
  s.finish_reason = "stop";
  return s;
}

TEST(SampleCacheTest, PutThenGet) {
  const auto dir = FreshDir("put_get");
  SampleCache cache(dir / "c.jsonl");
  cache.put(Sample(0));
  EXPECT_EQ(cache.get({"d1", "h", 0}), Sample(0));
  EXPECT_FALSE(cache.get({"d1", "h", 1}).has_value());
  EXPECT_FALSE(cache.get({"d2", "h", 0}).has_value());
}

TEST(SampleCacheTest, PersistsAcrossInstances) {
  const auto dir = FreshDir("persist");
  {
    SampleCache cache(dir / "c.jsonl");
    cache.put(Sample(0));
    cache.put(Sample(1));
  }
  SampleCache reopened(dir / "c.jsonl");
  EXPECT_EQ(reopened.size(), 2u);
  EXPECT_EQ(reopened.get({"d1", "h", 1}), Sample(1));
}

TEST(SampleCacheTest, CorruptLinesAreSkipped) {
  const auto dir = FreshDir("corrupt");
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "c.jsonl");
    out << to_json(Sample(0)).dump() << "\n{truncated\n"
        << R"({"doc_id": "d1"})" << "\n" << to_json(Sample(2)).dump() << "\n";
  }
  SampleCache cache(dir / "c.jsonl");
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(cache.corrupt_lines(), 2u);
  EXPECT_TRUE(cache.get({"d1", "h", 2}).has_value());
}

TEST(SampleCacheTest, PathLayout) {
  EXPECT_EQ(SampleCache::path_for("cache", "inspec", "baseline", "meta/llama:8b"),
            std::filesystem::path("cache/inspec/baseline/meta_llama_8b.jsonl"));
}

}  // namespace
}  // namespace kpagg

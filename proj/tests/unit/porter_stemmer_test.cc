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

#include "kpagg/porter_stemmer.h"

#include <fstream>
#include <string>

#include <gtest/gtest.h>

namespace kpagg {
namespace {

TEST(PorterStemmerTest, ClassicExamples) {
  EXPECT_EQ(porter_stem("caresses"), "caress");
  EXPECT_EQ(porter_stem("ponies"), "poni");
  EXPECT_EQ(porter_stem("relational"), "relat");
  EXPECT_EQ(porter_stem("conditional"), "condit");
  EXPECT_EQ(porter_stem("generalization"), "gener");
  EXPECT_EQ(porter_stem("networks"), "network");
  EXPECT_EQ(porter_stem("coloring"), "color");
  EXPECT_EQ(porter_stem("based"), "base");
  EXPECT_EQ(porter_stem("hopefulness"), "hope");
  EXPECT_EQ(porter_stem("electriciti"), "electr");
}

TEST(PorterStemmerTest, ShortWordsUnchanged) {
  EXPECT_EQ(porter_stem(""), "");
  EXPECT_EQ(porter_stem("a"), "a");
  EXPECT_EQ(porter_stem("is"), "is");
  EXPECT_EQ(porter_stem("as"), "as");
}

TEST(PorterStemmerTest, ReferenceVocabulary) {
  std::ifstream voc(KPAGG_TEST_DATA_DIR "/porter/voc.txt");
  std::ifstream expected(KPAGG_TEST_DATA_DIR "/porter/output.txt");
  ASSERT_TRUE(voc && expected);
  std::string word;
  std::string stem;
  std::size_t total = 0;
  std::size_t agree = 0;
  while (std::getline(voc, word) && std::getline(expected, stem)) {
    if (word.empty()) continue;
    ++total;
    if (porter_stem(word) == stem) {
      ++agree;
    } else if (total - agree <= 10) {
      ADD_FAILURE() << word << " -> " << porter_stem(word) << ", expected " << stem;
    }
  }
  EXPECT_EQ(total, 23531u);
  EXPECT_EQ(agree, total);
}

TEST(PorterStemmerTest, SecondPassCanChangeAStem) {
  // One pass is the reference algorithm; it is not idempotent.
  EXPECT_EQ(porter_stem("agreed"), "agre");
  EXPECT_EQ(porter_stem("agre"), "agr");
  EXPECT_EQ(porter_stem("bayes"), "bay");
  EXPECT_EQ(porter_stem("bay"), "bai");
}

}  // namespace
}  // namespace kpagg

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

#ifndef KPAGG_PORTER_STEMMER_H_
#define KPAGG_PORTER_STEMMER_H_

#include <string>
#include <string_view>

namespace kpagg {

// Porter (1980) suffix-stripping stemmer, following Martin Porter's own
// reference C implementation (the one that produced the published
// voc.txt/output.txt pair). That version differs from the 1980 text in
// three places: step 2 maps "bli" -> "ble" instead of "abli" -> "able",
// step 2 adds "logi" -> "log", and words of length <= 2 are left alone.
//
// Input is expected to be lowercase ASCII letters. Other bytes are treated
// as consonants and never crash the stemmer.
std::string porter_stem(std::string_view word);

}  // namespace kpagg

#endif  // KPAGG_PORTER_STEMMER_H_

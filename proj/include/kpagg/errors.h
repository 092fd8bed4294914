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

#ifndef KPAGG_ERRORS_H_
#define KPAGG_ERRORS_H_

#include <stdexcept>

namespace kpagg {

// Base class for every fatal error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration (prompt strings, run config, grid file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Corpus file unreadable or contains no usable record.
class CorpusError : public Error {
 public:
  using Error::Error;
};

// The endpoint rejected our credentials (HTTP 401/403).
class AuthError : public Error {
 public:
  using Error::Error;
};

}  // namespace kpagg

#endif  // KPAGG_ERRORS_H_

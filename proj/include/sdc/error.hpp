// Copyright 2026 The sdcpipe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SDC_ERROR_HPP
#define SDC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sdc {

// Input text that could not be decoded: malformed CSV, JSON, or dates.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a pipeline contract (unknown column,
// schema finding, infeasible suppression, bad cell value).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdc

#endif  // SDC_ERROR_HPP

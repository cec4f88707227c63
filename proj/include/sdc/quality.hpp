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

#ifndef SDC_QUALITY_HPP
#define SDC_QUALITY_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/csv.hpp"

namespace sdc {

// Non-fatal data-quality observation recorded while transforming a dataset
// (out-of-range date cleared, unmatched FIPS lookup, negative computed age).
struct QualityFinding {
  std::string stage;
  std::string code;
  std::optional<std::size_t> row;
  std::string field;
  std::string detail;
};

class QualityLog {
 public:
  void add(std::string stage, std::string code,
           std::optional<std::size_t> row = std::nullopt,
           std::string field = {}, std::string detail = {}) {
    findings_.push_back({std::move(stage), std::move(code), row,
                         std::move(field), std::move(detail)});
  }

  const std::vector<QualityFinding>& findings() const { return findings_; }
  std::size_t size() const { return findings_.size(); }
  bool empty() const { return findings_.empty(); }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : findings_) {
      nlohmann::json item;
      item["stage"] = f.stage;
      item["code"] = f.code;
      if (f.row) item["row"] = *f.row;
      if (!f.field.empty()) item["field"] = f.field;
      if (!f.detail.empty()) item["detail"] = f.detail;
      arr.push_back(std::move(item));
    }
    return arr;
  }

  void write(const std::filesystem::path& path) const {
    write_text_file(path, to_json().dump(2) + "\n");
  }

 private:
  std::vector<QualityFinding> findings_;
};

}  // namespace sdc

#endif  // SDC_QUALITY_HPP

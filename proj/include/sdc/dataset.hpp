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

#ifndef SDC_DATASET_HPP
#define SDC_DATASET_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdc/csv.hpp"
#include "sdc/error.hpp"

namespace sdc {

// Sentinel written into a cell when its value is suppressed for privacy
// protection. Reserved: it may not appear in any declared value domain.
inline constexpr std::string_view kSuppressedValue = "NA";

inline bool is_suppressed(std::string_view value) {
  return value == kSuppressedValue;
}

// Rectangular table of string cells with named columns. Row order is part of
// the value: two datasets are equal only if rows appear in the same order.
// Storage is row-major in a single vector.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      auto [it, inserted] = index_.emplace(columns_[i], i);
      if (!inserted) {
        throw DataError("duplicate column name: " + columns_[i]);
      }
    }
  }

  std::size_t row_count() const {
    return columns_.empty() ? 0 : cells_.size() / columns_.size();
  }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  std::optional<std::size_t> find_column(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_column(std::string_view name) const {
    auto idx = find_column(name);
    if (!idx) throw DataError("column not found: " + std::string(name));
    return *idx;
  }

  const std::string& cell(std::size_t row, std::size_t col) const {
    return cells_[row * columns_.size() + col];
  }
  std::string& cell(std::size_t row, std::size_t col) {
    return cells_[row * columns_.size() + col];
  }
  const std::string& cell(std::size_t row, std::string_view name) const {
    return cell(row, require_column(name));
  }
  std::string& cell(std::size_t row, std::string_view name) {
    return cell(row, require_column(name));
  }

  std::span<const std::string> row(std::size_t r) const {
    return {cells_.data() + r * columns_.size(), columns_.size()};
  }

  void reserve_rows(std::size_t n) { cells_.reserve(n * columns_.size()); }

  void append_row(std::vector<std::string> row) {
    if (row.size() != columns_.size()) {
      throw DataError("row has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(columns_.size()));
    }
    for (auto& v : row) cells_.push_back(std::move(v));
  }

  // Appends a row copied cell-by-cell from a span.
  void append_row(std::span<const std::string> row) {
    if (row.size() != columns_.size()) {
      throw DataError("row has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(columns_.size()));
    }
    cells_.insert(cells_.end(), row.begin(), row.end());
  }

  // New dataset containing exactly the rows listed in `keep`, in that order.
  Dataset select_rows(std::span<const std::size_t> keep) const {
    Dataset out(columns_);
    out.reserve_rows(keep.size());
    for (std::size_t r : keep) out.append_row(row(r));
    return out;
  }

  // Column subset in the given order; row order unchanged.
  Dataset project(std::span<const std::string> names) const {
    std::vector<std::size_t> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(require_column(n));
    Dataset out(std::vector<std::string>(names.begin(), names.end()));
    out.cells_.reserve(row_count() * cols.size());
    for (std::size_t r = 0; r < row_count(); ++r) {
      for (std::size_t c : cols) out.cells_.push_back(cell(r, c));
    }
    return out;
  }

  void add_column(const std::string& name, std::string_view fill = "") {
    if (index_.count(name)) {
      throw DataError("duplicate column name: " + name);
    }
    const std::size_t old_cols = columns_.size();
    const std::size_t rows = row_count();
    std::vector<std::string> next;
    next.reserve((old_cols + 1) * rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < old_cols; ++c) {
        next.push_back(std::move(cells_[r * old_cols + c]));
      }
      next.emplace_back(fill);
    }
    cells_ = std::move(next);
    index_.emplace(name, columns_.size());
    columns_.push_back(name);
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.columns_ == b.columns_ && a.cells_ == b.cells_;
  }

 private:
  std::vector<std::string> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> cells_;
};

// Untyped CSV decode: header row becomes the column list. Schema-aware,
// typed reads live in ingest.hpp.
inline Dataset dataset_from_csv(std::string_view text,
                                std::string_view origin = "csv") {
  auto rows = csv::parse(text);
  if (rows.empty()) {
    throw ParseError(std::string(origin) + ": missing header row");
  }
  Dataset ds(std::move(rows.front()));
  ds.reserve_rows(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != ds.column_count()) {
      throw ParseError(std::string(origin) + ": row " + std::to_string(r) +
                       " has " + std::to_string(rows[r].size()) +
                       " fields, expected " +
                       std::to_string(ds.column_count()));
    }
    ds.append_row(std::move(rows[r]));
  }
  return ds;
}

inline std::string to_csv(const Dataset& ds) {
  std::string out;
  csv::append_row(out, ds.columns());
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    csv::append_row(out, ds.row(r));
  }
  return out;
}

}  // namespace sdc

#endif  // SDC_DATASET_HPP

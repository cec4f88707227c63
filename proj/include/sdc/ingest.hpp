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

#ifndef SDC_INGEST_HPP
#define SDC_INGEST_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/csv.hpp"
#include "sdc/dataset.hpp"
#include "sdc/date.hpp"
#include "sdc/error.hpp"
#include "sdc/schema.hpp"

namespace sdc {

// Sidecar manifest entry: maps an input file to the date it was first
// submitted and to the jurisdiction it reports for.
struct ManifestEntry {
  std::string file;
  std::optional<Date> submission_date;
  std::string source_label;
  std::string jurisdiction;
};

inline std::vector<ManifestEntry> load_manifest(
    const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) {
    throw ParseError("manifest " + path.string() + ": expected a JSON array");
  }
  std::vector<ManifestEntry> entries;
  for (const auto& ej : j) {
    detail::require_keys(
        ej, {"file", "submission_date", "source_label", "jurisdiction"},
        "manifest entry");
    ManifestEntry e;
    if (!ej.contains("file")) {
      throw ParseError("manifest entry missing 'file'");
    }
    e.file = ej.at("file").get<std::string>();
    if (ej.contains("submission_date") && !ej.at("submission_date").is_null()) {
      e.submission_date = detail::parse_date_or_throw(
          ej.at("submission_date").get<std::string>(),
          "manifest entry for " + e.file);
    }
    e.source_label = ej.value("source_label", std::string{});
    e.jurisdiction = ej.value("jurisdiction", std::string{});
    entries.push_back(std::move(e));
  }
  return entries;
}

struct RawSubmission {
  Dataset records;
  std::optional<Date> submission_date;
  std::string source_label;
  std::string jurisdiction;
};

inline bool is_missing_cell(std::string_view v) { return v.empty(); }

// Typed CSV decode against a schema: header columns must be declared fields
// (released or auxiliary), date cells must parse as YYYY-MM-DD, numeric cells
// as numbers. Empty cells and the NA sentinel pass through; re-coding is a
// later stage.
inline Dataset read_dataset_text(std::string_view text, const Schema& schema,
                                 const std::string& origin) {
  auto rows = csv::parse(text);
  if (rows.empty()) {
    throw ParseError(origin + ": missing header row");
  }
  const auto& header = rows.front();
  std::vector<const FieldSpec*> specs;
  specs.reserve(header.size());
  for (const auto& name : header) {
    const FieldSpec* f = schema.find_field(name);
    if (f == nullptr) {
      throw DataError(origin + ": column not in schema: '" + name + "'");
    }
    specs.push_back(f);
  }

  Dataset ds(header);
  ds.reserve_rows(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ParseError(origin + ": row " + std::to_string(r) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& v = row[c];
      if (v.empty() || is_suppressed(v)) continue;
      if (specs[c]->value_type == ValueType::kDate) {
        if (!parse_date(v)) {
          throw DataError(origin + ": row " + std::to_string(r) + " field '" +
                          specs[c]->name + "': invalid date '" + v + "'");
        }
      } else if (specs[c]->value_type == ValueType::kNumeric) {
        double d;
        if (!detail::parse_numeric(v, d)) {
          throw DataError(origin + ": row " + std::to_string(r) + " field '" +
                          specs[c]->name + "': invalid number '" + v + "'");
        }
      }
    }
    ds.append_row(std::move(row));
  }
  return ds;
}

inline Dataset read_dataset(const std::filesystem::path& path,
                            const Schema& schema) {
  return read_dataset_text(read_text_file(path), schema, path.string());
}

// Report-date fallback chain: the date the case was first submitted, else the
// report date entered on the form, else the date the case was first seen.
inline Date derive_report_date(std::optional<Date> first_submission,
                               std::optional<Date> form_report_date,
                               std::optional<Date> first_seen) {
  if (first_submission) return *first_submission;
  if (form_report_date) return *form_report_date;
  if (first_seen) return *first_seen;
  throw DataError("no derivable report date");
}

struct DedupResult {
  std::vector<std::size_t> survivors;  // ascending original row indices
  // Earliest known submission date across all occurrences of the survivor's
  // key; index-aligned with `survivors`.
  std::vector<std::optional<Date>> first_submission;
};

// One row per key value: the row with the latest submission date wins, ties
// broken by the later position in ingestion order. Rows whose key cells are
// all empty make no identity claim and are kept as-is.
inline DedupResult deduplicate_rows(
    const Dataset& ds, std::span<const std::string> key_fields,
    std::span<const std::optional<Date>> submission_dates) {
  if (!submission_dates.empty() && submission_dates.size() != ds.row_count()) {
    throw DataError("submission date list does not match row count");
  }
  std::vector<std::size_t> key_cols;
  for (const auto& k : key_fields) key_cols.push_back(ds.require_column(k));

  struct KeyState {
    std::size_t best_row = 0;
    std::optional<Date> best_date;
    std::optional<Date> first_submission;
  };
  std::unordered_map<std::string, KeyState> by_key;
  by_key.reserve(ds.row_count());
  std::vector<std::size_t> keyless;

  auto beats = [](const std::optional<Date>& a, std::size_t ia,
                  const std::optional<Date>& b, std::size_t ib) {
    const std::int64_t sa = a ? to_serial_days(*a)
                              : std::numeric_limits<std::int64_t>::min();
    const std::int64_t sb = b ? to_serial_days(*b)
                              : std::numeric_limits<std::int64_t>::min();
    if (sa != sb) return sa > sb;
    return ia > ib;
  };

  std::string key;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    key.clear();
    bool any = false;
    for (std::size_t c : key_cols) {
      const std::string& cell = ds.cell(r, c);
      // Length-prefixed so multi-field keys cannot collide.
      key += std::to_string(cell.size());
      key += ':';
      key += cell;
      any = any || !cell.empty();
    }
    if (key_cols.empty() || !any) {
      keyless.push_back(r);
      continue;
    }
    std::optional<Date> sub =
        submission_dates.empty() ? std::nullopt : submission_dates[r];
    auto [it, inserted] = by_key.try_emplace(key);
    KeyState& st = it->second;
    if (inserted) {
      st.best_row = r;
      st.best_date = sub;
      st.first_submission = sub;
    } else {
      if (beats(sub, r, st.best_date, st.best_row)) {
        st.best_row = r;
        st.best_date = sub;
      }
      if (sub && (!st.first_submission || *sub < *st.first_submission)) {
        st.first_submission = sub;
      }
    }
  }

  struct Pick {
    std::size_t row;
    std::optional<Date> first_submission;
  };
  std::vector<Pick> picks;
  picks.reserve(keyless.size() + by_key.size());
  for (std::size_t r : keyless) {
    std::optional<Date> sub =
        submission_dates.empty() ? std::nullopt : submission_dates[r];
    picks.push_back({r, sub});
  }
  for (const auto& [k, st] : by_key) {
    picks.push_back({st.best_row, st.first_submission});
  }
  std::sort(picks.begin(), picks.end(),
            [](const Pick& a, const Pick& b) { return a.row < b.row; });

  DedupResult out;
  out.survivors.reserve(picks.size());
  out.first_submission.reserve(picks.size());
  for (const auto& p : picks) {
    out.survivors.push_back(p.row);
    out.first_submission.push_back(p.first_submission);
  }
  return out;
}

inline Dataset deduplicate(
    const Dataset& ds, std::span<const std::string> key_fields,
    std::span<const std::optional<Date>> submission_dates) {
  return ds.select_rows(
      deduplicate_rows(ds, key_fields, submission_dates).survivors);
}

// Rows eligible for release: report date at or before release_date minus
// delay_days. Every row must carry a parseable date in `date_field`.
inline std::vector<std::size_t> release_window_rows(const Dataset& ds,
                                                    std::string_view date_field,
                                                    Date release_date,
                                                    int delay_days) {
  const std::size_t col = ds.require_column(date_field);
  const Date cutoff = add_days(release_date, -static_cast<std::int64_t>(delay_days));
  std::vector<std::size_t> keep;
  keep.reserve(ds.row_count());
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    const std::string& v = ds.cell(r, col);
    auto d = parse_date(v);
    if (!d) {
      throw DataError("row " + std::to_string(r) + ": missing " +
                      std::string(date_field) +
                      "; cannot apply release window");
    }
    if (*d <= cutoff) keep.push_back(r);
  }
  return keep;
}

inline Dataset apply_release_window(const Dataset& ds,
                                    std::string_view date_field,
                                    Date release_date, int delay_days) {
  return ds.select_rows(
      release_window_rows(ds, date_field, release_date, delay_days));
}

}  // namespace sdc

#endif  // SDC_INGEST_HPP

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

#ifndef SDC_REPORT_HPP
#define SDC_REPORT_HPP

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/csv.hpp"
#include "sdc/date.hpp"
#include "sdc/error.hpp"
#include "sdc/schema.hpp"
#include "sdc/suppress.hpp"
#include "sdc/verify.hpp"
#include "sdc/version.hpp"

namespace sdc {

struct SuppressionSummaryRow {
  std::string field;
  std::size_t suppressed = 0;
  double percent = 0.0;  // of total rows
};

struct SuppressionSummary {
  std::vector<SuppressionSummaryRow> rows;
  std::size_t total_rows = 0;
  std::size_t total_actions = 0;
};

inline std::string format_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", percent);
  return buf;
}

// Per-field suppression counts and percentages. `field_order` pins the row
// order; fields acted on but not listed are appended alphabetically so the
// summary always conserves the plan's total.
inline SuppressionSummary suppression_summary(
    const SuppressionPlan& plan, std::size_t row_count,
    std::span<const std::string> field_order) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& a : plan.actions) {
    if (row_count == 0 || a.row >= row_count) {
      throw DataError("plan action row " + std::to_string(a.row) +
                      " outside dataset of " + std::to_string(row_count) +
                      " rows");
    }
    ++counts[a.field];
  }

  SuppressionSummary summary;
  summary.total_rows = row_count;
  summary.total_actions = plan.actions.size();
  auto push_row = [&](const std::string& field, std::size_t count) {
    SuppressionSummaryRow row;
    row.field = field;
    row.suppressed = count;
    row.percent =
        row_count == 0 ? 0.0 : 100.0 * static_cast<double>(count) /
                                   static_cast<double>(row_count);
    summary.rows.push_back(std::move(row));
  };
  for (const auto& field : field_order) {
    auto it = counts.find(field);
    push_row(field, it == counts.end() ? 0 : it->second);
    if (it != counts.end()) counts.erase(it);
  }
  std::map<std::string, std::size_t> leftovers(counts.begin(), counts.end());
  for (const auto& [field, count] : leftovers) push_row(field, count);
  return summary;
}

// Summary row order used by pipeline outputs: quasi-identifiers in qi_order,
// then confidential fields.
inline std::vector<std::string> summary_field_order(const Schema& schema) {
  std::vector<std::string> order = schema.qi_order;
  for (const auto& name : schema.confidential_columns()) {
    order.push_back(name);
  }
  return order;
}

inline std::string summary_to_csv(const SuppressionSummary& summary) {
  std::string out = "field_name,values_suppressed,percent_suppressed\n";
  for (const auto& row : summary.rows) {
    std::vector<std::string> cells{row.field, std::to_string(row.suppressed),
                                   format_percent(row.percent)};
    csv::append_row(out, cells);
  }
  return out;
}

inline std::string summary_to_table(const SuppressionSummary& summary) {
  const std::string h1 = "Field Name";
  const std::string h2 = "Number of Values per Field Suppressed";
  const std::string h3 = "Percent of Values per Field Suppressed";
  std::size_t w1 = h1.size();
  for (const auto& row : summary.rows) w1 = std::max(w1, row.field.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %s  %s\n",
                static_cast<int>(w1), h1.c_str(), h2.c_str(), h3.c_str());
  out += line;
  for (const auto& row : summary.rows) {
    std::snprintf(line, sizeof(line), "%-*s  %*zu  %*s\n",
                  static_cast<int>(w1), row.field.c_str(),
                  static_cast<int>(h2.size()), row.suppressed,
                  static_cast<int>(h3.size()),
                  format_percent(row.percent).c_str());
    out += line;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linkage scan: overlap between our quasi-identifiers and the column names of
// externally published datasets. Metadata-level only.

struct CatalogEntry {
  std::string name;
  std::vector<std::string> columns;
  std::string url;
};

inline std::vector<CatalogEntry> load_catalog(
    const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("catalog " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) {
    throw ParseError("catalog " + path.string() + ": expected a JSON array");
  }
  std::vector<CatalogEntry> entries;
  for (const auto& ej : j) {
    detail::require_keys(ej, {"name", "columns", "url"}, "catalog entry");
    CatalogEntry e;
    e.name = ej.at("name").get<std::string>();
    e.columns = ej.at("columns").get<std::vector<std::string>>();
    if (e.columns.empty()) {
      throw DataError("catalog entry '" + e.name + "' lists no columns");
    }
    e.url = ej.value("url", std::string{});
    entries.push_back(std::move(e));
  }
  return entries;
}

// Maps external column spellings onto schema field names. Keys and values are
// compared after lowercasing and normalizing '_'/'-' to spaces.
class SynonymMap {
 public:
  static std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
      if (c == '_' || c == '-') {
        out.push_back(' ');
      } else {
        out.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(c))));
      }
    }
    return out;
  }

  static SynonymMap load(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("synonym map " + path.string() + ": " + e.what());
    }
    SynonymMap m;
    for (auto it = j.begin(); it != j.end(); ++it) {
      m.add(it.key(), it.value().get<std::string>());
    }
    return m;
  }

  void add(std::string_view external, std::string_view field) {
    map_[normalize(external)] = normalize(field);
  }

  // Canonical form of an external column name.
  std::string canonical(std::string_view external) const {
    const std::string n = normalize(external);
    auto it = map_.find(n);
    return it == map_.end() ? n : it->second;
  }

  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::string, std::string> map_;
};

struct LinkageEntry {
  std::string name;
  std::string url;
  std::vector<std::string> shared;  // schema QI names, ascending
  std::size_t overlap = 0;
  std::size_t rank = 0;
};

struct LinkageReport {
  std::vector<LinkageEntry> entries;  // descending overlap, ties by name

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
      arr.push_back({{"rank", e.rank},
                     {"name", e.name},
                     {"url", e.url},
                     {"overlap", e.overlap},
                     {"shared_quasi_identifiers", e.shared}});
    }
    return nlohmann::json{{"entries", std::move(arr)}};
  }
};

inline LinkageReport link_scan(const Schema& schema,
                               std::span<const CatalogEntry> catalog,
                               const SynonymMap& synonyms = {}) {
  std::map<std::string, std::string> qi_by_canonical;  // normalized -> name
  for (const auto& qi : schema.qi_order) {
    qi_by_canonical[SynonymMap::normalize(qi)] = qi;
  }

  LinkageReport report;
  for (const auto& entry : catalog) {
    LinkageEntry le;
    le.name = entry.name;
    le.url = entry.url;
    std::set<std::string> shared;
    for (const auto& col : entry.columns) {
      auto it = qi_by_canonical.find(synonyms.canonical(col));
      if (it != qi_by_canonical.end()) shared.insert(it->second);
    }
    le.shared.assign(shared.begin(), shared.end());
    le.overlap = le.shared.size();
    report.entries.push_back(std::move(le));
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const LinkageEntry& a, const LinkageEntry& b) {
              if (a.overlap != b.overlap) return a.overlap > b.overlap;
              return a.name < b.name;
            });
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    report.entries[i].rank = i + 1;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Release manifest

namespace detail {

inline std::string fnv1a64_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

struct ManifestInputs {
  const Schema* schema = nullptr;
  std::string schema_source;  // raw schema file text, fingerprinted
  Date release_date;
  Date processing_date;
  std::size_t rows_read = 0;
  std::size_t rows_after_dedup = 0;
  std::size_t rows_after_window = 0;
  std::size_t rows_released = 0;
  const SuppressionSummary* summary = nullptr;
  const PrivacyReport* report = nullptr;
  bool infeasible_release = false;
  std::size_t quality_findings = 0;
};

inline nlohmann::json build_release_manifest(const ManifestInputs& in) {
  const Schema& schema = *in.schema;
  nlohmann::json j;
  j["tool"] = {{"name", std::string(kToolName)},
               {"version", std::string(kToolVersion)}};
  j["schema"] = {
      {"name", schema.name},
      {"fingerprint_fnv1a64", detail::fnv1a64_hex(in.schema_source)}};
  j["thresholds"] = {{"k", schema.thresholds.k}, {"l", schema.thresholds.l}};
  j["release"] = {{"release_date", to_string(in.release_date)},
                  {"processing_date", to_string(in.processing_date)},
                  {"delay_days", schema.release_delay_days},
                  {"window_field", schema.window_field}};
  j["rows"] = {{"read", in.rows_read},
               {"after_dedup", in.rows_after_dedup},
               {"after_window", in.rows_after_window},
               {"released", in.rows_released}};
  nlohmann::json per_field = nlohmann::json::array();
  if (in.summary) {
    for (const auto& row : in.summary->rows) {
      per_field.push_back({{"field", row.field},
                           {"suppressed", row.suppressed},
                           {"percent", format_percent(row.percent)}});
    }
  }
  j["suppression"] = {
      {"total_actions", in.summary ? in.summary->total_actions : 0},
      {"per_field", std::move(per_field)},
      {"infeasible_release", in.infeasible_release}};
  if (in.report) {
    j["verification"] = {
        {"verdict", in.report->pass() ? "pass" : "fail"},
        {"k_anonymity", in.report->k_violations.empty() ? "pass" : "fail"},
        {"k_min_frequency", in.report->k_min_frequency},
        {"l_diversity", in.report->l_violations.empty() ? "pass" : "fail"},
        {"pii_scan", in.report->pii_findings.empty() ? "pass" : "fail"}};
  }
  j["quality_findings"] = in.quality_findings;
  return j;
}

}  // namespace sdc

#endif  // SDC_REPORT_HPP

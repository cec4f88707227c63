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

#ifndef SDC_RECODE_HPP
#define SDC_RECODE_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sdc/csv.hpp"
#include "sdc/dataset.hpp"
#include "sdc/date.hpp"
#include "sdc/error.hpp"
#include "sdc/quality.hpp"
#include "sdc/schema.hpp"

namespace sdc {

namespace detail {

inline std::string to_upper(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::toupper(
      static_cast<unsigned char>(c))));
  return out;
}

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool in_ws = true;  // trims leading whitespace
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_ws = true;
    } else {
      if (in_ws && !out.empty()) out.push_back(' ');
      out.push_back(c);
      in_ws = false;
    }
  }
  return out;
}

inline bool strip_suffix(std::string& s, std::string_view suffix) {
  if (s.size() > suffix.size() &&
      s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    s.resize(s.size() - suffix.size());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return true;
  }
  return false;
}

}  // namespace detail

// County-name keyed FIPS reference. Matching is case-insensitive with
// whitespace collapsed; a trailing "County"/"Parish"/"Borough" designator on
// the lookup side is ignored.
class FipsTable {
 public:
  static std::string normalize_state(std::string_view s) {
    return detail::to_upper(detail::collapse_whitespace(s));
  }

  static std::string normalize_county(std::string_view s) {
    std::string c = detail::to_upper(detail::collapse_whitespace(s));
    detail::strip_suffix(c, "COUNTY") || detail::strip_suffix(c, "PARISH") ||
        detail::strip_suffix(c, "BOROUGH");
    return c;
  }

  // CSV columns: state,county,fips (header required).
  static FipsTable load(const std::filesystem::path& path) {
    auto rows = csv::parse(read_text_file(path));
    if (rows.empty()) {
      throw ParseError("FIPS table " + path.string() + ": missing header");
    }
    const auto& header = rows.front();
    if (header.size() != 3 || header[0] != "state" || header[1] != "county" ||
        header[2] != "fips") {
      throw ParseError("FIPS table " + path.string() +
                       ": expected header state,county,fips");
    }
    FipsTable t;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != 3) {
        throw ParseError("FIPS table " + path.string() + ": row " +
                         std::to_string(r) + " malformed");
      }
      const std::string& code = rows[r][2];
      if (code.size() != 5 ||
          !std::all_of(code.begin(), code.end(), [](unsigned char c) {
            return std::isdigit(c);
          })) {
        throw ParseError("FIPS table " + path.string() + ": row " +
                         std::to_string(r) + ": bad code '" + code + "'");
      }
      t.codes_[normalize_state(rows[r][0]) + '\x1f' +
               normalize_county(rows[r][1])] = code;
    }
    return t;
  }

  std::optional<std::string> lookup(std::string_view state,
                                    std::string_view county) const {
    auto it =
        codes_.find(normalize_state(state) + '\x1f' + normalize_county(county));
    if (it == codes_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return codes_.size(); }

 private:
  std::unordered_map<std::string, std::string> codes_;
};

// Clears dates reported in the future or before the epidemic epoch.
inline std::optional<Date> check_date_logic(Date value, Date processing_date,
                                            Date epoch) {
  if (value > processing_date || value < epoch) return std::nullopt;
  return value;
}

// Age-group label from a reported age, falling back to the whole-year
// difference between date of birth and onset date. Negative computed ages are
// a data-quality problem and map to the unknown label.
inline std::string bin_age(std::optional<int> age_years,
                           std::optional<Date> date_of_birth,
                           std::optional<Date> onset_date, const AgeBins& bins,
                           QualityLog* log = nullptr,
                           std::optional<std::size_t> row = std::nullopt) {
  std::optional<int> age = age_years;
  if (!age && date_of_birth && onset_date) {
    age = whole_years_between(*date_of_birth, *onset_date);
  }
  if (!age) return bins.unknown_label;
  if (*age < 0) {
    if (log) {
      log->add("recode", "negative_age", row, "",
               "computed age " + std::to_string(*age));
    }
    return bins.unknown_label;
  }
  auto label = bins.label_for(*age);
  return label ? *label : bins.unknown_label;
}

namespace detail {

enum class EthnicityValue { kHispanic, kNonHispanic, kUnknown, kMissing };

inline EthnicityValue classify_ethnicity(std::string_view raw) {
  const std::string v = to_upper(collapse_whitespace(raw));
  if (v.empty() || v == "MISSING") return EthnicityValue::kMissing;
  if (v == "HISPANIC/LATINO" || v == "HISPANIC OR LATINO" || v == "HISPANIC") {
    return EthnicityValue::kHispanic;
  }
  if (v == "NON-HISPANIC" || v == "NON HISPANIC" || v == "NOT HISPANIC" ||
      v == "NOT HISPANIC OR LATINO") {
    return EthnicityValue::kNonHispanic;
  }
  if (v == "UNKNOWN") return EthnicityValue::kUnknown;
  throw DataError("ethnicity value outside declared domain: '" +
                  std::string(raw) + "'");
}

// Canonical single-race labels; "Other" folds into the multiple/other bucket.
inline std::optional<std::string> classify_race(std::string_view raw) {
  const std::string v = to_upper(collapse_whitespace(raw));
  if (v.empty() || v == "UNKNOWN" || v == "MISSING") return std::nullopt;
  if (v == "AMERICAN INDIAN/ALASKA NATIVE" ||
      v == "AMERICAN INDIAN OR ALASKA NATIVE") {
    return "American Indian/Alaska Native";
  }
  if (v == "ASIAN") return "Asian";
  if (v == "BLACK" || v == "BLACK OR AFRICAN AMERICAN") return "Black";
  if (v == "NATIVE HAWAIIAN/OTHER PACIFIC ISLANDER" ||
      v == "NATIVE HAWAIIAN OR OTHER PACIFIC ISLANDER") {
    return "Native Hawaiian/Other Pacific Islander";
  }
  if (v == "WHITE") return "White";
  if (v == "OTHER" || v == "MULTIPLE" || v == "MULTIPLE/OTHER") {
    return "Multiple/Other";
  }
  throw DataError("race value outside declared domain: '" + std::string(raw) +
                  "'");
}

}  // namespace detail

// Combined race/ethnicity category. Hispanic ethnicity dominates; more than
// one reported race folds into the multiple/other bucket.
inline std::string combine_race_ethnicity(std::span<const std::string> races,
                                          std::string_view ethnicity) {
  const auto eth = detail::classify_ethnicity(ethnicity);
  if (eth == detail::EthnicityValue::kHispanic) return "Hispanic/Latino";

  std::set<std::string> concrete;
  bool race_answered = false;
  for (const auto& r : races) {
    if (!detail::collapse_whitespace(r).empty()) race_answered = true;
    auto c = detail::classify_race(r);
    if (c) concrete.insert(*c);
  }
  if (concrete.size() >= 2) return "Multiple/Other, Non-Hispanic";
  if (concrete.size() == 1) return *concrete.begin() + ", Non-Hispanic";
  // No usable race. "Missing" only when nothing at all was answered.
  if (!race_answered && eth == detail::EthnicityValue::kMissing) {
    return "Missing";
  }
  return "Unknown";
}

// County FIPS code from state and county of residence; empty, missing-label,
// or suppressed inputs yield no code.
inline std::optional<std::string> derive_fips(std::string_view res_state,
                                              std::string_view res_county,
                                              const FipsTable& table) {
  auto usable = [](std::string_view v) {
    return !v.empty() && !is_suppressed(v) && v != "Missing" && v != "Unknown";
  };
  if (!usable(res_state) || !usable(res_county)) return std::nullopt;
  return table.lookup(res_state, res_county);
}

// Missing-value normalization: unanswered category cells take the field's
// missing label, jurisdiction-fill fields take the reporting jurisdiction,
// opted-out fields stay unchanged.
inline void recode_missing(Dataset& ds, const Schema& schema,
                           const std::vector<std::string>* jurisdiction_by_row =
                               nullptr,
                           QualityLog* log = nullptr) {
  for (const auto& f : schema.fields) {
    if (f.value_type != ValueType::kCategory) continue;
    auto col = ds.find_column(f.name);
    if (!col) continue;
    const RecodeKind kind =
        f.recode ? f.recode->kind : RecodeKind::kMissingNormalize;
    if (kind == RecodeKind::kNone || kind == RecodeKind::kFipsDerive) continue;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
      std::string& cell = ds.cell(r, *col);
      if (!cell.empty()) continue;
      if (kind == RecodeKind::kJurisdictionFill && jurisdiction_by_row &&
          r < jurisdiction_by_row->size() &&
          !(*jurisdiction_by_row)[r].empty()) {
        cell = (*jurisdiction_by_row)[r];
      } else {
        cell = f.missing_label;
        if (kind == RecodeKind::kJurisdictionFill && log) {
          log->add("recode", "jurisdiction_unknown", r, f.name);
        }
      }
    }
  }
}

struct RecodeContext {
  Date processing_date;
  const std::vector<std::string>* jurisdiction_by_row = nullptr;
  QualityLog* log = nullptr;
};

namespace detail {

inline std::optional<Date> read_date_cell(const Dataset& ds,
                                          std::optional<std::size_t> col,
                                          std::size_t row) {
  if (!col) return std::nullopt;
  const std::string& v = ds.cell(row, *col);
  if (v.empty() || is_suppressed(v)) return std::nullopt;
  return parse_date(v);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace detail

// Field re-coding stage: date logic checks, age binning, race/ethnicity
// combination, then missing-value normalization. FIPS derivation runs
// separately after suppression so that suppressed location fields propagate
// into the derived code.
inline void apply_recodes(Dataset& ds, const Schema& schema,
                          const RecodeContext& ctx) {
  // Date logic first: later derivations read onset and report dates.
  for (const auto* group : {&schema.fields, &schema.aux_fields}) {
    for (const auto& f : *group) {
      if (!f.recode || f.recode->kind != RecodeKind::kDateLogic) continue;
      if (f.value_type != ValueType::kDate) continue;
      auto col = ds.find_column(f.name);
      if (!col) continue;
      for (std::size_t r = 0; r < ds.row_count(); ++r) {
        std::string& cell = ds.cell(r, *col);
        if (cell.empty() || is_suppressed(cell)) continue;
        auto d = parse_date(cell);
        if (!d || !check_date_logic(*d, ctx.processing_date,
                                    schema.epidemic_epoch)) {
          if (ctx.log) {
            ctx.log->add("recode", "date_out_of_range", r, f.name, cell);
          }
          cell.clear();
        }
      }
    }
  }

  for (const auto& f : schema.fields) {
    if (!f.recode) continue;
    auto col = ds.find_column(f.name);
    if (!col) continue;

    if (f.recode->kind == RecodeKind::kAgeBin) {
      const auto age_col = ds.find_column(f.recode->age_source);
      const auto dob_col = ds.find_column(f.recode->date_of_birth_source);
      const auto onset_col = ds.find_column(f.recode->onset_source);
      for (std::size_t r = 0; r < ds.row_count(); ++r) {
        std::string& cell = ds.cell(r, *col);
        if (!cell.empty()) continue;  // already binned or given directly
        std::optional<int> age;
        if (age_col) {
          const std::string& v = ds.cell(r, *age_col);
          if (!v.empty() && !is_suppressed(v)) {
            double parsed;
            if (detail::parse_numeric(v, parsed)) {
              age = static_cast<int>(std::floor(parsed));
            }
          }
        }
        cell = bin_age(age, detail::read_date_cell(ds, dob_col, r),
                       detail::read_date_cell(ds, onset_col, r),
                       f.recode->bins, ctx.log, r);
      }
    }

    if (f.recode->kind == RecodeKind::kRaceEthnicityCombine) {
      const auto race_col = ds.find_column(f.recode->race_source);
      const auto eth_col = ds.find_column(f.recode->ethnicity_source);
      const char sep = f.recode->race_separator.empty()
                           ? ';'
                           : f.recode->race_separator.front();
      for (std::size_t r = 0; r < ds.row_count(); ++r) {
        std::string& cell = ds.cell(r, *col);
        if (!cell.empty()) continue;
        std::vector<std::string> races;
        if (race_col) {
          const std::string& raw = ds.cell(r, *race_col);
          if (!raw.empty() && !is_suppressed(raw)) {
            races = detail::split(raw, sep);
          }
        }
        const std::string ethnicity =
            eth_col ? ds.cell(r, *eth_col) : std::string{};
        try {
          cell = combine_race_ethnicity(races, ethnicity);
        } catch (const DataError& e) {
          throw DataError("row " + std::to_string(r) + ": " + e.what());
        }
      }
    }
  }

  recode_missing(ds, schema, ctx.jurisdiction_by_row, ctx.log);
}

// FIPS derivation for every field with a fips_derive rule. Runs after
// suppression: a suppressed state or county leaves no derivable code.
inline void apply_fips_derivation(
    Dataset& ds, const Schema& schema,
    const std::unordered_map<std::string, FipsTable>& tables,
    QualityLog* log = nullptr) {
  for (const auto& f : schema.fields) {
    if (!f.recode || f.recode->kind != RecodeKind::kFipsDerive) continue;
    auto col = ds.find_column(f.name);
    if (!col) continue;
    auto table_it = tables.find(f.recode->lookup_path);
    if (table_it == tables.end()) {
      throw DataError("FIPS table not loaded: " + f.recode->lookup_path);
    }
    const FipsTable& table = table_it->second;
    const auto state_col = ds.find_column(f.recode->state_source);
    const auto county_col = ds.find_column(f.recode->county_source);
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
      const std::string state =
          state_col ? ds.cell(r, *state_col) : std::string{};
      const std::string county =
          county_col ? ds.cell(r, *county_col) : std::string{};
      auto code = derive_fips(state, county, table);
      if (code) {
        ds.cell(r, *col) = *code;
      } else {
        auto usable = [](std::string_view v) {
          return !v.empty() && !is_suppressed(v) && v != "Missing" &&
                 v != "Unknown";
        };
        if (usable(state) && usable(county) && log) {
          log->add("recode", "fips_unmatched", r, f.name, state + "/" + county);
        }
        ds.cell(r, *col) = std::string(kSuppressedValue);
      }
    }
  }
}

}  // namespace sdc

#endif  // SDC_RECODE_HPP

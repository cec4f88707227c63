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

#ifndef SDC_VERIFY_HPP
#define SDC_VERIFY_HPP

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/dataset.hpp"
#include "sdc/error.hpp"
#include "sdc/schema.hpp"

namespace sdc {

// The checks here re-derive everything from the dataset with a sort-and-scan
// pass. They intentionally share no grouping code with the suppression
// engine, so a grouping bug cannot hide from its own verifier.

struct KViolation {
  std::vector<std::string> signature;
  std::size_t frequency;
};

struct KCheckResult {
  std::size_t min_frequency = 0;  // 0 on an empty dataset
  std::vector<KViolation> violations;

  bool pass() const { return violations.empty(); }
};

namespace verify_detail {

// Ascending row indices ordered by the given columns, lexicographically.
inline std::vector<std::size_t> sorted_row_order(
    const Dataset& ds, std::span<const std::size_t> cols) {
  std::vector<std::size_t> order(ds.row_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t c : cols) {
      const auto cmp = ds.cell(a, c).compare(ds.cell(b, c));
      if (cmp != 0) return cmp < 0;
    }
    return a < b;
  });
  return order;
}

inline bool same_signature(const Dataset& ds, std::size_t a, std::size_t b,
                           std::span<const std::size_t> cols) {
  for (std::size_t c : cols) {
    if (ds.cell(a, c) != ds.cell(b, c)) return false;
  }
  return true;
}

}  // namespace verify_detail

inline KCheckResult verify_k_anonymity(const Dataset& ds,
                                       std::span<const std::string> qi_order,
                                       int k) {
  std::vector<std::size_t> cols;
  cols.reserve(qi_order.size());
  for (const auto& n : qi_order) cols.push_back(ds.require_column(n));

  KCheckResult result;
  if (ds.row_count() == 0) return result;

  const auto order = verify_detail::sorted_row_order(ds, cols);
  std::size_t min_freq = ds.row_count();
  std::size_t run_start = 0;
  auto close_run = [&](std::size_t end) {  // [run_start, end)
    const std::size_t freq = end - run_start;
    min_freq = std::min(min_freq, freq);
    if (freq < static_cast<std::size_t>(k)) {
      KViolation v;
      v.frequency = freq;
      for (std::size_t c : cols) {
        v.signature.push_back(ds.cell(order[run_start], c));
      }
      result.violations.push_back(std::move(v));
    }
  };
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!verify_detail::same_signature(ds, order[run_start], order[i], cols)) {
      close_run(i);
      run_start = i;
    }
  }
  close_run(order.size());
  result.min_frequency = min_freq;
  return result;
}

struct LViolation {
  std::vector<std::string> signature;
  std::string field;
  std::size_t distinct;
};

struct LCheckResult {
  std::vector<LViolation> violations;
  bool pass() const { return violations.empty(); }
};

// A class passes when it exposes at least l distinct concrete confidential
// values, or discloses nothing (every member missing or suppressed).
inline LCheckResult verify_l_diversity(const Dataset& ds,
                                       std::span<const std::string> qi_order,
                                       std::string_view confidential_field,
                                       int l,
                                       std::string_view missing_label = "") {
  std::vector<std::size_t> cols;
  cols.reserve(qi_order.size());
  for (const auto& n : qi_order) cols.push_back(ds.require_column(n));
  const std::size_t conf_col = ds.require_column(confidential_field);

  LCheckResult result;
  if (ds.row_count() == 0) return result;

  const auto order = verify_detail::sorted_row_order(ds, cols);
  std::size_t run_start = 0;
  auto close_run = [&](std::size_t end) {
    std::set<std::string_view> distinct;
    for (std::size_t i = run_start; i < end; ++i) {
      const std::string& v = ds.cell(order[i], conf_col);
      if (v.empty() || is_suppressed(v)) continue;
      if (!missing_label.empty() && v == missing_label) continue;
      distinct.insert(v);
    }
    if (!distinct.empty() && distinct.size() < static_cast<std::size_t>(l)) {
      LViolation viol;
      viol.field = std::string(confidential_field);
      viol.distinct = distinct.size();
      for (std::size_t c : cols) {
        viol.signature.push_back(ds.cell(order[run_start], c));
      }
      result.violations.push_back(std::move(viol));
    }
  };
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!verify_detail::same_signature(ds, order[run_start], order[i], cols)) {
      close_run(i);
      run_start = i;
    }
  }
  close_run(order.size());
  return result;
}

struct PiiFinding {
  std::string field;
  std::size_t row;
  std::string issue;  // which check tripped; never echoes the cell value
};

struct PiiScanResult {
  std::vector<PiiFinding> findings;
  bool pass() const { return findings.empty(); }
};

namespace verify_detail {

inline bool has_long_digit_run(std::string_view v, std::size_t min_run) {
  std::size_t run = 0;
  for (char c : v) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (++run >= min_run) return true;
    } else if (c == '-' || c == ' ' || c == '(' || c == ')' || c == '.') {
      // separators commonly embedded in identifiers do not break the run
    } else {
      run = 0;
    }
  }
  return false;
}

inline std::size_t alpha_token_count(std::string_view v) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
    std::size_t start = i;
    bool all_alpha = true;
    while (i < v.size() && !std::isspace(static_cast<unsigned char>(v[i]))) {
      if (!std::isalpha(static_cast<unsigned char>(v[i]))) all_alpha = false;
      ++i;
    }
    if (i > start && all_alpha) ++count;
  }
  return count;
}

}  // namespace verify_detail

// Flags cell values that could carry personally identifiable free text:
// out-of-domain categories, malformed dates and numbers, overlong values,
// name-like token sequences, and identifier-like digit runs.
inline PiiScanResult scan_pii(const Dataset& ds, const Schema& schema) {
  struct ColumnCheck {
    const FieldSpec* spec;
    std::set<std::string_view> domain;
    std::optional<std::regex> pattern;
  };
  std::vector<ColumnCheck> checks;
  checks.reserve(ds.column_count());
  for (const auto& name : ds.columns()) {
    const FieldSpec* spec = schema.find_field(name);
    if (spec == nullptr) {
      throw DataError("column not in schema: '" + name + "'");
    }
    ColumnCheck cc;
    cc.spec = spec;
    for (const auto& v : spec->domain) cc.domain.insert(v);
    if (!spec->pattern.empty()) cc.pattern.emplace(spec->pattern);
    checks.push_back(std::move(cc));
  }

  const PiiScanConfig& cfg = schema.pii_scan;
  PiiScanResult result;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t c = 0; c < ds.column_count(); ++c) {
      const std::string& v = ds.cell(r, c);
      if (v.empty() || is_suppressed(v)) continue;
      const ColumnCheck& cc = checks[c];
      const FieldSpec& f = *cc.spec;
      auto flag = [&](std::string issue) {
        result.findings.push_back({f.name, r, std::move(issue)});
      };
      switch (f.value_type) {
        case ValueType::kCategory:
          if (f.open_domain) {
            if (cc.pattern && v != f.missing_label &&
                !std::regex_match(v, *cc.pattern)) {
              flag("pattern_mismatch");
            }
          } else if (!cc.domain.count(v) && v != f.missing_label) {
            flag("out_of_domain");
          }
          break;
        case ValueType::kDate:
          if (!parse_date(v)) flag("invalid_date");
          break;
        case ValueType::kNumeric: {
          double parsed;
          if (!detail::parse_numeric(v, parsed)) flag("invalid_numeric");
          break;
        }
      }
      if (v.size() > cfg.max_value_length) flag("overlong_value");
      if (verify_detail::alpha_token_count(v) >= cfg.max_alpha_tokens) {
        flag("free_text_tokens");
      }
      if (verify_detail::has_long_digit_run(v, cfg.min_digit_run)) {
        flag("identifier_digit_run");
      }
    }
  }
  return result;
}

// Combined verification verdict for one dataset against one schema.
struct PrivacyReport {
  std::size_t k_min_frequency = 0;
  std::vector<KViolation> k_violations;
  std::vector<LViolation> l_violations;
  std::vector<PiiFinding> pii_findings;

  bool pass() const {
    return k_violations.empty() && l_violations.empty() &&
           pii_findings.empty();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["verdict"] = pass() ? "pass" : "fail";
    j["k_anonymity"]["min_frequency"] = k_min_frequency;
    j["k_anonymity"]["violations"] = nlohmann::json::array();
    for (const auto& v : k_violations) {
      j["k_anonymity"]["violations"].push_back(
          {{"signature", v.signature}, {"frequency", v.frequency}});
    }
    j["l_diversity"]["violations"] = nlohmann::json::array();
    for (const auto& v : l_violations) {
      j["l_diversity"]["violations"].push_back({{"signature", v.signature},
                                                {"field", v.field},
                                                {"distinct", v.distinct}});
    }
    j["pii_scan"]["findings"] = nlohmann::json::array();
    for (const auto& f : pii_findings) {
      j["pii_scan"]["findings"].push_back(
          {{"field", f.field}, {"row", f.row}, {"issue", f.issue}});
    }
    return j;
  }
};

// Full re-verification of a (presumably released) dataset: k-anonymity over
// the schema's quasi-identifiers, l-diversity per confidential field, and the
// PII scan.
inline PrivacyReport verify_dataset(const Dataset& ds, const Schema& schema,
                                    int k, int l) {
  PrivacyReport report;
  auto k_result = verify_k_anonymity(ds, schema.qi_order, k);
  report.k_min_frequency = k_result.min_frequency;
  report.k_violations = std::move(k_result.violations);
  for (const auto& f : schema.fields) {
    if (f.field_class != FieldClass::kConfidentialAttribute) continue;
    if (!ds.find_column(f.name)) continue;
    auto l_result =
        verify_l_diversity(ds, schema.qi_order, f.name, l, f.missing_label);
    for (auto& v : l_result.violations) {
      report.l_violations.push_back(std::move(v));
    }
  }
  report.pii_findings = scan_pii(ds, schema).findings;
  return report;
}

inline PrivacyReport verify_dataset(const Dataset& ds, const Schema& schema) {
  return verify_dataset(ds, schema, schema.thresholds.k, schema.thresholds.l);
}

}  // namespace sdc

#endif  // SDC_VERIFY_HPP

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

#ifndef SDC_SCHEMA_HPP
#define SDC_SCHEMA_HPP

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/csv.hpp"
#include "sdc/dataset.hpp"
#include "sdc/date.hpp"
#include "sdc/error.hpp"

namespace sdc {

// Sensitivity classification assigned to every released field.
enum class FieldClass {
  kDirectIdentifier,        // never emitted to any output dataset
  kQuasiIdentifier,         // indirect identification risk; k-anonymity target
  kConfidentialAttribute,   // sensitive value; l-diversity target
  kNonConfidentialAttribute
};

enum class ValueType { kCategory, kDate, kNumeric };

enum class RecodeKind {
  kNone,
  kMissingNormalize,
  kAgeBin,
  kRaceEthnicityCombine,
  kDateLogic,
  kFipsDerive,
  kJurisdictionFill
};

struct AgeBin {
  std::string label;
  int min = 0;
  std::optional<int> max;  // absent on the top-coded final bin

  friend bool operator==(const AgeBin&, const AgeBin&) = default;
};

struct AgeBins {
  std::vector<AgeBin> bins;
  std::string unknown_label = "Unknown";

  std::optional<std::string> label_for(int years) const {
    for (const auto& b : bins) {
      if (years >= b.min && (!b.max || years <= *b.max)) return b.label;
    }
    return std::nullopt;
  }

  friend bool operator==(const AgeBins&, const AgeBins&) = default;
};

// Per-field transformation applied during the re-coding stage. Source names
// refer to other schema columns (usually input-only auxiliary ones).
struct RecodeRule {
  RecodeKind kind = RecodeKind::kMissingNormalize;

  // kAgeBin
  AgeBins bins;
  std::string age_source;
  std::string date_of_birth_source;
  std::string onset_source;

  // kRaceEthnicityCombine
  std::string race_source;
  std::string ethnicity_source;
  std::string race_separator = ";";

  // kFipsDerive
  std::string state_source;
  std::string county_source;
  std::string lookup_path;  // resolved against the schema file directory

  friend bool operator==(const RecodeRule&, const RecodeRule&) = default;
};

struct FieldSpec {
  std::string name;
  FieldClass field_class = FieldClass::kNonConfidentialAttribute;
  ValueType value_type = ValueType::kCategory;
  std::vector<std::string> domain;  // closed category fields only
  bool open_domain = false;         // free-vocabulary category field
  std::string pattern;              // optional regex valid open values match
  std::string missing_label = "Missing";
  std::optional<RecodeRule> recode;
  bool aux = false;  // input-only source column, never released

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

struct PrivacyThresholds {
  int k = 5;  // minimum equivalence-class size
  int l = 2;  // minimum distinct confidential values per class

  friend bool operator==(const PrivacyThresholds&,
                         const PrivacyThresholds&) = default;
};

struct PiiScanConfig {
  std::size_t max_value_length = 64;
  std::size_t max_alpha_tokens = 5;  // flag at this many word-like tokens
  std::size_t min_digit_run = 9;     // flag digit runs at least this long

  friend bool operator==(const PiiScanConfig&, const PiiScanConfig&) = default;
};

struct Schema {
  std::string name;
  std::string description;
  PrivacyThresholds thresholds;
  int release_delay_days = 0;
  Date epidemic_epoch{2019, 12, 1};
  std::string window_field;  // empty disables the release window stage
  std::vector<std::string> dedup_key;
  std::vector<std::string> qi_order;  // suppression tie-break order
  PiiScanConfig pii_scan;
  std::vector<FieldSpec> fields;      // released columns, in output order
  std::vector<FieldSpec> aux_fields;  // accepted on input, always dropped

  const FieldSpec* find_field(std::string_view n) const {
    for (const auto& f : fields) {
      if (f.name == n) return &f;
    }
    for (const auto& f : aux_fields) {
      if (f.name == n) return &f;
    }
    return nullptr;
  }

  // Column order of the released dataset: declared fields minus direct
  // identifiers, auxiliary fields excluded.
  std::vector<std::string> release_columns() const {
    std::vector<std::string> out;
    for (const auto& f : fields) {
      if (f.field_class != FieldClass::kDirectIdentifier) out.push_back(f.name);
    }
    return out;
  }

  std::vector<std::string> confidential_columns() const {
    std::vector<std::string> out;
    for (const auto& f : fields) {
      if (f.field_class == FieldClass::kConfidentialAttribute) {
        out.push_back(f.name);
      }
    }
    return out;
  }

  // Canonical input layout: released fields followed by auxiliary fields.
  std::vector<std::string> input_columns() const {
    std::vector<std::string> out;
    for (const auto& f : fields) out.push_back(f.name);
    for (const auto& f : aux_fields) out.push_back(f.name);
    return out;
  }

  friend bool operator==(const Schema&, const Schema&) = default;
};

struct ValidationFinding {
  std::string code;
  std::string message;
  std::string field;  // empty for schema-level findings
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const { return findings.empty(); }
};

// ---------------------------------------------------------------------------
// Enum <-> string names used by the schema file format.

inline std::string_view to_string(FieldClass c) {
  switch (c) {
    case FieldClass::kDirectIdentifier: return "direct_identifier";
    case FieldClass::kQuasiIdentifier: return "quasi_identifier";
    case FieldClass::kConfidentialAttribute: return "confidential";
    case FieldClass::kNonConfidentialAttribute: return "non_confidential";
  }
  return "unknown";
}

inline FieldClass field_class_from_string(std::string_view s) {
  if (s == "direct_identifier") return FieldClass::kDirectIdentifier;
  if (s == "quasi_identifier") return FieldClass::kQuasiIdentifier;
  if (s == "confidential") return FieldClass::kConfidentialAttribute;
  if (s == "non_confidential") return FieldClass::kNonConfidentialAttribute;
  throw ParseError("unknown field class: " + std::string(s));
}

inline std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::kCategory: return "category";
    case ValueType::kDate: return "date";
    case ValueType::kNumeric: return "numeric";
  }
  return "unknown";
}

inline ValueType value_type_from_string(std::string_view s) {
  if (s == "category") return ValueType::kCategory;
  if (s == "date") return ValueType::kDate;
  if (s == "numeric") return ValueType::kNumeric;
  throw ParseError("unknown value type: " + std::string(s));
}

inline std::string_view to_string(RecodeKind k) {
  switch (k) {
    case RecodeKind::kNone: return "none";
    case RecodeKind::kMissingNormalize: return "missing_normalize";
    case RecodeKind::kAgeBin: return "age_bin";
    case RecodeKind::kRaceEthnicityCombine: return "race_ethnicity_combine";
    case RecodeKind::kDateLogic: return "date_logic";
    case RecodeKind::kFipsDerive: return "fips_derive";
    case RecodeKind::kJurisdictionFill: return "jurisdiction_fill";
  }
  return "unknown";
}

inline RecodeKind recode_kind_from_string(std::string_view s) {
  if (s == "none") return RecodeKind::kNone;
  if (s == "missing_normalize") return RecodeKind::kMissingNormalize;
  if (s == "age_bin") return RecodeKind::kAgeBin;
  if (s == "race_ethnicity_combine") return RecodeKind::kRaceEthnicityCombine;
  if (s == "date_logic") return RecodeKind::kDateLogic;
  if (s == "fips_derive") return RecodeKind::kFipsDerive;
  if (s == "jurisdiction_fill") return RecodeKind::kJurisdictionFill;
  throw ParseError("unknown recode kind: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline bool parse_numeric(std::string_view s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && ptr == e;
}

inline void require_keys(const nlohmann::json& obj,
                         const std::set<std::string>& allowed,
                         const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError(context + ": unknown key '" + it.key() + "'");
    }
  }
}

inline Date parse_date_or_throw(const std::string& s,
                                const std::string& context) {
  auto d = parse_date(s);
  if (!d) throw ParseError(context + ": invalid date '" + s + "'");
  return *d;
}

}  // namespace detail

inline ValidationReport validate_schema(const Schema& schema) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message,
                 std::string field = {}) {
    report.findings.push_back(
        {std::move(code), std::move(message), std::move(field)});
  };

  if (schema.thresholds.k < 2) {
    add("k_below_minimum", "k below minimum 2 (k=" +
                               std::to_string(schema.thresholds.k) + ")");
  }
  if (schema.thresholds.l < 1) {
    add("l_below_minimum", "l below minimum 1 (l=" +
                               std::to_string(schema.thresholds.l) + ")");
  }
  if (schema.thresholds.l > schema.thresholds.k) {
    add("l_exceeds_k",
        "l=" + std::to_string(schema.thresholds.l) +
            " exceeds k=" + std::to_string(schema.thresholds.k) +
            "; a class of size k cannot hold more than k distinct values");
  }
  if (schema.release_delay_days < 0) {
    add("negative_delay", "release_delay_days must be non-negative");
  }

  std::set<std::string> seen;
  auto check_field = [&](const FieldSpec& f) {
    if (!seen.insert(f.name).second) {
      add("duplicate_field", "duplicate field name", f.name);
    }
    if (f.value_type == ValueType::kCategory) {
      if (!f.open_domain && f.domain.empty()) {
        add("empty_domain", "category field declares no domain", f.name);
      }
      for (const auto& v : f.domain) {
        if (is_suppressed(v)) {
          add("reserved_sentinel_in_domain",
              "reserved sentinel in domain: 'NA' is the suppression marker",
              f.name);
        }
      }
      if (is_suppressed(f.missing_label)) {
        add("reserved_sentinel_as_missing_label",
            "missing label may not be the reserved sentinel 'NA'", f.name);
      }
      if (!f.open_domain && !f.domain.empty() && !f.aux &&
          std::find(f.domain.begin(), f.domain.end(), f.missing_label) ==
              f.domain.end()) {
        add("missing_label_not_in_domain",
            "missing label '" + f.missing_label + "' not in declared domain",
            f.name);
      }
      if (!f.pattern.empty()) {
        try {
          std::regex re(f.pattern);
        } catch (const std::regex_error&) {
          add("invalid_pattern", "pattern is not a valid regex", f.name);
        }
      }
    }
    if (f.recode && f.recode->kind == RecodeKind::kAgeBin) {
      const auto& bins = f.recode->bins.bins;
      if (bins.empty()) {
        add("age_bins_empty", "age_bin rule declares no bins", f.name);
      } else {
        if (bins.front().min != 0) {
          add("age_bins_gap", "age bins must start at 0", f.name);
        }
        for (std::size_t i = 0; i + 1 < bins.size(); ++i) {
          if (!bins[i].max) {
            add("age_bins_unbounded_interior",
                "only the final age bin may be open-ended", f.name);
            break;
          }
          if (bins[i + 1].min != *bins[i].max + 1) {
            add("age_bins_gap",
                "age bins must be contiguous and non-overlapping", f.name);
            break;
          }
        }
        if (bins.back().max) {
          add("age_bins_bounded_top", "final age bin must be open-ended",
              f.name);
        }
      }
    }
    if (f.recode) {
      auto check_source = [&](const std::string& src, const char* what) {
        if (!src.empty() && schema.find_field(src) == nullptr) {
          add("unknown_recode_source",
              std::string(what) + " source '" + src + "' is not a schema field",
              f.name);
        }
      };
      check_source(f.recode->age_source, "age");
      check_source(f.recode->date_of_birth_source, "date_of_birth");
      check_source(f.recode->onset_source, "onset");
      check_source(f.recode->race_source, "race");
      check_source(f.recode->ethnicity_source, "ethnicity");
      check_source(f.recode->state_source, "state");
      check_source(f.recode->county_source, "county");
    }
  };
  for (const auto& f : schema.fields) check_field(f);
  for (const auto& f : schema.aux_fields) check_field(f);

  // qi_order must be exactly the quasi-identifier fields, no duplicates.
  std::set<std::string> declared_qi;
  for (const auto& f : schema.fields) {
    if (f.field_class == FieldClass::kQuasiIdentifier) {
      declared_qi.insert(f.name);
    }
  }
  if (declared_qi.empty()) {
    add("no_quasi_identifiers", "schema declares no quasi-identifier fields");
  }
  std::set<std::string> order_set;
  for (const auto& n : schema.qi_order) {
    if (!order_set.insert(n).second) {
      add("qi_order_duplicate", "qi_order lists field twice", n);
    }
    if (!declared_qi.count(n)) {
      add("qi_order_mismatch",
          "qi_order entry is not a declared quasi-identifier", n);
    }
  }
  for (const auto& n : declared_qi) {
    if (!order_set.count(n)) {
      add("qi_order_mismatch", "quasi-identifier missing from qi_order", n);
    }
  }

  for (const auto& n : schema.dedup_key) {
    if (schema.find_field(n) == nullptr) {
      add("dedup_key_unknown_field", "dedup_key names unknown field", n);
    }
  }
  if (!schema.window_field.empty()) {
    const FieldSpec* f = schema.find_field(schema.window_field);
    if (f == nullptr) {
      add("window_field_unknown", "window_field names unknown field",
          schema.window_field);
    } else if (f->value_type != ValueType::kDate) {
      add("window_field_not_date", "window_field must be a date field",
          schema.window_field);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Schema file format (JSON)

inline FieldSpec field_spec_from_json(const nlohmann::json& j, bool aux,
                                      const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("field entry must be an object");
  const std::string context =
      "field '" + j.value("name", std::string("<unnamed>")) + "'";
  if (aux) {
    detail::require_keys(
        j, {"name", "type", "domain", "open", "pattern", "missing_label"},
        context);
  } else {
    detail::require_keys(j,
                         {"name", "class", "type", "domain", "open", "pattern",
                          "missing_label", "recode"},
                         context);
  }

  FieldSpec f;
  f.aux = aux;
  if (!j.contains("name")) throw ParseError("field entry missing 'name'");
  f.name = j.at("name").get<std::string>();
  if (!aux) {
    if (!j.contains("class")) throw ParseError(context + ": missing 'class'");
    f.field_class = field_class_from_string(j.at("class").get<std::string>());
  }
  if (!j.contains("type")) throw ParseError(context + ": missing 'type'");
  f.value_type = value_type_from_string(j.at("type").get<std::string>());
  if (j.contains("domain")) {
    f.domain = j.at("domain").get<std::vector<std::string>>();
  }
  f.open_domain = j.value("open", false);
  f.pattern = j.value("pattern", std::string{});
  f.missing_label = j.value("missing_label", std::string("Missing"));

  if (j.contains("recode")) {
    const auto& r = j.at("recode");
    detail::require_keys(
        r,
        {"kind", "bins", "unknown_label", "age_source", "date_of_birth_source",
         "onset_source", "race_source", "ethnicity_source", "race_separator",
         "state_source", "county_source", "lookup"},
        context + " recode");
    RecodeRule rule;
    if (!r.contains("kind")) {
      throw ParseError(context + ": recode rule missing 'kind'");
    }
    rule.kind = recode_kind_from_string(r.at("kind").get<std::string>());
    if (r.contains("bins")) {
      for (const auto& b : r.at("bins")) {
        detail::require_keys(b, {"label", "min", "max"}, context + " bin");
        AgeBin bin;
        bin.label = b.at("label").get<std::string>();
        bin.min = b.at("min").get<int>();
        if (b.contains("max")) bin.max = b.at("max").get<int>();
        rule.bins.bins.push_back(std::move(bin));
      }
    }
    rule.bins.unknown_label = r.value("unknown_label", std::string("Unknown"));
    rule.age_source = r.value("age_source", std::string{});
    rule.date_of_birth_source = r.value("date_of_birth_source", std::string{});
    rule.onset_source = r.value("onset_source", std::string{});
    rule.race_source = r.value("race_source", std::string{});
    rule.ethnicity_source = r.value("ethnicity_source", std::string{});
    rule.race_separator = r.value("race_separator", std::string(";"));
    rule.state_source = r.value("state_source", std::string{});
    rule.county_source = r.value("county_source", std::string{});
    if (r.contains("lookup")) {
      std::filesystem::path p = r.at("lookup").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      rule.lookup_path = p.lexically_normal().string();
    }
    f.recode = std::move(rule);
  } else if (!aux && f.value_type == ValueType::kCategory) {
    // Unanswered category questions normalize to the missing label unless a
    // field opts out or declares another rule.
    f.recode = RecodeRule{};
  }
  return f;
}

inline Schema schema_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("schema root must be an object");
  detail::require_keys(
      j,
      {"name", "description", "thresholds", "release_delay_days",
       "epidemic_epoch", "window_field", "dedup_key", "qi_order", "pii_scan",
       "fields", "aux_fields"},
      "schema");

  Schema s;
  s.name = j.value("name", std::string{});
  s.description = j.value("description", std::string{});
  if (!j.contains("thresholds")) {
    throw ParseError("schema missing privacy thresholds");
  }
  const auto& t = j.at("thresholds");
  detail::require_keys(t, {"k", "l"}, "thresholds");
  if (!t.contains("k") || !t.contains("l")) {
    throw ParseError("thresholds must declare both k and l");
  }
  s.thresholds.k = t.at("k").get<int>();
  s.thresholds.l = t.at("l").get<int>();
  s.release_delay_days = j.value("release_delay_days", 0);
  if (j.contains("epidemic_epoch")) {
    s.epidemic_epoch = detail::parse_date_or_throw(
        j.at("epidemic_epoch").get<std::string>(), "epidemic_epoch");
  }
  s.window_field = j.value("window_field", std::string{});
  if (j.contains("dedup_key")) {
    s.dedup_key = j.at("dedup_key").get<std::vector<std::string>>();
  }
  if (!j.contains("qi_order")) throw ParseError("schema missing qi_order");
  s.qi_order = j.at("qi_order").get<std::vector<std::string>>();
  if (j.contains("pii_scan")) {
    const auto& p = j.at("pii_scan");
    detail::require_keys(
        p, {"max_value_length", "max_alpha_tokens", "min_digit_run"},
        "pii_scan");
    s.pii_scan.max_value_length =
        p.value("max_value_length", s.pii_scan.max_value_length);
    s.pii_scan.max_alpha_tokens =
        p.value("max_alpha_tokens", s.pii_scan.max_alpha_tokens);
    s.pii_scan.min_digit_run =
        p.value("min_digit_run", s.pii_scan.min_digit_run);
  }
  if (!j.contains("fields")) throw ParseError("schema missing fields");
  for (const auto& fj : j.at("fields")) {
    s.fields.push_back(field_spec_from_json(fj, /*aux=*/false, base_dir));
  }
  if (j.contains("aux_fields")) {
    for (const auto& fj : j.at("aux_fields")) {
      s.aux_fields.push_back(field_spec_from_json(fj, /*aux=*/true, base_dir));
    }
  }
  return s;
}

inline nlohmann::json field_spec_to_json(const FieldSpec& f) {
  nlohmann::json j;
  j["name"] = f.name;
  if (!f.aux) j["class"] = std::string(to_string(f.field_class));
  j["type"] = std::string(to_string(f.value_type));
  if (!f.domain.empty()) j["domain"] = f.domain;
  if (f.open_domain) j["open"] = true;
  if (!f.pattern.empty()) j["pattern"] = f.pattern;
  j["missing_label"] = f.missing_label;
  if (f.recode && !f.aux) {
    nlohmann::json r;
    r["kind"] = std::string(to_string(f.recode->kind));
    if (f.recode->kind == RecodeKind::kAgeBin) {
      nlohmann::json bins = nlohmann::json::array();
      for (const auto& b : f.recode->bins.bins) {
        nlohmann::json bj;
        bj["label"] = b.label;
        bj["min"] = b.min;
        if (b.max) bj["max"] = *b.max;
        bins.push_back(std::move(bj));
      }
      r["bins"] = std::move(bins);
      r["unknown_label"] = f.recode->bins.unknown_label;
      r["age_source"] = f.recode->age_source;
      r["date_of_birth_source"] = f.recode->date_of_birth_source;
      r["onset_source"] = f.recode->onset_source;
    }
    if (f.recode->kind == RecodeKind::kRaceEthnicityCombine) {
      r["race_source"] = f.recode->race_source;
      r["ethnicity_source"] = f.recode->ethnicity_source;
      r["race_separator"] = f.recode->race_separator;
    }
    if (f.recode->kind == RecodeKind::kFipsDerive) {
      r["state_source"] = f.recode->state_source;
      r["county_source"] = f.recode->county_source;
      r["lookup"] = f.recode->lookup_path;
    }
    j["recode"] = std::move(r);
  }
  return j;
}

inline nlohmann::json schema_to_json(const Schema& s) {
  nlohmann::json j;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["thresholds"] = {{"k", s.thresholds.k}, {"l", s.thresholds.l}};
  j["release_delay_days"] = s.release_delay_days;
  j["epidemic_epoch"] = to_string(s.epidemic_epoch);
  if (!s.window_field.empty()) j["window_field"] = s.window_field;
  j["dedup_key"] = s.dedup_key;
  j["qi_order"] = s.qi_order;
  j["pii_scan"] = {{"max_value_length", s.pii_scan.max_value_length},
                   {"max_alpha_tokens", s.pii_scan.max_alpha_tokens},
                   {"min_digit_run", s.pii_scan.min_digit_run}};
  j["fields"] = nlohmann::json::array();
  for (const auto& f : s.fields) j["fields"].push_back(field_spec_to_json(f));
  if (!s.aux_fields.empty()) {
    j["aux_fields"] = nlohmann::json::array();
    for (const auto& f : s.aux_fields) {
      j["aux_fields"].push_back(field_spec_to_json(f));
    }
  }
  return j;
}

// Parses, then validates; throws DataError listing every finding so a broken
// configuration never reaches the pipeline.
inline Schema load_schema(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("schema " + path.string() + ": " + e.what());
  }
  Schema s;
  try {
    s = schema_from_json(j, path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema " + path.string() + ": " + e.what());
  }
  ValidationReport report = validate_schema(s);
  if (!report.ok()) {
    std::string msg = "schema " + path.string() + " failed validation:";
    for (const auto& f : report.findings) {
      msg += "\n  [" + f.code + "] " +
             (f.field.empty() ? "" : f.field + ": ") + f.message;
    }
    throw DataError(msg);
  }
  return s;
}

inline void save_schema(const Schema& s, const std::filesystem::path& path) {
  write_text_file(path, schema_to_json(s).dump(2) + "\n");
}

}  // namespace sdc

#endif  // SDC_SCHEMA_HPP

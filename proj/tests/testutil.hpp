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

#ifndef SDC_TESTS_TESTUTIL_HPP
#define SDC_TESTS_TESTUTIL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sdc/dataset.hpp"
#include "sdc/date.hpp"
#include "sdc/schema.hpp"

namespace sdc::test {

// ---------------------------------------------------------------------------
// Worked-example fixtures: the ten-row tables used throughout the tests.

inline Dataset k_figure_raw() {
  Dataset ds({"sex", "age_group", "race_ethnicity_combined"});
  auto add = [&](const char* s, const char* a, const char* r) {
    ds.append_row(std::vector<std::string>{s, a, r});
  };
  add("Male", "0-9", "Hispanic/Latino");
  add("Female", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Male", "0-9", "Unknown");
  add("Female", "0-9", "Unknown");
  add("Unknown", "0-9", "Unknown");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  return ds;
}

inline Dataset k_figure_suppressed() {
  Dataset ds({"sex", "age_group", "race_ethnicity_combined"});
  auto add = [&](const char* s, const char* a, const char* r) {
    ds.append_row(std::vector<std::string>{s, a, r});
  };
  add("NA", "0-9", "NA");
  add("NA", "0-9", "NA");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("NA", "0-9", "NA");
  add("NA", "0-9", "NA");
  add("NA", "0-9", "NA");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  add("Unknown", "0-9", "Hispanic/Latino");
  return ds;
}

inline Dataset l_figure_raw() {
  Dataset ds({"sex", "age_group", "race_ethnicity_combined", "pos_spec_dt"});
  auto add = [&](const char* s, const char* a, const char* r, const char* d) {
    ds.append_row(std::vector<std::string>{s, a, r, d});
  };
  add("Female", "0-9", "Asian, Non-Hispanic", "2020-03-01");
  add("Female", "0-9", "Asian, Non-Hispanic", "2020-03-01");
  add("Unknown", "0-9", "Hispanic/Latino", "2020-04-01");
  add("Female", "0-9", "Asian, Non-Hispanic", "2020-03-01");
  add("Female", "0-9", "Asian, Non-Hispanic", "2020-03-01");
  add("Female", "0-9", "Asian, Non-Hispanic", "2020-03-01");
  add("Unknown", "0-9", "Hispanic/Latino", "2020-05-01");
  add("Unknown", "0-9", "Hispanic/Latino", "2020-05-01");
  add("Unknown", "0-9", "Hispanic/Latino", "2020-06-01");
  add("Unknown", "0-9", "Hispanic/Latino", "2020-07-01");
  return ds;
}

inline Dataset l_figure_suppressed() {
  Dataset ds = l_figure_raw();
  for (std::size_t r : {0, 1, 3, 4, 5}) {
    ds.cell(r, "pos_spec_dt") = "NA";
  }
  return ds;
}

// Schema matching the worked-example tables (three quasi-identifiers,
// optional confidential specimen date).
inline Schema figure_schema(bool with_confidential = false) {
  Schema s;
  s.name = with_confidential ? "figure_l" : "figure_k";
  s.thresholds = {5, 2};
  s.release_delay_days = 0;
  s.qi_order = {"sex", "age_group", "race_ethnicity_combined"};

  FieldSpec sex;
  sex.name = "sex";
  sex.field_class = FieldClass::kQuasiIdentifier;
  sex.domain = {"Male", "Female", "Unknown", "Missing", "Other"};
  s.fields.push_back(sex);

  FieldSpec age;
  age.name = "age_group";
  age.field_class = FieldClass::kQuasiIdentifier;
  age.domain = {"0-9",   "10-19", "20-39", "40-49",  "50-59",
                "60-69", "70-79", "80+",   "Unknown"};
  age.missing_label = "Unknown";
  s.fields.push_back(age);

  FieldSpec race;
  race.name = "race_ethnicity_combined";
  race.field_class = FieldClass::kQuasiIdentifier;
  race.domain = {"American Indian/Alaska Native, Non-Hispanic",
                 "Asian, Non-Hispanic",
                 "Black, Non-Hispanic",
                 "Multiple/Other, Non-Hispanic",
                 "Native Hawaiian/Other Pacific Islander, Non-Hispanic",
                 "White, Non-Hispanic",
                 "Hispanic/Latino",
                 "Unknown",
                 "Missing"};
  s.fields.push_back(race);

  if (with_confidential) {
    FieldSpec conf;
    conf.name = "pos_spec_dt";
    conf.field_class = FieldClass::kConfidentialAttribute;
    conf.value_type = ValueType::kDate;
    s.fields.push_back(conf);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Deterministic randomness. Values come straight off the engine so sequences
// are reproducible across standard library implementations.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n) {
    return n == 0 ? 0 : static_cast<std::size_t>(next() % n);
  }
  bool chance_percent(unsigned percent) { return next() % 100 < percent; }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Random instances for property tests.

struct RandomSpec {
  std::size_t rows = 50;
  std::size_t num_qi = 3;
  std::size_t domain_min = 2;
  std::size_t domain_max = 10;
  unsigned missing_percent = 5;   // chance a QI cell is the missing label
  unsigned na_percent = 0;        // chance a QI cell arrives already suppressed
  bool with_confidential = true;
  std::size_t date_pool = 6;      // distinct confidential dates to draw from
};

struct RandomInstance {
  Schema schema;
  Dataset data;
};

inline RandomInstance make_random_instance(Rng& rng, const RandomSpec& spec,
                                           int k, int l) {
  RandomInstance inst;
  Schema& s = inst.schema;
  s.name = "random";
  s.thresholds = {k, l};
  std::vector<std::string> columns;
  for (std::size_t q = 0; q < spec.num_qi; ++q) {
    FieldSpec f;
    f.name = "qi" + std::to_string(q);
    f.field_class = FieldClass::kQuasiIdentifier;
    const std::size_t span = spec.domain_max - spec.domain_min + 1;
    const std::size_t size = spec.domain_min + rng.below(span);
    for (std::size_t v = 0; v < size; ++v) {
      f.domain.push_back("v" + std::to_string(v));
    }
    f.domain.push_back("Missing");
    s.qi_order.push_back(f.name);
    columns.push_back(f.name);
    s.fields.push_back(std::move(f));
  }
  if (spec.with_confidential) {
    FieldSpec conf;
    conf.name = "conf_dt";
    conf.field_class = FieldClass::kConfidentialAttribute;
    conf.value_type = ValueType::kDate;
    columns.push_back(conf.name);
    s.fields.push_back(std::move(conf));
  }

  Dataset ds(columns);
  ds.reserve_rows(spec.rows);
  const Date base{2020, 3, 1};
  for (std::size_t r = 0; r < spec.rows; ++r) {
    std::vector<std::string> row;
    row.reserve(columns.size());
    for (std::size_t q = 0; q < spec.num_qi; ++q) {
      const auto& domain = s.fields[q].domain;  // last entry is "Missing"
      if (spec.na_percent && rng.chance_percent(spec.na_percent)) {
        row.emplace_back(kSuppressedValue);
      } else if (rng.chance_percent(spec.missing_percent)) {
        row.emplace_back("Missing");
      } else {
        row.push_back(domain[rng.below(domain.size() - 1)]);
      }
    }
    if (spec.with_confidential) {
      if (rng.chance_percent(10)) {
        row.emplace_back();  // unanswered
      } else {
        row.push_back(to_string(
            add_days(base, static_cast<std::int64_t>(rng.below(spec.date_pool)))));
      }
    }
    ds.append_row(std::move(row));
  }
  inst.data = std::move(ds);
  return inst;
}

// ---------------------------------------------------------------------------
// Brute-force oracles. These deliberately use the dumbest correct algorithms
// available and share nothing with the library implementations they check.

// O(n^2) pairwise minimum class frequency; nullopt on an empty dataset.
inline std::optional<std::size_t> pairwise_min_frequency(
    const Dataset& ds, std::span<const std::string> qi) {
  if (ds.row_count() == 0) return std::nullopt;
  std::vector<std::size_t> cols;
  for (const auto& n : qi) cols.push_back(ds.require_column(n));
  std::size_t min_freq = ds.row_count();
  for (std::size_t a = 0; a < ds.row_count(); ++a) {
    std::size_t freq = 0;
    for (std::size_t b = 0; b < ds.row_count(); ++b) {
      bool same = true;
      for (std::size_t c : cols) {
        if (ds.cell(a, c) != ds.cell(b, c)) {
          same = false;
          break;
        }
      }
      if (same) ++freq;
    }
    min_freq = std::min(min_freq, freq);
  }
  return min_freq;
}

// Pairwise grouping, then a distinct recount of concrete confidential values
// per group: true when every group shows at least l distinct values or
// discloses nothing.
inline bool pairwise_l_diverse(const Dataset& ds,
                               std::span<const std::string> qi,
                               const std::string& conf_field, int l,
                               const std::string& missing_label = "") {
  std::vector<std::size_t> cols;
  for (const auto& n : qi) cols.push_back(ds.require_column(n));
  const std::size_t conf = ds.require_column(conf_field);
  for (std::size_t a = 0; a < ds.row_count(); ++a) {
    std::set<std::string> distinct;
    bool any_concrete = false;
    for (std::size_t b = 0; b < ds.row_count(); ++b) {
      bool same = true;
      for (std::size_t c : cols) {
        if (ds.cell(a, c) != ds.cell(b, c)) {
          same = false;
          break;
        }
      }
      if (!same) continue;
      const std::string& v = ds.cell(b, conf);
      if (v.empty() || is_suppressed(v) ||
          (!missing_label.empty() && v == missing_label)) {
        continue;
      }
      any_concrete = true;
      distinct.insert(v);
    }
    if (any_concrete && distinct.size() < static_cast<std::size_t>(l)) {
      return false;
    }
  }
  return true;
}

// Exhaustive minimum suppressed-cell count over per-row suppression patterns
// on the violating rows, for inputs that contain no suppressed cells.
//
// For such inputs every valid assignment decomposes into groups of violators
// that share one suppression pattern and agree on the retained fields (a row
// with a nonempty pattern acquires sentinel cells, so it can only share a
// signature with rows suppressed identically; a row left untouched keeps a
// signature below k). The search therefore enumerates set partitions of the
// violators, requiring each part to reach size k, with cost
// |part| * |fields the part disagrees on|. Branch and bound against
// `upper_bound` (a known-feasible cost, e.g. the engine's).
//
// Returns nullopt when no valid assignment exists.
inline std::optional<std::size_t> optimal_k_suppression_cost(
    const Dataset& ds, std::span<const std::string> qi, int k,
    std::size_t upper_bound, bool upper_bound_is_feasible = true) {
  std::vector<std::size_t> cols;
  for (const auto& n : qi) cols.push_back(ds.require_column(n));
  const std::size_t q = cols.size();

  // Violators via an independent map-based grouping.
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    std::vector<std::string> sig;
    for (std::size_t c : cols) {
      if (is_suppressed(ds.cell(r, c))) {
        throw DataError("optimal_k_suppression_cost requires unsuppressed input");
      }
      sig.push_back(ds.cell(r, c));
    }
    groups[std::move(sig)].push_back(r);
  }
  std::vector<std::size_t> violators;
  for (const auto& [sig, members] : groups) {
    if (members.size() < static_cast<std::size_t>(k)) {
      violators.insert(violators.end(), members.begin(), members.end());
    }
  }
  if (violators.empty()) return 0;

  const std::size_t v = violators.size();
  struct Part {
    std::vector<std::size_t> members;  // indices into violators
    std::vector<char> agree;           // per QI field
    std::size_t cost = 0;              // members * disagreements
  };
  std::vector<Part> parts;
  std::size_t best = upper_bound;
  bool found = upper_bound_is_feasible;

  auto disagreements = [&](const std::vector<char>& agree) {
    std::size_t d = 0;
    for (char a : agree) {
      if (!a) ++d;
    }
    return d;
  };

  std::size_t current_cost = 0;
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (current_cost >= best) return;  // cost only grows
    if (i == v) {
      for (const auto& p : parts) {
        if (p.members.size() < static_cast<std::size_t>(k)) return;
      }
      best = current_cost;
      found = true;
      return;
    }
    // Remaining rows must be able to fill every under-sized part.
    std::size_t deficit = 0;
    for (const auto& p : parts) {
      if (p.members.size() < static_cast<std::size_t>(k)) {
        deficit += static_cast<std::size_t>(k) - p.members.size();
      }
    }
    if (deficit > v - i) return;

    const std::size_t row = violators[i];
    for (auto& p : parts) {
      const std::size_t rep = violators[p.members.front()];
      std::vector<char> next_agree = p.agree;
      for (std::size_t c = 0; c < q; ++c) {
        if (next_agree[c] && ds.cell(row, cols[c]) != ds.cell(rep, cols[c])) {
          next_agree[c] = 0;
        }
      }
      const std::size_t next_cost =
          (p.members.size() + 1) * disagreements(next_agree);
      const std::size_t old_cost = p.cost;
      std::vector<char> old_agree = p.agree;

      current_cost += next_cost - old_cost;
      p.members.push_back(i);
      p.agree = std::move(next_agree);
      p.cost = next_cost;
      self(self, i + 1);
      p.cost = old_cost;
      p.agree = std::move(old_agree);
      p.members.pop_back();
      current_cost -= next_cost - old_cost;
    }
    // Open a new part with this row (costs nothing until it disagrees).
    parts.push_back({{i}, std::vector<char>(q, 1), 0});
    self(self, i + 1);
    parts.pop_back();
  };
  dfs(dfs, 0);

  if (!found) return std::nullopt;
  return best;
}

// Feasibility-only variant with no prior bound: can the violators be
// partitioned into parts of size >= k at all? (Any partition cost works, so
// use an upper bound no valid plan can reach.)
inline bool suppression_feasible(const Dataset& ds,
                                 std::span<const std::string> qi, int k) {
  const std::size_t bound = ds.row_count() * qi.size() + 1;
  return optimal_k_suppression_cost(ds, qi, k, bound,
                                    /*upper_bound_is_feasible=*/false)
      .has_value();
}

}  // namespace sdc::test

#endif  // SDC_TESTS_TESTUTIL_HPP

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

#ifndef SDC_SUPPRESS_HPP
#define SDC_SUPPRESS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/dataset.hpp"
#include "sdc/error.hpp"
#include "sdc/schema.hpp"

namespace sdc {

// Quasi-identifier cell values of one row, ordered by the schema's qi_order.
// The suppression sentinel is an ordinary value here: suppressed rows only
// merge with rows suppressed the same way.
using QiSignature = std::vector<std::string>;

struct EquivalenceClass {
  QiSignature signature;
  std::vector<std::size_t> members;  // ascending row indices

  std::size_t frequency() const { return members.size(); }
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t hash_row_cells(const Dataset& ds, std::size_t row,
                                    std::span<const std::size_t> cols) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t c : cols) {
    h = fnv1a64(ds.cell(row, c), h);
    h = fnv1a64("\x1f", h);
  }
  return h;
}

inline bool row_matches_signature(const Dataset& ds, std::size_t row,
                                  std::span<const std::size_t> cols,
                                  const QiSignature& sig) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (ds.cell(row, cols[i]) != sig[i]) return false;
  }
  return true;
}

}  // namespace detail

// Exact partition of the dataset's rows by quasi-identifier signature,
// grouped by hash, returned in lexicographic signature order.
inline std::vector<EquivalenceClass> compute_classes(
    const Dataset& ds, std::span<const std::string> qi_order) {
  std::vector<std::size_t> cols;
  cols.reserve(qi_order.size());
  for (const auto& name : qi_order) cols.push_back(ds.require_column(name));

  std::vector<EquivalenceClass> classes;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    const std::uint64_t h = detail::hash_row_cells(ds, r, cols);
    auto& bucket = by_hash[h];
    bool found = false;
    for (std::size_t ci : bucket) {
      if (detail::row_matches_signature(ds, r, cols, classes[ci].signature)) {
        classes[ci].members.push_back(r);
        found = true;
        break;
      }
    }
    if (!found) {
      EquivalenceClass ec;
      ec.signature.reserve(cols.size());
      for (std::size_t c : cols) ec.signature.push_back(ds.cell(r, c));
      ec.members.push_back(r);
      bucket.push_back(classes.size());
      classes.push_back(std::move(ec));
    }
  }
  std::sort(classes.begin(), classes.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) {
              return a.signature < b.signature;
            });
  return classes;
}

enum class SuppressionReason { kKAnonymity, kLDiversity };

inline std::string_view to_string(SuppressionReason r) {
  switch (r) {
    case SuppressionReason::kKAnonymity: return "k_anonymity";
    case SuppressionReason::kLDiversity: return "l_diversity";
  }
  return "unknown";
}

struct SuppressionAction {
  std::size_t row;
  std::string field;
  SuppressionReason reason;
  std::string prior_value;  // reporting only; redacted from audit exports

  friend bool operator==(const SuppressionAction&,
                         const SuppressionAction&) = default;
};

struct SuppressionPlan {
  std::vector<SuppressionAction> actions;
  // Set when the infeasibility override released an under-filled group whose
  // quasi-identifiers are fully suppressed.
  bool infeasible_release = false;

  bool empty() const { return actions.empty(); }
  std::size_t size() const { return actions.size(); }
};

struct KSuppressionOptions {
  // Commit a leftover all-suppressed group smaller than k instead of
  // failing. The released rows stay below k and verification will flag them.
  bool allow_infeasible = false;
};

namespace detail {

// Calls fn with each size-`choose` combination of {0..n-1} in lexicographic
// position order. Returns false if fn ever returns false (stop early).
template <typename Fn>
bool for_each_combination(std::size_t n, std::size_t choose, Fn&& fn) {
  std::vector<std::size_t> pos(choose);
  for (std::size_t i = 0; i < choose; ++i) pos[i] = i;
  while (true) {
    if (!fn(pos)) return false;
    // advance
    std::size_t i = choose;
    while (i > 0) {
      --i;
      if (pos[i] + (choose - i) < n) {
        ++pos[i];
        for (std::size_t j = i + 1; j < choose; ++j) pos[j] = pos[j - 1] + 1;
        break;
      }
      if (i == 0) return true;
    }
    if (choose == 0) return true;
  }
}

}  // namespace detail

// Plans the smallest field suppressions the retained-projection greedy finds:
// rows of under-filled classes are pooled; suppression subsets of the
// quasi-identifiers are tried in increasing size (later-listed fields first);
// any pooled group that agrees on the retained fields and reaches k is
// committed. Rows of classes that already meet k are never touched.
inline SuppressionPlan plan_k_suppression(const Dataset& ds,
                                          std::span<const std::string> qi_order,
                                          int k,
                                          KSuppressionOptions options = {}) {
  SuppressionPlan plan;
  if (k < 1) throw DataError("k must be positive");
  const std::size_t q = qi_order.size();
  if (q == 0) throw DataError("no quasi-identifiers configured");
  std::vector<std::size_t> cols;
  cols.reserve(q);
  for (const auto& name : qi_order) cols.push_back(ds.require_column(name));

  const auto classes = compute_classes(ds, qi_order);
  std::vector<std::size_t> pool;
  for (const auto& ec : classes) {
    if (ec.frequency() < static_cast<std::size_t>(k)) {
      pool.insert(pool.end(), ec.members.begin(), ec.members.end());
    }
  }
  if (pool.empty()) return plan;
  std::sort(pool.begin(), pool.end());

  // Suppressing later-listed quasi-identifiers first: subsets are generated
  // as combinations over the reversed qi_order.
  std::vector<std::size_t> reversed(q);
  for (std::size_t i = 0; i < q; ++i) reversed[i] = q - 1 - i;

  auto commit = [&](std::span<const std::size_t> rows,
                    std::span<const std::size_t> suppress_idx) {
    for (std::size_t row : rows) {
      for (std::size_t f : suppress_idx) {
        plan.actions.push_back({row, qi_order[f],
                                SuppressionReason::kKAnonymity,
                                ds.cell(row, cols[f])});
      }
    }
  };

  for (std::size_t s = 1; s <= q && !pool.empty(); ++s) {
    detail::for_each_combination(q, s, [&](const std::vector<std::size_t>&
                                               positions) {
      std::vector<std::size_t> suppress_idx;
      suppress_idx.reserve(s);
      for (std::size_t p : positions) suppress_idx.push_back(reversed[p]);
      std::sort(suppress_idx.begin(), suppress_idx.end());
      std::vector<std::size_t> retained_cols;
      for (std::size_t i = 0; i < q; ++i) {
        if (!std::binary_search(suppress_idx.begin(), suppress_idx.end(), i)) {
          retained_cols.push_back(cols[i]);
        }
      }
      // Group pooled rows by their retained cells, comparing rows in place.
      auto rows_equal = [&](std::size_t a, std::size_t b) {
        for (std::size_t c : retained_cols) {
          if (ds.cell(a, c) != ds.cell(b, c)) return false;
        }
        return true;
      };
      std::vector<std::vector<std::size_t>> groups;
      std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
      for (std::size_t row : pool) {
        const std::uint64_t h =
            detail::hash_row_cells(ds, row, retained_cols);
        auto& bucket = by_hash[h];
        bool found = false;
        for (std::size_t gi : bucket) {
          if (rows_equal(groups[gi].front(), row)) {
            groups[gi].push_back(row);
            found = true;
            break;
          }
        }
        if (!found) {
          bucket.push_back(groups.size());
          groups.push_back({row});
        }
      }
      bool any_commit = false;
      for (const auto& rows : groups) {
        if (rows.size() >= static_cast<std::size_t>(k)) {
          any_commit = true;
          break;
        }
      }
      if (any_commit) {
        std::vector<char> committed(ds.row_count(), 0);
        for (const auto& rows : groups) {
          if (rows.size() >= static_cast<std::size_t>(k)) {
            commit(rows, suppress_idx);
            for (std::size_t row : rows) committed[row] = 1;
          }
        }
        std::vector<std::size_t> remaining;
        remaining.reserve(pool.size());
        for (std::size_t row : pool) {
          if (!committed[row]) remaining.push_back(row);
        }
        pool = std::move(remaining);
      }
      return !pool.empty();  // stop subset enumeration once the pool drains
    });
  }

  if (!pool.empty()) {
    if (!options.allow_infeasible) {
      throw DataError(
          "insufficient records for k-anonymity: " +
          std::to_string(pool.size()) + " records remain below k=" +
          std::to_string(k) +
          " even with every quasi-identifier suppressed (use the "
          "infeasibility override to release them fully suppressed)");
    }
    std::vector<std::size_t> all_idx(q);
    for (std::size_t i = 0; i < q; ++i) all_idx[i] = i;
    commit(pool, all_idx);
    plan.infeasible_release = true;
  }

  std::sort(plan.actions.begin(), plan.actions.end(),
            [&](const SuppressionAction& a, const SuppressionAction& b) {
              if (a.row != b.row) return a.row < b.row;
              return a.field < b.field;
            });
  return plan;
}

inline SuppressionPlan plan_k_suppression(const Dataset& ds,
                                          const Schema& schema,
                                          KSuppressionOptions options = {}) {
  return plan_k_suppression(ds, schema.qi_order, schema.thresholds.k, options);
}

// Sets every planned cell to the suppression sentinel; nothing else moves.
inline void apply_plan_in_place(Dataset& ds, const SuppressionPlan& plan) {
  for (const auto& a : plan.actions) {
    if (a.row >= ds.row_count()) {
      throw DataError("suppression action row " + std::to_string(a.row) +
                      " out of range");
    }
    ds.cell(a.row, a.field) = std::string(kSuppressedValue);
  }
}

inline Dataset apply_plan(Dataset ds, const SuppressionPlan& plan) {
  apply_plan_in_place(ds, plan);
  return ds;
}

// Confidential fields needing l-diversity suppression, described by name and
// the label their unanswered values carry.
struct ConfidentialField {
  std::string name;
  std::string missing_label;
};

namespace detail {

inline bool concrete_confidential(std::string_view v,
                                  std::string_view missing_label) {
  return !v.empty() && !is_suppressed(v) && v != missing_label;
}

}  // namespace detail

// Suppresses a confidential field across every member of an equivalence class
// that exposes fewer than l distinct concrete values. Classes whose
// confidential values are entirely missing disclose nothing and are left
// alone; cells already missing are not rewritten.
inline SuppressionPlan plan_l_suppression(
    const Dataset& ds, std::span<const std::string> qi_order,
    std::span<const ConfidentialField> confidential, int l) {
  SuppressionPlan plan;
  if (l <= 1) return plan;  // one distinct value is always present or vacuous
  std::vector<std::size_t> conf_cols;
  conf_cols.reserve(confidential.size());
  for (const auto& c : confidential) {
    conf_cols.push_back(ds.require_column(c.name));
  }
  const auto classes = compute_classes(ds, qi_order);
  for (std::size_t ci = 0; ci < confidential.size(); ++ci) {
    const auto& field = confidential[ci];
    const std::size_t col = conf_cols[ci];
    for (const auto& ec : classes) {
      std::set<std::string_view> distinct;
      for (std::size_t row : ec.members) {
        const std::string& v = ds.cell(row, col);
        if (detail::concrete_confidential(v, field.missing_label)) {
          distinct.insert(v);
        }
      }
      if (distinct.empty() || distinct.size() >= static_cast<std::size_t>(l)) {
        continue;
      }
      for (std::size_t row : ec.members) {
        const std::string& v = ds.cell(row, col);
        if (detail::concrete_confidential(v, field.missing_label)) {
          plan.actions.push_back(
              {row, field.name, SuppressionReason::kLDiversity, v});
        }
      }
    }
  }
  std::sort(plan.actions.begin(), plan.actions.end(),
            [](const SuppressionAction& a, const SuppressionAction& b) {
              if (a.row != b.row) return a.row < b.row;
              return a.field < b.field;
            });
  return plan;
}

inline SuppressionPlan plan_l_suppression(const Dataset& ds,
                                          const Schema& schema) {
  std::vector<ConfidentialField> confidential;
  for (const auto& f : schema.fields) {
    if (f.field_class == FieldClass::kConfidentialAttribute) {
      confidential.push_back({f.name, f.missing_label});
    }
  }
  return plan_l_suppression(ds, schema.qi_order, confidential,
                            schema.thresholds.l);
}

inline SuppressionPlan merge_plans(SuppressionPlan k_plan,
                                   const SuppressionPlan& l_plan) {
  k_plan.actions.insert(k_plan.actions.end(), l_plan.actions.begin(),
                        l_plan.actions.end());
  k_plan.infeasible_release =
      k_plan.infeasible_release || l_plan.infeasible_release;
  return k_plan;
}

// Machine-readable audit form of a plan. Prior values are deliberately
// absent: the audit file ships alongside released data.
inline nlohmann::json plan_to_audit_json(const SuppressionPlan& plan) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : plan.actions) {
    actions.push_back({{"row", a.row},
                       {"field", a.field},
                       {"reason", std::string(to_string(a.reason))}});
  }
  return nlohmann::json{{"actions", std::move(actions)},
                        {"infeasible_release", plan.infeasible_release}};
}

inline SuppressionPlan plan_from_audit_json(const nlohmann::json& j) {
  SuppressionPlan plan;
  for (const auto& aj : j.at("actions")) {
    SuppressionAction a;
    a.row = aj.at("row").get<std::size_t>();
    a.field = aj.at("field").get<std::string>();
    const std::string reason = aj.at("reason").get<std::string>();
    if (reason == "k_anonymity") {
      a.reason = SuppressionReason::kKAnonymity;
    } else if (reason == "l_diversity") {
      a.reason = SuppressionReason::kLDiversity;
    } else {
      throw ParseError("unknown suppression reason: " + reason);
    }
    plan.actions.push_back(std::move(a));
  }
  plan.infeasible_release = j.value("infeasible_release", false);
  return plan;
}

}  // namespace sdc

#endif  // SDC_SUPPRESS_HPP

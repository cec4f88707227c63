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

#ifndef SDC_PIPELINE_HPP
#define SDC_PIPELINE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdc/csv.hpp"
#include "sdc/dataset.hpp"
#include "sdc/date.hpp"
#include "sdc/error.hpp"
#include "sdc/ingest.hpp"
#include "sdc/quality.hpp"
#include "sdc/recode.hpp"
#include "sdc/report.hpp"
#include "sdc/schema.hpp"
#include "sdc/suppress.hpp"
#include "sdc/verify.hpp"

namespace sdc {

struct RunConfig {
  std::filesystem::path schema_path;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path manifest_path;  // optional sidecar manifest
  std::filesystem::path out_dir;
  Date release_date;
  std::optional<Date> processing_date;  // defaults to release_date
  std::optional<int> k_override;
  std::optional<int> l_override;
  std::optional<int> delay_override;
  bool allow_infeasible = false;
  bool emit_audit_plan = false;
};

struct RunResult {
  Schema schema;            // with overrides applied
  Dataset released;         // release-column projection, suppressed
  SuppressionPlan plan;     // k-phase and l-phase actions combined
  PrivacyReport report;
  SuppressionSummary summary;
  QualityLog quality;
  nlohmann::json manifest;
  std::size_t rows_read = 0;
  std::size_t rows_after_dedup = 0;
  std::size_t rows_after_window = 0;

  bool verification_passed() const { return report.pass(); }
  bool releasable(bool allow_infeasible) const {
    return report.pass() ||
           (allow_infeasible && plan.infeasible_release &&
            report.l_violations.empty() && report.pii_findings.empty());
  }
};

namespace pipeline_detail {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  }
}

// Reorders/extends a freshly read dataset to the canonical input layout
// (released fields, then auxiliary fields); absent columns come in empty.
inline Dataset canonicalize_columns(Dataset ds, const Schema& schema) {
  const auto layout = schema.input_columns();
  if (ds.columns() == layout) return ds;
  Dataset out((std::vector<std::string>(layout)));
  out.reserve_rows(ds.row_count());
  std::vector<std::optional<std::size_t>> src;
  src.reserve(layout.size());
  for (const auto& name : layout) src.push_back(ds.find_column(name));
  std::vector<std::string> row(layout.size());
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t c = 0; c < layout.size(); ++c) {
      row[c] = src[c] ? ds.cell(r, *src[c]) : std::string{};
    }
    out.append_row(row);
  }
  return out;
}

inline const ManifestEntry* match_manifest_entry(
    const std::vector<ManifestEntry>& entries,
    const std::filesystem::path& input) {
  for (const auto& e : entries) {
    if (e.file == input.string() ||
        e.file == input.filename().string()) {
      return &e;
    }
  }
  return nullptr;
}

}  // namespace pipeline_detail

// Executes the privacy review end to end: ingest, de-duplicate, window,
// re-code, suppress for k-anonymity then l-diversity, derive location codes,
// and independently re-verify the releasable projection.
inline RunResult run_pipeline(const RunConfig& config) {
  RunResult result;
  std::string schema_source;

  pipeline_detail::stage("load-schema", [&] {
    schema_source = read_text_file(config.schema_path);
    result.schema = load_schema(config.schema_path);
    Schema& schema = result.schema;
    if (config.k_override) schema.thresholds.k = *config.k_override;
    if (config.l_override) schema.thresholds.l = *config.l_override;
    if (config.delay_override) schema.release_delay_days = *config.delay_override;
    if (config.k_override || config.l_override || config.delay_override) {
      auto report = validate_schema(schema);
      if (!report.ok()) {
        std::string msg = "overrides violate schema invariants:";
        for (const auto& f : report.findings) msg += " [" + f.code + "]";
        throw DataError(msg);
      }
    }
    return 0;
  });
  const Schema& schema = result.schema;
  const Date processing_date =
      config.processing_date.value_or(config.release_date);

  // Ingest every input in manifest order, carrying per-row sidecars.
  Dataset combined;
  std::vector<std::optional<Date>> submission;
  std::vector<std::string> jurisdiction;
  pipeline_detail::stage("ingest", [&] {
    std::vector<ManifestEntry> manifest;
    if (!config.manifest_path.empty()) {
      manifest = load_manifest(config.manifest_path);
    }
    std::vector<std::filesystem::path> inputs = config.inputs;
    if (inputs.empty()) {
      const auto base = config.manifest_path.parent_path();
      for (const auto& e : manifest) {
        std::filesystem::path p = e.file;
        if (p.is_relative()) p = base / p;
        inputs.push_back(p);
      }
    }
    if (inputs.empty()) {
      throw DataError("no input files (give --input or a manifest)");
    }
    combined = Dataset(schema.input_columns());
    for (const auto& path : inputs) {
      const ManifestEntry* entry =
          pipeline_detail::match_manifest_entry(manifest, path);
      if (!manifest.empty() && entry == nullptr) {
        result.quality.add("ingest", "manifest_entry_missing", std::nullopt,
                           "", path.filename().string());
      }
      Dataset part = pipeline_detail::canonicalize_columns(
          read_dataset(path, schema), schema);
      const std::size_t part_rows = part.row_count();
      if (inputs.size() == 1) {
        combined = std::move(part);
      } else {
        combined.reserve_rows(combined.row_count() + part_rows);
        for (std::size_t r = 0; r < part_rows; ++r) {
          combined.append_row(part.row(r));
        }
      }
      for (std::size_t r = 0; r < part_rows; ++r) {
        submission.push_back(entry ? entry->submission_date : std::nullopt);
        jurisdiction.push_back(entry ? entry->jurisdiction : std::string{});
      }
    }
    result.rows_read = combined.row_count();
    return 0;
  });

  // De-duplicate resubmitted case records: latest submission wins.
  std::vector<std::optional<Date>> first_submission;
  pipeline_detail::stage("deduplicate", [&] {
    if (schema.dedup_key.empty()) {
      result.rows_after_dedup = combined.row_count();
      first_submission.assign(combined.row_count(), std::nullopt);
      return 0;
    }
    auto dedup = deduplicate_rows(combined, schema.dedup_key, submission);
    if (dedup.survivors.size() != combined.row_count()) {
      combined = combined.select_rows(dedup.survivors);
      std::vector<std::optional<Date>> new_submission;
      std::vector<std::string> new_jurisdiction;
      for (std::size_t i = 0; i < dedup.survivors.size(); ++i) {
        const std::size_t r = dedup.survivors[i];
        new_submission.push_back(submission[r]);
        new_jurisdiction.push_back(jurisdiction[r]);
      }
      submission = std::move(new_submission);
      jurisdiction = std::move(new_jurisdiction);
    }
    first_submission = std::move(dedup.first_submission);
    result.rows_after_dedup = combined.row_count();
    return 0;
  });

  // Derive the report date, then retain only rows outside the delay window.
  pipeline_detail::stage("release-window", [&] {
    if (schema.window_field.empty()) {
      result.rows_after_window = combined.row_count();
      return 0;
    }
    const std::size_t col = combined.require_column(schema.window_field);
    for (std::size_t r = 0; r < combined.row_count(); ++r) {
      std::string& cell = combined.cell(r, col);
      std::optional<Date> form_date;
      if (auto d = parse_date(cell)) {
        // An implausible form date cannot anchor the release window.
        form_date = check_date_logic(*d, processing_date,
                                     schema.epidemic_epoch);
        if (!form_date) {
          result.quality.add("release-window", "report_date_out_of_range", r,
                             schema.window_field, cell);
        }
      }
      cell = to_string(derive_report_date(first_submission[r], form_date,
                                          processing_date));
    }
    auto keep = release_window_rows(combined, schema.window_field,
                                    config.release_date,
                                    schema.release_delay_days);
    if (keep.size() != combined.row_count()) {
      combined = combined.select_rows(keep);
      std::vector<std::string> new_jurisdiction;
      new_jurisdiction.reserve(keep.size());
      for (std::size_t r : keep) {
        new_jurisdiction.push_back(jurisdiction[r]);
      }
      jurisdiction = std::move(new_jurisdiction);
    }
    result.rows_after_window = combined.row_count();
    if (combined.row_count() == 0 && result.rows_after_dedup > 0) {
      result.quality.add("release-window", "window_excluded_all_rows");
    }
    return 0;
  });

  pipeline_detail::stage("recode", [&] {
    RecodeContext ctx;
    ctx.processing_date = processing_date;
    ctx.jurisdiction_by_row = &jurisdiction;
    ctx.log = &result.quality;
    apply_recodes(combined, schema, ctx);
    return 0;
  });

  pipeline_detail::stage("suppress", [&] {
    KSuppressionOptions options;
    options.allow_infeasible = config.allow_infeasible;
    SuppressionPlan k_plan = plan_k_suppression(combined, schema, options);
    apply_plan_in_place(combined, k_plan);
    SuppressionPlan l_plan = plan_l_suppression(combined, schema);
    apply_plan_in_place(combined, l_plan);
    result.plan = merge_plans(std::move(k_plan), l_plan);
    return 0;
  });

  pipeline_detail::stage("derive-fips", [&] {
    std::unordered_map<std::string, FipsTable> tables;
    for (const auto& f : schema.fields) {
      if (f.recode && f.recode->kind == RecodeKind::kFipsDerive &&
          !tables.count(f.recode->lookup_path)) {
        tables.emplace(f.recode->lookup_path,
                       FipsTable::load(f.recode->lookup_path));
      }
    }
    apply_fips_derivation(combined, schema, tables, &result.quality);
    return 0;
  });

  pipeline_detail::stage("verify", [&] {
    const auto release_cols = schema.release_columns();
    result.released = combined.project(release_cols);
    result.report = verify_dataset(result.released, schema);
    return 0;
  });

  pipeline_detail::stage("report", [&] {
    const auto order = summary_field_order(schema);
    result.summary =
        suppression_summary(result.plan, result.released.row_count(), order);
    ManifestInputs mi;
    mi.schema = &schema;
    mi.schema_source = schema_source;
    mi.release_date = config.release_date;
    mi.processing_date = processing_date;
    mi.rows_read = result.rows_read;
    mi.rows_after_dedup = result.rows_after_dedup;
    mi.rows_after_window = result.rows_after_window;
    mi.rows_released = result.released.row_count();
    mi.summary = &result.summary;
    mi.report = &result.report;
    mi.infeasible_release = result.plan.infeasible_release;
    mi.quality_findings = result.quality.size();
    result.manifest = build_release_manifest(mi);
    return 0;
  });

  return result;
}

// Writes pipeline outputs under `config.out_dir`. The privacy report and
// quality log are always written; the released dataset, summary, manifest,
// and audit plan only when verification passed (or the infeasibility override
// applies). Returns true when the release files were written.
inline bool write_run_outputs(const RunResult& result,
                              const RunConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  write_text_file(config.out_dir / "privacy_report.json",
                  result.report.to_json().dump(2) + "\n");
  result.quality.write(config.out_dir / "quality_findings.json");
  if (!result.releasable(config.allow_infeasible)) {
    return false;
  }
  write_text_file(config.out_dir / "released.csv", to_csv(result.released));
  write_text_file(config.out_dir / "suppression_summary.csv",
                  summary_to_csv(result.summary));
  write_text_file(config.out_dir / "suppression_summary.txt",
                  summary_to_table(result.summary));
  write_text_file(config.out_dir / "release_manifest.json",
                  result.manifest.dump(2) + "\n");
  if (config.emit_audit_plan) {
    write_text_file(config.out_dir / "audit_plan.json",
                    plan_to_audit_json(result.plan).dump(2) + "\n");
  }
  return true;
}

}  // namespace sdc

#endif  // SDC_PIPELINE_HPP

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

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdc/pipeline.hpp"
#include "sdc/version.hpp"

namespace {

// Exit codes: 0 ok, 1 usage, 2 data error, 3 privacy verification failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPrivacy = 3;

sdc::Date parse_date_flag(const std::string& value, const char* flag) {
  auto d = sdc::parse_date(value);
  if (!d) {
    throw sdc::DataError(std::string(flag) + ": invalid date '" + value +
                         "' (expected YYYY-MM-DD)");
  }
  return *d;
}

int cmd_validate_config(const std::string& schema_path) {
  nlohmann::json j = nlohmann::json::parse(sdc::read_text_file(schema_path));
  sdc::Schema schema = sdc::schema_from_json(
      j, std::filesystem::path(schema_path).parent_path());
  const auto report = sdc::validate_schema(schema);
  if (report.ok()) {
    std::printf("ok: %s (%zu fields, %zu quasi-identifiers, k=%d, l=%d)\n",
                schema.name.c_str(), schema.fields.size(),
                schema.qi_order.size(), schema.thresholds.k,
                schema.thresholds.l);
    return kExitOk;
  }
  for (const auto& f : report.findings) {
    std::printf("finding [%s]%s%s: %s\n", f.code.c_str(),
                f.field.empty() ? "" : " ", f.field.c_str(),
                f.message.c_str());
  }
  std::printf("%zu finding(s)\n", report.findings.size());
  return kExitData;
}

struct RunFlags {
  std::string schema;
  std::vector<std::string> inputs;
  std::string manifest;
  std::string out;
  std::string release_date;
  std::string processing_date;
  int k = 0;
  int l = -1;
  int delay_days = -1;
  bool allow_infeasible = false;
  bool audit_plan = false;
};

int cmd_run(const RunFlags& flags) {
  sdc::RunConfig config;
  config.schema_path = flags.schema;
  for (const auto& p : flags.inputs) config.inputs.emplace_back(p);
  config.manifest_path = flags.manifest;
  config.out_dir = flags.out;
  config.release_date = parse_date_flag(flags.release_date, "--release-date");
  if (!flags.processing_date.empty()) {
    config.processing_date =
        parse_date_flag(flags.processing_date, "--processing-date");
  }
  if (flags.k > 0) config.k_override = flags.k;
  if (flags.l >= 0) config.l_override = flags.l;
  if (flags.delay_days >= 0) config.delay_override = flags.delay_days;
  config.allow_infeasible = flags.allow_infeasible;
  config.emit_audit_plan = flags.audit_plan;

  sdc::RunResult result = sdc::run_pipeline(config);
  const bool released = sdc::write_run_outputs(result, config);

  std::printf("rows: read=%zu dedup=%zu window=%zu released=%zu\n",
              result.rows_read, result.rows_after_dedup,
              result.rows_after_window, result.released.row_count());
  std::printf("suppression: %zu action(s)%s\n", result.plan.actions.size(),
              result.plan.infeasible_release ? " [infeasible override]" : "");
  if (result.rows_after_window == 0 && result.rows_after_dedup > 0) {
    std::printf("warning: release window excluded every row\n");
  }
  if (result.verification_passed()) {
    std::printf("verification: pass (min class frequency %zu)\n",
                result.report.k_min_frequency);
    return kExitOk;
  }
  std::printf("verification: FAIL (%zu k, %zu l, %zu pii)\n",
              result.report.k_violations.size(),
              result.report.l_violations.size(),
              result.report.pii_findings.size());
  if (result.plan.infeasible_release && released) {
    std::printf(
        "warning: released under the infeasibility override; the dataset "
        "does NOT meet k-anonymity\n");
  } else if (!released) {
    std::printf("release withheld; see privacy_report.json\n");
  }
  return kExitPrivacy;
}

int cmd_verify(const std::string& schema_path, const std::string& input,
               int k, int l, const std::string& out) {
  sdc::Schema schema = sdc::load_schema(schema_path);
  if (k > 0) schema.thresholds.k = k;
  if (l >= 0) schema.thresholds.l = l;
  sdc::Dataset ds = sdc::read_dataset(input, schema);
  sdc::PrivacyReport report = sdc::verify_dataset(ds, schema);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    sdc::write_text_file(std::filesystem::path(out) / "privacy_report.json",
                         report.to_json().dump(2) + "\n");
  }
  std::printf("%zu rows; min class frequency %zu\n", ds.row_count(),
              report.k_min_frequency);
  std::printf("k-anonymity (k=%d): %s (%zu violating class(es))\n",
              schema.thresholds.k,
              report.k_violations.empty() ? "pass" : "FAIL",
              report.k_violations.size());
  std::printf("l-diversity (l=%d): %s (%zu violating class(es))\n",
              schema.thresholds.l,
              report.l_violations.empty() ? "pass" : "FAIL",
              report.l_violations.size());
  std::printf("pii scan: %s (%zu finding(s))\n",
              report.pii_findings.empty() ? "pass" : "FAIL",
              report.pii_findings.size());
  return report.pass() ? kExitOk : kExitPrivacy;
}

int cmd_report(const std::string& plan_path, std::size_t rows,
               const std::string& schema_path, const std::string& out) {
  sdc::SuppressionPlan plan = sdc::plan_from_audit_json(
      nlohmann::json::parse(sdc::read_text_file(plan_path)));
  std::vector<std::string> order;
  if (!schema_path.empty()) {
    order = sdc::summary_field_order(sdc::load_schema(schema_path));
  }
  sdc::SuppressionSummary summary =
      sdc::suppression_summary(plan, rows, order);
  const std::string table = sdc::summary_to_table(summary);
  std::fputs(table.c_str(), stdout);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    sdc::write_text_file(
        std::filesystem::path(out) / "suppression_summary.csv",
        sdc::summary_to_csv(summary));
    sdc::write_text_file(
        std::filesystem::path(out) / "suppression_summary.txt", table);
  }
  return kExitOk;
}

int cmd_link_scan(const std::string& schema_path, const std::string& catalog,
                  const std::string& synonyms, const std::string& out) {
  sdc::Schema schema = sdc::load_schema(schema_path);
  auto entries = sdc::load_catalog(catalog);
  sdc::SynonymMap map;
  if (!synonyms.empty()) map = sdc::SynonymMap::load(synonyms);
  sdc::LinkageReport report = sdc::link_scan(schema, entries, map);
  for (const auto& e : report.entries) {
    std::string shared;
    for (const auto& s : e.shared) {
      if (!shared.empty()) shared += ", ";
      shared += s;
    }
    std::printf("%3zu. overlap=%zu  %s%s%s\n", e.rank, e.overlap,
                e.name.c_str(), shared.empty() ? "" : "  shares: ",
                shared.c_str());
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    sdc::write_text_file(std::filesystem::path(out) / "linkage_report.json",
                         report.to_json().dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-preserving release pipeline for tabular microdata"};
  app.set_version_flag("--version", std::string(sdc::kToolVersion));
  app.require_subcommand(1);

  auto* validate =
      app.add_subcommand("validate-config", "Check a schema configuration");
  std::string v_schema;
  validate->add_option("--schema", v_schema, "Schema JSON file")->required();

  auto* run = app.add_subcommand("run", "Execute the full privacy pipeline");
  RunFlags rf;
  run->add_option("--schema", rf.schema, "Schema JSON file")->required();
  run->add_option("--input", rf.inputs, "Input CSV file (repeatable)");
  run->add_option("--manifest", rf.manifest,
                  "Sidecar manifest mapping inputs to submission dates");
  run->add_option("--out", rf.out, "Output directory")->required();
  run->add_option("--release-date", rf.release_date, "Release date")
      ->required();
  run->add_option("--processing-date", rf.processing_date,
                  "Date-logic reference date (defaults to release date)");
  run->add_option("--k", rf.k, "Override the schema's k threshold");
  run->add_option("--l", rf.l, "Override the schema's l threshold");
  run->add_option("--delay-days", rf.delay_days,
                  "Override the release delay window");
  run->add_flag("--allow-infeasible", rf.allow_infeasible,
                "Release fully suppressed rows when k cannot be met");
  run->add_flag("--audit-plan", rf.audit_plan,
                "Also write the suppression plan as audit_plan.json");

  auto* verify =
      app.add_subcommand("verify", "Independently verify a released dataset");
  std::string ve_schema, ve_input, ve_out;
  int ve_k = 0, ve_l = -1;
  verify->add_option("--schema", ve_schema, "Schema JSON file")->required();
  verify->add_option("--input", ve_input, "Dataset CSV to verify")->required();
  verify->add_option("--k", ve_k, "Override k");
  verify->add_option("--l", ve_l, "Override l");
  verify->add_option("--out", ve_out, "Directory for privacy_report.json");

  auto* report = app.add_subcommand(
      "report", "Rebuild a suppression summary from an audit plan");
  std::string rp_plan, rp_schema, rp_out;
  std::size_t rp_rows = 0;
  report->add_option("--plan", rp_plan, "audit_plan.json file")->required();
  report->add_option("--rows", rp_rows, "Released row count")->required();
  report->add_option("--schema", rp_schema, "Schema (pins field order)");
  report->add_option("--out", rp_out, "Output directory");

  auto* link = app.add_subcommand(
      "link-scan", "Rank catalog datasets by quasi-identifier overlap");
  std::string ls_schema, ls_catalog, ls_synonyms, ls_out;
  link->add_option("--schema", ls_schema, "Schema JSON file")->required();
  link->add_option("--catalog", ls_catalog, "Catalog JSON file")->required();
  link->add_option("--synonyms", ls_synonyms, "Column synonym map JSON");
  link->add_option("--out", ls_out, "Directory for linkage_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate_config(v_schema);
    if (run->parsed()) return cmd_run(rf);
    if (verify->parsed()) return cmd_verify(ve_schema, ve_input, ve_k, ve_l,
                                            ve_out);
    if (report->parsed()) return cmd_report(rp_plan, rp_rows, rp_schema,
                                            rp_out);
    if (link->parsed()) return cmd_link_scan(ls_schema, ls_catalog,
                                             ls_synonyms, ls_out);
  } catch (const sdc::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const sdc::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}

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

#ifndef SDC_TESTS_SYNTHETIC_HPP
#define SDC_TESTS_SYNTHETIC_HPP

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "sdc/csv.hpp"
#include "sdc/date.hpp"
#include "testutil.hpp"

namespace sdc::test {

// Synthetic case records shaped like the scientific-use input: the 31
// released columns in schema order followed by the auxiliary source columns.
// Entirely fabricated data; distributions are skewed enough to exercise
// suppression without drowning in it.

inline const std::vector<std::pair<const char*, const char*>>&
synthetic_county_pool() {
  // Subset of data/us_county_fips.csv; keep the two lists in sync.
  static const std::vector<std::pair<const char*, const char*>> pool = {
      {"GA", "Fulton"},       {"GA", "DeKalb"},    {"GA", "Cobb"},
      {"GA", "Gwinnett"},     {"GA", "Chatham"},   {"CA", "Los Angeles"},
      {"CA", "San Diego"},    {"CA", "Orange"},    {"CA", "San Francisco"},
      {"CA", "Alameda"},      {"CA", "Sacramento"},{"TX", "Harris"},
      {"TX", "Dallas"},       {"TX", "Tarrant"},   {"TX", "Bexar"},
      {"TX", "Travis"},       {"NY", "Kings"},     {"NY", "Queens"},
      {"NY", "Bronx"},        {"NY", "New York"},  {"NY", "Richmond"},
      {"IL", "Cook"},         {"IL", "DuPage"},    {"FL", "Miami-Dade"},
      {"FL", "Broward"},      {"FL", "Orange"},    {"WA", "King"},
      {"WA", "Pierce"},       {"AZ", "Maricopa"},  {"PA", "Philadelphia"},
      {"PA", "Allegheny"},    {"OH", "Cuyahoga"},  {"OH", "Franklin"},
      {"MI", "Wayne"},        {"MN", "Hennepin"},  {"CO", "Denver"},
      {"NV", "Clark"},        {"MD", "Montgomery"},{"VA", "Fairfax"},
      {"MA", "Suffolk"},
  };
  return pool;
}

namespace synth_detail {

inline const char* pick(Rng& rng,
                        std::initializer_list<std::pair<unsigned, const char*>>
                            options) {
  unsigned total = 0;
  for (const auto& o : options) total += o.first;
  std::size_t roll = rng.below(total);
  for (const auto& o : options) {
    if (roll < o.first) return o.second;
    roll -= o.first;
  }
  return "";
}

inline const char* age_label(int age) {
  if (age < 10) return "0 - 9 Years";
  if (age < 20) return "10 - 19 Years";
  if (age < 40) return "20 - 39 Years";
  if (age < 50) return "40 - 49 Years";
  if (age < 60) return "50 - 59 Years";
  if (age < 70) return "60 - 69 Years";
  if (age < 80) return "70 - 79 Years";
  return "80 + Years";
}

inline const char* yn_cell(Rng& rng, unsigned yes = 10) {
  return pick(rng, {{yes, "Yes"},
                    {70, "No"},
                    {15, "Unknown"},
                    {4, "Missing"},
                    {1, ""}});
}

}  // namespace synth_detail

struct SyntheticOptions {
  std::size_t rows = 200;
  std::uint64_t seed = 1;
  // Leave some calculated cells blank and provide the auxiliary inputs that
  // fill them (age, date_of_birth, race, ethnicity).
  bool exercise_recode = true;
  unsigned duplicate_percent = 0;  // resubmissions of an earlier case_id
  std::string id_prefix = "C";
};

inline const std::vector<std::string>& synthetic_columns() {
  static const std::vector<std::string> columns = {
      "current_status", "cdc_report_dt", "sex", "age_group",
      "race_ethnicity_combined", "county_fips_code", "res_county", "res_state",
      "onset_dt", "pos_spec_dt", "hosp_yn", "icu_yn", "death_yn", "hc_work_yn",
      "pna_yn", "abxchest_yn", "acuterespdistress_yn", "mechvent_yn",
      "fever_yn", "sfever_yn", "chills_yn", "myalgia_yn", "runnose_yn",
      "sthroat_yn", "cough_yn", "sob_yn", "nauseavomit_yn", "headache_yn",
      "abdom_yn", "diarrhea_yn", "medcond_yn",
      "case_id", "age", "date_of_birth", "race", "ethnicity"};
  return columns;
}

inline std::string synthetic_scientific_csv(const SyntheticOptions& opt) {
  using synth_detail::pick;
  Rng rng(opt.seed);
  const auto& counties = synthetic_county_pool();
  const Date report_base{2020, 3, 1};

  std::string out;
  out.reserve(opt.rows * 230 + 512);
  csv::append_row(out, synthetic_columns());

  std::vector<std::string> row(synthetic_columns().size());
  char idbuf[32];
  for (std::size_t r = 0; r < opt.rows; ++r) {
    for (auto& cell : row) cell.clear();

    std::size_t id_index = r;
    if (opt.duplicate_percent && r > 10 &&
        rng.chance_percent(opt.duplicate_percent)) {
      id_index = rng.below(r);
    }
    std::snprintf(idbuf, sizeof(idbuf), "%s%07zu", opt.id_prefix.c_str(),
                  id_index);
    row[31] = idbuf;

    row[0] = pick(rng, {{85, "Laboratory-confirmed case"},
                        {14, "Probable Case"},
                        {1, ""}});

    const Date report =
        add_days(report_base, static_cast<std::int64_t>(rng.below(270)));
    row[1] = to_string(report);

    row[2] = pick(rng, {{47, "Male"}, {48, "Female"}, {3, "Unknown"},
                        {1, "Other"}, {1, ""}});

    // Age arrives pre-binned, as a raw age, or through date of birth.
    const int age = static_cast<int>(rng.below(96));
    if (opt.exercise_recode && rng.chance_percent(15)) {
      if (rng.chance_percent(70)) {
        row[32] = std::to_string(age);
      } else if (rng.chance_percent(85)) {
        row[33] = to_string(add_days(report, -(365LL * age + 180)));
      }
      // otherwise nothing: recodes to Unknown
    } else {
      row[3] = synth_detail::age_label(age);
    }

    if (opt.exercise_recode && rng.chance_percent(12)) {
      row[34] = pick(rng, {{30, "White"},
                           {18, "Black"},
                           {10, "Asian"},
                           {4, "American Indian/Alaska Native"},
                           {2, "Native Hawaiian/Other Pacific Islander"},
                           {6, "White;Black"},
                           {4, "Other"},
                           {16, "Unknown"},
                           {10, ""}});
      row[35] = pick(rng, {{25, "Hispanic/Latino"},
                           {55, "Non-Hispanic"},
                           {15, "Unknown"},
                           {5, ""}});
    } else {
      row[4] = pick(rng,
                    {{4, "American Indian/Alaska Native, Non-Hispanic"},
                     {8, "Asian, Non-Hispanic"},
                     {14, "Black, Non-Hispanic"},
                     {6, "Multiple/Other, Non-Hispanic"},
                     {2, "Native Hawaiian/Other Pacific Islander, Non-Hispanic"},
                     {34, "White, Non-Hispanic"},
                     {18, "Hispanic/Latino"},
                     {12, "Unknown"},
                     {2, ""}});
    }

    // county_fips_code (row[5]) stays blank: the pipeline derives it.
    const std::size_t skew = std::min(rng.below(counties.size()),
                                      rng.below(counties.size()));
    if (!rng.chance_percent(4)) {
      row[6] = counties[skew].second;
      row[7] = counties[skew].first;
      if (rng.chance_percent(1)) row[6] = "Xanadu";  // unmatched lookup
    } else if (rng.chance_percent(50)) {
      row[7] = counties[skew].first;  // county unknown, state known
    }
    // otherwise both blank: res_state falls back to the jurisdiction

    if (!rng.chance_percent(10)) {
      row[8] = to_string(add_days(report, -static_cast<std::int64_t>(
                                              rng.below(12))));
    }
    if (!rng.chance_percent(15)) {
      const Date onset_or_report =
          row[8].empty() ? report : *parse_date(row[8]);
      row[9] = to_string(add_days(onset_or_report,
                                  static_cast<std::int64_t>(rng.below(5))));
    }

    row[10] = synth_detail::yn_cell(rng, 12);  // hosp_yn
    row[11] = synth_detail::yn_cell(rng, 4);   // icu_yn
    row[12] = synth_detail::yn_cell(rng, 3);   // death_yn
    row[13] = pick(rng, {{5, "Yes"}, {78, "No"}, {14, "Unknown"},
                         {2, "Missing"}, {1, ""}});  // hc_work_yn
    row[14] = synth_detail::yn_cell(rng, 6);   // pna_yn
    row[15] = pick(rng, {{6, "Yes"}, {60, "No"}, {20, "Unknown"},
                         {4, "Missing"}, {10, "N/A"}});  // abxchest_yn
    row[16] = synth_detail::yn_cell(rng, 3);   // acuterespdistress_yn
    row[17] = synth_detail::yn_cell(rng, 3);   // mechvent_yn
    row[18] = synth_detail::yn_cell(rng, 30);  // fever_yn
    row[19] = synth_detail::yn_cell(rng, 25);  // sfever_yn
    row[20] = synth_detail::yn_cell(rng, 20);  // chills_yn
    row[21] = synth_detail::yn_cell(rng, 25);  // myalgia_yn
    row[22] = synth_detail::yn_cell(rng, 18);  // runnose_yn
    row[23] = synth_detail::yn_cell(rng, 20);  // sthroat_yn
    row[24] = synth_detail::yn_cell(rng, 40);  // cough_yn
    row[25] = synth_detail::yn_cell(rng, 28);  // sob_yn
    row[26] = synth_detail::yn_cell(rng, 12);  // nauseavomit_yn
    row[27] = synth_detail::yn_cell(rng, 30);  // headache_yn
    row[28] = synth_detail::yn_cell(rng, 10);  // abdom_yn
    row[29] = synth_detail::yn_cell(rng, 15);  // diarrhea_yn
    row[30] = synth_detail::yn_cell(rng, 25);  // medcond_yn

    csv::append_row(out, row);
  }
  return out;
}

// A small deterministic cluster sharing one quasi-identifier signature and a
// single specimen date; large enough to pass k, undiverse enough to trip l.
inline std::string synthetic_l_cluster(std::size_t count,
                                       std::size_t id_start) {
  std::string out;
  std::vector<std::string> row(synthetic_columns().size());
  char idbuf[32];
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& cell : row) cell.clear();
    std::snprintf(idbuf, sizeof(idbuf), "L%07zu", id_start + i);
    row[31] = idbuf;
    row[0] = "Laboratory-confirmed case";
    row[1] = "2020-09-14";
    row[2] = "Female";
    row[3] = "0 - 9 Years";
    row[4] = "Asian, Non-Hispanic";
    row[6] = "Fulton";
    row[7] = "GA";
    row[8] = "2020-09-10";
    row[9] = "2020-09-12";
    row[10] = "No";
    row[11] = "No";
    row[12] = "No";
    row[13] = "No";
    for (std::size_t c = 14; c <= 30; ++c) row[c] = "No";
    csv::append_row(out, row);
  }
  return out;
}

}  // namespace sdc::test

#endif  // SDC_TESTS_SYNTHETIC_HPP

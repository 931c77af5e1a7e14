/* Copyright 2026 The stpeval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef STPEVAL_REPORT_HPP
#define STPEVAL_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval {

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

// Events worth surfacing next to the numbers. Serialized as a list so
// an event-free report still carries an explicit empty `flags` array.
struct ReportFlags {
  std::int64_t psnr_cap_frames = 0;    // zero-error frames scored at the cap
  std::int64_t csi_vacuous = 0;        // thresholds scored 1 with no events
  std::int64_t clamp_events = 0;       // predictions clamped beyond tolerance
  std::int64_t climatology_fallbacks = 0;  // day 366 -> 365 substitutions
  std::int64_t skipped = 0;            // too-short sequences

  bool operator==(const ReportFlags&) const = default;
};

struct MetricReport {
  std::string task;
  std::string dimension;
  std::int64_t dt = 1;
  std::string train_provenance;
  std::string eval_provenance;
  std::int64_t offered = 0;
  std::int64_t consumed = 0;
  std::vector<std::int64_t> skipped_indices;
  std::vector<std::string> metric_names;
  // per metric: one value per consumed sequence, in source index order
  std::map<std::string, std::vector<double>> per_sequence;
  // per metric: horizon-length mean curve over sequences
  std::map<std::string, std::vector<double>> per_frame_index;
  std::map<std::string, double> aggregate;
  ReportFlags flags;
  std::string engine_version = kEngineVersion;
  std::string config_hash;

  bool operator==(const MetricReport&) const = default;
};

// Arithmetic mean with a deterministic pairwise reduction tree; the
// curves entry averages each frame index across sequences.
double aggregate_mean(const std::vector<double>& per_sequence_values);
std::vector<double> aggregate_curves(
    const std::vector<std::vector<double>>& per_sequence_curves);

struct StabilityReport {
  std::string metric;
  std::vector<double> runs;
  double std_dev = 0.0;  // sample (n-1) over all runs
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided, equal-variance two-sample t-test
  bool degenerate_variance = false;
  bool odd_run_excluded = false;
};

// Split runs into first/second half (odd trailing run excluded,
// flagged), pooled two-sample t-test, p from the regularized
// incomplete beta.
StabilityReport stability(const std::vector<double>& runs,
                          const std::string& metric_name = "");

// Student's t distribution machinery (exposed for reuse and tests).
double regularized_incomplete_beta(double x, double a, double b);
double student_t_cdf(double x, double dof);

std::string serialize(const MetricReport& r);
MetricReport report_from_json(const std::string& json_text);
void save_report(const MetricReport& r, const std::filesystem::path& path);
MetricReport load_report(const std::filesystem::path& path);

std::string to_csv(const MetricReport& r);

std::string serialize(const StabilityReport& r);

// One binary PGM (P5, 1 channel) or PPM (P6, 3 channels) per frame,
// values mapped from the declared range to 0..255 with round-half-even.
void dump_frames(const SequenceTensor& seq, const std::filesystem::path& dir);

// FNV-1a over a canonical config string; stamped into reports.
std::string config_hash_hex(const std::string& canonical_config);

}  // namespace stpeval

#endif  // STPEVAL_REPORT_HPP

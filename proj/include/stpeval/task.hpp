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

#ifndef STPEVAL_TASK_HPP
#define STPEVAL_TASK_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval {

// Sequence counts of a dataset's canonical splits; informational.
struct SplitSizes {
  std::optional<std::int64_t> train;
  std::optional<std::int64_t> val;
  std::optional<std::int64_t> test;
  bool operator==(const SplitSizes&) const = default;
};

// One dataset's evaluation contract: window lengths, dims, declared
// range, robustness strides and the metric list to run.
struct TaskSpec {
  std::string name;
  std::int64_t l_in = 1;
  std::int64_t l_s = 1;
  std::optional<std::int64_t> l_l;
  std::int64_t channels = 1;
  std::int64_t height = 1;
  std::int64_t width = 1;
  ValueRange value_range{0.0, 1.0};
  std::vector<std::int64_t> dt_multipliers{1, 2, 3};
  std::vector<std::string> metrics;

  // weather-metric configuration (optional)
  std::vector<double> latitudes;              // per-row degrees; empty = derive
  std::vector<double> csi_thresholds;         // on the 0..255 rescaled axis
  std::vector<std::int64_t> nino_region;      // row0, rows, col0, cols
  std::int64_t wrmse_channel = 0;
  std::int64_t acc_channel = 0;
  std::optional<std::string> climatology;     // NPY path, sidecar alongside

  SplitSizes splits;

  void validate() const;
  bool operator==(const TaskSpec&) const = default;
};

// Six VIL thresholds on the 0-255 axis used for the CSI mean.
const std::vector<double>& default_csi_thresholds();

// Default equatorial-Pacific crop (3x11) inside the 24x48 ENSO grid.
const std::vector<std::int64_t>& default_nino_region();

// The benchmark's per-dataset contracts, keyed by lower-case name.
std::vector<std::string> builtin_task_names();
TaskSpec builtin_task(const std::string& name);

TaskSpec load_task(const std::filesystem::path& path);
void save_task(const TaskSpec& t, const std::filesystem::path& path);
std::string task_to_json(const TaskSpec& t);
TaskSpec task_from_json(const std::string& json_text);

}  // namespace stpeval

#endif  // STPEVAL_TASK_HPP

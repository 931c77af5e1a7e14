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

#ifndef STPEVAL_WEATHER_METRICS_HPP
#define STPEVAL_WEATHER_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval {

// Per-row latitudes with cosine weights normalized so mean(alpha) == 1.
struct LatitudeGrid {
  std::vector<double> phi;    // degrees, |phi| < 90
  std::vector<double> alpha;  // H * cos(phi_w) / sum_w' cos(phi_w')

  std::int64_t rows() const { return static_cast<std::int64_t>(phi.size()); }
};

LatitudeGrid latitude_weights(const std::vector<double>& phi_degrees);

// Equiangular global grid with H cell-centered rows from north to
// south: phi_i = 90 - (i + 0.5) * 180 / H. Poles stay excluded.
LatitudeGrid equiangular_grid(std::int64_t rows);

// Latitude-weighted RMSE of one channel. Row index carries the weight.
struct PerFrameWeather {
  double value = 0.0;
  std::vector<double> per_frame;
};
PerFrameWeather wrmse_frames(const SequenceTensor& pred,
                             const SequenceTensor& target,
                             const LatitudeGrid& grid, std::int64_t channel);
double wrmse(const SequenceTensor& pred, const SequenceTensor& target,
             const LatitudeGrid& grid, std::int64_t channel);

// Day-of-year keyed per-pixel means, the anomaly reference for ACC.
class Climatology {
 public:
  Climatology(std::int64_t channels, std::int64_t height, std::int64_t width);

  // All-days-populated zero reference: anomalies reduce to raw values.
  static Climatology zeros(std::int64_t channels, std::int64_t height,
                           std::int64_t width);

  std::int64_t channels() const { return c_; }
  std::int64_t height() const { return h_; }
  std::int64_t width() const { return w_; }

  bool populated(std::int64_t day_of_year) const;
  // Day 366 falls back to 365 when unpopulated; reported through
  // `used_fallback`.
  const double* day_mean(std::int64_t day_of_year,
                         bool* used_fallback = nullptr) const;

  void accumulate(std::int64_t day_of_year, const SequenceTensor& frame);
  void finalize();  // divide accumulated sums by their counts

  void save(const std::filesystem::path& npy_path) const;  // + .json sidecar
  static Climatology load(const std::filesystem::path& npy_path);

  static constexpr std::int64_t kDays = 366;

 private:
  std::int64_t c_, h_, w_;
  std::vector<double> means_;       // [366, C, H, W]; one frame in zero mode
  std::vector<std::int64_t> counts_;  // per day
  bool finalized_ = false;
  bool zero_mode_ = false;
};

// Per-day per-pixel arithmetic mean of the given history.
Climatology fit_climatology(
    const std::vector<std::pair<std::int64_t, SequenceTensor>>& history);

// Per-frame anomaly correlation (pred/target vs climatology), weighted
// by alpha, averaged over frames.
PerFrameWeather acc_frames(const SequenceTensor& pred,
                           const SequenceTensor& target,
                           const Climatology& clim, const LatitudeGrid& grid,
                           std::int64_t channel,
                           const std::vector<std::int64_t>& dates);
double acc(const SequenceTensor& pred, const SequenceTensor& target,
           const Climatology& clim, const LatitudeGrid& grid,
           std::int64_t channel, const std::vector<std::int64_t>& dates);

struct ContingencyTable {
  std::int64_t hit = 0;
  std::int64_t mis = 0;
  std::int64_t fas = 0;
  std::int64_t cr = 0;

  std::int64_t total() const { return hit + mis + fas + cr; }
};

// Joint thresholding after both fields are linearly rescaled from
// `range` to the 0..255 axis.
ContingencyTable contingency(const SequenceTensor& pred,
                             const SequenceTensor& target, double tau,
                             const ValueRange& range);

struct CsiResult {
  std::vector<double> per_threshold;
  double mean = 0.0;
  std::int64_t vacuous_thresholds = 0;  // hit+fas+mis == 0, scored as 1
};

// CSI = hit / (hit + fas + mis) per threshold, then the plain mean.
CsiResult csi_mean(const SequenceTensor& pred, const SequenceTensor& target,
                   const std::vector<double>& taus, const ValueRange& range);

struct NinoSeries {
  std::vector<double> values;  // length T - 2
};

struct NinoRegion {
  std::int64_t row_start = 11;
  std::int64_t row_len = 3;
  std::int64_t col_start = 20;
  std::int64_t col_len = 11;
};

// Three-month moving average of the region-mean field.
NinoSeries nino34_index(const SequenceTensor& seq, const NinoRegion& region);

// Pearson correlation of the two index series about their own means.
double c_nino34(const NinoSeries& pred_series, const NinoSeries& target_series);

}  // namespace stpeval

#endif  // STPEVAL_WEATHER_METRICS_HPP

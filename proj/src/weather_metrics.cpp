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

#include "stpeval/weather_metrics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "json.hpp"
#include "stpeval/detail/span_dispatch.hpp"
#include "stpeval/npy.hpp"
#include "stpeval/parallel.hpp"

namespace stpeval {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_same_shape(const SequenceTensor& pred,
                      const SequenceTensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("pred/target shapes differ");
  }
}

void check_channel(const SequenceTensor& seq, std::int64_t channel) {
  if (channel < 0 || channel >= seq.shape().c) {
    throw ShapeError("channel " + std::to_string(channel) +
                     " out of range for C=" + std::to_string(seq.shape().c));
  }
}

}  // namespace

LatitudeGrid latitude_weights(const std::vector<double>& phi_degrees) {
  if (phi_degrees.empty()) throw DomainError("latitude list is empty");
  double cos_sum = 0.0;
  for (const double phi : phi_degrees) {
    if (!(std::abs(phi) < 90.0)) {
      throw DomainError("latitude " + std::to_string(phi) +
                        " is at or beyond a pole");
    }
    cos_sum += std::cos(phi * kDegToRad);
  }
  LatitudeGrid grid;
  grid.phi = phi_degrees;
  grid.alpha.resize(phi_degrees.size());
  const double rows = static_cast<double>(phi_degrees.size());
  for (std::size_t i = 0; i < phi_degrees.size(); ++i) {
    grid.alpha[i] = rows * std::cos(phi_degrees[i] * kDegToRad) / cos_sum;
  }
  return grid;
}

LatitudeGrid equiangular_grid(std::int64_t rows) {
  if (rows < 1) throw DomainError("grid needs at least one row");
  std::vector<double> phi(static_cast<std::size_t>(rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    phi[static_cast<std::size_t>(i)] =
        90.0 - (static_cast<double>(i) + 0.5) * 180.0 / static_cast<double>(rows);
  }
  return latitude_weights(phi);
}

PerFrameWeather wrmse_frames(const SequenceTensor& pred,
                             const SequenceTensor& target,
                             const LatitudeGrid& grid, std::int64_t channel) {
  check_same_shape(pred, target);
  check_channel(pred, channel);
  const Shape4& s = pred.shape();
  if (grid.rows() != s.h) {
    throw ShapeError("latitude grid rows != H");
  }
  const std::int64_t plane = s.h * s.w;
  PerFrameWeather out;
  out.per_frame.resize(static_cast<std::size_t>(s.t));
  detail::with_spans(pred, target, [&](auto va, auto vb) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < s.t; ++t) {
      const auto* pa = va.data() + (t * s.c + channel) * plane;
      const auto* pb = vb.data() + (t * s.c + channel) * plane;
      double acc = 0.0;
      for (std::int64_t h = 0; h < s.h; ++h) {
        const double alpha = grid.alpha[static_cast<std::size_t>(h)];
        double row = 0.0;
        for (std::int64_t w = 0; w < s.w; ++w) {
          const double d = static_cast<double>(pb[h * s.w + w]) -
                           static_cast<double>(pa[h * s.w + w]);
          row += d * d;
        }
        acc += alpha * row;
      }
      out.per_frame[static_cast<std::size_t>(t)] =
          std::sqrt(acc / static_cast<double>(plane));
    }
  });
  out.value = par::pairwise_sum(out.per_frame) / static_cast<double>(s.t);
  return out;
}

double wrmse(const SequenceTensor& pred, const SequenceTensor& target,
             const LatitudeGrid& grid, std::int64_t channel) {
  return wrmse_frames(pred, target, grid, channel).value;
}

Climatology::Climatology(std::int64_t channels, std::int64_t height,
                         std::int64_t width)
    : c_(channels), h_(height), w_(width) {
  if (c_ < 1 || h_ < 1 || w_ < 1) throw ShapeError("climatology dims >= 1");
  means_.assign(static_cast<std::size_t>(kDays * c_ * h_ * w_), 0.0);
  counts_.assign(static_cast<std::size_t>(kDays), 0);
}

Climatology Climatology::zeros(std::int64_t channels, std::int64_t height,
                               std::int64_t width) {
  Climatology clim(channels, height, width);
  clim.means_.assign(static_cast<std::size_t>(channels * height * width),
                     0.0);
  clim.zero_mode_ = true;
  clim.finalized_ = true;
  return clim;
}

bool Climatology::populated(std::int64_t day_of_year) const {
  if (day_of_year < 1 || day_of_year > kDays) return false;
  if (zero_mode_) return true;
  return counts_[static_cast<std::size_t>(day_of_year - 1)] > 0;
}

const double* Climatology::day_mean(std::int64_t day_of_year,
                                    bool* used_fallback) const {
  if (used_fallback) *used_fallback = false;
  if (day_of_year < 1 || day_of_year > kDays) {
    throw CoverageError("day-of-year " + std::to_string(day_of_year) +
                        " outside 1..366");
  }
  if (zero_mode_) return means_.data();
  std::int64_t day = day_of_year;
  if (!populated(day) && day == 366 && populated(365)) {
    day = 365;  // leap-day fallback
    if (used_fallback) *used_fallback = true;
  }
  if (!populated(day)) {
    throw CoverageError("climatology day " + std::to_string(day_of_year) +
                        " is not populated");
  }
  return means_.data() + (day - 1) * c_ * h_ * w_;
}

void Climatology::accumulate(std::int64_t day_of_year,
                             const SequenceTensor& frame) {
  if (finalized_ || zero_mode_) {
    throw ConfigError("climatology already finalized");
  }
  if (day_of_year < 1 || day_of_year > kDays) {
    throw CoverageError("day-of-year outside 1..366");
  }
  const Shape4& s = frame.shape();
  if (s.t != 1 || s.c != c_ || s.h != h_ || s.w != w_) {
    throw ShapeError("climatology frame must be [1,C,H,W] matching dims");
  }
  double* dst = means_.data() + (day_of_year - 1) * c_ * h_ * w_;
  const std::vector<double> v = frame.to_f64();
  for (std::size_t i = 0; i < v.size(); ++i) dst[i] += v[i];
  ++counts_[static_cast<std::size_t>(day_of_year - 1)];
}

void Climatology::finalize() {
  if (finalized_) return;
  for (std::int64_t d = 0; d < kDays; ++d) {
    const std::int64_t n = counts_[static_cast<std::size_t>(d)];
    if (n > 1) {
      double* dst = means_.data() + d * c_ * h_ * w_;
      for (std::int64_t i = 0; i < c_ * h_ * w_; ++i) {
        dst[i] /= static_cast<double>(n);
      }
    }
  }
  finalized_ = true;
}

void Climatology::save(const std::filesystem::path& npy_path) const {
  if (zero_mode_) {
    throw ConfigError("the implicit zero climatology is not persistable");
  }
  npy::Array a;
  a.dtype = Dtype::F64;
  a.shape = {kDays, c_, h_, w_};
  a.f64 = means_;
  npy::write(npy_path, a);

  nlohmann::ordered_json sidecar;
  std::vector<std::int64_t> days;
  for (std::int64_t d = 1; d <= kDays; ++d) {
    if (populated(d)) days.push_back(d);
  }
  sidecar["populated_days"] = days;
  sidecar["channels"] = c_;
  sidecar["height"] = h_;
  sidecar["width"] = w_;
  std::filesystem::path jpath = npy_path;
  jpath += ".json";
  std::ofstream f(jpath, std::ios::trunc);
  if (!f) throw IoError("cannot write sidecar " + jpath.string());
  f << sidecar.dump(2) << "\n";
}

Climatology Climatology::load(const std::filesystem::path& npy_path) {
  npy::Array a = npy::read(npy_path);
  if (a.shape.size() != 4 || a.shape[0] != kDays || a.dtype != Dtype::F64) {
    throw ShapeError("climatology must be f64 [366,C,H,W]");
  }
  Climatology clim(a.shape[1], a.shape[2], a.shape[3]);
  clim.means_ = std::move(a.f64);

  std::filesystem::path jpath = npy_path;
  jpath += ".json";
  std::ifstream f(jpath);
  if (!f) throw IoError("missing climatology sidecar " + jpath.string());
  nlohmann::json sidecar;
  try {
    f >> sidecar;
    for (const auto& d : sidecar.at("populated_days")) {
      clim.counts_[d.get<std::size_t>() - 1] = 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad climatology sidecar: ") + e.what());
  }
  clim.finalized_ = true;
  return clim;
}

Climatology fit_climatology(
    const std::vector<std::pair<std::int64_t, SequenceTensor>>& history) {
  if (history.empty()) throw EmptyDatasetError("climatology history is empty");
  const Shape4& s0 = history.front().second.shape();
  Climatology clim(s0.c, s0.h, s0.w);
  for (const auto& [day, frame] : history) {
    clim.accumulate(day, frame);
  }
  clim.finalize();
  return clim;
}

PerFrameWeather acc_frames(const SequenceTensor& pred,
                           const SequenceTensor& target,
                           const Climatology& clim, const LatitudeGrid& grid,
                           std::int64_t channel,
                           const std::vector<std::int64_t>& dates) {
  check_same_shape(pred, target);
  check_channel(pred, channel);
  const Shape4& s = pred.shape();
  if (grid.rows() != s.h) throw ShapeError("latitude grid rows != H");
  if (clim.channels() != s.c || clim.height() != s.h || clim.width() != s.w) {
    throw ShapeError("climatology dims do not match sequence");
  }
  if (static_cast<std::int64_t>(dates.size()) != s.t) {
    throw ShapeError("dates length != frame count");
  }
  const std::int64_t plane = s.h * s.w;
  PerFrameWeather out;
  out.per_frame.resize(static_cast<std::size_t>(s.t));
  detail::with_spans(pred, target, [&](auto va, auto vb) {
    for (std::int64_t t = 0; t < s.t; ++t) {
      const double* cm =
          clim.day_mean(dates[static_cast<std::size_t>(t)]) + channel * plane;
      const auto* pa = va.data() + (t * s.c + channel) * plane;
      const auto* pb = vb.data() + (t * s.c + channel) * plane;
      double spp = 0.0, stt = 0.0, spt = 0.0;
      for (std::int64_t h = 0; h < s.h; ++h) {
        const double alpha = grid.alpha[static_cast<std::size_t>(h)];
        for (std::int64_t w = 0; w < s.w; ++w) {
          const double yp =
              static_cast<double>(pa[h * s.w + w]) - cm[h * s.w + w];
          const double yt =
              static_cast<double>(pb[h * s.w + w]) - cm[h * s.w + w];
          spp += alpha * yp * yp;
          stt += alpha * yt * yt;
          spt += alpha * yp * yt;
        }
      }
      if (spp == 0.0 || stt == 0.0) {
        throw DegenerateAnomalyError("ACC: zero anomaly energy at frame " +
                                     std::to_string(t));
      }
      out.per_frame[static_cast<std::size_t>(t)] = spt / std::sqrt(spp * stt);
    }
  });
  out.value = par::pairwise_sum(out.per_frame) / static_cast<double>(s.t);
  return out;
}

double acc(const SequenceTensor& pred, const SequenceTensor& target,
           const Climatology& clim, const LatitudeGrid& grid,
           std::int64_t channel, const std::vector<std::int64_t>& dates) {
  return acc_frames(pred, target, clim, grid, channel, dates).value;
}

ContingencyTable contingency(const SequenceTensor& pred,
                             const SequenceTensor& target, double tau,
                             const ValueRange& range) {
  check_same_shape(pred, target);
  if (!(range.vmin < range.vmax)) {
    throw RangeError("contingency: vmin must be < vmax");
  }
  const std::int64_t n = pred.shape().total();
  const double vmin = range.vmin;
  const double span = range.vmax - range.vmin;
  ContingencyTable tbl;
  std::int64_t hit = 0, mis = 0, fas = 0, cr = 0;
  detail::with_spans(pred, target, [&](auto a, auto b) {
#pragma omp parallel for schedule(static) reduction(+ : hit, mis, fas, cr)
    for (std::int64_t i = 0; i < n; ++i) {
      const bool obs =
          (static_cast<double>(b[static_cast<std::size_t>(i)]) - vmin) *
              255.0 / span >=
          tau;
      const bool prd =
          (static_cast<double>(a[static_cast<std::size_t>(i)]) - vmin) *
              255.0 / span >=
          tau;
      hit += obs && prd;
      mis += obs && !prd;
      fas += !obs && prd;
      cr += !obs && !prd;
    }
  });
  tbl.hit = hit;
  tbl.mis = mis;
  tbl.fas = fas;
  tbl.cr = cr;
  return tbl;
}

CsiResult csi_mean(const SequenceTensor& pred, const SequenceTensor& target,
                   const std::vector<double>& taus, const ValueRange& range) {
  if (taus.empty()) throw ConfigError("csi_mean: empty threshold list");
  CsiResult out;
  out.per_threshold.reserve(taus.size());
  for (const double tau : taus) {
    const ContingencyTable t = contingency(pred, target, tau, range);
    const std::int64_t denom = t.hit + t.fas + t.mis;
    if (denom == 0) {
      // vacuously perfect: nothing was observed or predicted at tau
      out.per_threshold.push_back(1.0);
      ++out.vacuous_thresholds;
    } else {
      out.per_threshold.push_back(static_cast<double>(t.hit) /
                                  static_cast<double>(denom));
    }
  }
  out.mean = par::pairwise_sum(out.per_threshold) /
             static_cast<double>(out.per_threshold.size());
  return out;
}

NinoSeries nino34_index(const SequenceTensor& seq, const NinoRegion& region) {
  const Shape4& s = seq.shape();
  if (s.t < 3) {
    throw RangeError("nino34_index needs T >= 3, got " + std::to_string(s.t));
  }
  if (region.row_len < 1 || region.col_len < 1 || region.row_start < 0 ||
      region.col_start < 0 || region.row_start + region.row_len > s.h ||
      region.col_start + region.col_len > s.w) {
    throw RangeError("nino34_index: region outside grid");
  }
  // region-mean over all channels of each frame
  std::vector<double> frame_mean(static_cast<std::size_t>(s.t));
  for (std::int64_t t = 0; t < s.t; ++t) {
    double acc = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c) {
      for (std::int64_t h = region.row_start;
           h < region.row_start + region.row_len; ++h) {
        for (std::int64_t w = region.col_start;
             w < region.col_start + region.col_len; ++w) {
          acc += seq.at(t, c, h, w);
        }
      }
    }
    frame_mean[static_cast<std::size_t>(t)] =
        acc / static_cast<double>(s.c * region.row_len * region.col_len);
  }
  NinoSeries out;
  out.values.resize(static_cast<std::size_t>(s.t - 2));
  for (std::int64_t t = 0; t + 2 < s.t; ++t) {
    out.values[static_cast<std::size_t>(t)] =
        (frame_mean[static_cast<std::size_t>(t)] +
         frame_mean[static_cast<std::size_t>(t + 1)] +
         frame_mean[static_cast<std::size_t>(t + 2)]) /
        3.0;
  }
  return out;
}

double c_nino34(const NinoSeries& pred_series,
                const NinoSeries& target_series) {
  const std::size_t n = pred_series.values.size();
  if (n != target_series.values.size()) {
    throw ShapeError("c_nino34: series lengths differ");
  }
  if (n < 2) throw RangeError("c_nino34 needs series length >= 2");
  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp += pred_series.values[i];
    mt += target_series.values[i];
  }
  mp /= static_cast<double>(n);
  mt /= static_cast<double>(n);
  double spp = 0.0, stt = 0.0, spt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double up = pred_series.values[i] - mp;
    const double ut = target_series.values[i] - mt;
    spp += up * up;
    stt += ut * ut;
    spt += up * ut;
  }
  if (spp == 0.0 || stt == 0.0) {
    throw DegenerateSeriesError("c_nino34: constant index series");
  }
  return spt / std::sqrt(spp * stt);
}

}  // namespace stpeval

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

#ifndef STPEVAL_FRAME_METRICS_HPP
#define STPEVAL_FRAME_METRICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval {

// Stabilizers c1 = (k1*range)^2, c2 = (k2*range)^2 over the declared
// dynamic range.
struct SsimConstants {
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 1.0;

  double c1() const { return (k1 * range) * (k1 * range); }
  double c2() const { return (k2 * range) * (k2 * range); }
  void validate() const;
};

struct PsnrOptions {
  // Numerator of the dB ratio: per-frame max of the target unless a
  // fixed range is supplied.
  std::optional<double> fixed_range;
  double cap_db = 100.0;  // stands in for +inf on zero-error frames
};

// Scalar value plus the per-frame decomposition the reports carry.
struct PerFrameMetric {
  double value = 0.0;
  std::vector<double> per_frame;
};

struct PsnrMetric {
  double value = 0.0;
  std::vector<double> per_frame;
  std::int64_t capped_frames = 0;
};

// Mean absolute error over all of [T,C,H,W].
PerFrameMetric mae_frames(const SequenceTensor& pred,
                          const SequenceTensor& target);
double mae(const SequenceTensor& pred, const SequenceTensor& target);

// Per-frame RMSE over (c,h,w), then mean over frames. This is the
// mean-of-frame-RMSE order, not a global RMSE.
PerFrameMetric rmse_frames(const SequenceTensor& pred,
                           const SequenceTensor& target);
double rmse(const SequenceTensor& pred, const SequenceTensor& target);

// Per-frame sum|x - xhat| / sum|x|, then mean over frames. Frames whose
// target drops to zero sum are rejected.
PerFrameMetric wmape_frames(const SequenceTensor& pred,
                            const SequenceTensor& target);
double wmape(const SequenceTensor& pred, const SequenceTensor& target);

// Whole-frame SSIM: sample statistics over all C*H*W values of a frame
// jointly, population-normalized, stabilized numerator and denominator;
// mean over frames.
PerFrameMetric ssim_frames(const SequenceTensor& pred,
                           const SequenceTensor& target,
                           const SsimConstants& consts);
double ssim(const SequenceTensor& pred, const SequenceTensor& target,
            const SsimConstants& consts);

// Gaussian-window variant (11x11, sigma 1.5 by default), per channel,
// averaged over valid window positions. Non-default alternative to the
// whole-frame statistics.
double ssim_windowed(const SequenceTensor& pred, const SequenceTensor& target,
                     const SsimConstants& consts, std::int64_t window = 11,
                     double sigma = 1.5);

// Per-frame 20*log10(max target / frame RMSE), mean over frames.
// Zero-error frames report cap_db and are counted.
PsnrMetric psnr_frames(const SequenceTensor& pred,
                       const SequenceTensor& target,
                       const PsnrOptions& opt = {});
double psnr(const SequenceTensor& pred, const SequenceTensor& target,
            const PsnrOptions& opt = {});

}  // namespace stpeval

#endif  // STPEVAL_FRAME_METRICS_HPP

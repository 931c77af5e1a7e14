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

#ifndef STPEVAL_DIST_METRICS_HPP
#define STPEVAL_DIST_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval {

// Row-major dense square matrix, minimal on purpose; Eigen stays an
// implementation detail of the .cpp.
struct SquareMatrix {
  std::int64_t dim = 0;
  std::vector<double> data;

  static SquareMatrix zero(std::int64_t d);
  static SquareMatrix identity(std::int64_t d);
  double& at(std::int64_t r, std::int64_t c) {
    return data[static_cast<std::size_t>(r * dim + c)];
  }
  double at(std::int64_t r, std::int64_t c) const {
    return data[static_cast<std::size_t>(r * dim + c)];
  }
  double frobenius_norm() const;
};

struct GaussianStats {
  std::vector<double> mean;
  SquareMatrix cov;
  std::int64_t n = 0;

  std::int64_t dim() const { return static_cast<std::int64_t>(mean.size()); }
};

struct FeatureSet {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;  // row-major n x d
  std::string source = "external-file";  // or "builtin-pooled"

  double at(std::int64_t r, std::int64_t c) const {
    return data[static_cast<std::size_t>(r * cols + c)];
  }
};

// Column means and unbiased sample covariance, symmetrized.
GaussianStats fit_gaussian(const FeatureSet& fs);

// Principal square root of a symmetric PSD matrix via eigendecomposition.
// Tiny negative eigenvalues in [-1e-10*||m||_F, 0) are clamped to zero;
// anything more negative is a SpectrumError.
SquareMatrix sqrtm_psd(const SquareMatrix& m);

// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2), numerical
// negatives above -1e-8 clamped to zero. When a fit has n <= d its
// covariance gets eps*I with eps = 1e-6 * tr(cov)/d before the root.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

struct FrechetResult {
  double distance = 0.0;
  bool regularized_a = false;  // rank-deficient fit, eps*I added
  bool regularized_b = false;
};
FrechetResult frechet_distance_detailed(const GaussianStats& a,
                                        const GaussianStats& b);

// One deep layer's activations for one image/frame: C x H x W.
struct FeatureMap {
  std::int64_t channels = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<double> data;

  double at(std::int64_t c, std::int64_t h, std::int64_t w) const {
    return data[static_cast<std::size_t>((c * height + h) * width + w)];
  }
};

// Canonical LPIPS aggregation over precomputed features: at every
// spatial position the channel vector is unit-normalized, squared
// differences are channel-weighted, averaged over space, summed over
// layers. Weights empty = all ones; otherwise one weight per channel
// per layer.
double lpips_aggregate(const std::vector<FeatureMap>& layers_a,
                       const std::vector<FeatureMap>& layers_b,
                       const std::vector<std::vector<double>>& weights = {});

// Deterministic stand-in embedding so the Frechet machinery runs with
// no external network: the video is average-pooled over a m x 4 x 4
// cell grid per channel (m = d / (16*C) time bins), flattened in
// (time-bin, channel, row-band, col-band) order.
std::vector<double> pooled_feature_extractor(const SequenceTensor& seq,
                                             std::int64_t d);

// Stack per-sequence pooled embeddings into a FeatureSet.
FeatureSet pooled_features(const std::vector<SequenceTensor>& seqs,
                           std::int64_t d);

}  // namespace stpeval

#endif  // STPEVAL_DIST_METRICS_HPP

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

#ifndef STPEVAL_REF_SERIAL_HPP
#define STPEVAL_REF_SERIAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "stpeval/tensor.hpp"
#include "stpeval/weather_metrics.hpp"

// Serial reference implementations: plain scalar loops transcribing the
// formulas directly, element access through at(). They are the oracle
// the tests hold the parallel kernels against, and the baseline the
// benchmark times them against. Nothing here may call into the
// production kernel paths.
namespace stpeval::ref {

double mae(const SequenceTensor& pred, const SequenceTensor& target);
double rmse(const SequenceTensor& pred, const SequenceTensor& target);
// whole-sequence RMSE (single sqrt), kept to distinguish the averaging
// orders in tests
double rmse_global(const SequenceTensor& pred, const SequenceTensor& target);
double wmape(const SequenceTensor& pred, const SequenceTensor& target);
double ssim(const SequenceTensor& pred, const SequenceTensor& target,
            double k1, double k2, double range);
double psnr(const SequenceTensor& pred, const SequenceTensor& target,
            double cap_db);
double wrmse(const SequenceTensor& pred, const SequenceTensor& target,
             const std::vector<double>& alpha, std::int64_t channel);
double acc_one_frame(const SequenceTensor& pred, const SequenceTensor& target,
                     const std::vector<double>& climatology_frame,
                     const std::vector<double>& alpha, std::int64_t channel,
                     std::int64_t frame);

struct Counts {
  std::int64_t hit = 0, mis = 0, fas = 0, cr = 0;
};
Counts contingency(const SequenceTensor& pred, const SequenceTensor& target,
                   double tau, double vmin, double vmax);

std::vector<double> nino_series(const SequenceTensor& seq, std::int64_t row0,
                                std::int64_t rows, std::int64_t col0,
                                std::int64_t cols);
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// column means + unbiased covariance, scalar loops
void gaussian_fit(const std::vector<std::vector<double>>& rows,
                  std::vector<double>& mean_out,
                  std::vector<std::vector<double>>& cov_out);

std::vector<double> pooled_features(const SequenceTensor& seq,
                                    std::int64_t time_bins);

// compensated (Kahan) mean, the summation-accuracy oracle
double kahan_mean(const std::vector<double>& v);

// Student t CDF by adaptive Simpson quadrature of the density,
// independent of the incomplete-beta route
double t_cdf_quadrature(double x, double dof);

// scalar step-and-reflect dynamics oracle
struct Point {
  double row, col, drow, dcol;
};
Point step_bounce(Point p, double row_limit, double col_limit);

}  // namespace stpeval::ref

#endif  // STPEVAL_REF_SERIAL_HPP

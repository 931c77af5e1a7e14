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

#include "stpeval/ref/serial.hpp"

#include <cmath>

namespace stpeval::ref {

namespace {

Shape4 same_shape(const SequenceTensor& a, const SequenceTensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("ref: shapes differ");
  return a.shape();
}

}  // namespace

double mae(const SequenceTensor& pred, const SequenceTensor& target) {
  const Shape4 s = same_shape(pred, target);
  double acc = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t)
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w)
          acc += std::abs(target.at(t, c, h, w) - pred.at(t, c, h, w));
  return acc / static_cast<double>(s.total());
}

double rmse(const SequenceTensor& pred, const SequenceTensor& target) {
  const Shape4 s = same_shape(pred, target);
  double acc = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t) {
    double se = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          const double d = target.at(t, c, h, w) - pred.at(t, c, h, w);
          se += d * d;
        }
    acc += std::sqrt(se / static_cast<double>(s.frame_elems()));
  }
  return acc / static_cast<double>(s.t);
}

double rmse_global(const SequenceTensor& pred, const SequenceTensor& target) {
  const Shape4 s = same_shape(pred, target);
  double se = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t)
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          const double d = target.at(t, c, h, w) - pred.at(t, c, h, w);
          se += d * d;
        }
  return std::sqrt(se / static_cast<double>(s.total()));
}

double wmape(const SequenceTensor& pred, const SequenceTensor& target) {
  const Shape4 s = same_shape(pred, target);
  double acc = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t) {
    double num = 0.0, den = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          num += std::abs(target.at(t, c, h, w) - pred.at(t, c, h, w));
          den += std::abs(target.at(t, c, h, w));
        }
    if (den == 0.0) throw DegenerateFrameError("ref wmape: zero frame");
    acc += num / den;
  }
  return acc / static_cast<double>(s.t);
}

double ssim(const SequenceTensor& pred, const SequenceTensor& target,
            double k1, double k2, double range) {
  const Shape4 s = same_shape(pred, target);
  const double c1 = (k1 * range) * (k1 * range);
  const double c2 = (k2 * range) * (k2 * range);
  const double n = static_cast<double>(s.frame_elems());
  double acc = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t) {
    double mu_p = 0.0, mu_t = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          mu_p += pred.at(t, c, h, w);
          mu_t += target.at(t, c, h, w);
        }
    mu_p /= n;
    mu_t /= n;
    double var_p = 0.0, var_t = 0.0, cov = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          const double dp = pred.at(t, c, h, w) - mu_p;
          const double dt = target.at(t, c, h, w) - mu_t;
          var_p += dp * dp;
          var_t += dt * dt;
          cov += dp * dt;
        }
    var_p /= n;
    var_t /= n;
    cov /= n;
    acc += ((2.0 * mu_t * mu_p + c1) * (2.0 * cov + c2)) /
           ((mu_t * mu_t + mu_p * mu_p + c1) * (var_t + var_p + c2));
  }
  return acc / static_cast<double>(s.t);
}

double psnr(const SequenceTensor& pred, const SequenceTensor& target,
            double cap_db) {
  const Shape4 s = same_shape(pred, target);
  double acc = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t) {
    double peak = target.at(t, 0, 0, 0);
    double se = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          peak = std::max(peak, target.at(t, c, h, w));
          const double d = target.at(t, c, h, w) - pred.at(t, c, h, w);
          se += d * d;
        }
    if (!(peak > 0.0)) throw DegenerateFrameError("ref psnr: peak <= 0");
    const double frame_rmse =
        std::sqrt(se / static_cast<double>(s.frame_elems()));
    acc += frame_rmse == 0.0 ? cap_db : 20.0 * std::log10(peak / frame_rmse);
  }
  return acc / static_cast<double>(s.t);
}

double wrmse(const SequenceTensor& pred, const SequenceTensor& target,
             const std::vector<double>& alpha, std::int64_t channel) {
  const Shape4 s = same_shape(pred, target);
  if (static_cast<std::int64_t>(alpha.size()) != s.h) {
    throw ShapeError("ref wrmse: alpha rows != H");
  }
  double acc = 0.0;
  for (std::int64_t t = 0; t < s.t; ++t) {
    double se = 0.0;
    for (std::int64_t h = 0; h < s.h; ++h)
      for (std::int64_t w = 0; w < s.w; ++w) {
        const double d =
            target.at(t, channel, h, w) - pred.at(t, channel, h, w);
        se += alpha[static_cast<std::size_t>(h)] * d * d;
      }
    acc += std::sqrt(se / static_cast<double>(s.h * s.w));
  }
  return acc / static_cast<double>(s.t);
}

double acc_one_frame(const SequenceTensor& pred, const SequenceTensor& target,
                     const std::vector<double>& climatology_frame,
                     const std::vector<double>& alpha, std::int64_t channel,
                     std::int64_t frame) {
  const Shape4 s = same_shape(pred, target);
  double spp = 0.0, stt = 0.0, spt = 0.0;
  for (std::int64_t h = 0; h < s.h; ++h)
    for (std::int64_t w = 0; w < s.w; ++w) {
      const double cm =
          climatology_frame[static_cast<std::size_t>(
              (channel * s.h + h) * s.w + w)];
      const double yp = pred.at(frame, channel, h, w) - cm;
      const double yt = target.at(frame, channel, h, w) - cm;
      const double a = alpha[static_cast<std::size_t>(h)];
      spp += a * yp * yp;
      stt += a * yt * yt;
      spt += a * yp * yt;
    }
  return spt / std::sqrt(spp * stt);
}

Counts contingency(const SequenceTensor& pred, const SequenceTensor& target,
                   double tau, double vmin, double vmax) {
  const Shape4 s = same_shape(pred, target);
  Counts k;
  for (std::int64_t t = 0; t < s.t; ++t)
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = 0; h < s.h; ++h)
        for (std::int64_t w = 0; w < s.w; ++w) {
          const bool obs =
              (target.at(t, c, h, w) - vmin) * 255.0 / (vmax - vmin) >= tau;
          const bool prd =
              (pred.at(t, c, h, w) - vmin) * 255.0 / (vmax - vmin) >= tau;
          if (obs && prd) {
            ++k.hit;
          } else if (obs) {
            ++k.mis;
          } else if (prd) {
            ++k.fas;
          } else {
            ++k.cr;
          }
        }
  return k;
}

std::vector<double> nino_series(const SequenceTensor& seq, std::int64_t row0,
                                std::int64_t rows, std::int64_t col0,
                                std::int64_t cols) {
  const Shape4& s = seq.shape();
  std::vector<double> means(static_cast<std::size_t>(s.t), 0.0);
  for (std::int64_t t = 0; t < s.t; ++t) {
    double acc = 0.0;
    for (std::int64_t c = 0; c < s.c; ++c)
      for (std::int64_t h = row0; h < row0 + rows; ++h)
        for (std::int64_t w = col0; w < col0 + cols; ++w)
          acc += seq.at(t, c, h, w);
    means[static_cast<std::size_t>(t)] =
        acc / static_cast<double>(s.c * rows * cols);
  }
  std::vector<double> out;
  for (std::int64_t t = 0; t + 2 < s.t; ++t) {
    out.push_back((means[static_cast<std::size_t>(t)] +
                   means[static_cast<std::size_t>(t + 1)] +
                   means[static_cast<std::size_t>(t + 2)]) /
                  3.0);
  }
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

void gaussian_fit(const std::vector<std::vector<double>>& rows,
                  std::vector<double>& mean_out,
                  std::vector<std::vector<double>>& cov_out) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  mean_out.assign(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) mean_out[j] += r[j];
  for (double& m : mean_out) m /= static_cast<double>(n);
  cov_out.assign(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        cov_out[i][j] += (r[i] - mean_out[i]) * (r[j] - mean_out[j]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      cov_out[i][j] /= static_cast<double>(n - 1);
}

std::vector<double> pooled_features(const SequenceTensor& seq,
                                    std::int64_t time_bins) {
  const Shape4& s = seq.shape();
  std::vector<double> out;
  for (std::int64_t tb = 0; tb < time_bins; ++tb) {
    const std::int64_t t0 = s.t * tb / time_bins;
    const std::int64_t t1 = s.t * (tb + 1) / time_bins;
    for (std::int64_t c = 0; c < s.c; ++c) {
      for (std::int64_t hb = 0; hb < 4; ++hb) {
        const std::int64_t h0 = s.h * hb / 4;
        const std::int64_t h1 = s.h * (hb + 1) / 4;
        for (std::int64_t wb = 0; wb < 4; ++wb) {
          const std::int64_t w0 = s.w * wb / 4;
          const std::int64_t w1 = s.w * (wb + 1) / 4;
          double acc = 0.0;
          for (std::int64_t t = t0; t < t1; ++t)
            for (std::int64_t h = h0; h < h1; ++h)
              for (std::int64_t w = w0; w < w1; ++w) acc += seq.at(t, c, h, w);
          out.push_back(acc / static_cast<double>((t1 - t0) * (h1 - h0) *
                                                  (w1 - w0)));
        }
      }
    }
  }
  return out;
}

double kahan_mean(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (const double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(v.size());
}

namespace {

double t_pdf(double x, double v) {
  return std::exp(std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0)) /
         std::sqrt(v * std::acos(-1.0)) *
         std::pow(1.0 + x * x / v, -(v + 1.0) / 2.0);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double a, double b, double fa, double fm, double fb,
                double whole, double eps, double v, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = t_pdf(lm, v);
  const double frm = t_pdf(rm, v);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(a, m, fa, flm, fm, left, eps / 2.0, v, depth - 1) +
         adaptive(m, b, fm, frm, fb, right, eps / 2.0, v, depth - 1);
}

}  // namespace

double t_cdf_quadrature(double x, double dof) {
  // integrate the density over [0, |x|] and use symmetry about zero
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.5;
  const double fa = t_pdf(0.0, dof);
  const double fb = t_pdf(ax, dof);
  const double fm = t_pdf(ax / 2.0, dof);
  const double whole = simpson(0.0, ax, fa, fm, fb);
  const double half =
      adaptive(0.0, ax, fa, fm, fb, whole, 1e-13, dof, 40);
  return x > 0.0 ? 0.5 + half : 0.5 - half;
}

Point step_bounce(Point p, double row_limit, double col_limit) {
  p.row += p.drow;
  p.col += p.dcol;
  while (p.row < 0.0 || p.row > row_limit) {
    if (p.row < 0.0) {
      p.row = -p.row;
    } else {
      p.row = 2.0 * row_limit - p.row;
    }
    p.drow = -p.drow;
  }
  while (p.col < 0.0 || p.col > col_limit) {
    if (p.col < 0.0) {
      p.col = -p.col;
    } else {
      p.col = 2.0 * col_limit - p.col;
    }
    p.dcol = -p.dcol;
  }
  return p;
}

}  // namespace stpeval::ref

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

#include "stpeval/frame_metrics.hpp"

#include <cmath>
#include <string>

#include "stpeval/detail/span_dispatch.hpp"
#include "stpeval/parallel.hpp"

namespace stpeval {

namespace {

void check_same_shape(const SequenceTensor& pred,
                      const SequenceTensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("pred/target shapes differ");
  }
}

double mean_of(const std::vector<double>& v) {
  return par::pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace

void SsimConstants::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(range > 0.0)) {
    throw ConfigError("SSIM constants require k1, k2, range > 0");
  }
}

PerFrameMetric mae_frames(const SequenceTensor& pred,
                          const SequenceTensor& target) {
  check_same_shape(pred, target);
  const std::int64_t frames = pred.shape().t;
  const std::int64_t fe = pred.shape().frame_elems();
  std::vector<double> frame_sums(static_cast<std::size_t>(frames));
  detail::with_spans(pred, target, [&](auto a, auto b) {
    auto abs_diff = [&](std::int64_t i) {
      return std::abs(static_cast<double>(b[static_cast<std::size_t>(i)]) -
                      static_cast<double>(a[static_cast<std::size_t>(i)]));
    };
    if (frames == 1) {
      // single frame: parallelize over elements instead
      frame_sums[0] = par::block_sum(fe, abs_diff);
      return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < frames; ++t) {
      double s = 0.0;
      for (std::int64_t i = t * fe; i < (t + 1) * fe; ++i) s += abs_diff(i);
      frame_sums[static_cast<std::size_t>(t)] = s;
    }
  });
  PerFrameMetric out;
  out.value =
      par::pairwise_sum(frame_sums) / static_cast<double>(frames * fe);
  out.per_frame.resize(frame_sums.size());
  for (std::size_t t = 0; t < frame_sums.size(); ++t) {
    out.per_frame[t] = frame_sums[t] / static_cast<double>(fe);
  }
  return out;
}

double mae(const SequenceTensor& pred, const SequenceTensor& target) {
  return mae_frames(pred, target).value;
}

PerFrameMetric rmse_frames(const SequenceTensor& pred,
                           const SequenceTensor& target) {
  check_same_shape(pred, target);
  const std::int64_t frames = pred.shape().t;
  const std::int64_t fe = pred.shape().frame_elems();
  PerFrameMetric out;
  out.per_frame.resize(static_cast<std::size_t>(frames));
  detail::with_spans(pred, target, [&](auto a, auto b) {
    auto sq_diff = [&](std::int64_t i) {
      const double d = static_cast<double>(b[static_cast<std::size_t>(i)]) -
                       static_cast<double>(a[static_cast<std::size_t>(i)]);
      return d * d;
    };
    if (frames == 1) {
      out.per_frame[0] =
          std::sqrt(par::block_sum(fe, sq_diff) / static_cast<double>(fe));
      return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < frames; ++t) {
      double s = 0.0;
      for (std::int64_t i = t * fe; i < (t + 1) * fe; ++i) s += sq_diff(i);
      out.per_frame[static_cast<std::size_t>(t)] =
          std::sqrt(s / static_cast<double>(fe));
    }
  });
  out.value = mean_of(out.per_frame);
  return out;
}

double rmse(const SequenceTensor& pred, const SequenceTensor& target) {
  return rmse_frames(pred, target).value;
}

PerFrameMetric wmape_frames(const SequenceTensor& pred,
                            const SequenceTensor& target) {
  check_same_shape(pred, target);
  const std::int64_t frames = pred.shape().t;
  const std::int64_t fe = pred.shape().frame_elems();
  PerFrameMetric out;
  out.per_frame.resize(static_cast<std::size_t>(frames));
  std::int64_t degenerate = -1;
  detail::with_spans(pred, target, [&](auto a, auto b) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < frames; ++t) {
      double num = 0.0, den = 0.0;
      for (std::int64_t i = t * fe; i < (t + 1) * fe; ++i) {
        const double xt = static_cast<double>(b[static_cast<std::size_t>(i)]);
        const double xp = static_cast<double>(a[static_cast<std::size_t>(i)]);
        num += std::abs(xt - xp);
        den += std::abs(xt);
      }
      if (den == 0.0) {
#pragma omp critical
        degenerate = (degenerate < 0) ? t : std::min(degenerate, t);
      } else {
        out.per_frame[static_cast<std::size_t>(t)] = num / den;
      }
    }
  });
  if (degenerate >= 0) {
    throw DegenerateFrameError("WMAPE: target frame " +
                               std::to_string(degenerate) +
                               " has zero absolute sum");
  }
  out.value = mean_of(out.per_frame);
  return out;
}

double wmape(const SequenceTensor& pred, const SequenceTensor& target) {
  return wmape_frames(pred, target).value;
}

PerFrameMetric ssim_frames(const SequenceTensor& pred,
                           const SequenceTensor& target,
                           const SsimConstants& consts) {
  consts.validate();
  check_same_shape(pred, target);
  const std::int64_t frames = pred.shape().t;
  const std::int64_t fe = pred.shape().frame_elems();
  if (fe < 2) {
    throw ShapeError("SSIM requires frames with at least 2 pixels");
  }
  const double c1 = consts.c1();
  const double c2 = consts.c2();
  PerFrameMetric out;
  out.per_frame.resize(static_cast<std::size_t>(frames));
  detail::with_spans(pred, target, [&](auto a, auto b) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < frames; ++t) {
      const double n = static_cast<double>(fe);
      double sa = 0.0, sb = 0.0;
      for (std::int64_t i = t * fe; i < (t + 1) * fe; ++i) {
        sa += static_cast<double>(a[static_cast<std::size_t>(i)]);
        sb += static_cast<double>(b[static_cast<std::size_t>(i)]);
      }
      const double mu_a = sa / n;
      const double mu_b = sb / n;
      // population-normalized central moments, one shared loop so that
      // identical inputs give bitwise-equal var/cov
      double vaa = 0.0, vbb = 0.0, vab = 0.0;
      for (std::int64_t i = t * fe; i < (t + 1) * fe; ++i) {
        const double da =
            static_cast<double>(a[static_cast<std::size_t>(i)]) - mu_a;
        const double db =
            static_cast<double>(b[static_cast<std::size_t>(i)]) - mu_b;
        vaa += da * da;
        vbb += db * db;
        vab += da * db;
      }
      vaa /= n;
      vbb /= n;
      vab /= n;
      const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * vab + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (vaa + vbb + c2);
      out.per_frame[static_cast<std::size_t>(t)] = num / den;
    }
  });
  out.value = mean_of(out.per_frame);
  return out;
}

double ssim(const SequenceTensor& pred, const SequenceTensor& target,
            const SsimConstants& consts) {
  return ssim_frames(pred, target, consts).value;
}

double ssim_windowed(const SequenceTensor& pred, const SequenceTensor& target,
                     const SsimConstants& consts, std::int64_t window,
                     double sigma) {
  consts.validate();
  check_same_shape(pred, target);
  if (window < 2 || sigma <= 0.0) {
    throw ConfigError("ssim_windowed: window >= 2 and sigma > 0 required");
  }
  const Shape4& s = pred.shape();
  if (s.h < window || s.w < window) {
    throw ConfigError("ssim_windowed: frame smaller than window");
  }
  // separable gaussian taps, normalized to sum 1
  std::vector<double> taps(static_cast<std::size_t>(window));
  const double mid = static_cast<double>(window - 1) / 2.0;
  double tap_sum = 0.0;
  for (std::int64_t i = 0; i < window; ++i) {
    const double d = static_cast<double>(i) - mid;
    taps[static_cast<std::size_t>(i)] =
        std::exp(-d * d / (2.0 * sigma * sigma));
    tap_sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& w : taps) w /= tap_sum;

  const double c1 = consts.c1();
  const double c2 = consts.c2();
  const std::int64_t plane = s.h * s.w;
  std::vector<double> frame_vals(static_cast<std::size_t>(s.t));
  detail::with_spans(pred, target, [&](auto pa, auto pb) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < s.t; ++t) {
      double acc = 0.0;
      std::int64_t cells = 0;
      for (std::int64_t c = 0; c < s.c; ++c) {
        const auto* a = pa.data() + (t * s.c + c) * plane;
        const auto* b = pb.data() + (t * s.c + c) * plane;
        for (std::int64_t r0 = 0; r0 + window <= s.h; ++r0) {
          for (std::int64_t c0 = 0; c0 + window <= s.w; ++c0) {
            double ma = 0.0, mb = 0.0;
            for (std::int64_t i = 0; i < window; ++i) {
              for (std::int64_t j = 0; j < window; ++j) {
                const double wgt = taps[static_cast<std::size_t>(i)] *
                                   taps[static_cast<std::size_t>(j)];
                ma += wgt * static_cast<double>(a[(r0 + i) * s.w + (c0 + j)]);
                mb += wgt * static_cast<double>(b[(r0 + i) * s.w + (c0 + j)]);
              }
            }
            double vaa = 0.0, vbb = 0.0, vab = 0.0;
            for (std::int64_t i = 0; i < window; ++i) {
              for (std::int64_t j = 0; j < window; ++j) {
                const double wgt = taps[static_cast<std::size_t>(i)] *
                                   taps[static_cast<std::size_t>(j)];
                const double da =
                    static_cast<double>(a[(r0 + i) * s.w + (c0 + j)]) - ma;
                const double db =
                    static_cast<double>(b[(r0 + i) * s.w + (c0 + j)]) - mb;
                vaa += wgt * da * da;
                vbb += wgt * db * db;
                vab += wgt * da * db;
              }
            }
            const double num = (2.0 * ma * mb + c1) * (2.0 * vab + c2);
            const double den = (ma * ma + mb * mb + c1) * (vaa + vbb + c2);
            acc += num / den;
            ++cells;
          }
        }
      }
      frame_vals[static_cast<std::size_t>(t)] =
          acc / static_cast<double>(cells);
    }
  });
  return mean_of(frame_vals);
}

PsnrMetric psnr_frames(const SequenceTensor& pred,
                       const SequenceTensor& target, const PsnrOptions& opt) {
  check_same_shape(pred, target);
  const std::int64_t frames = pred.shape().t;
  const std::int64_t fe = pred.shape().frame_elems();
  PsnrMetric out;
  out.per_frame.resize(static_cast<std::size_t>(frames));
  std::vector<std::uint8_t> capped(static_cast<std::size_t>(frames), 0);
  std::int64_t degenerate = -1;
  detail::with_spans(pred, target, [&](auto a, auto b) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < frames; ++t) {
      double peak;
      if (opt.fixed_range) {
        peak = *opt.fixed_range;
      } else {
        peak = static_cast<double>(b[static_cast<std::size_t>(t * fe)]);
        for (std::int64_t i = t * fe + 1; i < (t + 1) * fe; ++i) {
          peak = std::max(
              peak, static_cast<double>(b[static_cast<std::size_t>(i)]));
        }
      }
      if (!(peak > 0.0)) {
#pragma omp critical
        degenerate = (degenerate < 0) ? t : std::min(degenerate, t);
        continue;
      }
      double s = 0.0;
      for (std::int64_t i = t * fe; i < (t + 1) * fe; ++i) {
        const double d =
            static_cast<double>(b[static_cast<std::size_t>(i)]) -
            static_cast<double>(a[static_cast<std::size_t>(i)]);
        s += d * d;
      }
      const double frame_rmse = std::sqrt(s / static_cast<double>(fe));
      if (frame_rmse == 0.0) {
        out.per_frame[static_cast<std::size_t>(t)] = opt.cap_db;
        capped[static_cast<std::size_t>(t)] = 1;
      } else {
        out.per_frame[static_cast<std::size_t>(t)] =
            20.0 * std::log10(peak / frame_rmse);
      }
    }
  });
  if (degenerate >= 0) {
    throw DegenerateFrameError(
        "PSNR: target frame " + std::to_string(degenerate) +
        " has max <= 0 and no fixed range was supplied");
  }
  for (const std::uint8_t c : capped) out.capped_frames += c;
  out.value = mean_of(out.per_frame);
  return out;
}

double psnr(const SequenceTensor& pred, const SequenceTensor& target,
            const PsnrOptions& opt) {
  return psnr_frames(pred, target, opt).value;
}

}  // namespace stpeval

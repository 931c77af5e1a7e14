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

#include "stpeval/dist_metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace stpeval {

namespace {

using EMatrix = Eigen::MatrixXd;

EMatrix to_eigen(const SquareMatrix& m) {
  EMatrix e(m.dim, m.dim);
  for (std::int64_t r = 0; r < m.dim; ++r)
    for (std::int64_t c = 0; c < m.dim; ++c) e(r, c) = m.at(r, c);
  return e;
}

SquareMatrix from_eigen(const EMatrix& e) {
  SquareMatrix m = SquareMatrix::zero(e.rows());
  for (std::int64_t r = 0; r < m.dim; ++r)
    for (std::int64_t c = 0; c < m.dim; ++c) m.at(r, c) = e(r, c);
  return m;
}

void check_symmetric(const EMatrix& e, double rel_tol) {
  const double scale = std::max(1e-300, e.norm());
  const double asym = (e - e.transpose()).norm();
  if (asym > rel_tol * scale) {
    throw SpectrumError("matrix is not symmetric within tolerance");
  }
}

// Eigen-backed principal root; assumes symmetry already checked.
EMatrix psd_root(const EMatrix& sym) {
  const double scale = sym.norm();
  Eigen::SelfAdjointEigenSolver<EMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw SpectrumError("eigendecomposition failed");
  }
  Eigen::VectorXd lam = es.eigenvalues();
  const double floor = -1e-10 * scale;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < floor) {
      throw SpectrumError("matrix has eigenvalue " + std::to_string(lam(i)) +
                          " below the PSD tolerance");
    }
    if (lam(i) < 0.0) lam(i) = 0.0;
  }
  const Eigen::VectorXd root = lam.cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SquareMatrix SquareMatrix::zero(std::int64_t d) {
  SquareMatrix m;
  m.dim = d;
  m.data.assign(static_cast<std::size_t>(d * d), 0.0);
  return m;
}

SquareMatrix SquareMatrix::identity(std::int64_t d) {
  SquareMatrix m = zero(d);
  for (std::int64_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

double SquareMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const double x : data) s += x * x;
  return std::sqrt(s);
}

GaussianStats fit_gaussian(const FeatureSet& fs) {
  if (fs.rows < 2) {
    throw SampleError("fit_gaussian needs n >= 2 samples, got " +
                      std::to_string(fs.rows));
  }
  if (fs.cols < 1) throw ShapeError("fit_gaussian: empty feature dim");
  for (const double x : fs.data) {
    if (!std::isfinite(x)) throw ValueError("features contain NaN or Inf");
  }
  const std::int64_t n = fs.rows;
  const std::int64_t d = fs.cols;
  GaussianStats g;
  g.n = n;
  g.mean.assign(static_cast<std::size_t>(d), 0.0);
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t c = 0; c < d; ++c)
      g.mean[static_cast<std::size_t>(c)] += fs.at(r, c);
  for (double& m : g.mean) m /= static_cast<double>(n);

  g.cov = SquareMatrix::zero(d);
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t i = 0; i < d; ++i) {
      const double di = fs.at(r, i) - g.mean[static_cast<std::size_t>(i)];
      for (std::int64_t j = i; j < d; ++j) {
        const double dj = fs.at(r, j) - g.mean[static_cast<std::size_t>(j)];
        g.cov.at(i, j) += di * dj;
      }
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::int64_t i = 0; i < d; ++i) {
    for (std::int64_t j = i; j < d; ++j) {
      const double v = g.cov.at(i, j) / denom;
      g.cov.at(i, j) = v;
      g.cov.at(j, i) = v;  // symmetrized by construction
    }
  }
  return g;
}

SquareMatrix sqrtm_psd(const SquareMatrix& m) {
  if (m.dim < 1) throw ShapeError("sqrtm_psd: empty matrix");
  EMatrix e = to_eigen(m);
  check_symmetric(e, 1e-8);
  const EMatrix sym = 0.5 * (e + e.transpose());
  return from_eigen(psd_root(sym));
}

FrechetResult frechet_distance_detailed(const GaussianStats& a,
                                        const GaussianStats& b) {
  const std::int64_t d = a.dim();
  if (d != b.dim() || a.cov.dim != d || b.cov.dim != d) {
    throw ShapeError("frechet_distance: dimension mismatch");
  }
  FrechetResult result;

  auto regularized = [d](const GaussianStats& g, bool* flag) {
    EMatrix c = to_eigen(g.cov);
    if (g.n <= d) {
      const double eps = 1e-6 * c.trace() / static_cast<double>(d);
      c += eps * EMatrix::Identity(d, d);
      *flag = true;
    }
    return c;
  };
  const EMatrix ca = regularized(a, &result.regularized_a);
  const EMatrix cb = regularized(b, &result.regularized_b);

  double mean_term = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    const double diff = a.mean[static_cast<std::size_t>(i)] -
                        b.mean[static_cast<std::size_t>(i)];
    mean_term += diff * diff;
  }

  // tr((S1 S2)^1/2) computed as tr((S1^1/2 S2 S1^1/2)^1/2), which stays
  // inside symmetric-PSD territory.
  const EMatrix ra = psd_root(0.5 * (ca + ca.transpose()));
  EMatrix inner = ra * cb * ra;
  inner = 0.5 * (inner + inner.transpose());
  const EMatrix cross = psd_root(inner);

  double fd = mean_term + ca.trace() + cb.trace() - 2.0 * cross.trace();
  if (fd < 0.0) {
    if (fd < -1e-8) {
      throw SpectrumError("frechet_distance: negative value " +
                          std::to_string(fd) + " beyond tolerance");
    }
    fd = 0.0;
  }
  result.distance = fd;
  return result;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  return frechet_distance_detailed(a, b).distance;
}

double lpips_aggregate(const std::vector<FeatureMap>& layers_a,
                       const std::vector<FeatureMap>& layers_b,
                       const std::vector<std::vector<double>>& weights) {
  if (layers_a.size() != layers_b.size()) {
    throw ShapeError("lpips_aggregate: layer count mismatch");
  }
  if (layers_a.empty()) throw ShapeError("lpips_aggregate: no layers");
  if (!weights.empty() && weights.size() != layers_a.size()) {
    throw ShapeError("lpips_aggregate: weights/layer count mismatch");
  }
  constexpr double kNormEps = 1e-10;
  double total = 0.0;
  for (std::size_t l = 0; l < layers_a.size(); ++l) {
    const FeatureMap& fa = layers_a[l];
    const FeatureMap& fb = layers_b[l];
    if (fa.channels != fb.channels || fa.height != fb.height ||
        fa.width != fb.width) {
      throw ShapeError("lpips_aggregate: layer " + std::to_string(l) +
                       " shape mismatch");
    }
    const std::vector<double>* w = nullptr;
    if (!weights.empty()) {
      w = &weights[l];
      if (static_cast<std::int64_t>(w->size()) != fa.channels) {
        throw ShapeError("lpips_aggregate: weight length != channels");
      }
      for (const double x : *w) {
        if (x < 0.0) throw ValueError("lpips_aggregate: negative weight");
      }
    }
    double layer_sum = 0.0;
    for (std::int64_t h = 0; h < fa.height; ++h) {
      for (std::int64_t x = 0; x < fa.width; ++x) {
        double na = 0.0, nb = 0.0;
        for (std::int64_t c = 0; c < fa.channels; ++c) {
          na += fa.at(c, h, x) * fa.at(c, h, x);
          nb += fb.at(c, h, x) * fb.at(c, h, x);
        }
        na = std::sqrt(na) + kNormEps;
        nb = std::sqrt(nb) + kNormEps;
        for (std::int64_t c = 0; c < fa.channels; ++c) {
          const double diff = fa.at(c, h, x) / na - fb.at(c, h, x) / nb;
          const double wc = w ? (*w)[static_cast<std::size_t>(c)] : 1.0;
          layer_sum += wc * diff * diff;
        }
      }
    }
    total += layer_sum / static_cast<double>(fa.height * fa.width);
  }
  return total;
}

std::vector<double> pooled_feature_extractor(const SequenceTensor& seq,
                                             std::int64_t d) {
  const Shape4& s = seq.shape();
  constexpr std::int64_t kBands = 4;
  if (d < 1 || d % (kBands * kBands * s.c) != 0) {
    throw ConfigError("pooled_feature_extractor: d must be a multiple of " +
                      std::to_string(kBands * kBands * s.c) +
                      " for C=" + std::to_string(s.c));
  }
  const std::int64_t tbins = d / (kBands * kBands * s.c);
  if (tbins > s.t || s.h < kBands || s.w < kBands) {
    throw ConfigError(
        "pooled_feature_extractor: video too small for the pooling grid");
  }
  auto bin_edge = [](std::int64_t extent, std::int64_t bins, std::int64_t i) {
    return extent * i / bins;
  };
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(d));
  for (std::int64_t tb = 0; tb < tbins; ++tb) {
    const std::int64_t t0 = bin_edge(s.t, tbins, tb);
    const std::int64_t t1 = bin_edge(s.t, tbins, tb + 1);
    for (std::int64_t c = 0; c < s.c; ++c) {
      for (std::int64_t hb = 0; hb < kBands; ++hb) {
        const std::int64_t h0 = bin_edge(s.h, kBands, hb);
        const std::int64_t h1 = bin_edge(s.h, kBands, hb + 1);
        for (std::int64_t wb = 0; wb < kBands; ++wb) {
          const std::int64_t w0 = bin_edge(s.w, kBands, wb);
          const std::int64_t w1 = bin_edge(s.w, kBands, wb + 1);
          double acc = 0.0;
          for (std::int64_t t = t0; t < t1; ++t)
            for (std::int64_t h = h0; h < h1; ++h)
              for (std::int64_t w = w0; w < w1; ++w)
                acc += seq.at(t, c, h, w);
          const double cells = static_cast<double>((t1 - t0) * (h1 - h0) *
                                                   (w1 - w0));
          out.push_back(acc / cells);
        }
      }
    }
  }
  return out;
}

FeatureSet pooled_features(const std::vector<SequenceTensor>& seqs,
                           std::int64_t d) {
  FeatureSet fs;
  fs.source = "builtin-pooled";
  fs.cols = d;
  fs.rows = static_cast<std::int64_t>(seqs.size());
  fs.data.reserve(static_cast<std::size_t>(fs.rows * d));
  for (const auto& s : seqs) {
    const std::vector<double> v = pooled_feature_extractor(s, d);
    fs.data.insert(fs.data.end(), v.begin(), v.end());
  }
  return fs;
}

}  // namespace stpeval

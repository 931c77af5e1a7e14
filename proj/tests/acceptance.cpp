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

// End-to-end acceptance suite. One line per criterion; exits nonzero if
// any hard criterion fails. The throughput criterion is a soft target
// and is reported without failing the run.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "stpeval/dist_metrics.hpp"
#include "stpeval/frame_metrics.hpp"
#include "stpeval/protocol.hpp"
#include "stpeval/ref/serial.hpp"
#include "stpeval/report.hpp"
#include "stpeval/synthgen.hpp"
#include "stpeval/weather_metrics.hpp"

using namespace stpeval;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail,
            bool soft = false) {
  if (!pass && !soft) ++g_failures;
  std::printf("[%s] %-24s %s\n",
              pass ? "PASS" : (soft ? "WARN" : "FAIL"), name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

SequenceTensor random_f64(std::mt19937_64& rng, Shape4 shape, double lo,
                          double hi, ValueRange range) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(shape.total()));
  for (double& x : v) x = dist(rng);
  return SequenceTensor(shape, std::move(v), range);
}

// --- criterion 1: frame metrics vs the scalar-loop reference ------------

void criterion_metric_oracles() {
  const double t0 = now_seconds();
  std::mt19937_64 rng(20260808);
  const Shape4 shape{4, 1, 8, 8};
  const std::vector<double> lats{-70, -50, -30, -10, 10, 30, 50, 70};
  const LatitudeGrid grid = latitude_weights(lats);
  const SsimConstants consts{0.01, 0.03, 1.0};
  double worst = 0.0;
  std::string worst_metric = "-";
  auto track = [&](const char* name, double a, double b) {
    const double d = std::abs(a - b);
    if (d > worst) {
      worst = d;
      worst_metric = name;
    }
  };
  for (int trial = 0; trial < 200; ++trial) {
    const SequenceTensor pred = random_f64(rng, shape, 0.05, 1.0, {0, 1});
    const SequenceTensor target = random_f64(rng, shape, 0.05, 1.0, {0, 1});
    track("mae", mae(pred, target), ref::mae(pred, target));
    track("rmse", rmse(pred, target), ref::rmse(pred, target));
    track("wmape", wmape(pred, target), ref::wmape(pred, target));
    track("ssim", ssim(pred, target, consts),
          ref::ssim(pred, target, 0.01, 0.03, 1.0));
    track("psnr", psnr(pred, target), ref::psnr(pred, target, 100.0));
    track("wrmse", wrmse(pred, target, grid, 0),
          ref::wrmse(pred, target, grid.alpha, 0));
  }
  const double elapsed = now_seconds() - t0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "200 pairs, max |prod-ref| %.3e (%s), %.2fs (< 5s)", worst,
                worst_metric.c_str(), elapsed);
  report("metric-oracle-suite", worst <= 1e-10 && elapsed < 5.0, detail);
}

// --- criterion 2: Frechet machinery -------------------------------------

void criterion_frechet() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  bool pass = true;
  std::string detail;

  // d=1 closed form: N(0,1) vs N(1,4) -> 1 + (1-2)^2 = 2
  {
    GaussianStats a, b;
    a.mean = {0.0};
    a.cov = SquareMatrix::zero(1);
    a.cov.at(0, 0) = 1.0;
    a.n = 100;
    b.mean = {1.0};
    b.cov = SquareMatrix::zero(1);
    b.cov.at(0, 0) = 4.0;
    b.n = 100;
    const double fd = frechet_distance(a, b);
    if (std::abs(fd - 2.0) > 1e-8) {
      pass = false;
      detail += "closed-form fd=" + std::to_string(fd) + " ";
    }
  }
  // identity, symmetry, and diagonal separability on random fits
  double worst_sym = 0.0, worst_self = 0.0, worst_diag = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> dim_dist(1, 8);
    const int d = dim_dist(rng);
    FeatureSet fa, fb;
    fa.rows = fb.rows = 24;
    fa.cols = fb.cols = d;
    for (int i = 0; i < 24 * d; ++i) {
      fa.data.push_back(unit(rng));
      fb.data.push_back(unit(rng) + 0.25);
    }
    const GaussianStats a = fit_gaussian(fa);
    const GaussianStats b = fit_gaussian(fb);
    worst_self = std::max(worst_self, frechet_distance(a, a));
    worst_sym = std::max(
        worst_sym,
        std::abs(frechet_distance(a, b) - frechet_distance(b, a)));

    // diagonal case: per-dimension scalar closed forms must add up
    GaussianStats da, db;
    for (int i = 0; i < d; ++i) {
      da.mean.push_back(unit(rng));
      db.mean.push_back(unit(rng));
    }
    da.cov = SquareMatrix::zero(d);
    db.cov = SquareMatrix::zero(d);
    da.n = db.n = 100;
    double expect = 0.0;
    for (int i = 0; i < d; ++i) {
      const double va = 0.1 + std::abs(unit(rng));
      const double vb = 0.1 + std::abs(unit(rng));
      da.cov.at(i, i) = va;
      db.cov.at(i, i) = vb;
      const double dm = da.mean[static_cast<std::size_t>(i)] -
                        db.mean[static_cast<std::size_t>(i)];
      expect += dm * dm +
                (std::sqrt(va) - std::sqrt(vb)) * (std::sqrt(va) - std::sqrt(vb));
    }
    worst_diag =
        std::max(worst_diag, std::abs(frechet_distance(da, db) - expect));
  }
  if (worst_self > 1e-8 || worst_sym > 1e-8 || worst_diag > 1e-8) pass = false;

  // 100 random PSD roots, residual against the construction
  double worst_resid = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> dim_dist(1, 8);
    const int d = dim_dist(rng);
    SquareMatrix m = SquareMatrix::zero(d);
    std::vector<double> a(static_cast<std::size_t>(d * d));
    for (double& x : a) x = unit(rng);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k)
          s += a[static_cast<std::size_t>(i * d + k)] *
               a[static_cast<std::size_t>(j * d + k)];
        m.at(i, j) = s;
      }
    const SquareMatrix root = sqrtm_psd(m);
    double resid = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double ss = 0.0;
        for (int k = 0; k < d; ++k) ss += root.at(i, k) * root.at(k, j);
        resid += (ss - m.at(i, j)) * (ss - m.at(i, j));
      }
    const double norm = m.frobenius_norm();
    if (norm > 0.0) {
      worst_resid = std::max(worst_resid, std::sqrt(resid) / norm);
    }
  }
  if (worst_resid > 1e-8) pass = false;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "self %.2e sym %.2e diag %.2e sqrtm-resid %.2e %s",
                worst_self, worst_sym, worst_diag, worst_resid,
                detail.c_str());
  report("frechet-suite", pass, buf);
}

// --- criterion 3: contingency counts vs brute force ---------------------

void criterion_csi_bruteforce() {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> dist(0.0, 255.0);
  const std::vector<double> taus{16, 74, 133, 160, 181, 219};
  std::int64_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(64), b(64);
    for (double& x : a) x = dist(rng);
    for (double& x : b) x = dist(rng);
    const SequenceTensor pred(Shape4{1, 1, 8, 8}, a, ValueRange{0, 255});
    const SequenceTensor target(Shape4{1, 1, 8, 8}, b, ValueRange{0, 255});
    for (const double tau : taus) {
      const ContingencyTable got = contingency(pred, target, tau, {0, 255});
      const ref::Counts want = ref::contingency(pred, target, tau, 0, 255);
      if (got.hit != want.hit || got.mis != want.mis ||
          got.fas != want.fas || got.cr != want.cr) {
        ++mismatches;
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "500 pairs x 6 thresholds, %lld count mismatches",
                static_cast<long long>(mismatches));
  report("csi-brute-force", mismatches == 0, buf);
}

// --- criterion 4: weather constants --------------------------------------

void criterion_weather_constants() {
  bool pass = true;
  std::string detail;

  const LatitudeGrid wb = equiangular_grid(128);
  double mean = 0.0;
  for (const double a : wb.alpha) mean += a;
  mean /= 128.0;
  if (std::abs(mean - 1.0) > 1e-12) {
    pass = false;
    detail += "alpha-mean ";
  }

  std::mt19937_64 rng(4242);
  const SequenceTensor x = random_f64(rng, {2, 1, 8, 8}, -1.0, 1.0, {-2, 2});
  const Climatology clim = Climatology::zeros(1, 8, 8);
  const LatitudeGrid g8 = equiangular_grid(8);
  const double self_acc = acc(x, x, clim, g8, 0, {1, 1});
  if (std::abs(self_acc - 1.0) > 1e-12) {
    pass = false;
    detail += "acc-self ";
  }

  NinoSeries s;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 12; ++i) s.values.push_back(unit(rng));
  const double self_c = c_nino34(s, s);
  double m = 0.0;
  for (const double v : s.values) m += v;
  m /= 12.0;
  NinoSeries reflected;
  for (const double v : s.values) reflected.values.push_back(2.0 * m - v);
  const double anti_c = c_nino34(s, reflected);
  if (std::abs(self_c - 1.0) > 1e-12 || std::abs(anti_c + 1.0) > 1e-12) {
    pass = false;
    detail += "c-nino ";
  }

  const auto& region = default_nino_region();
  const bool crop_ok = region[1] == 3 && region[3] == 11 &&
                       region[0] >= 0 && region[0] + region[1] <= 24 &&
                       region[2] >= 0 && region[2] + region[3] <= 48;
  if (!crop_ok) {
    pass = false;
    detail += "crop ";
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "alpha-mean-1 %.1e, acc(x,x)-1 %.1e, c(y,y)-1 %.1e, "
                "crop 3x11@(%lld,%lld) %s",
                std::abs(mean - 1.0), std::abs(self_acc - 1.0),
                std::abs(self_c - 1.0), static_cast<long long>(region[0]),
                static_cast<long long>(region[2]), detail.c_str());
  report("weather-constants", pass, buf);
}

// --- criterion 5: protocol identities ------------------------------------

void criterion_protocol_identities() {
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(31337);

  // one-step rollout == direct predict, bitwise
  {
    const SequenceTensor input = random_f64(rng, {2, 1, 8, 8}, 0, 1, {0, 1});
    auto p = make_linear(2, 4);
    const SequenceTensor via_rollout = extrapolate(*p, input, 4);
    const SequenceTensor direct = p->predict(input);
    if (!via_rollout.same_data(direct)) {
      pass = false;
      detail += "one-step ";
    }
  }
  // persistence rollout to 30 frames: 30 identical frames
  {
    const SequenceTensor input = random_f64(rng, {5, 1, 8, 8}, 0, 1, {0, 1});
    auto p = make_persistence(5, 10);
    const SequenceTensor out = extrapolate(*p, input, 30);
    const SequenceTensor last = slice_window(input, 4, 1);
    bool same = out.frames() == 30;
    for (std::int64_t k = 0; same && k < 30; ++k) {
      same = slice_window(out, k, 1).same_data(last);
    }
    if (!same) {
      pass = false;
      detail += "persistence-30 ";
    }
  }
  // dt=1 robustness sub-report == short-term report, byte for byte
  {
    SynthSource source(2026, 10, 30, 64, 64);
    TaskSpec task = builtin_task("moving_mnist");
    task.l_in = 5;
    task.l_s = 5;
    auto p = make_persistence(5, 5);
    EvalOptions opt;
    const MetricReport short_term = evaluate(*p, source, task, opt);
    const auto sweep = robustness_sweep(*p, source, task, opt);
    if (serialize(sweep.at(0)) != serialize(short_term)) {
      pass = false;
      detail += "dt1-identity ";
    }
  }
  // WeatherBench-style 2-in/1-out rollout to 20 frames: 20 calls
  {
    class Counting : public Predictor {
     public:
      explicit Counting(std::unique_ptr<Predictor> inner)
          : inner_(std::move(inner)) {}
      SequenceTensor predict(const SequenceTensor& in) override {
        ++calls;
        return inner_->predict(in);
      }
      std::int64_t l_in() const override { return inner_->l_in(); }
      std::int64_t l_s() const override { return inner_->l_s(); }
      std::string name() const override { return "counting"; }
      std::int64_t calls = 0;

     private:
      std::unique_ptr<Predictor> inner_;
    };
    const SequenceTensor input = random_f64(rng, {2, 1, 8, 8}, 0, 1, {0, 1});
    Counting p(make_linear(2, 1));
    const SequenceTensor out = extrapolate(p, input, 20);
    if (out.frames() != 20 || p.calls != 20) {
      pass = false;
      detail += "wb-20-calls ";
    }
  }
  report("protocol-identities", pass,
         pass ? "rollout/robustness identities hold" : detail);
}

// --- criterion 6: oracle predictor end to end ----------------------------

// answers with the true target, looked up by the input window's bits
class MapOracle : public Predictor {
 public:
  MapOracle(const SequenceSource& source, std::int64_t l_in, std::int64_t l_s)
      : l_in_(l_in), l_s_(l_s) {
    for (std::int64_t i = 0; i < source.size(); ++i) {
      const SequenceTensor seq = source.get(i);
      WindowPair w = subsample_temporal(seq, 1, l_in, l_s);
      const auto key = w.input.f32();
      table_.emplace(std::vector<float>(key.begin(), key.end()),
                     std::move(w.target));
    }
  }

  SequenceTensor predict(const SequenceTensor& input) override {
    const auto span = input.f32();
    const auto it = table_.find(std::vector<float>(span.begin(), span.end()));
    if (it == table_.end()) {
      throw ContractError("oracle fed an unknown window");
    }
    return it->second;
  }
  std::int64_t l_in() const override { return l_in_; }
  std::int64_t l_s() const override { return l_s_; }
  std::string name() const override { return "oracle"; }

 private:
  std::int64_t l_in_, l_s_;
  std::map<std::vector<float>, SequenceTensor> table_;
};

void criterion_oracle_end_to_end() {
  const double t0 = now_seconds();
  SynthSource source(8088, 100, 20, 64, 64);
  TaskSpec task = builtin_task("moving_mnist");
  task.metrics = {"mae", "ssim", "csi", "psnr"};
  task.csi_thresholds = default_csi_thresholds();
  MapOracle oracle(source, task.l_in, task.l_s);
  EvalOptions opt;
  const MetricReport rep = evaluate(oracle, source, task, opt);
  const double elapsed = now_seconds() - t0;

  const bool pass = rep.consumed == 100 && rep.aggregate.at("mae") == 0.0 &&
                    rep.aggregate.at("ssim") == 1.0 &&
                    rep.aggregate.at("csi") == 1.0 &&
                    rep.flags.psnr_cap_frames == 100 * task.l_s &&
                    elapsed < 30.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "mae %.1e ssim-1 %.1e csi-1 %.1e cap-frames %lld/%lld, "
                "%.2fs (< 30s)",
                rep.aggregate.at("mae"),
                std::abs(rep.aggregate.at("ssim") - 1.0),
                std::abs(rep.aggregate.at("csi") - 1.0),
                static_cast<long long>(rep.flags.psnr_cap_frames),
                static_cast<long long>(100 * task.l_s), elapsed);
  report("oracle-end-to-end", pass, buf);
}

// --- criterion 7: stability ----------------------------------------------

void criterion_stability() {
  const StabilityReport r = stability({1, 2, 3, 4, 5, 2, 3, 4, 5, 6});
  const StabilityReport same = stability({3.25, 3.25, 3.25, 3.25});
  const bool pass =
      std::abs(r.p_value - 0.3466) <= 1e-3 && same.std_dev == 0.0;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "p %.6f (0.3466 +- 1e-3), identical std %g",
                r.p_value, same.std_dev);
  report("stability", pass, buf);
}

// --- criterion 8: determinism across worker counts ----------------------

void criterion_determinism() {
  SynthSource source(424242, 1000, 20, 64, 64);
  TaskSpec task = builtin_task("moving_mnist");
  auto p = make_persistence(task.l_in, task.l_s);
  EvalOptions opt;

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string one = serialize(evaluate(*p, source, task, opt));
  omp_set_num_threads(saved > 1 ? saved : 4);
  const std::string many = serialize(evaluate(*p, source, task, opt));
  omp_set_num_threads(saved);

  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "1000 sequences, 1 vs %d workers, %s (%zu bytes)",
                saved > 1 ? saved : 4,
                one == many ? "byte-identical" : "DIFFER", one.size());
  report("determinism", one == many, buf);
}

// --- criterion 9 (soft): throughput --------------------------------------

void criterion_throughput() {
  const std::int64_t n = 10000;
  const double t0 = now_seconds();
  std::vector<double> sink(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    synthgen::GenConfig cfg;
    cfg.seed = synthgen::sequence_seed(99, i);
    cfg.frames = 21;
    const SequenceTensor seq = synthgen::generate_sequence(cfg);
    const SequenceTensor pred = slice_window(seq, 0, 20);
    const SequenceTensor target = slice_window(seq, 1, 20);
    sink[static_cast<std::size_t>(i)] =
        mae(pred, target) + rmse(pred, target) +
        ssim(pred, target, SsimConstants{0.01, 0.03, 1.0}) +
        psnr(pred, target);
  }
  const double elapsed = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "MAE+RMSE+SSIM+PSNR over %lld (20,1,64,64) pairs in %.1fs "
                "on %d workers (target < 60s on 8 cores)",
                static_cast<long long>(n), elapsed, omp_get_max_threads());
  report("throughput (soft)", elapsed < 60.0, buf, /*soft=*/true);
}

}  // namespace

int main() {
  std::printf("acceptance suite, engine %s, %d OpenMP workers\n",
              kEngineVersion, omp_get_max_threads());
  criterion_metric_oracles();
  criterion_frechet();
  criterion_csi_bruteforce();
  criterion_weather_constants();
  criterion_protocol_identities();
  criterion_oracle_end_to_end();
  criterion_stability();
  criterion_determinism();
  criterion_throughput();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all hard criteria passed\n");
  return 0;
}

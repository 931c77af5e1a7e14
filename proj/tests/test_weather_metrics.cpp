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

#include <cmath>

#include "doctest.h"
#include "stpeval/frame_metrics.hpp"
#include "stpeval/npy.hpp"
#include "stpeval/ref/serial.hpp"
#include "stpeval/task.hpp"
#include "stpeval/weather_metrics.hpp"
#include "test_util.hpp"

using namespace stpeval;

TEST_CASE("latitude weights") {
  SUBCASE("uniform latitudes give unit weights") {
    const LatitudeGrid g = latitude_weights({30.0, 30.0, 30.0});
    for (const double a : g.alpha) CHECK(a == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("cos(0):cos(60) = 1:0.5 -> weights 4/3, 2/3") {
    const LatitudeGrid g = latitude_weights({0.0, 60.0});
    CHECK(g.alpha[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(g.alpha[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("weight mean is one for any valid grid") {
    testutil::Rng rng(20);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> phi;
      const std::int64_t rows = rng.integer(1, 200);
      for (std::int64_t i = 0; i < rows; ++i) {
        phi.push_back(rng.uniform(-89.9, 89.9));
      }
      const LatitudeGrid g = latitude_weights(phi);
      double mean = 0.0;
      for (const double a : g.alpha) {
        mean += a;
        CHECK(a > 0.0);
      }
      mean /= static_cast<double>(rows);
      CHECK(std::abs(mean - 1.0) <= 1e-12);
    }
  }
  SUBCASE("128-row equiangular grid, as on the 128x256 resolution") {
    const LatitudeGrid g = equiangular_grid(128);
    REQUIRE(g.rows() == 128);
    double mean = 0.0;
    for (const double a : g.alpha) mean += a;
    CHECK(std::abs(mean / 128.0 - 1.0) <= 1e-12);
  }
  SUBCASE("poles are out of domain") {
    CHECK_THROWS_AS(latitude_weights({0.0, 90.0}), DomainError);
    CHECK_THROWS_AS(latitude_weights({-95.0}), DomainError);
  }
}

TEST_CASE("wrmse") {
  SUBCASE("zero for identical fields") {
    testutil::Rng rng(21);
    const SequenceTensor x = testutil::random_tensor(rng, {3, 2, 4, 4});
    const LatitudeGrid g = equiangular_grid(4);
    CHECK(wrmse(x, x, g, 1) == 0.0);
  }
  SUBCASE("uniform grid reduces to single-channel rmse") {
    testutil::Rng rng(22);
    const SequenceTensor a = testutil::random_tensor(rng, {3, 1, 4, 4});
    const SequenceTensor b = testutil::random_tensor(rng, {3, 1, 4, 4});
    const LatitudeGrid uniform = latitude_weights({10, 10, 10, 10});
    CHECK(wrmse(a, b, uniform, 0) ==
          doctest::Approx(rmse(a, b)).epsilon(1e-12));
  }
  SUBCASE("hand-weighted 2x2 case") {
    // errors {1,1} on row 0, {0,0} on row 1; alpha {4/3, 2/3}
    const SequenceTensor target(Shape4{1, 1, 2, 2},
                                std::vector<double>{1, 1, 0, 0},
                                ValueRange{-1, 2});
    const SequenceTensor pred = testutil::constant_tensor({1, 1, 2, 2}, 0.0,
                                                          {-1, 2});
    const LatitudeGrid g = latitude_weights({0.0, 60.0});
    CHECK(wrmse(pred, target, g, 0) ==
          doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("matches the scalar reference") {
    testutil::Rng rng(23);
    const LatitudeGrid g = latitude_weights({-40, -10, 25, 70});
    for (int trial = 0; trial < 10; ++trial) {
      const SequenceTensor a = testutil::random_tensor(rng, {2, 2, 4, 5});
      const SequenceTensor b = testutil::random_tensor(rng, {2, 2, 4, 5});
      CHECK(wrmse(a, b, g, 1) ==
            doctest::Approx(ref::wrmse(a, b, g.alpha, 1)).epsilon(1e-12));
    }
  }
  SUBCASE("grid/height mismatch") {
    const SequenceTensor x = testutil::constant_tensor({1, 1, 4, 4}, 0.1);
    CHECK_THROWS_AS(wrmse(x, x, latitude_weights({0, 10}), 0), ShapeError);
  }
}

TEST_CASE("climatology fitting") {
  SUBCASE("single sample per day reproduces the samples") {
    const SequenceTensor f1 = testutil::constant_tensor({1, 1, 2, 2}, 3.0,
                                                        {0, 5});
    const Climatology clim = fit_climatology({{17, f1}});
    CHECK(clim.populated(17));
    CHECK_FALSE(clim.populated(18));
    CHECK(clim.day_mean(17)[0] == 3.0);
    CHECK_THROWS_AS(clim.day_mean(18), CoverageError);
  }
  SUBCASE("two samples average") {
    const SequenceTensor a = testutil::constant_tensor({1, 1, 2, 2}, 0.0,
                                                       {-1, 3});
    const SequenceTensor b = testutil::constant_tensor({1, 1, 2, 2}, 2.0,
                                                       {-1, 3});
    const Climatology clim = fit_climatology({{5, a}, {5, b}});
    CHECK(clim.day_mean(5)[3] == 1.0);
  }
  SUBCASE("random grouping matches a scalar fold") {
    testutil::Rng rng(24);
    std::vector<std::pair<std::int64_t, SequenceTensor>> history;
    std::vector<std::vector<double>> by_day_sum(8,
                                                std::vector<double>(4, 0.0));
    std::vector<int> by_day_n(8, 0);
    for (int i = 0; i < 40; ++i) {
      const std::int64_t day = rng.integer(1, 8);
      const SequenceTensor f = testutil::random_tensor(rng, {1, 1, 2, 2});
      const auto v = f.to_f64();
      for (int k = 0; k < 4; ++k) {
        by_day_sum[static_cast<std::size_t>(day - 1)][static_cast<std::size_t>(
            k)] += v[static_cast<std::size_t>(k)];
      }
      ++by_day_n[static_cast<std::size_t>(day - 1)];
      history.emplace_back(day, f);
    }
    const Climatology clim = fit_climatology(history);
    for (std::int64_t day = 1; day <= 8; ++day) {
      if (by_day_n[static_cast<std::size_t>(day - 1)] == 0) continue;
      const double* mean = clim.day_mean(day);
      for (int k = 0; k < 4; ++k) {
        CHECK(mean[k] ==
              doctest::Approx(
                  by_day_sum[static_cast<std::size_t>(day - 1)]
                            [static_cast<std::size_t>(k)] /
                  by_day_n[static_cast<std::size_t>(day - 1)])
                  .epsilon(1e-12));
      }
    }
  }
  SUBCASE("leap-day falls back to day 365") {
    const SequenceTensor f = testutil::constant_tensor({1, 1, 2, 2}, 1.5,
                                                       {0, 2});
    const Climatology clim = fit_climatology({{365, f}});
    bool fell_back = false;
    CHECK(clim.day_mean(366, &fell_back)[0] == 1.5);
    CHECK(fell_back);
  }
  SUBCASE("save/load round trip") {
    testutil::TempDir tmp("clim");
    const SequenceTensor f = testutil::constant_tensor({1, 2, 2, 2}, 0.25,
                                                       {0, 1});
    const Climatology clim = fit_climatology({{1, f}, {200, f}});
    const auto path = tmp.path() / "clim.npy";
    clim.save(path);
    const Climatology back = Climatology::load(path);
    CHECK(back.populated(1));
    CHECK(back.populated(200));
    CHECK_FALSE(back.populated(2));
    CHECK(back.day_mean(200)[7] == 0.25);
  }
}

TEST_CASE("acc") {
  const LatitudeGrid g4 = equiangular_grid(4);
  SUBCASE("perfect prediction with nonzero anomalies scores 1") {
    testutil::Rng rng(25);
    const SequenceTensor x = testutil::random_tensor(rng, {2, 1, 4, 4});
    const Climatology clim = Climatology::zeros(1, 4, 4);
    const double v = acc(x, x, clim, g4, 0, {1, 1});
    CHECK(std::abs(v - 1.0) <= 1e-12);
  }
  SUBCASE("negated anomalies score -1") {
    testutil::Rng rng(26);
    const SequenceTensor x = testutil::random_tensor(rng, {1, 1, 4, 4});
    std::vector<double> neg = x.to_f64();
    for (double& a : neg) a = -a;
    const SequenceTensor y(x.shape(), neg, ValueRange{-1, 1});
    const Climatology clim = Climatology::zeros(1, 4, 4);
    CHECK(std::abs(acc(x.with_value_range({-1, 1}), y, clim, g4, 0, {1}) +
                   1.0) <= 1e-12);
  }
  SUBCASE("matches a scalar weighted-correlation oracle") {
    testutil::Rng rng(27);
    const SequenceTensor a = testutil::random_tensor(rng, {1, 1, 4, 4});
    const SequenceTensor b = testutil::random_tensor(rng, {1, 1, 4, 4});
    // hand-built climatology for day 9
    const SequenceTensor cf = testutil::random_tensor(rng, {1, 1, 4, 4});
    const Climatology clim = fit_climatology({{9, cf}});
    std::vector<double> clim_frame(cf.to_f64());
    const double got = acc(a, b, clim, g4, 0, {9});
    const double want =
        ref::acc_one_frame(a, b, clim_frame, g4.alpha, 0, 0);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("missing climatology day raises CoverageError") {
    const SequenceTensor x = testutil::constant_tensor({1, 1, 4, 4}, 0.5);
    const Climatology clim =
        fit_climatology({{1, testutil::constant_tensor({1, 1, 4, 4}, 0.0)}});
    CHECK_THROWS_AS(acc(x, x, clim, g4, 0, {2}), CoverageError);
  }
  SUBCASE("zero anomaly energy is degenerate") {
    const SequenceTensor x = testutil::constant_tensor({1, 1, 4, 4}, 0.5);
    const Climatology clim =
        fit_climatology({{1, testutil::constant_tensor({1, 1, 4, 4}, 0.5)}});
    CHECK_THROWS_AS(acc(x, x, clim, g4, 0, {1}), DegenerateAnomalyError);
  }
}

TEST_CASE("contingency and CSI") {
  SUBCASE("identical fields have no misses or false alarms") {
    testutil::Rng rng(28);
    const SequenceTensor x = testutil::random_tensor(rng, {2, 1, 8, 8});
    const ContingencyTable t = contingency(x, x, 133.0, {0.0, 1.0});
    CHECK(t.mis == 0);
    CHECK(t.fas == 0);
    CHECK(t.total() == x.shape().total());
  }
  SUBCASE("hand-counted 4-pixel case gives CSI 0.5") {
    // target {1,1,0,0}, pred {1,1,1,1} on a 0..1 range, tau mid-scale
    const SequenceTensor target(Shape4{1, 1, 2, 2},
                                std::vector<double>{1, 1, 0, 0},
                                ValueRange{0, 1});
    const SequenceTensor pred = testutil::constant_tensor({1, 1, 2, 2}, 1.0);
    const ContingencyTable t = contingency(pred, target, 133.0, {0.0, 1.0});
    CHECK(t.hit == 2);
    CHECK(t.fas == 2);
    CHECK(t.mis == 0);
    CHECK(t.cr == 0);
    const CsiResult csi = csi_mean(pred, target, {133.0}, {0.0, 1.0});
    CHECK(csi.mean == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("counts equal the brute-force loop at the six defaults") {
    testutil::Rng rng(29);
    const auto& taus = default_csi_thresholds();
    REQUIRE(taus == std::vector<double>{16, 74, 133, 160, 181, 219});
    for (int trial = 0; trial < 50; ++trial) {
      const SequenceTensor a =
          testutil::random_tensor(rng, {1, 1, 8, 8}, 0.0, 255.0, {0, 255});
      const SequenceTensor b =
          testutil::random_tensor(rng, {1, 1, 8, 8}, 0.0, 255.0, {0, 255});
      for (const double tau : taus) {
        const ContingencyTable got = contingency(a, b, tau, {0.0, 255.0});
        const ref::Counts want = ref::contingency(a, b, tau, 0.0, 255.0);
        CHECK(got.hit == want.hit);
        CHECK(got.mis == want.mis);
        CHECK(got.fas == want.fas);
        CHECK(got.cr == want.cr);
      }
    }
  }
  SUBCASE("perfect prediction with events at every threshold -> mean 1") {
    std::vector<double> v;
    for (int i = 0; i < 16; ++i) v.push_back(i * 17.0);  // spans 0..255
    const SequenceTensor x(Shape4{1, 1, 4, 4}, v, ValueRange{0, 255});
    const CsiResult csi =
        csi_mean(x, x, default_csi_thresholds(), {0.0, 255.0});
    CHECK(csi.mean == 1.0);
    CHECK(csi.vacuous_thresholds == 0);
  }
  SUBCASE("thresholds with no events are vacuously perfect and flagged") {
    const SequenceTensor lo = testutil::constant_tensor({1, 1, 2, 2}, 0.0,
                                                        {0, 255});
    const CsiResult csi = csi_mean(lo, lo, {219.0}, {0.0, 255.0});
    CHECK(csi.mean == 1.0);
    CHECK(csi.vacuous_thresholds == 1);
  }
  SUBCASE("degenerate declared range") {
    const SequenceTensor x = testutil::constant_tensor({1, 1, 2, 2}, 0.5);
    CHECK_THROWS_AS(contingency(x, x, 10.0, {1.0, 1.0}), RangeError);
  }
}

TEST_CASE("nino34 index") {
  SUBCASE("constant fields give a constant series of length T-2") {
    const SequenceTensor x = testutil::constant_tensor({5, 1, 24, 48}, 2.5,
                                                       {-5, 5});
    const NinoSeries s = nino34_index(x, NinoRegion{});
    REQUIRE(s.values.size() == 3);
    for (const double v : s.values) {
      CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
    }
  }
  SUBCASE("default crop is the 3x11 box inside the 24x48 grid") {
    const auto& r = default_nino_region();
    CHECK(r == std::vector<std::int64_t>{11, 3, 20, 11});
    const NinoRegion region;
    CHECK(region.row_len == 3);
    CHECK(region.col_len == 11);
    CHECK(region.row_start + region.row_len <= 24);
    CHECK(region.col_start + region.col_len <= 48);
  }
  SUBCASE("ramp spatial means 1..5 -> moving averages {2,3,4}") {
    std::vector<double> v;
    for (int t = 1; t <= 5; ++t) {
      for (int i = 0; i < 24 * 48; ++i) v.push_back(double(t));
    }
    const SequenceTensor x(Shape4{5, 1, 24, 48}, v, ValueRange{0, 6});
    const NinoSeries s = nino34_index(x, NinoRegion{});
    REQUIRE(s.values.size() == 3);
    CHECK(s.values[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.values[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.values[2] == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("too-short sequences and bad regions are rejected") {
    const SequenceTensor x = testutil::constant_tensor({2, 1, 24, 48}, 0.0,
                                                       {-1, 1});
    CHECK_THROWS_AS(nino34_index(x, NinoRegion{}), RangeError);
    const SequenceTensor y = testutil::constant_tensor({4, 1, 10, 10}, 0.0,
                                                       {-1, 1});
    CHECK_THROWS_AS(nino34_index(y, NinoRegion{}), RangeError);
  }
  SUBCASE("the index is linear in the field") {
    testutil::Rng rng(30);
    const SequenceTensor a = testutil::random_tensor(rng, {6, 1, 24, 48});
    const SequenceTensor b = testutil::random_tensor(rng, {6, 1, 24, 48});
    std::vector<double> sum = a.to_f64();
    const auto bv = b.to_f64();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += bv[i];
    const SequenceTensor ab(a.shape(), sum, ValueRange{0, 2});
    const NinoSeries sa = nino34_index(a, NinoRegion{});
    const NinoSeries sb = nino34_index(b, NinoRegion{});
    const NinoSeries sab = nino34_index(ab, NinoRegion{});
    for (std::size_t i = 0; i < sab.values.size(); ++i) {
      CHECK(sab.values[i] ==
            doctest::Approx(sa.values[i] + sb.values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("c_nino34 correlation") {
  SUBCASE("a series against itself is 1, against its reflection -1") {
    NinoSeries s{{0.3, -0.2, 0.9, 0.1, -0.5}};
    CHECK(c_nino34(s, s) == doctest::Approx(1.0).epsilon(1e-12));
    double mean = 0.0;
    for (const double v : s.values) mean += v;
    mean /= static_cast<double>(s.values.size());
    NinoSeries reflected;
    for (const double v : s.values) reflected.values.push_back(2 * mean - v);
    CHECK(c_nino34(s, reflected) == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("matches the scalar Pearson oracle") {
    testutil::Rng rng(31);
    NinoSeries a, b;
    for (int i = 0; i < 12; ++i) {
      a.values.push_back(rng.uniform(-1, 1));
      b.values.push_back(rng.uniform(-1, 1));
    }
    CHECK(c_nino34(a, b) ==
          doctest::Approx(ref::pearson(a.values, b.values)).epsilon(1e-12));
  }
  SUBCASE("invariant under positive affine maps, negated by flips") {
    testutil::Rng rng(32);
    NinoSeries a, b, scaled;
    for (int i = 0; i < 10; ++i) {
      a.values.push_back(rng.uniform(-1, 1));
      b.values.push_back(rng.uniform(-1, 1));
    }
    for (const double v : a.values) scaled.values.push_back(2.5 * v + 7.0);
    CHECK(c_nino34(scaled, b) ==
          doctest::Approx(c_nino34(a, b)).epsilon(1e-12));
    NinoSeries flipped;
    for (const double v : a.values) flipped.values.push_back(-0.5 * v + 1.0);
    CHECK(c_nino34(flipped, b) ==
          doctest::Approx(-c_nino34(a, b)).epsilon(1e-12));
  }
  SUBCASE("constant series are degenerate") {
    NinoSeries flat{{1.0, 1.0, 1.0}};
    NinoSeries live{{0.0, 1.0, 2.0}};
    CHECK_THROWS_AS(c_nino34(flat, live), DegenerateSeriesError);
  }
}

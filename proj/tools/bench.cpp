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

// Times the OpenMP kernels against the serial reference implementations
// on identical inputs, and the sequence-parallel evaluation loop against
// a one-thread run.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "stpeval/frame_metrics.hpp"
#include "stpeval/protocol.hpp"
#include "stpeval/ref/serial.hpp"
#include "stpeval/synthgen.hpp"
#include "stpeval/weather_metrics.hpp"

using namespace stpeval;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report_row(const std::string& name, double serial_s, double parallel_s,
                double serial_val, double parallel_val) {
  std::printf("%-14s serial %9.4f ms   parallel %9.4f ms   speedup %5.2fx   |diff| %.3e\n",
              name.c_str(), serial_s * 1e3, parallel_s * 1e3,
              serial_s / parallel_s, std::abs(serial_val - parallel_val));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel benchmark: serial reference vs OpenMP"};
  std::int64_t frames = 20, height = 256, width = 256;
  std::int64_t seq_count = 200;
  int reps = 5;
  int threads = 0;
  app.add_option("--frames", frames, "frames per sequence");
  app.add_option("--height", height, "frame rows");
  app.add_option("--width", width, "frame cols");
  app.add_option("--sequences", seq_count, "sequences for the engine run");
  app.add_option("--reps", reps, "timing repetitions");
  app.add_option("--threads", threads, "OpenMP worker count (0 = default)");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  std::printf("kernel inputs: [%lld,1,%lld,%lld], %d threads\n",
              static_cast<long long>(frames), static_cast<long long>(height),
              static_cast<long long>(width), omp_get_max_threads());

  synthgen::GenConfig cfg;
  cfg.seed = 7;
  cfg.frames = frames;
  cfg.height = height;
  cfg.width = width;
  const SequenceTensor target = synthgen::generate_sequence(cfg);
  cfg.seed = 8;
  const SequenceTensor pred = synthgen::generate_sequence(cfg);

  const SsimConstants consts{0.01, 0.03, 1.0};

  {
    double sv = 0, pv = 0;
    const double st = seconds([&] { sv = ref::mae(pred, target); }, reps);
    const double pt = seconds([&] { pv = mae(pred, target); }, reps);
    report_row("mae", st, pt, sv, pv);
  }
  {
    double sv = 0, pv = 0;
    const double st = seconds([&] { sv = ref::rmse(pred, target); }, reps);
    const double pt = seconds([&] { pv = rmse(pred, target); }, reps);
    report_row("rmse", st, pt, sv, pv);
  }
  {
    double sv = 0, pv = 0;
    const double st =
        seconds([&] { sv = ref::ssim(pred, target, 0.01, 0.03, 1.0); }, reps);
    const double pt = seconds([&] { pv = ssim(pred, target, consts); }, reps);
    report_row("ssim", st, pt, sv, pv);
  }
  {
    double sv = 0, pv = 0;
    const double st =
        seconds([&] { sv = ref::psnr(pred, target, 100.0); }, reps);
    const double pt = seconds([&] { pv = psnr(pred, target); }, reps);
    report_row("psnr", st, pt, sv, pv);
  }
  {
    double sv = 0, pv = 0;
    const double st = seconds(
        [&] {
          const auto c = ref::contingency(pred, target, 133.0, 0.0, 1.0);
          sv = static_cast<double>(c.hit + c.fas);
        },
        reps);
    const double pt = seconds(
        [&] {
          const auto c = contingency(pred, target, 133.0, {0.0, 1.0});
          pv = static_cast<double>(c.hit + c.fas);
        },
        reps);
    report_row("contingency", st, pt, sv, pv);
  }

  // engine loop: sequences in parallel vs forced single thread
  {
    TaskSpec task = builtin_task("moving_mnist");
    task.height = 64;
    task.width = 64;
    SynthSource source(11, seq_count, required_frames(1, task.l_in, task.l_s),
                       64, 64);
    auto p = make_persistence(task.l_in, task.l_s);
    EvalOptions opt;
    double agg1 = 0, aggN = 0;
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const double t1 = seconds(
        [&] { agg1 = evaluate(*p, source, task, opt).aggregate.at("mae"); },
        1);
    omp_set_num_threads(max_threads);
    const double tN = seconds(
        [&] { aggN = evaluate(*p, source, task, opt).aggregate.at("mae"); },
        1);
    std::printf(
        "engine (%lld seqs) 1 thread %8.1f ms   %d threads %8.1f ms   "
        "speedup %5.2fx   |diff| %.3e\n",
        static_cast<long long>(seq_count), t1 * 1e3, max_threads, tN * 1e3,
        t1 / tN, std::abs(agg1 - aggN));
  }
  return 0;
}

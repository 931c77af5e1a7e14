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

#ifndef STPEVAL_PROTOCOL_HPP
#define STPEVAL_PROTOCOL_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "stpeval/report.hpp"
#include "stpeval/task.hpp"
#include "stpeval/tensor.hpp"
#include "stpeval/weather_metrics.hpp"

namespace stpeval {

// Behavioral contract: maps [L_in,C,H,W] to [L_s,C,H,W]. predict()
// must either be safe for concurrent invocation or report
// thread_safe() == false, which serializes the engine.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual SequenceTensor predict(const SequenceTensor& input) = 0;
  virtual std::int64_t l_in() const = 0;
  virtual std::int64_t l_s() const = 0;
  virtual std::string name() const = 0;
  virtual bool thread_safe() const { return true; }
};

// Repeats the last observed frame.
std::unique_ptr<Predictor> make_persistence(std::int64_t l_in,
                                            std::int64_t l_s);

// Pixelwise linear extrapolation from the last two frames, clamped to
// the declared value range.
std::unique_ptr<Predictor> make_linear(std::int64_t l_in, std::int64_t l_s);

// File-exchange predictor: for sequence n it expects
// <dir>/seq<n>_pred.npy with l_out frames; emit_inputs() writes the
// matching seq<n>_in.npy windows.
class FilePredictor : public Predictor {
 public:
  FilePredictor(std::filesystem::path dir, std::int64_t l_in,
                std::int64_t l_out);

  SequenceTensor predict(const SequenceTensor& input) override;
  SequenceTensor predict_indexed(std::int64_t seq_index,
                                 const SequenceTensor& input);
  std::int64_t l_in() const override { return l_in_; }
  std::int64_t l_s() const override { return l_out_; }
  std::string name() const override { return "files"; }

  static std::string input_name(std::int64_t seq_index);
  static std::string pred_name(std::int64_t seq_index);

 private:
  std::filesystem::path dir_;
  std::int64_t l_in_;
  std::int64_t l_out_;
};

// Iterative rollout: keep feeding the last L_in frames of
// input-plus-predictions back in until L_total predicted frames exist;
// a final overshooting call keeps its earliest frames.
SequenceTensor extrapolate(Predictor& p, const SequenceTensor& input,
                           std::int64_t l_total);

// Uniform access to evaluation sequences; get() must be safe to call
// concurrently for distinct indices.
class SequenceSource {
 public:
  virtual ~SequenceSource() = default;
  virtual std::int64_t size() const = 0;
  virtual SequenceTensor get(std::int64_t index) const = 0;
};

// On-the-fly deterministic synthetic sequences.
class SynthSource : public SequenceSource {
 public:
  SynthSource(std::uint64_t master_seed, std::int64_t count,
              std::int64_t frames, std::int64_t height, std::int64_t width,
              std::int64_t n_sprites = 2);

  std::int64_t size() const override { return count_; }
  SequenceTensor get(std::int64_t index) const override;

 private:
  std::uint64_t master_seed_;
  std::int64_t count_, frames_, height_, width_, n_sprites_;
};

// NPY files listed by a JSON manifest, paths relative to it.
class ManifestSource : public SequenceSource {
 public:
  explicit ManifestSource(const std::filesystem::path& manifest_path,
                          ValueRange declared_range);

  std::int64_t size() const override;
  SequenceTensor get(std::int64_t index) const override;
  const std::string& provenance() const { return provenance_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<std::filesystem::path> files_;
  std::string provenance_;
  std::string name_;
  ValueRange range_;
};

enum class Dimension { kShortTerm, kLongTerm, kGeneralization, kRobustness };

const char* dimension_name(Dimension d);
Dimension dimension_from_name(const std::string& name);

struct EvalOptions {
  Dimension dimension = Dimension::kShortTerm;
  std::int64_t dt = 1;
  std::vector<std::string> metrics;  // empty = task.metrics
  double psnr_cap_db = 100.0;
  double clamp_tolerance = 1e-6;
  std::string train_provenance;
  std::string eval_provenance;
  // day-of-year of each target frame = ((start_doy - 1 + k*step_days)
  // mod 366) + 1; a zero climatology is assumed when none is given
  std::int64_t acc_start_doy = 1;
  std::int64_t acc_step_days = 0;
  const Climatology* climatology = nullptr;
  std::string config_hash;
};

// One pass of the engine over a source: window, predict (rollout for
// the long-term dimension), score, aggregate.
MetricReport evaluate(Predictor& p, const SequenceSource& source,
                      const TaskSpec& task, const EvalOptions& opt);

// dt sweep over task.dt_multipliers; index i holds the dt_i sub-report.
std::vector<MetricReport> robustness_sweep(Predictor& p,
                                           const SequenceSource& source,
                                           const TaskSpec& task,
                                           EvalOptions opt);

// Emit seq<n>_in.npy windows for every usable sequence; returns the
// number written. Pairs with FilePredictor.
std::int64_t emit_input_windows(const SequenceSource& source,
                                const TaskSpec& task, Dimension dimension,
                                std::int64_t dt,
                                const std::filesystem::path& dir);

}  // namespace stpeval

#endif  // STPEVAL_PROTOCOL_HPP

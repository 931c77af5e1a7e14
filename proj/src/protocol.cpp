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

#include "stpeval/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stpeval/detail/span_dispatch.hpp"
#include "stpeval/frame_metrics.hpp"
#include "stpeval/npy.hpp"
#include "stpeval/synthgen.hpp"

namespace stpeval {

namespace {

class PersistencePredictor final : public Predictor {
 public:
  PersistencePredictor(std::int64_t l_in, std::int64_t l_s)
      : l_in_(l_in), l_s_(l_s) {
    if (l_in_ < 1 || l_s_ < 1) {
      throw ConfigError("persistence requires L_in, L_s >= 1");
    }
  }

  SequenceTensor predict(const SequenceTensor& input) override {
    const SequenceTensor last =
        slice_window(input, input.frames() - 1, 1);
    SequenceTensor out = last;
    for (std::int64_t k = 1; k < l_s_; ++k) out = concat_time(out, last);
    return out;
  }

  std::int64_t l_in() const override { return l_in_; }
  std::int64_t l_s() const override { return l_s_; }
  std::string name() const override { return "persistence"; }

 private:
  std::int64_t l_in_, l_s_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(std::int64_t l_in, std::int64_t l_s)
      : l_in_(l_in), l_s_(l_s) {
    if (l_in_ < 2) {
      throw ConfigError("linear extrapolation requires L_in >= 2");
    }
    if (l_s_ < 1) throw ConfigError("linear requires L_s >= 1");
  }

  SequenceTensor predict(const SequenceTensor& input) override {
    if (input.frames() < 2) {
      throw ContractError("linear predictor fed fewer than 2 frames");
    }
    const Shape4& s = input.shape();
    const std::int64_t fe = s.frame_elems();
    const std::vector<double> v = input.to_f64();
    const double* prev = v.data() + (s.t - 2) * fe;
    const double* last = v.data() + (s.t - 1) * fe;
    const ValueRange range = input.value_range();
    std::vector<double> out(static_cast<std::size_t>(l_s_ * fe));
    for (std::int64_t k = 1; k <= l_s_; ++k) {
      double* dst = out.data() + (k - 1) * fe;
      for (std::int64_t i = 0; i < fe; ++i) {
        const double x = last[i] + static_cast<double>(k) * (last[i] - prev[i]);
        dst[i] = std::clamp(x, range.vmin, range.vmax);
      }
    }
    return SequenceTensor(Shape4{l_s_, s.c, s.h, s.w}, std::move(out), range,
                          input.frame_interval());
  }

  std::int64_t l_in() const override { return l_in_; }
  std::int64_t l_s() const override { return l_s_; }
  std::string name() const override { return "linear"; }

 private:
  std::int64_t l_in_, l_s_;
};

}  // namespace

std::unique_ptr<Predictor> make_persistence(std::int64_t l_in,
                                            std::int64_t l_s) {
  return std::make_unique<PersistencePredictor>(l_in, l_s);
}

std::unique_ptr<Predictor> make_linear(std::int64_t l_in, std::int64_t l_s) {
  return std::make_unique<LinearPredictor>(l_in, l_s);
}

FilePredictor::FilePredictor(std::filesystem::path dir, std::int64_t l_in,
                             std::int64_t l_out)
    : dir_(std::move(dir)), l_in_(l_in), l_out_(l_out) {
  if (!std::filesystem::is_directory(dir_)) {
    throw ConfigError("prediction exchange dir does not exist: " +
                      dir_.string());
  }
}

std::string FilePredictor::input_name(std::int64_t seq_index) {
  return "seq" + std::to_string(seq_index) + "_in.npy";
}

std::string FilePredictor::pred_name(std::int64_t seq_index) {
  return "seq" + std::to_string(seq_index) + "_pred.npy";
}

SequenceTensor FilePredictor::predict(const SequenceTensor&) {
  throw ConfigError(
      "file predictor resolves predictions by sequence index; run it "
      "through the evaluation engine");
}

SequenceTensor FilePredictor::predict_indexed(std::int64_t seq_index,
                                              const SequenceTensor& input) {
  const std::filesystem::path path = dir_ / pred_name(seq_index);
  if (!std::filesystem::exists(path)) {
    throw ContractError("missing prediction file " + path.string());
  }
  SequenceTensor pred = npy::load_array(path);
  return pred.with_value_range(input.value_range());
}

SequenceTensor extrapolate(Predictor& p, const SequenceTensor& input,
                           std::int64_t l_total) {
  const std::int64_t l_in = p.l_in();
  const std::int64_t l_s = p.l_s();
  if (l_total < l_s) {
    throw ConfigError("extrapolate: L_total must be >= the predictor's L_s");
  }
  if (input.frames() < l_in) {
    throw RangeError("extrapolate: input shorter than the predictor's L_in");
  }
  const Shape4& s = input.shape();
  SequenceTensor window = slice_window(input, input.frames() - l_in, l_in);

  std::vector<SequenceTensor> chunks;
  std::int64_t predicted = 0;
  while (predicted < l_total) {
    SequenceTensor out = p.predict(window);
    const Shape4& os = out.shape();
    if (os.t != l_s || os.c != s.c || os.h != s.h || os.w != s.w) {
      throw ContractError("predictor output shape violates its contract");
    }
    chunks.push_back(out);
    predicted += l_s;
    if (predicted >= l_total) break;
    // slide: last L_in frames of (history + new predictions)
    window = slice_window(concat_time(window, out), out.frames(), l_in);
  }
  SequenceTensor all = chunks.front();
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    all = concat_time(all, chunks[i]);
  }
  return slice_window(all, 0, l_total);
}

SynthSource::SynthSource(std::uint64_t master_seed, std::int64_t count,
                         std::int64_t frames, std::int64_t height,
                         std::int64_t width, std::int64_t n_sprites)
    : master_seed_(master_seed),
      count_(count),
      frames_(frames),
      height_(height),
      width_(width),
      n_sprites_(n_sprites) {
  synthgen::GenConfig probe;
  probe.seed = master_seed_;
  probe.n_sprites = n_sprites_;
  probe.frames = frames_;
  probe.height = height_;
  probe.width = width_;
  probe.validate();
  if (count_ < 0) throw ConfigError("negative sequence count");
}

SequenceTensor SynthSource::get(std::int64_t index) const {
  synthgen::GenConfig cfg;
  cfg.seed = synthgen::sequence_seed(master_seed_, index);
  cfg.n_sprites = n_sprites_;
  cfg.frames = frames_;
  cfg.height = height_;
  cfg.width = width_;
  return synthgen::generate_sequence(cfg);
}

ManifestSource::ManifestSource(const std::filesystem::path& manifest_path,
                               ValueRange declared_range)
    : range_(declared_range) {
  std::ifstream f(manifest_path);
  if (!f) throw IoError("cannot open manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    f >> j;
    name_ = j.value("name", manifest_path.stem().string());
    provenance_ = j.value("provenance", name_);
    const auto base = manifest_path.parent_path();
    for (const auto& entry : j.at("sequences")) {
      files_.push_back(base / entry.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
}

std::int64_t ManifestSource::size() const {
  return static_cast<std::int64_t>(files_.size());
}

SequenceTensor ManifestSource::get(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw RangeError("manifest index out of range");
  }
  SequenceTensor seq =
      npy::load_array(files_[static_cast<std::size_t>(index)]);
  return seq.with_value_range(range_);
}

const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::kShortTerm:
      return "short_term";
    case Dimension::kLongTerm:
      return "long_term";
    case Dimension::kGeneralization:
      return "generalization";
    case Dimension::kRobustness:
      return "robustness";
  }
  return "?";
}

Dimension dimension_from_name(const std::string& name) {
  if (name == "short_term") return Dimension::kShortTerm;
  if (name == "long_term") return Dimension::kLongTerm;
  if (name == "generalization") return Dimension::kGeneralization;
  if (name == "robustness") return Dimension::kRobustness;
  throw ConfigError("unknown dimension '" + name + "'");
}

namespace {

struct SequenceScore {
  bool skipped = false;
  std::vector<double> values;                 // one per metric
  std::vector<std::vector<double>> curves;    // empty when undecomposable
  std::int64_t psnr_caps = 0;
  std::int64_t csi_vacuous = 0;
  std::int64_t clamp_events = 0;
  std::int64_t clim_fallbacks = 0;
  std::exception_ptr error;
};

struct EvalContext {
  const TaskSpec* task;
  const EvalOptions* opt;
  std::int64_t l_out;
  std::vector<std::string> metrics;
  SsimConstants ssim_consts;
  LatitudeGrid grid;                 // populated iff wrmse/acc requested
  const Climatology* clim = nullptr;
  std::unique_ptr<Climatology> default_clim;
  NinoRegion nino;
  std::vector<double> csi_taus;
};

bool needs(const std::vector<std::string>& metrics, const char* name) {
  return std::find(metrics.begin(), metrics.end(), name) != metrics.end();
}

std::int64_t day_of_year(const EvalOptions& opt, std::int64_t abs_frame) {
  return ((opt.acc_start_doy - 1 + abs_frame * opt.acc_step_days) % 366) + 1;
}

// clamp prediction into the declared range; events beyond the float
// tolerance are flagged; in-range predictions pass through untouched
SequenceTensor clamp_prediction(const SequenceTensor& pred,
                                const ValueRange& range, double tol,
                                std::int64_t* flagged) {
  const double worst = detail::with_span(pred, [&](auto span) {
    double w = 0.0;
    for (const auto raw : span) {
      const double x = static_cast<double>(raw);
      if (x < range.vmin) {
        w = std::max(w, range.vmin - x);
      } else if (x > range.vmax) {
        w = std::max(w, x - range.vmax);
      }
    }
    return w;
  });
  if (worst == 0.0) return pred;
  if (worst > tol) ++*flagged;
  std::vector<double> v = pred.to_f64();
  for (double& x : v) x = std::clamp(x, range.vmin, range.vmax);
  return SequenceTensor(pred.shape(), std::move(v), range,
                        pred.frame_interval());
}

void score_sequence(const EvalContext& ctx, const SequenceTensor& pred,
                    const SequenceTensor& target, SequenceScore& out) {
  const TaskSpec& task = *ctx.task;
  const EvalOptions& opt = *ctx.opt;
  out.values.resize(ctx.metrics.size());
  out.curves.resize(ctx.metrics.size());
  for (std::size_t mi = 0; mi < ctx.metrics.size(); ++mi) {
    const std::string& m = ctx.metrics[mi];
    if (m == "mae") {
      PerFrameMetric r = mae_frames(pred, target);
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
    } else if (m == "rmse") {
      PerFrameMetric r = rmse_frames(pred, target);
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
    } else if (m == "wmape") {
      PerFrameMetric r = wmape_frames(pred, target);
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
    } else if (m == "ssim") {
      PerFrameMetric r = ssim_frames(pred, target, ctx.ssim_consts);
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
    } else if (m == "psnr") {
      PsnrMetric r =
          psnr_frames(pred, target, PsnrOptions{{}, opt.psnr_cap_db});
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
      out.psnr_caps += r.capped_frames;
    } else if (m == "wrmse") {
      PerFrameWeather r =
          wrmse_frames(pred, target, ctx.grid, task.wrmse_channel);
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
    } else if (m == "acc") {
      std::vector<std::int64_t> dates(
          static_cast<std::size_t>(target.frames()));
      for (std::int64_t k = 0; k < target.frames(); ++k) {
        dates[static_cast<std::size_t>(k)] = day_of_year(opt, k);
      }
      for (const std::int64_t d : dates) {
        bool fb = false;
        ctx.clim->day_mean(d, &fb);
        out.clim_fallbacks += fb ? 1 : 0;
      }
      PerFrameWeather r = acc_frames(pred, target, *ctx.clim, ctx.grid,
                                     task.acc_channel, dates);
      out.values[mi] = r.value;
      out.curves[mi] = std::move(r.per_frame);
    } else if (m == "csi") {
      const CsiResult whole =
          csi_mean(pred, target, ctx.csi_taus, task.value_range);
      out.values[mi] = whole.mean;
      out.csi_vacuous += whole.vacuous_thresholds;
      std::vector<double> curve(static_cast<std::size_t>(pred.frames()));
      for (std::int64_t k = 0; k < pred.frames(); ++k) {
        curve[static_cast<std::size_t>(k)] =
            csi_mean(slice_window(pred, k, 1), slice_window(target, k, 1),
                     ctx.csi_taus, task.value_range)
                .mean;
      }
      out.curves[mi] = std::move(curve);
    } else if (m == "c_nino34") {
      const NinoSeries sp = nino34_index(pred, ctx.nino);
      const NinoSeries st = nino34_index(target, ctx.nino);
      out.values[mi] = c_nino34(sp, st);
      // correlation of a series has no per-frame decomposition
    } else {
      throw ConfigError("unknown metric '" + m + "'");
    }
  }
}

std::string canonical_config(const TaskSpec& task, const EvalOptions& opt,
                             Dimension dim, std::int64_t dt,
                             const std::vector<std::string>& metrics) {
  std::ostringstream os;
  os << task_to_json(task) << "|dim=" << dimension_name(dim) << "|dt=" << dt
     << "|metrics=";
  for (const auto& m : metrics) os << m << ",";
  os << "|cap=" << opt.psnr_cap_db << "|clamp_tol=" << opt.clamp_tolerance
     << "|train=" << opt.train_provenance << "|eval=" << opt.eval_provenance
     << "|doy=" << opt.acc_start_doy << "+" << opt.acc_step_days;
  return os.str();
}

}  // namespace

MetricReport evaluate(Predictor& p, const SequenceSource& source,
                      const TaskSpec& task, const EvalOptions& opt) {
  task.validate();
  const std::int64_t n = source.size();
  if (n == 0) throw EmptyDatasetError("dataset offers no sequences");

  EvalContext ctx;
  ctx.task = &task;
  ctx.opt = &opt;
  ctx.metrics = opt.metrics.empty() ? task.metrics : opt.metrics;
  if (ctx.metrics.empty()) {
    throw ConfigError("no metrics requested for task '" + task.name + "'");
  }
  if (opt.dimension == Dimension::kLongTerm) {
    if (!task.l_l) {
      throw ConfigError("task '" + task.name + "' declares no L_l horizon");
    }
    ctx.l_out = *task.l_l;
  } else {
    ctx.l_out = task.l_s;
  }
  const std::int64_t dt = opt.dt;
  if (dt < 1) throw ConfigError("dt must be >= 1");

  ctx.ssim_consts.range = task.value_range.width();
  if (needs(ctx.metrics, "wrmse") || needs(ctx.metrics, "acc")) {
    ctx.grid = task.latitudes.empty() ? equiangular_grid(task.height)
                                      : latitude_weights(task.latitudes);
  }
  if (needs(ctx.metrics, "acc")) {
    if (opt.climatology != nullptr) {
      ctx.clim = opt.climatology;
    } else if (task.climatology) {
      ctx.default_clim = std::make_unique<Climatology>(
          Climatology::load(*task.climatology));
      ctx.clim = ctx.default_clim.get();
    } else {
      ctx.default_clim = std::make_unique<Climatology>(
          Climatology::zeros(task.channels, task.height, task.width));
      ctx.clim = ctx.default_clim.get();
    }
  }
  if (needs(ctx.metrics, "csi")) {
    ctx.csi_taus = task.csi_thresholds.empty() ? default_csi_thresholds()
                                               : task.csi_thresholds;
  }
  if (needs(ctx.metrics, "c_nino34")) {
    const auto& reg =
        task.nino_region.empty() ? default_nino_region() : task.nino_region;
    ctx.nino = NinoRegion{reg[0], reg[1], reg[2], reg[3]};
  }

  auto* file_pred = dynamic_cast<FilePredictor*>(&p);
  const std::int64_t need = required_frames(dt, task.l_in, ctx.l_out);

  std::vector<SequenceScore> slots(static_cast<std::size_t>(n));
  const bool parallel = p.thread_safe();

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    SequenceScore& slot = slots[static_cast<std::size_t>(i)];
    try {
      const SequenceTensor seq = source.get(i);
      const Shape4& s = seq.shape();
      if (s.c != task.channels || s.h != task.height || s.w != task.width) {
        throw ShapeError("sequence " + std::to_string(i) +
                         " dims do not match task '" + task.name + "'");
      }
      if (s.t < need) {
        slot.skipped = true;
        continue;
      }
      WindowPair win = subsample_temporal(seq, dt, task.l_in, ctx.l_out);
      SequenceTensor pred =
          file_pred ? file_pred->predict_indexed(i, win.input)
                    : extrapolate(p, win.input, ctx.l_out);
      const Shape4& ps = pred.shape();
      if (ps.t != ctx.l_out || ps.c != s.c || ps.h != s.h || ps.w != s.w) {
        throw ContractError("prediction for sequence " + std::to_string(i) +
                            " has the wrong shape");
      }
      pred = clamp_prediction(pred, task.value_range, opt.clamp_tolerance,
                              &slot.clamp_events);
      score_sequence(ctx, pred, win.target, slot);
    } catch (...) {
      slot.error = std::current_exception();
    }
  }

  for (const auto& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
  }

  MetricReport rep;
  rep.task = task.name;
  rep.dimension = dimension_name(opt.dimension);
  rep.dt = dt;
  rep.train_provenance = opt.train_provenance;
  rep.eval_provenance = opt.eval_provenance;
  rep.offered = n;
  rep.metric_names = ctx.metrics;
  rep.config_hash =
      opt.config_hash.empty()
          ? config_hash_hex(canonical_config(task, opt, opt.dimension, dt,
                                             ctx.metrics))
          : opt.config_hash;

  std::vector<std::vector<double>> per_seq(
      ctx.metrics.size());
  std::vector<std::vector<std::vector<double>>> curves(ctx.metrics.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const SequenceScore& slot = slots[static_cast<std::size_t>(i)];
    if (slot.skipped) {
      rep.skipped_indices.push_back(i);
      continue;
    }
    ++rep.consumed;
    for (std::size_t mi = 0; mi < ctx.metrics.size(); ++mi) {
      per_seq[mi].push_back(slot.values[mi]);
      if (!slot.curves[mi].empty()) curves[mi].push_back(slot.curves[mi]);
    }
    rep.flags.psnr_cap_frames += slot.psnr_caps;
    rep.flags.csi_vacuous += slot.csi_vacuous;
    rep.flags.clamp_events += slot.clamp_events;
    rep.flags.climatology_fallbacks += slot.clim_fallbacks;
  }
  rep.flags.skipped = static_cast<std::int64_t>(rep.skipped_indices.size());
  if (rep.consumed == 0) {
    throw CoverageError("every sequence was too short for dt=" +
                        std::to_string(dt));
  }
  for (std::size_t mi = 0; mi < ctx.metrics.size(); ++mi) {
    rep.per_sequence[ctx.metrics[mi]] = per_seq[mi];
    rep.aggregate[ctx.metrics[mi]] = aggregate_mean(per_seq[mi]);
    if (!curves[mi].empty()) {
      rep.per_frame_index[ctx.metrics[mi]] = aggregate_curves(curves[mi]);
    }
  }
  return rep;
}

std::vector<MetricReport> robustness_sweep(Predictor& p,
                                           const SequenceSource& source,
                                           const TaskSpec& task,
                                           EvalOptions opt) {
  std::vector<MetricReport> reports;
  for (const std::int64_t dt : task.dt_multipliers) {
    opt.dt = dt;
    // the unit-stride case is by definition the short-term protocol
    opt.dimension =
        dt == 1 ? Dimension::kShortTerm : Dimension::kRobustness;
    opt.config_hash.clear();
    reports.push_back(evaluate(p, source, task, opt));
  }
  return reports;
}

std::int64_t emit_input_windows(const SequenceSource& source,
                                const TaskSpec& task, Dimension dimension,
                                std::int64_t dt,
                                const std::filesystem::path& dir) {
  task.validate();
  std::int64_t l_out = task.l_s;
  if (dimension == Dimension::kLongTerm) {
    if (!task.l_l) throw ConfigError("task declares no L_l horizon");
    l_out = *task.l_l;
  }
  std::filesystem::create_directories(dir);
  const std::int64_t need = required_frames(dt, task.l_in, l_out);
  std::int64_t written = 0;
  for (std::int64_t i = 0; i < source.size(); ++i) {
    const SequenceTensor seq = source.get(i);
    if (seq.frames() < need) continue;
    const WindowPair win = subsample_temporal(seq, dt, task.l_in, l_out);
    npy::save_array(win.input, dir / FilePredictor::input_name(i));
    ++written;
  }
  return written;
}

}  // namespace stpeval

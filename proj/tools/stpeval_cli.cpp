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

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stpeval/dist_metrics.hpp"
#include "stpeval/npy.hpp"
#include "stpeval/protocol.hpp"
#include "stpeval/report.hpp"
#include "stpeval/synthgen.hpp"
#include "stpeval/task.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// exit codes: 0 ok, 2 config, 3 data, 4 predictor contract
constexpr int kOk = 0;
constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;
constexpr int kContractExit = 4;

struct CommonEvalArgs {
  std::string task;
  std::string data_manifest;
  std::int64_t synth_count = 0;
  std::uint64_t synth_seed = 0;
  std::string predictor = "persistence";
  std::string exchange_dir;
  std::vector<std::string> metrics;
  std::string out;
  std::string csv;
  std::string emit_inputs;
  std::string train_tag;
  std::string eval_tag;
  int threads = 0;
  std::int64_t dt = 1;
};

void add_common_eval_flags(CLI::App* cmd, CommonEvalArgs* a) {
  cmd->add_option("--task", a->task,
                  "builtin task name or path to a task JSON file")
      ->required();
  cmd->add_option("--data", a->data_manifest, "sequence manifest JSON");
  cmd->add_option("--synth-count", a->synth_count,
                  "evaluate over N on-the-fly synthetic sequences");
  cmd->add_option("--synth-seed", a->synth_seed, "synthetic master seed");
  cmd->add_option("--predictor", a->predictor,
                  "persistence | linear | files");
  cmd->add_option("--exchange-dir", a->exchange_dir,
                  "directory of seq<N>_pred.npy files (predictor=files)");
  cmd->add_option("--metrics", a->metrics, "override the task's metric list")
      ->delimiter(',');
  cmd->add_option("--out", a->out, "report JSON path");
  cmd->add_option("--csv", a->csv, "also write a CSV report");
  cmd->add_option("--emit-inputs", a->emit_inputs,
                  "write seq<N>_in.npy windows to DIR and exit");
  cmd->add_option("--train-tag", a->train_tag, "training data provenance tag");
  cmd->add_option("--eval-tag", a->eval_tag, "eval data provenance tag");
  cmd->add_option("--threads", a->threads, "OpenMP worker count (0 = default)");
}

void print_flags(const stpeval::ReportFlags& f) {
  std::string line;
  auto add = [&line](const char* name, std::int64_t count) {
    if (count != 0) {
      if (!line.empty()) line += ", ";
      line += std::string(name) + "=" + std::to_string(count);
    }
  };
  add("psnr_cap_frames", f.psnr_cap_frames);
  add("csi_vacuous", f.csi_vacuous);
  add("clamp_events", f.clamp_events);
  add("climatology_fallbacks", f.climatology_fallbacks);
  if (!line.empty()) std::cout << "flags: " << line << "\n";
}

stpeval::TaskSpec resolve_task(const std::string& name_or_path) {
  if (fs::exists(name_or_path) &&
      fs::is_regular_file(name_or_path)) {
    return stpeval::load_task(name_or_path);
  }
  return stpeval::builtin_task(name_or_path);
}

std::unique_ptr<stpeval::SequenceSource> resolve_source(
    const CommonEvalArgs& a, const stpeval::TaskSpec& task,
    std::int64_t min_frames, std::string* provenance) {
  if (!a.data_manifest.empty() && a.synth_count > 0) {
    throw stpeval::ConfigError("--data and --synth-count are exclusive");
  }
  if (!a.data_manifest.empty()) {
    auto src = std::make_unique<stpeval::ManifestSource>(a.data_manifest,
                                                         task.value_range);
    *provenance = src->provenance();
    return src;
  }
  if (a.synth_count > 0) {
    if (task.channels != 1) {
      throw stpeval::ConfigError(
          "synthetic sequences are single-channel; task declares C=" +
          std::to_string(task.channels));
    }
    *provenance = "synthgen:" + std::to_string(a.synth_seed);
    return std::make_unique<stpeval::SynthSource>(
        a.synth_seed, a.synth_count, min_frames, task.height, task.width);
  }
  throw stpeval::ConfigError("supply --data or --synth-count");
}

std::unique_ptr<stpeval::Predictor> resolve_predictor(
    const CommonEvalArgs& a, const stpeval::TaskSpec& task,
    std::int64_t l_out) {
  if (a.predictor == "persistence") {
    return stpeval::make_persistence(task.l_in, task.l_s);
  }
  if (a.predictor == "linear") {
    return stpeval::make_linear(task.l_in, task.l_s);
  }
  if (a.predictor == "files") {
    if (a.exchange_dir.empty()) {
      throw stpeval::ConfigError("predictor=files needs --exchange-dir");
    }
    return std::make_unique<stpeval::FilePredictor>(a.exchange_dir,
                                                    task.l_in, l_out);
  }
  throw stpeval::ConfigError("unknown predictor '" + a.predictor + "'");
}

int run_eval_like(const CommonEvalArgs& a, stpeval::Dimension dim) {
  if (a.threads > 0) omp_set_num_threads(a.threads);
  const stpeval::TaskSpec task = resolve_task(a.task);
  std::int64_t l_out = task.l_s;
  if (dim == stpeval::Dimension::kLongTerm) {
    if (!task.l_l) {
      throw stpeval::ConfigError("task '" + task.name +
                                 "' declares no long-term horizon");
    }
    l_out = *task.l_l;
  }
  const std::int64_t min_frames =
      stpeval::required_frames(a.dt, task.l_in, l_out);
  std::string provenance;
  auto source = resolve_source(a, task, min_frames, &provenance);

  if (!a.emit_inputs.empty()) {
    const std::int64_t written = stpeval::emit_input_windows(
        *source, task, dim, a.dt, a.emit_inputs);
    std::cout << "wrote " << written << " input windows to " << a.emit_inputs
              << "\n";
    return kOk;
  }

  auto predictor = resolve_predictor(a, task, l_out);
  stpeval::EvalOptions opt;
  opt.dimension = dim;
  opt.dt = a.dt;
  opt.metrics = a.metrics;
  opt.train_provenance = a.train_tag.empty() ? provenance : a.train_tag;
  opt.eval_provenance = a.eval_tag.empty() ? provenance : a.eval_tag;
  const stpeval::MetricReport rep =
      stpeval::evaluate(*predictor, *source, task, opt);

  for (const auto& name : rep.metric_names) {
    std::cout << name << " = " << rep.aggregate.at(name) << "\n";
  }
  std::cout << "consumed " << rep.consumed << "/" << rep.offered
            << " sequences (skipped " << rep.flags.skipped << ")\n";
  print_flags(rep.flags);
  if (!a.out.empty()) stpeval::save_report(rep, a.out);
  if (!a.csv.empty()) {
    std::ofstream f(a.csv, std::ios::trunc);
    if (!f) throw stpeval::IoError("cannot write " + a.csv);
    f << stpeval::to_csv(rep);
  }
  return kOk;
}

int run_robustness(const CommonEvalArgs& a, const std::string& out_dir) {
  if (a.threads > 0) omp_set_num_threads(a.threads);
  const stpeval::TaskSpec task = resolve_task(a.task);
  const std::int64_t max_dt = task.dt_multipliers.back();
  const std::int64_t min_frames =
      stpeval::required_frames(max_dt, task.l_in, task.l_s);
  std::string provenance;
  auto source = resolve_source(a, task, min_frames, &provenance);
  auto predictor = resolve_predictor(a, task, task.l_s);

  stpeval::EvalOptions opt;
  opt.metrics = a.metrics;
  opt.train_provenance = a.train_tag.empty() ? provenance : a.train_tag;
  opt.eval_provenance = a.eval_tag.empty() ? provenance : a.eval_tag;
  const std::vector<stpeval::MetricReport> reports =
      stpeval::robustness_sweep(*predictor, *source, task, opt);

  if (!out_dir.empty()) fs::create_directories(out_dir);
  for (const auto& rep : reports) {
    std::cout << "dt=" << rep.dt << ":";
    for (const auto& name : rep.metric_names) {
      std::cout << " " << name << "=" << rep.aggregate.at(name);
    }
    std::cout << " (skipped " << rep.flags.skipped << ")\n";
    print_flags(rep.flags);
    if (!out_dir.empty()) {
      stpeval::save_report(
          rep, fs::path(out_dir) /
                   ("robustness_dt" + std::to_string(rep.dt) + ".json"));
    }
  }
  return kOk;
}

std::vector<std::string> split_csv_doubles(const std::string& text,
                                           std::vector<double>* out) {
  std::vector<std::string> bad;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string tok = text.substr(start, end - start);
    if (!tok.empty()) {
      try {
        out->push_back(std::stod(tok));
      } catch (...) {
        bad.push_back(tok);
      }
    }
    start = end + 1;
  }
  return bad;
}

// Flat JSON config: keys are long option names of the invoked
// subcommand. Injected right after the subcommand token, so explicit
// command-line flags (parsed take-last) override it.
std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
  }
  if (config_path.empty()) return args;
  std::ifstream f(config_path);
  if (!f) throw stpeval::ConfigError("cannot open config " + config_path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw stpeval::ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw stpeval::ConfigError("config must be an object");
  std::vector<std::string> injected;
  for (const auto& [key, value] : j.items()) {
    injected.push_back("--" + key);
    if (value.is_string()) {
      injected.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      injected.push_back(joined);
    } else {
      injected.push_back(value.dump());
    }
  }
  // after the subcommand name (the first positional token)
  std::size_t sub_pos = 0;
  while (sub_pos < args.size() && args[sub_pos].starts_with("-")) ++sub_pos;
  const std::size_t at = std::min(sub_pos + 1, args.size());
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at),
              injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stpeval: spatio-temporal prediction evaluation suite "
      "(metrics, protocols, reports). --config FILE.json supplies "
      "defaults for any long option of the invoked subcommand."};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // generate
  struct {
    std::uint64_t seed = 0;
    std::int64_t count = 10;
    std::string out;
    std::int64_t frames = 20, height = 64, width = 64, sprites = 2;
    std::string name = "synthgen";
  } gen;
  auto* cmd_gen = app.add_subcommand(
      "generate", "emit deterministic bouncing-sprite sequences + manifest");
  cmd_gen->add_option("--seed", gen.seed, "master seed");
  cmd_gen->add_option("--count", gen.count, "number of sequences")->required();
  cmd_gen->add_option("--out", gen.out, "output directory")->required();
  cmd_gen->add_option("--frames", gen.frames, "frames per sequence");
  cmd_gen->add_option("--height", gen.height, "frame rows");
  cmd_gen->add_option("--width", gen.width, "frame cols");
  cmd_gen->add_option("--sprites", gen.sprites, "sprites per sequence");
  cmd_gen->add_option("--name", gen.name, "manifest name/provenance");

  CommonEvalArgs ev, roll, rob, xe;
  auto* cmd_eval =
      app.add_subcommand("eval", "short-term evaluation of a predictor");
  add_common_eval_flags(cmd_eval, &ev);
  cmd_eval->add_option("--dt", ev.dt, "frame-interval multiplier");

  auto* cmd_roll = app.add_subcommand(
      "rollout-eval", "long-term evaluation via iterative extrapolation");
  add_common_eval_flags(cmd_roll, &roll);

  std::string rob_out_dir;
  auto* cmd_rob = app.add_subcommand(
      "robustness", "temporal-resolution sweep over the task's dt multipliers");
  add_common_eval_flags(cmd_rob, &rob);
  cmd_rob->add_option("--out-dir", rob_out_dir,
                      "directory for per-dt sub-reports");

  std::string xe_train_manifest;
  auto* cmd_xe = app.add_subcommand(
      "xeval",
      "generalization: evaluate on a manifest from a different provenance");
  add_common_eval_flags(cmd_xe, &xe);
  cmd_xe->add_option("--train-manifest", xe_train_manifest,
                     "manifest the predictor was fit on (tags the report)");

  // features-fd
  struct {
    std::string real, fake, out;
  } fd;
  auto* cmd_fd = app.add_subcommand(
      "features-fd", "Frechet distance between two feature files");
  cmd_fd->add_option("--features-real", fd.real, "n x d NPY feature file")
      ->required();
  cmd_fd->add_option("--features-fake", fd.fake, "n x d NPY feature file")
      ->required();
  cmd_fd->add_option("--out", fd.out, "JSON result path");

  // stability
  struct {
    std::string values;
    std::vector<std::string> reports;
    std::string metric = "metric";
    std::string out;
  } st;
  auto* cmd_st = app.add_subcommand(
      "stability", "std + two-sample t-test p over repeated runs");
  cmd_st->add_option("--values", st.values, "comma-separated run values");
  cmd_st->add_option("--reports", st.reports,
                     "report JSONs to pull --metric aggregates from");
  cmd_st->add_option("--metric", st.metric, "metric name");
  cmd_st->add_option("--out", st.out, "JSON result path");

  // dump
  struct {
    std::string in, out;
    double vmin = 0.0, vmax = 0.0;
  } dp;
  auto* cmd_dump =
      app.add_subcommand("dump", "write sequence frames as PGM/PPM images");
  cmd_dump->add_option("--in", dp.in, "NPY sequence file")->required();
  cmd_dump->add_option("--out", dp.out, "output directory")->required();
  cmd_dump->add_option("--vmin", dp.vmin, "override range minimum");
  cmd_dump->add_option("--vmax", dp.vmax, "override range maximum");

  std::vector<std::string> args;
  try {
    args = inject_config(argc, argv);
  } catch (const stpeval::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigExit;
  }

  try {
    if (cmd_gen->parsed()) {
      fs::create_directories(gen.out);
      ordered_json manifest;
      manifest["name"] = gen.name;
      manifest["provenance"] = gen.name + ":" + std::to_string(gen.seed);
      manifest["seed"] = gen.seed;
      manifest["count"] = gen.count;
      manifest["generator"] = {
          {"frames", gen.frames},    {"height", gen.height},
          {"width", gen.width},      {"sprites", gen.sprites},
          {"speed_px_per_frame", {2.0, 4.0}}, {"angle", "uniform"},
      };
      std::vector<std::string> files;
      for (std::int64_t i = 0; i < gen.count; ++i) {
        stpeval::synthgen::GenConfig cfg;
        cfg.seed = stpeval::synthgen::sequence_seed(gen.seed, i);
        cfg.n_sprites = gen.sprites;
        cfg.frames = gen.frames;
        cfg.height = gen.height;
        cfg.width = gen.width;
        char name[32];
        std::snprintf(name, sizeof(name), "seq%05lld.npy",
                      static_cast<long long>(i));
        stpeval::npy::save_array(stpeval::synthgen::generate_sequence(cfg),
                                 fs::path(gen.out) / name);
        files.emplace_back(name);
      }
      manifest["sequences"] = files;
      std::ofstream f(fs::path(gen.out) / "manifest.json", std::ios::trunc);
      if (!f) throw stpeval::IoError("cannot write manifest");
      f << manifest.dump(2) << "\n";
      std::cout << "wrote " << gen.count << " sequences to " << gen.out
                << "\n";
      return kOk;
    }
    if (cmd_eval->parsed()) {
      return run_eval_like(ev, stpeval::Dimension::kShortTerm);
    }
    if (cmd_roll->parsed()) {
      return run_eval_like(roll, stpeval::Dimension::kLongTerm);
    }
    if (cmd_rob->parsed()) {
      return run_robustness(rob, rob_out_dir);
    }
    if (cmd_xe->parsed()) {
      if (xe.train_tag.empty() && !xe_train_manifest.empty()) {
        std::ifstream f(xe_train_manifest);
        if (!f) {
          throw stpeval::IoError("cannot open " + xe_train_manifest);
        }
        nlohmann::json j;
        f >> j;
        xe.train_tag = j.value("provenance", xe_train_manifest);
      }
      return run_eval_like(xe, stpeval::Dimension::kGeneralization);
    }
    if (cmd_fd->parsed()) {
      const stpeval::npy::Matrix real = stpeval::npy::load_matrix(fd.real);
      const stpeval::npy::Matrix fake = stpeval::npy::load_matrix(fd.fake);
      auto to_fs = [](const stpeval::npy::Matrix& m) {
        stpeval::FeatureSet f;
        f.rows = m.rows;
        f.cols = m.cols;
        f.data = m.data;
        return f;
      };
      const stpeval::GaussianStats ga = stpeval::fit_gaussian(to_fs(real));
      const stpeval::GaussianStats gb = stpeval::fit_gaussian(to_fs(fake));
      const stpeval::FrechetResult r =
          stpeval::frechet_distance_detailed(ga, gb);
      std::cout << "frechet_distance = " << r.distance << "\n";
      if (!fd.out.empty()) {
        ordered_json j;
        j["frechet_distance"] = r.distance;
        j["n_real"] = real.rows;
        j["n_fake"] = fake.rows;
        j["dim"] = real.cols;
        ordered_json flags = ordered_json::array();
        if (r.regularized_a) flags.push_back("covariance_regularized_real");
        if (r.regularized_b) flags.push_back("covariance_regularized_fake");
        j["flags"] = flags;
        std::ofstream f(fd.out, std::ios::trunc);
        if (!f) throw stpeval::IoError("cannot write " + fd.out);
        f << j.dump(2) << "\n";
      }
      return kOk;
    }
    if (cmd_st->parsed()) {
      std::vector<double> runs;
      if (!st.values.empty()) {
        const auto bad = split_csv_doubles(st.values, &runs);
        if (!bad.empty()) {
          throw stpeval::ConfigError("bad --values entry '" + bad.front() +
                                     "'");
        }
      }
      for (const auto& path : st.reports) {
        const stpeval::MetricReport rep = stpeval::load_report(path);
        const auto it = rep.aggregate.find(st.metric);
        if (it == rep.aggregate.end()) {
          throw stpeval::ConfigError("report " + path + " lacks metric '" +
                                     st.metric + "'");
        }
        runs.push_back(it->second);
      }
      const stpeval::StabilityReport rep = stpeval::stability(runs, st.metric);
      std::cout << "std = " << rep.std_dev << ", p = " << rep.p_value << "\n";
      if (!st.out.empty()) {
        std::ofstream f(st.out, std::ios::trunc);
        if (!f) throw stpeval::IoError("cannot write " + st.out);
        f << stpeval::serialize(rep) << "\n";
      }
      return kOk;
    }
    if (cmd_dump->parsed()) {
      stpeval::SequenceTensor seq = stpeval::npy::load_array(dp.in);
      if (dp.vmax > dp.vmin) {
        seq = seq.with_value_range({dp.vmin, dp.vmax});
      }
      stpeval::dump_frames(seq, dp.out);
      std::cout << "wrote " << seq.frames() << " frames to " << dp.out << "\n";
      return kOk;
    }
  } catch (const stpeval::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const stpeval::ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kContractExit;
  } catch (const stpeval::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataExit;
  }
  return kConfigExit;
}

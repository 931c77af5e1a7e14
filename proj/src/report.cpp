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

#include "stpeval/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "stpeval/parallel.hpp"

namespace stpeval {

using ordered_json = nlohmann::ordered_json;

double aggregate_mean(const std::vector<double>& per_sequence_values) {
  if (per_sequence_values.empty()) {
    throw EmptyDatasetError("aggregate over zero sequences");
  }
  return par::pairwise_sum(per_sequence_values) /
         static_cast<double>(per_sequence_values.size());
}

std::vector<double> aggregate_curves(
    const std::vector<std::vector<double>>& per_sequence_curves) {
  if (per_sequence_curves.empty()) {
    throw EmptyDatasetError("aggregate over zero sequences");
  }
  const std::size_t horizon = per_sequence_curves.front().size();
  for (const auto& c : per_sequence_curves) {
    if (c.size() != horizon) {
      throw ShapeError("per-frame curves have mixed lengths");
    }
  }
  std::vector<double> out(horizon);
  std::vector<double> column(per_sequence_curves.size());
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < per_sequence_curves.size(); ++i) {
      column[i] = per_sequence_curves[i][k];
    }
    out[k] = par::pairwise_sum(column) / static_cast<double>(column.size());
  }
  return out;
}

// --- Student t machinery -------------------------------------------------

namespace {

// Lentz continued fraction for the incomplete beta.
double beta_cf(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 200000;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const double dm = static_cast<double>(m);
    // even step
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    result *= d * c;
    // odd step
    num = -(a + dm) * (a + b + dm) * x /
          ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    result *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return result;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
    throw DomainError("regularized_incomplete_beta domain violation");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) -
                          (std::lgamma(a) + std::lgamma(b) -
                           std::lgamma(a + b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(ln_front) * beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) -
                        (std::lgamma(a) + std::lgamma(b) -
                         std::lgamma(a + b))) *
                   beta_cf(1.0 - x, b, a) / b;
}

double student_t_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("t CDF needs dof > 0");
  const double tail =
      regularized_incomplete_beta(dof / (x * x + dof), dof / 2.0, 0.5) / 2.0;
  return x >= 0.0 ? 1.0 - tail : tail;
}

StabilityReport stability(const std::vector<double>& runs,
                          const std::string& metric_name) {
  if (runs.size() < 2) {
    throw SampleError("stability needs at least 2 runs");
  }
  StabilityReport rep;
  rep.metric = metric_name;
  rep.runs = runs;

  const double n = static_cast<double>(runs.size());
  double mean = 0.0;
  for (const double v : runs) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : runs) ss += (v - mean) * (v - mean);
  rep.std_dev = std::sqrt(ss / (n - 1.0));

  std::size_t usable = runs.size();
  if (usable % 2 != 0) {
    --usable;  // trailing run dropped from the test, std keeps all
    rep.odd_run_excluded = true;
  }
  const std::size_t m = usable / 2;
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) m1 += runs[i];
  for (std::size_t i = m; i < usable; ++i) m2 += runs[i];
  m1 /= static_cast<double>(m);
  m2 /= static_cast<double>(m);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) s1 += (runs[i] - m1) * (runs[i] - m1);
  for (std::size_t i = m; i < usable; ++i) s2 += (runs[i] - m2) * (runs[i] - m2);

  rep.degrees_of_freedom = static_cast<double>(2 * m - 2);
  const double pooled_var =
      (s1 + s2) / rep.degrees_of_freedom;  // equal group sizes
  if (pooled_var == 0.0 || rep.degrees_of_freedom <= 0.0) {
    rep.degenerate_variance = true;
    rep.t_statistic = 0.0;
    rep.p_value = (m1 == m2) ? 1.0 : 0.0;
    return rep;
  }
  rep.t_statistic =
      (m1 - m2) / std::sqrt(pooled_var * 2.0 / static_cast<double>(m));
  // two-sided p through the incomplete beta directly
  rep.p_value = regularized_incomplete_beta(
      rep.degrees_of_freedom /
          (rep.t_statistic * rep.t_statistic + rep.degrees_of_freedom),
      rep.degrees_of_freedom / 2.0, 0.5);
  return rep;
}

// --- serialization -------------------------------------------------------

namespace {

ordered_json flags_to_json(const ReportFlags& f) {
  ordered_json arr = ordered_json::array();
  auto add = [&arr](const char* type, std::int64_t count) {
    if (count != 0) {
      ordered_json e;
      e["type"] = type;
      e["count"] = count;
      arr.push_back(e);
    }
  };
  add("psnr_cap_frames", f.psnr_cap_frames);
  add("csi_vacuous", f.csi_vacuous);
  add("clamp_events", f.clamp_events);
  add("climatology_fallbacks", f.climatology_fallbacks);
  add("skipped", f.skipped);
  return arr;
}

ReportFlags flags_from_json(const ordered_json& arr) {
  ReportFlags f;
  for (const auto& e : arr) {
    const std::string type = e.at("type").get<std::string>();
    const std::int64_t count = e.at("count").get<std::int64_t>();
    if (type == "psnr_cap_frames") {
      f.psnr_cap_frames = count;
    } else if (type == "csi_vacuous") {
      f.csi_vacuous = count;
    } else if (type == "clamp_events") {
      f.clamp_events = count;
    } else if (type == "climatology_fallbacks") {
      f.climatology_fallbacks = count;
    } else if (type == "skipped") {
      f.skipped = count;
    } else {
      throw FormatError("unknown flag type '" + type + "'");
    }
  }
  return f;
}

}  // namespace

std::string serialize(const MetricReport& r) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["task"] = r.task;
  j["dimension"] = r.dimension;
  j["dt"] = r.dt;
  j["train_provenance"] = r.train_provenance;
  j["eval_provenance"] = r.eval_provenance;
  j["offered"] = r.offered;
  j["consumed"] = r.consumed;
  j["skipped_indices"] = r.skipped_indices;
  j["metrics"] = r.metric_names;
  ordered_json agg, curves, per_seq;
  for (const auto& name : r.metric_names) {
    agg[name] = r.aggregate.at(name);
    if (const auto it = r.per_frame_index.find(name);
        it != r.per_frame_index.end()) {
      curves[name] = it->second;
    }
    per_seq[name] = r.per_sequence.at(name);
  }
  j["aggregate"] = agg;
  j["per_frame_index"] = curves;
  j["per_sequence"] = per_seq;
  j["flags"] = flags_to_json(r.flags);
  j["engine_version"] = r.engine_version;
  j["config_hash"] = r.config_hash;
  return j.dump(2);
}

MetricReport report_from_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report parse error: ") + e.what());
  }
  try {
    MetricReport r;
    r.task = j.at("task").get<std::string>();
    r.dimension = j.at("dimension").get<std::string>();
    r.dt = j.at("dt").get<std::int64_t>();
    r.train_provenance = j.value("train_provenance", "");
    r.eval_provenance = j.value("eval_provenance", "");
    r.offered = j.at("offered").get<std::int64_t>();
    r.consumed = j.at("consumed").get<std::int64_t>();
    r.skipped_indices =
        j.at("skipped_indices").get<std::vector<std::int64_t>>();
    r.metric_names = j.at("metrics").get<std::vector<std::string>>();
    for (const auto& name : r.metric_names) {
      r.aggregate[name] = j.at("aggregate").at(name).get<double>();
      r.per_sequence[name] =
          j.at("per_sequence").at(name).get<std::vector<double>>();
      if (j.at("per_frame_index").contains(name)) {
        r.per_frame_index[name] =
            j.at("per_frame_index").at(name).get<std::vector<double>>();
      }
    }
    r.flags = flags_from_json(j.at("flags"));
    r.engine_version = j.at("engine_version").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report field error: ") + e.what());
  }
}

void save_report(const MetricReport& r, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write report " + path.string());
  f << serialize(r) << "\n";
  if (!f) throw IoError("write failed for " + path.string());
}

MetricReport load_report(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open report " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return report_from_json(text);
}

std::string to_csv(const MetricReport& r) {
  std::string out = "section,sequence,metric,value\n";
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& name : r.metric_names) {
    const auto& vals = r.per_sequence.at(name);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      out += "per_sequence," + std::to_string(i) + "," + name + "," +
             fmt(vals[i]) + "\n";
    }
  }
  for (const auto& name : r.metric_names) {
    out += "aggregate,," + name + "," + fmt(r.aggregate.at(name)) + "\n";
  }
  return out;
}

std::string serialize(const StabilityReport& r) {
  ordered_json j;
  j["metric"] = r.metric;
  j["runs"] = r.runs;
  j["std"] = r.std_dev;
  j["t_statistic"] = r.t_statistic;
  j["degrees_of_freedom"] = r.degrees_of_freedom;
  j["p_value"] = r.p_value;
  ordered_json flags = ordered_json::array();
  if (r.degenerate_variance) flags.push_back("degenerate_variance");
  if (r.odd_run_excluded) flags.push_back("odd_run_excluded");
  j["flags"] = flags;
  return j.dump(2);
}

namespace {

// round-half-even to the nearest integer in [0, 255]
std::uint8_t quantize_byte(double x) {
  if (x <= 0.0) return 0;
  if (x >= 255.0) return 255;
  const double floor_v = std::floor(x);
  const double frac = x - floor_v;
  double rounded;
  if (frac > 0.5) {
    rounded = floor_v + 1.0;
  } else if (frac < 0.5) {
    rounded = floor_v;
  } else {
    rounded = (std::fmod(floor_v, 2.0) == 0.0) ? floor_v : floor_v + 1.0;
  }
  return static_cast<std::uint8_t>(rounded);
}

}  // namespace

void dump_frames(const SequenceTensor& seq, const std::filesystem::path& dir) {
  const Shape4& s = seq.shape();
  if (s.c != 1 && s.c != 3) {
    throw ConfigError("dump_frames supports 1 or 3 channels, got " +
                      std::to_string(s.c));
  }
  std::filesystem::create_directories(dir);
  const ValueRange range = seq.value_range();
  const double scale = 255.0 / range.width();
  for (std::int64_t t = 0; t < s.t; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame%05lld.%s",
                  static_cast<long long>(t), s.c == 1 ? "pgm" : "ppm");
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write frame file " + (dir / name).string());
    f << (s.c == 1 ? "P5" : "P6") << "\n"
      << s.w << " " << s.h << "\n255\n";
    std::vector<std::uint8_t> row(
        static_cast<std::size_t>(s.w * s.c));
    for (std::int64_t h = 0; h < s.h; ++h) {
      for (std::int64_t w = 0; w < s.w; ++w) {
        for (std::int64_t c = 0; c < s.c; ++c) {
          const double v = seq.at(t, c, h, w);
          row[static_cast<std::size_t>(w * s.c + c)] =
              quantize_byte((v - range.vmin) * scale);
        }
      }
      f.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw IoError("write failed for frame dump");
  }
}

std::string config_hash_hex(const std::string& canonical_config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canonical_config) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace stpeval

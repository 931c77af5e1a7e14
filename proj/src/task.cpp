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

#include "stpeval/task.hpp"

#include <fstream>
#include <map>

#include "json.hpp"

namespace stpeval {

using ordered_json = nlohmann::ordered_json;

void TaskSpec::validate() const {
  if (name.empty()) throw ConfigError("task name must not be empty");
  if (l_in < 1 || l_s < 1) throw ConfigError("task requires L_in, L_s >= 1");
  if (l_l && *l_l <= l_s) throw ConfigError("task requires L_l > L_s");
  if (channels < 1 || height < 1 || width < 1) {
    throw ConfigError("task dims must be >= 1");
  }
  if (!(value_range.vmin < value_range.vmax)) {
    throw ConfigError("task value_range requires vmin < vmax");
  }
  if (dt_multipliers.empty()) {
    throw ConfigError("task requires at least one dt multiplier");
  }
  std::int64_t prev = 0;
  for (const std::int64_t dt : dt_multipliers) {
    if (dt < 1 || dt <= prev) {
      throw ConfigError("dt_multipliers must be >= 1 and strictly increasing");
    }
    prev = dt;
  }
  if (!nino_region.empty() && nino_region.size() != 4) {
    throw ConfigError("nino_region must be [row0, rows, col0, cols]");
  }
}

const std::vector<double>& default_csi_thresholds() {
  static const std::vector<double> taus{16, 74, 133, 160, 181, 219};
  return taus;
}

const std::vector<std::int64_t>& default_nino_region() {
  // 5S-5N x 170W-120W at 5 degrees inside the 55S-60N x 90E-330W grid:
  // rows 11..13 of 24, cols 20..30 of 48.
  static const std::vector<std::int64_t> region{11, 3, 20, 11};
  return region;
}

namespace {

TaskSpec make_task(std::string name, std::int64_t l_in, std::int64_t l_s,
                   std::optional<std::int64_t> l_l, std::int64_t c,
                   std::int64_t h, std::int64_t w,
                   std::vector<std::string> metrics, SplitSizes splits) {
  TaskSpec t;
  t.name = std::move(name);
  t.l_in = l_in;
  t.l_s = l_s;
  t.l_l = l_l;
  t.channels = c;
  t.height = h;
  t.width = w;
  t.metrics = std::move(metrics);
  t.splits = splits;
  return t;
}

std::map<std::string, TaskSpec> build_tasks() {
  std::map<std::string, TaskSpec> m;
  const std::vector<std::string> vis{"mae", "rmse", "ssim", "psnr"};

  // motion trajectory
  m["moving_mnist"] =
      make_task("moving_mnist", 10, 10, {}, 1, 64, 64, vis,
                {std::nullopt, 10000, 10000});
  m["kth"] = make_task("kth", 10, 10, {}, 1, 128, 128, vis,
                       {7482, 1628, 4047});
  m["human36m"] = make_task("human36m", 4, 4, {}, 3, 256, 256, vis,
                            {66063, 7341, 8582});

  // robot action planning
  m["bair"] = make_task("bair", 2, 10, {}, 3, 64, 64, vis, {38937, 4327, 256});
  m["robonet"] =
      make_task("robonet", 2, 10, {}, 3, 120, 160, vis, {145944, 16218, 256});
  m["bridgedata"] = make_task("bridgedata", 2, 10, 30, 3, 120, 160, vis,
                              {31767, 3970, 3971});

  // driving scenes
  m["cityscapes"] = make_task("cityscapes", 2, 5, {}, 3, 128, 128, vis,
                              {8925, 1500, 1525});
  m["kitti"] =
      make_task("kitti", 10, 10, {}, 3, 128, 160, vis, {9209, 2224, 2198});
  m["nuscenes"] = make_task("nuscenes", 10, 10, 30, 3, 128, 160, vis,
                            {31269, 4658, 4518});
  m["caltech"] = make_task("caltech", 10, 10, {}, 3, 128, 160, vis,
                           {std::nullopt, std::nullopt, 1980});

  // traffic flow
  m["taxibj"] = make_task("taxibj", 4, 4, {}, 2, 32, 32,
                          {"mae", "rmse", "wmape", "ssim", "psnr"},
                          {19961, 500, 500});
  m["traffic4cast2021"] =
      make_task("traffic4cast2021", 9, 3, {}, 8, 128, 112,
                {"mae", "rmse", "wmape", "ssim", "psnr"},
                {35840, 4480, 4508});

  // weather
  {
    TaskSpec t = make_task("icar_enso", 12, 14, {}, 1, 24, 48,
                           {"mae", "rmse", "c_nino34"}, {5205, 334, 1667});
    t.value_range = {-5.0, 5.0};  // SST anomaly span, degrees C
    t.nino_region = default_nino_region();
    m["icar_enso"] = t;
  }
  {
    TaskSpec t = make_task("sevir", 13, 12, {}, 1, 384, 384,
                           {"mae", "rmse", "csi"}, {35718, 9060, 12159});
    t.value_range = {0.0, 255.0};
    t.csi_thresholds = default_csi_thresholds();
    m["sevir"] = t;
  }
  {
    // wide enough for raw geopotential; effectively no clamping
    TaskSpec t = make_task("weatherbench", 2, 1, 20, 69, 128, 256,
                           {"rmse", "wrmse", "acc"}, {53944, 2922, 5828});
    t.value_range = {-1e6, 1e6};
    m["weatherbench"] = t;
  }
  return m;
}

const std::map<std::string, TaskSpec>& builtin_tasks() {
  static const std::map<std::string, TaskSpec> tasks = build_tasks();
  return tasks;
}

}  // namespace

std::vector<std::string> builtin_task_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : builtin_tasks()) names.push_back(k);
  return names;
}

TaskSpec builtin_task(const std::string& name) {
  const auto& tasks = builtin_tasks();
  const auto it = tasks.find(name);
  if (it == tasks.end()) {
    std::string known;
    for (const auto& [k, v] : tasks) {
      if (!known.empty()) known += ", ";
      known += k;
    }
    throw ConfigError("unknown builtin task '" + name + "' (known: " + known +
                      ")");
  }
  return it->second;
}

std::string task_to_json(const TaskSpec& t) {
  ordered_json j;
  j["name"] = t.name;
  j["L_in"] = t.l_in;
  j["L_s"] = t.l_s;
  if (t.l_l) {
    j["L_l"] = *t.l_l;
  } else {
    j["L_l"] = nullptr;
  }
  j["channels"] = t.channels;
  j["height"] = t.height;
  j["width"] = t.width;
  j["value_range"] = {t.value_range.vmin, t.value_range.vmax};
  j["dt_multipliers"] = t.dt_multipliers;
  j["metrics"] = t.metrics;
  if (!t.latitudes.empty()) j["latitudes"] = t.latitudes;
  if (!t.csi_thresholds.empty()) j["csi_thresholds"] = t.csi_thresholds;
  if (!t.nino_region.empty()) j["nino_region"] = t.nino_region;
  j["wrmse_channel"] = t.wrmse_channel;
  j["acc_channel"] = t.acc_channel;
  if (t.climatology) j["climatology"] = *t.climatology;
  ordered_json splits;
  if (t.splits.train) splits["train"] = *t.splits.train;
  if (t.splits.val) splits["val"] = *t.splits.val;
  if (t.splits.test) splits["test"] = *t.splits.test;
  if (!splits.empty()) j["splits"] = splits;
  return j.dump(2);
}

TaskSpec task_from_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("task JSON parse error: ") + e.what());
  }
  try {
    TaskSpec t;
    t.name = j.at("name").get<std::string>();
    t.l_in = j.at("L_in").get<std::int64_t>();
    t.l_s = j.at("L_s").get<std::int64_t>();
    if (j.contains("L_l") && !j["L_l"].is_null()) {
      t.l_l = j["L_l"].get<std::int64_t>();
    }
    t.channels = j.value("channels", std::int64_t{1});
    t.height = j.at("height").get<std::int64_t>();
    t.width = j.at("width").get<std::int64_t>();
    if (j.contains("value_range")) {
      t.value_range = {j["value_range"][0].get<double>(),
                       j["value_range"][1].get<double>()};
    }
    if (j.contains("dt_multipliers")) {
      t.dt_multipliers = j["dt_multipliers"].get<std::vector<std::int64_t>>();
    }
    if (j.contains("metrics")) {
      t.metrics = j["metrics"].get<std::vector<std::string>>();
    }
    if (j.contains("latitudes")) {
      t.latitudes = j["latitudes"].get<std::vector<double>>();
    }
    if (j.contains("csi_thresholds")) {
      t.csi_thresholds = j["csi_thresholds"].get<std::vector<double>>();
    }
    if (j.contains("nino_region")) {
      t.nino_region = j["nino_region"].get<std::vector<std::int64_t>>();
    }
    t.wrmse_channel = j.value("wrmse_channel", std::int64_t{0});
    t.acc_channel = j.value("acc_channel", std::int64_t{0});
    if (j.contains("climatology") && !j["climatology"].is_null()) {
      t.climatology = j["climatology"].get<std::string>();
    }
    if (j.contains("splits")) {
      const auto& s = j["splits"];
      if (s.contains("train")) t.splits.train = s["train"].get<std::int64_t>();
      if (s.contains("val")) t.splits.val = s["val"].get<std::int64_t>();
      if (s.contains("test")) t.splits.test = s["test"].get<std::int64_t>();
    }
    t.validate();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("task JSON field error: ") + e.what());
  }
}

TaskSpec load_task(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open task file " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return task_from_json(text);
}

void save_task(const TaskSpec& t, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write task file " + path.string());
  f << task_to_json(t) << "\n";
}

}  // namespace stpeval

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

#include "doctest.h"
#include "stpeval/task.hpp"
#include "test_util.hpp"

using namespace stpeval;

TEST_CASE("builtin tasks cover the fifteen benchmark datasets") {
  const auto names = builtin_task_names();
  CHECK(names.size() == 15);

  const TaskSpec mnist = builtin_task("moving_mnist");
  CHECK(mnist.l_in == 10);
  CHECK(mnist.l_s == 10);
  CHECK(mnist.height == 64);
  CHECK(mnist.width == 64);
  CHECK_FALSE(mnist.l_l.has_value());

  const TaskSpec wb = builtin_task("weatherbench");
  CHECK(wb.l_in == 2);
  CHECK(wb.l_s == 1);
  CHECK(wb.l_l == 20);
  CHECK(wb.channels == 69);
  CHECK(wb.height == 128);
  CHECK(wb.width == 256);

  const TaskSpec bridge = builtin_task("bridgedata");
  CHECK(bridge.l_in == 2);
  CHECK(bridge.l_s == 10);
  CHECK(bridge.l_l == 30);

  const TaskSpec nus = builtin_task("nuscenes");
  CHECK(nus.l_l == 30);

  const TaskSpec enso = builtin_task("icar_enso");
  CHECK(enso.l_in == 12);
  CHECK(enso.l_s == 14);
  CHECK(enso.height == 24);
  CHECK(enso.width == 48);
  CHECK(enso.nino_region == default_nino_region());

  const TaskSpec sevir = builtin_task("sevir");
  CHECK(sevir.l_in == 13);
  CHECK(sevir.l_s == 12);
  CHECK(sevir.height == 384);
  CHECK(sevir.csi_thresholds == default_csi_thresholds());

  const TaskSpec caltech = builtin_task("caltech");
  CHECK_FALSE(caltech.splits.train.has_value());
  CHECK(caltech.splits.test == 1980);

  CHECK_THROWS_AS(builtin_task("no_such_dataset"), ConfigError);
}

TEST_CASE("task JSON round trip preserves the contract") {
  testutil::TempDir tmp("task");
  TaskSpec t = builtin_task("icar_enso");
  t.latitudes = {10.0, 5.0, 0.0};
  t.climatology = "clim.npy";
  const auto path = tmp.path() / "task.json";
  save_task(t, path);
  const TaskSpec back = load_task(path);
  CHECK(back == t);
}

TEST_CASE("task validation rejects broken contracts") {
  TaskSpec t = builtin_task("taxibj");
  t.l_l = 2;  // must exceed L_s = 4
  CHECK_THROWS_AS(t.validate(), ConfigError);

  TaskSpec u = builtin_task("taxibj");
  u.dt_multipliers = {1, 1};
  CHECK_THROWS_AS(u.validate(), ConfigError);

  TaskSpec v = builtin_task("taxibj");
  v.value_range = {2.0, 2.0};
  CHECK_THROWS_AS(v.validate(), ConfigError);

  CHECK_THROWS_AS(task_from_json("{\"name\": \"x\"}"), ConfigError);
  CHECK_THROWS_AS(task_from_json("not json"), ConfigError);
}

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

#include <cmath>

#include "doctest.h"
#include "stpeval/parallel.hpp"
#include "test_util.hpp"

using namespace stpeval;

TEST_CASE("pairwise_sum handles empty, short and long inputs") {
  CHECK(par::pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(par::pairwise_sum(std::vector<double>{1.5}) == 1.5);
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(double(i));
  CHECK(par::pairwise_sum(v) == 5050.0);
}

TEST_CASE("block_sum equals a plain serial sum and ignores thread count") {
  testutil::Rng rng(81);
  std::vector<double> v(100000);
  for (double& x : v) x = rng.uniform(-1, 1);
  auto f = [&](std::int64_t i) { return v[static_cast<std::size_t>(i)]; };
  const std::int64_t n = static_cast<std::int64_t>(v.size());

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double s1 = par::block_sum(n, f);
  omp_set_num_threads(saved > 1 ? saved : 3);
  const double s2 = par::block_sum(n, f);
  omp_set_num_threads(saved);
  CHECK(s1 == s2);  // bitwise: fixed block structure

  double plain = 0.0;
  for (const double x : v) plain += x;
  CHECK(s1 == doctest::Approx(plain).epsilon(1e-12));

  // partial trailing block, n smaller than one block
  CHECK(par::block_sum(3, f) == v[0] + v[1] + v[2]);
  CHECK(par::block_sum(0, f) == 0.0);
}

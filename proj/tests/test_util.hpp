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

#ifndef STPEVAL_TESTS_TEST_UTIL_HPP
#define STPEVAL_TESTS_TEST_UTIL_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "stpeval/tensor.hpp"

namespace testutil {

// Deterministic generator for test fixtures, unrelated to the
// library's splitmix stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

inline stpeval::SequenceTensor random_tensor(Rng& rng, stpeval::Shape4 shape,
                                             double lo = 0.0, double hi = 1.0,
                                             stpeval::ValueRange range = {0.0,
                                                                          1.0}) {
  std::vector<double> data(static_cast<std::size_t>(shape.total()));
  for (double& x : data) x = rng.uniform(lo, hi);
  return stpeval::SequenceTensor(shape, std::move(data), range);
}

inline stpeval::SequenceTensor constant_tensor(stpeval::Shape4 shape,
                                               double value,
                                               stpeval::ValueRange range = {
                                                   0.0, 1.0}) {
  std::vector<double> data(static_cast<std::size_t>(shape.total()), value);
  return stpeval::SequenceTensor(shape, std::move(data), range);
}

// Unique scratch directory under the build tree, cleaned on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("stpeval_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace testutil

#endif  // STPEVAL_TESTS_TEST_UTIL_HPP

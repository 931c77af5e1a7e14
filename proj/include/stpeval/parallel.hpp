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

#ifndef STPEVAL_PARALLEL_HPP
#define STPEVAL_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace stpeval::par {

// Pairwise (tree) summation over a fixed left-to-right index order.
// The reduction tree depends only on n, never on thread count, so the
// result is bit-reproducible.
double pairwise_sum(std::span<const double> v);

// Deterministic parallel sum of f(i) over [0, n).
// The index space is cut into fixed-size blocks; each block is summed
// serially left-to-right, blocks are combined pairwise. Identical
// output for any number of OpenMP threads.
template <class F>
double block_sum(std::int64_t n, F&& f, std::int64_t block = 1 << 14) {
  if (n <= 0) return 0.0;
  const std::int64_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * block;
    const std::int64_t hi = std::min(n, lo + block);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  return pairwise_sum(partial);
}

}  // namespace stpeval::par

#endif  // STPEVAL_PARALLEL_HPP

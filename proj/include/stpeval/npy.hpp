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

#ifndef STPEVAL_NPY_HPP
#define STPEVAL_NPY_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval::npy {

// NPY v1.0 containers only: magic 0x93 'NUMPY', version 1.0, 2-byte LE
// header length, ASCII dict header
//   {'descr': '<f4'|'<f8'|'|u1', 'fortran_order': False, 'shape': (...), }
// space-padded and '\n'-terminated so the whole preamble is a multiple
// of 64 bytes, then raw C-order little-endian data.

struct Array {
  Dtype dtype = Dtype::F64;
  std::vector<std::int64_t> shape;
  // payload, one vector populated according to dtype
  std::vector<float> f32;
  std::vector<double> f64;
  std::vector<std::uint8_t> u8;

  std::int64_t elems() const;
};

Array read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Array& a);

// 4-D sequence tensors. Float data keeps its bits; u8 defaults to range
// (0,255), floats to (0,1) unless retagged by the caller.
SequenceTensor load_array(const std::filesystem::path& path);
void save_array(const SequenceTensor& seq, const std::filesystem::path& path);

// 2-D n x d feature matrices (FVD/LPIPS interchange), promoted to f64.
struct Matrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;  // row-major

  double at(std::int64_t r, std::int64_t c) const {
    return data[static_cast<std::size_t>(r * cols + c)];
  }
};
Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const Matrix& m, const std::filesystem::path& path);

}  // namespace stpeval::npy

#endif  // STPEVAL_NPY_HPP

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

#ifndef STPEVAL_TENSOR_HPP
#define STPEVAL_TENSOR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "stpeval/errors.hpp"

namespace stpeval {

enum class Dtype { F32, F64, U8 };

const char* dtype_name(Dtype dt);

struct Shape4 {
  std::int64_t t = 0;
  std::int64_t c = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  std::int64_t frame_elems() const { return c * h * w; }
  std::int64_t total() const { return t * c * h * w; }
  bool operator==(const Shape4&) const = default;
};

struct ValueRange {
  double vmin = 0.0;
  double vmax = 1.0;

  double width() const { return vmax - vmin; }
  bool operator==(const ValueRange&) const = default;
};

// Immutable [T, C, H, W] sequence of frames, row-major, contiguous.
// All elements are finite (checked at construction for float types) and
// the declared value range satisfies vmin < vmax. Safe to share across
// threads; every operation on it is pure.
class SequenceTensor {
 public:
  SequenceTensor(Shape4 shape, std::vector<float> data, ValueRange range,
                 std::optional<double> frame_interval = std::nullopt);
  SequenceTensor(Shape4 shape, std::vector<double> data, ValueRange range,
                 std::optional<double> frame_interval = std::nullopt);
  SequenceTensor(Shape4 shape, std::vector<std::uint8_t> data,
                 ValueRange range = {0.0, 255.0},
                 std::optional<double> frame_interval = std::nullopt);

  const Shape4& shape() const { return shape_; }
  std::int64_t frames() const { return shape_.t; }
  const ValueRange& value_range() const { return range_; }
  std::optional<double> frame_interval() const { return frame_interval_; }
  Dtype dtype() const;

  std::span<const float> f32() const;
  std::span<const double> f64() const;
  std::span<const std::uint8_t> u8() const;

  // Element promoted to f64. u8 keeps its raw 0..255 value: metric code
  // works in the declared range, never an implicit /255 space.
  double at(std::int64_t t, std::int64_t c, std::int64_t h,
            std::int64_t w) const;

  // Whole payload promoted to f64 in one pass.
  std::vector<double> to_f64() const;

  // Same data, retagged range (metadata only, values untouched).
  SequenceTensor with_value_range(ValueRange range) const;
  SequenceTensor with_frame_interval(std::optional<double> fi) const;

  bool same_data(const SequenceTensor& other) const;  // bitwise payload

 private:
  Shape4 shape_;
  ValueRange range_;
  std::optional<double> frame_interval_;
  std::variant<std::vector<float>, std::vector<double>,
               std::vector<std::uint8_t>>
      data_;

  void validate() const;
};

// Frames [start, start+len) with metadata carried over.
SequenceTensor slice_window(const SequenceTensor& seq, std::int64_t start,
                            std::int64_t len);

// Strided evaluation windows. Input takes frames {k*dt : k < L_in},
// target takes {(L_in+k)*dt : k < L_s}; requires
// T >= (L_in + L_s - 1)*dt + 1.
struct WindowPair {
  SequenceTensor input;
  SequenceTensor target;
};
WindowPair subsample_temporal(const SequenceTensor& seq, std::int64_t dt,
                              std::int64_t l_in, std::int64_t l_s);

// Frames a sequence needs before (dt, L_in, L_out) windowing fits.
inline std::int64_t required_frames(std::int64_t dt, std::int64_t l_in,
                                    std::int64_t l_out) {
  return (l_in + l_out - 1) * dt + 1;
}

// Concatenate along the time axis; shapes and dtypes must agree.
SequenceTensor concat_time(const SequenceTensor& a, const SequenceTensor& b);

}  // namespace stpeval

#endif  // STPEVAL_TENSOR_HPP

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

#include "stpeval/tensor.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace stpeval {

const char* dtype_name(Dtype dt) {
  switch (dt) {
    case Dtype::F32:
      return "f32";
    case Dtype::F64:
      return "f64";
    case Dtype::U8:
      return "u8";
  }
  return "?";
}

namespace {

void check_shape(const Shape4& s) {
  if (s.t < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    throw ShapeError("tensor dims must all be >= 1, got [" +
                     std::to_string(s.t) + "," + std::to_string(s.c) + "," +
                     std::to_string(s.h) + "," + std::to_string(s.w) + "]");
  }
}

template <class T>
void check_finite(const std::vector<T>& v) {
  for (const T x : v) {
    if (!std::isfinite(static_cast<double>(x))) {
      throw ValueError("tensor contains NaN or Inf");
    }
  }
}

}  // namespace

SequenceTensor::SequenceTensor(Shape4 shape, std::vector<float> data,
                               ValueRange range,
                               std::optional<double> frame_interval)
    : shape_(shape),
      range_(range),
      frame_interval_(frame_interval),
      data_(std::move(data)) {
  check_finite(std::get<std::vector<float>>(data_));
  validate();
}

SequenceTensor::SequenceTensor(Shape4 shape, std::vector<double> data,
                               ValueRange range,
                               std::optional<double> frame_interval)
    : shape_(shape),
      range_(range),
      frame_interval_(frame_interval),
      data_(std::move(data)) {
  check_finite(std::get<std::vector<double>>(data_));
  validate();
}

SequenceTensor::SequenceTensor(Shape4 shape, std::vector<std::uint8_t> data,
                               ValueRange range,
                               std::optional<double> frame_interval)
    : shape_(shape),
      range_(range),
      frame_interval_(frame_interval),
      data_(std::move(data)) {
  validate();
}

void SequenceTensor::validate() const {
  check_shape(shape_);
  const auto n = static_cast<std::size_t>(shape_.total());
  const std::size_t have = std::visit(
      [](const auto& v) { return v.size(); }, data_);
  if (have != n) {
    throw ShapeError("data length " + std::to_string(have) +
                     " != T*C*H*W = " + std::to_string(n));
  }
  if (!(range_.vmin < range_.vmax)) {
    throw ValueError("value_range requires vmin < vmax");
  }
}

Dtype SequenceTensor::dtype() const {
  switch (data_.index()) {
    case 0:
      return Dtype::F32;
    case 1:
      return Dtype::F64;
    default:
      return Dtype::U8;
  }
}

std::span<const float> SequenceTensor::f32() const {
  return std::get<std::vector<float>>(data_);
}
std::span<const double> SequenceTensor::f64() const {
  return std::get<std::vector<double>>(data_);
}
std::span<const std::uint8_t> SequenceTensor::u8() const {
  return std::get<std::vector<std::uint8_t>>(data_);
}

double SequenceTensor::at(std::int64_t t, std::int64_t c, std::int64_t h,
                          std::int64_t w) const {
  const auto i = static_cast<std::size_t>(
      ((t * shape_.c + c) * shape_.h + h) * shape_.w + w);
  return std::visit(
      [i](const auto& v) { return static_cast<double>(v[i]); }, data_);
}

std::vector<double> SequenceTensor::to_f64() const {
  return std::visit(
      [](const auto& v) {
        return std::vector<double>(v.begin(), v.end());
      },
      data_);
}

SequenceTensor SequenceTensor::with_value_range(ValueRange range) const {
  SequenceTensor out = *this;
  out.range_ = range;
  out.validate();
  return out;
}

SequenceTensor SequenceTensor::with_frame_interval(
    std::optional<double> fi) const {
  SequenceTensor out = *this;
  out.frame_interval_ = fi;
  return out;
}

bool SequenceTensor::same_data(const SequenceTensor& other) const {
  if (shape_ != other.shape_ || data_.index() != other.data_.index()) {
    return false;
  }
  return std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        const auto& o = std::get<V>(other.data_);
        return v.size() == o.size() &&
               std::memcmp(v.data(), o.data(),
                           v.size() * sizeof(typename V::value_type)) == 0;
      },
      data_);
}

namespace {

template <class T>
SequenceTensor gather_frames(const SequenceTensor& seq,
                             std::span<const T> data,
                             const std::vector<std::int64_t>& frames) {
  const Shape4& s = seq.shape();
  const std::int64_t fe = s.frame_elems();
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(fe) * frames.size());
  for (const std::int64_t f : frames) {
    const T* src = data.data() + f * fe;
    out.insert(out.end(), src, src + fe);
  }
  Shape4 ns = s;
  ns.t = static_cast<std::int64_t>(frames.size());
  return SequenceTensor(ns, std::move(out), seq.value_range(),
                        seq.frame_interval());
}

SequenceTensor take_frames(const SequenceTensor& seq,
                           const std::vector<std::int64_t>& frames) {
  switch (seq.dtype()) {
    case Dtype::F32:
      return gather_frames<float>(seq, seq.f32(), frames);
    case Dtype::F64:
      return gather_frames<double>(seq, seq.f64(), frames);
    default:
      return gather_frames<std::uint8_t>(seq, seq.u8(), frames);
  }
}

}  // namespace

SequenceTensor slice_window(const SequenceTensor& seq, std::int64_t start,
                            std::int64_t len) {
  if (start < 0 || len < 1 || start + len > seq.frames()) {
    throw RangeError("slice_window [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") out of bounds for T=" +
                     std::to_string(seq.frames()));
  }
  std::vector<std::int64_t> frames(static_cast<std::size_t>(len));
  for (std::int64_t k = 0; k < len; ++k) frames[static_cast<std::size_t>(k)] = start + k;
  return take_frames(seq, frames);
}

WindowPair subsample_temporal(const SequenceTensor& seq, std::int64_t dt,
                              std::int64_t l_in, std::int64_t l_s) {
  if (dt < 1 || l_in < 1 || l_s < 1) {
    throw RangeError("subsample_temporal requires dt, L_in, L_s >= 1");
  }
  const std::int64_t need = required_frames(dt, l_in, l_s);
  if (seq.frames() < need) {
    throw RangeError("sequence too short: T=" + std::to_string(seq.frames()) +
                     " < " + std::to_string(need) + " required for dt=" +
                     std::to_string(dt));
  }
  std::vector<std::int64_t> in_frames, tg_frames;
  in_frames.reserve(static_cast<std::size_t>(l_in));
  tg_frames.reserve(static_cast<std::size_t>(l_s));
  for (std::int64_t k = 0; k < l_in; ++k) in_frames.push_back(k * dt);
  for (std::int64_t k = 0; k < l_s; ++k) tg_frames.push_back((l_in + k) * dt);
  return WindowPair{take_frames(seq, in_frames), take_frames(seq, tg_frames)};
}

SequenceTensor concat_time(const SequenceTensor& a, const SequenceTensor& b) {
  const Shape4& sa = a.shape();
  const Shape4& sb = b.shape();
  if (sa.c != sb.c || sa.h != sb.h || sa.w != sb.w) {
    throw ShapeError("concat_time: frame shapes differ");
  }
  if (a.dtype() != b.dtype()) {
    throw ShapeError("concat_time: dtypes differ");
  }
  Shape4 ns = sa;
  ns.t = sa.t + sb.t;
  switch (a.dtype()) {
    case Dtype::F32: {
      std::vector<float> d(a.f32().begin(), a.f32().end());
      d.insert(d.end(), b.f32().begin(), b.f32().end());
      return SequenceTensor(ns, std::move(d), a.value_range(),
                            a.frame_interval());
    }
    case Dtype::F64: {
      std::vector<double> d(a.f64().begin(), a.f64().end());
      d.insert(d.end(), b.f64().begin(), b.f64().end());
      return SequenceTensor(ns, std::move(d), a.value_range(),
                            a.frame_interval());
    }
    default: {
      std::vector<std::uint8_t> d(a.u8().begin(), a.u8().end());
      d.insert(d.end(), b.u8().begin(), b.u8().end());
      return SequenceTensor(ns, std::move(d), a.value_range(),
                            a.frame_interval());
    }
  }
}

}  // namespace stpeval

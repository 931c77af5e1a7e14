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

#ifndef STPEVAL_DETAIL_SPAN_DISPATCH_HPP
#define STPEVAL_DETAIL_SPAN_DISPATCH_HPP

#include "stpeval/tensor.hpp"

namespace stpeval::detail {

// Runs f on the tensor's native span so kernels read elements in place;
// accumulation stays in double inside the kernels.
template <class F>
decltype(auto) with_span(const SequenceTensor& t, F&& f) {
  switch (t.dtype()) {
    case Dtype::F32:
      return f(t.f32());
    case Dtype::F64:
      return f(t.f64());
    default:
      return f(t.u8());
  }
}

template <class F>
decltype(auto) with_spans(const SequenceTensor& a, const SequenceTensor& b,
                          F&& f) {
  return with_span(a, [&](auto sa) {
    return with_span(b, [&](auto sb) { return f(sa, sb); });
  });
}

}  // namespace stpeval::detail

#endif  // STPEVAL_DETAIL_SPAN_DISPATCH_HPP

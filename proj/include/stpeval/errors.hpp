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

#ifndef STPEVAL_ERRORS_HPP
#define STPEVAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stpeval {

// Base of all library errors. CLI exit codes: ConfigError -> 2,
// ContractError -> 4, everything else derived from Error -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (dims, options, CLI flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A predictor violated its behavioral contract (shape, finiteness).
class ContractError : public Error {
 public:
  using Error::Error;
};

// --- data errors ---

class FormatError : public Error {  // malformed container bytes
 public:
  using Error::Error;
};

class UnsupportedLayout : public Error {  // e.g. fortran_order arrays
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {  // NaN/Inf or out-of-domain values
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {  // index/window out of bounds
 public:
  using Error::Error;
};

class DomainError : public Error {  // e.g. latitude at/beyond a pole
 public:
  using Error::Error;
};

class CoverageError : public Error {  // missing climatology day, all skipped
 public:
  using Error::Error;
};

class SampleError : public Error {  // too few samples for a statistic
 public:
  using Error::Error;
};

class SpectrumError : public Error {  // materially non-PSD matrix
 public:
  using Error::Error;
};

class DegenerateFrameError : public Error {  // zero-sum / zero-max frame
 public:
  using Error::Error;
};

class DegenerateAnomalyError : public Error {
 public:
  using Error::Error;
};

class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace stpeval

#endif  // STPEVAL_ERRORS_HPP

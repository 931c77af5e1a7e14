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

#include "stpeval/npy.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace stpeval::npy {

static_assert(std::endian::native == std::endian::little,
              "little-endian host required for bit-exact NPY I/O");

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::size_t dtype_size(Dtype dt) {
  switch (dt) {
    case Dtype::F32:
      return 4;
    case Dtype::F64:
      return 8;
    default:
      return 1;
  }
}

const char* dtype_descr(Dtype dt) {
  switch (dt) {
    case Dtype::F32:
      return "<f4";
    case Dtype::F64:
      return "<f8";
    default:
      return "|u1";
  }
}

// Minimal parser for the v1.0 header dict. Whitespace-tolerant, but the
// grammar is exactly the three keys numpy writes; anything else is a
// FormatError.
struct Header {
  Dtype dtype;
  bool fortran_order;
  std::vector<std::int64_t> shape;
};

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n')) ++i;
}

std::string parse_quoted(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size() || (s[i] != '\'' && s[i] != '"')) {
    throw FormatError("NPY header: expected quoted string");
  }
  const char q = s[i++];
  const std::size_t start = i;
  while (i < s.size() && s[i] != q) ++i;
  if (i >= s.size()) throw FormatError("NPY header: unterminated string");
  return s.substr(start, i++ - start);
}

void expect(const std::string& s, std::size_t& i, char ch) {
  skip_ws(s, i);
  if (i >= s.size() || s[i] != ch) {
    throw FormatError(std::string("NPY header: expected '") + ch + "'");
  }
  ++i;
}

Header parse_header(const std::string& text) {
  Header h{Dtype::F64, false, {}};
  bool saw_descr = false, saw_order = false, saw_shape = false;
  std::size_t i = 0;
  expect(text, i, '{');
  while (true) {
    skip_ws(text, i);
    if (i < text.size() && text[i] == '}') {
      ++i;
      break;
    }
    const std::string key = parse_quoted(text, i);
    expect(text, i, ':');
    if (key == "descr") {
      const std::string d = parse_quoted(text, i);
      if (d == "<f4") {
        h.dtype = Dtype::F32;
      } else if (d == "<f8") {
        h.dtype = Dtype::F64;
      } else if (d == "|u1") {
        h.dtype = Dtype::U8;
      } else {
        throw FormatError("NPY: unsupported descr '" + d + "'");
      }
      saw_descr = true;
    } else if (key == "fortran_order") {
      skip_ws(text, i);
      if (text.compare(i, 4, "True") == 0) {
        h.fortran_order = true;
        i += 4;
      } else if (text.compare(i, 5, "False") == 0) {
        h.fortran_order = false;
        i += 5;
      } else {
        throw FormatError("NPY header: bad fortran_order value");
      }
      saw_order = true;
    } else if (key == "shape") {
      expect(text, i, '(');
      while (true) {
        skip_ws(text, i);
        if (i < text.size() && text[i] == ')') {
          ++i;
          break;
        }
        std::size_t end = i;
        while (end < text.size() && std::isdigit(text[end])) ++end;
        if (end == i) throw FormatError("NPY header: bad shape entry");
        h.shape.push_back(std::stoll(text.substr(i, end - i)));
        i = end;
        skip_ws(text, i);
        if (i < text.size() && text[i] == ',') ++i;
      }
      saw_shape = true;
    } else {
      throw FormatError("NPY header: unknown key '" + key + "'");
    }
    skip_ws(text, i);
    if (i < text.size() && text[i] == ',') ++i;
  }
  if (!saw_descr || !saw_order || !saw_shape) {
    throw FormatError("NPY header: missing required key");
  }
  return h;
}

std::string format_shape(const std::vector<std::int64_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    os << shape[i];
    if (i + 1 < shape.size()) os << ", ";
  }
  if (shape.size() == 1) os << ',';
  os << ')';
  return os.str();
}

template <class T>
void check_payload_finite(const std::vector<T>& v) {
  for (const T x : v) {
    if (!std::isfinite(static_cast<double>(x))) {
      throw ValueError("NPY payload contains NaN or Inf");
    }
  }
}

}  // namespace

std::int64_t Array::elems() const {
  std::int64_t n = 1;
  for (const std::int64_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

Array read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());

  char magic[8];
  if (!f.read(magic, 8)) throw FormatError("NPY: truncated preamble");
  if (std::memcmp(magic, kMagic, 6) != 0) {
    throw FormatError("NPY: bad magic in " + path.string());
  }
  const unsigned major = static_cast<unsigned char>(magic[6]);
  const unsigned minor = static_cast<unsigned char>(magic[7]);
  if (major != 1 || minor != 0) {
    throw FormatError("NPY: only v1.0 supported, got v" +
                      std::to_string(major) + "." + std::to_string(minor));
  }
  unsigned char len_bytes[2];
  if (!f.read(reinterpret_cast<char*>(len_bytes), 2)) {
    throw FormatError("NPY: truncated header length");
  }
  const std::size_t header_len =
      static_cast<std::size_t>(len_bytes[0]) |
      (static_cast<std::size_t>(len_bytes[1]) << 8);
  std::string header(header_len, '\0');
  if (!f.read(header.data(), static_cast<std::streamsize>(header_len))) {
    throw FormatError("NPY: truncated header");
  }

  const Header h = parse_header(header);
  if (h.fortran_order) {
    throw UnsupportedLayout("NPY: fortran_order arrays are not supported");
  }
  for (const std::int64_t d : h.shape) {
    if (d < 1) throw ShapeError("NPY: zero or negative dim");
  }

  Array a;
  a.dtype = h.dtype;
  a.shape = h.shape;
  const std::size_t n = static_cast<std::size_t>(a.elems());
  const std::size_t bytes = n * dtype_size(h.dtype);
  switch (h.dtype) {
    case Dtype::F32:
      a.f32.resize(n);
      if (!f.read(reinterpret_cast<char*>(a.f32.data()),
                  static_cast<std::streamsize>(bytes))) {
        throw FormatError("NPY: truncated data");
      }
      check_payload_finite(a.f32);
      break;
    case Dtype::F64:
      a.f64.resize(n);
      if (!f.read(reinterpret_cast<char*>(a.f64.data()),
                  static_cast<std::streamsize>(bytes))) {
        throw FormatError("NPY: truncated data");
      }
      check_payload_finite(a.f64);
      break;
    default:
      a.u8.resize(n);
      if (!f.read(reinterpret_cast<char*>(a.u8.data()),
                  static_cast<std::streamsize>(bytes))) {
        throw FormatError("NPY: truncated data");
      }
      break;
  }
  return a;
}

void write(const std::filesystem::path& path, const Array& a) {
  std::ostringstream dict;
  dict << "{'descr': '" << dtype_descr(a.dtype)
       << "', 'fortran_order': False, 'shape': " << format_shape(a.shape)
       << ", }";
  std::string header = dict.str();
  // magic(6) + version(2) + len(2) + header + '\n' padded to 64-multiple
  const std::size_t base = 10 + header.size() + 1;
  const std::size_t padded = (base + 63) / 64 * 64;
  header.append(padded - base, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw FormatError("NPY: header too long");

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(kMagic, 6);
  const char version[2] = {'\x01', '\x00'};
  f.write(version, 2);
  const auto hlen = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(hlen & 0xFF),
                             static_cast<char>(hlen >> 8)};
  f.write(len_bytes, 2);
  f.write(header.data(), static_cast<std::streamsize>(header.size()));

  switch (a.dtype) {
    case Dtype::F32:
      f.write(reinterpret_cast<const char*>(a.f32.data()),
              static_cast<std::streamsize>(a.f32.size() * 4));
      break;
    case Dtype::F64:
      f.write(reinterpret_cast<const char*>(a.f64.data()),
              static_cast<std::streamsize>(a.f64.size() * 8));
      break;
    default:
      f.write(reinterpret_cast<const char*>(a.u8.data()),
              static_cast<std::streamsize>(a.u8.size()));
      break;
  }
  if (!f) throw IoError("write failed for " + path.string());
}

SequenceTensor load_array(const std::filesystem::path& path) {
  Array a = read(path);
  if (a.shape.size() != 4) {
    throw ShapeError("expected 4-D [T,C,H,W] array, got " +
                     std::to_string(a.shape.size()) + "-D in " +
                     path.string());
  }
  const Shape4 s{a.shape[0], a.shape[1], a.shape[2], a.shape[3]};
  switch (a.dtype) {
    case Dtype::F32:
      return SequenceTensor(s, std::move(a.f32), ValueRange{0.0, 1.0});
    case Dtype::F64:
      return SequenceTensor(s, std::move(a.f64), ValueRange{0.0, 1.0});
    default:
      return SequenceTensor(s, std::move(a.u8));
  }
}

void save_array(const SequenceTensor& seq, const std::filesystem::path& path) {
  Array a;
  a.dtype = seq.dtype();
  const Shape4& s = seq.shape();
  a.shape = {s.t, s.c, s.h, s.w};
  switch (seq.dtype()) {
    case Dtype::F32:
      a.f32.assign(seq.f32().begin(), seq.f32().end());
      break;
    case Dtype::F64:
      a.f64.assign(seq.f64().begin(), seq.f64().end());
      break;
    default:
      a.u8.assign(seq.u8().begin(), seq.u8().end());
      break;
  }
  write(path, a);
}

Matrix load_matrix(const std::filesystem::path& path) {
  Array a = read(path);
  if (a.shape.size() != 2) {
    throw ShapeError("expected 2-D feature matrix, got " +
                     std::to_string(a.shape.size()) + "-D in " +
                     path.string());
  }
  Matrix m;
  m.rows = a.shape[0];
  m.cols = a.shape[1];
  switch (a.dtype) {
    case Dtype::F32:
      m.data.assign(a.f32.begin(), a.f32.end());
      break;
    case Dtype::F64:
      m.data = std::move(a.f64);
      break;
    default:
      m.data.assign(a.u8.begin(), a.u8.end());
      break;
  }
  return m;
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
  Array a;
  a.dtype = Dtype::F64;
  a.shape = {m.rows, m.cols};
  a.f64 = m.data;
  write(path, a);
}

}  // namespace stpeval::npy

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

#include "stpeval/synthgen.hpp"

#include <cmath>
#include <numbers>

namespace stpeval::synthgen {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

// Stylized digits built from seven-segment strokes on the 16x16 grid,
// two pixels thick. Stable across platforms, no external glyph data.
struct Segments {
  bool a, b, c, d, e, f, g;
};

constexpr Segments kDigitSegments[10] = {
    /*0*/ {true, true, true, true, true, true, false},
    /*1*/ {false, true, true, false, false, false, false},
    /*2*/ {true, true, false, true, true, false, true},
    /*3*/ {true, true, true, true, false, false, true},
    /*4*/ {false, true, true, false, false, true, true},
    /*5*/ {true, false, true, true, false, true, true},
    /*6*/ {true, false, true, true, true, true, true},
    /*7*/ {true, true, true, false, false, false, false},
    /*8*/ {true, true, true, true, true, true, true},
    /*9*/ {true, true, true, true, false, true, true},
};

std::array<std::uint16_t, 16> render_digit(int digit) {
  const Segments& seg = kDigitSegments[digit];
  bool px[16][16] = {};
  auto fill = [&](int r0, int r1, int c0, int c1) {
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) px[r][c] = true;
  };
  if (seg.a) fill(0, 1, 2, 13);     // top
  if (seg.b) fill(0, 7, 12, 13);    // top right
  if (seg.c) fill(8, 15, 12, 13);   // bottom right
  if (seg.d) fill(14, 15, 2, 13);   // bottom
  if (seg.e) fill(8, 15, 2, 3);     // bottom left
  if (seg.f) fill(0, 7, 2, 3);      // top left
  if (seg.g) fill(7, 8, 2, 13);     // middle
  std::array<std::uint16_t, 16> rows{};
  for (int r = 0; r < 16; ++r) {
    std::uint16_t mask = 0;
    for (int c = 0; c < 16; ++c) {
      if (px[r][c]) mask |= static_cast<std::uint16_t>(0x8000u >> c);
    }
    rows[static_cast<std::size_t>(r)] = mask;
  }
  return rows;
}

const std::array<std::array<std::uint16_t, 16>, 10>& bitmap_table() {
  static const auto table = [] {
    std::array<std::array<std::uint16_t, 16>, 10> t{};
    for (int d = 0; d < 10; ++d) t[static_cast<std::size_t>(d)] = render_digit(d);
    return t;
  }();
  return table;
}

// Fold a coordinate back into [0, limit], flipping velocity once per
// wall crossing.
void reflect_axis(double& pos, double& vel, double limit) {
  if (limit <= 0.0) {
    pos = 0.0;
    vel = -vel;
    return;
  }
  while (pos < 0.0 || pos > limit) {
    if (pos < 0.0) {
      pos = -pos;
      vel = -vel;
    } else {
      pos = 2.0 * limit - pos;
      vel = -vel;
    }
  }
}

}  // namespace

const std::array<std::uint16_t, 16>& sprite_bitmap(int sprite_id) {
  if (sprite_id < 0 || sprite_id > 9) {
    throw ConfigError("sprite_id must be 0..9");
  }
  return bitmap_table()[static_cast<std::size_t>(sprite_id)];
}

void GenConfig::validate() const {
  if (height < kSpriteSize || width < kSpriteSize) {
    throw ConfigError("frame dims must be at least 16x16");
  }
  if (n_sprites < 1) throw ConfigError("n_sprites must be >= 1");
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (speed_min < 0.0 || speed_max < speed_min) {
    throw ConfigError("require 0 <= speed_min <= speed_max");
  }
}

SpriteState step_dynamics(const SpriteState& state, std::int64_t height,
                          std::int64_t width) {
  SpriteState next = state;
  next.row += next.drow;
  next.col += next.dcol;
  reflect_axis(next.row, next.drow,
               static_cast<double>(height - kSpriteSize));
  reflect_axis(next.col, next.dcol,
               static_cast<double>(width - kSpriteSize));
  return next;
}

std::vector<SpriteState> spawn_sprites(const GenConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  std::vector<SpriteState> states;
  states.reserve(static_cast<std::size_t>(cfg.n_sprites));
  const double row_span = static_cast<double>(cfg.height - kSpriteSize);
  const double col_span = static_cast<double>(cfg.width - kSpriteSize);
  for (std::int64_t i = 0; i < cfg.n_sprites; ++i) {
    SpriteState s;
    s.sprite_id = static_cast<int>(rng.next() % 10);
    s.row = rng.next_unit() * row_span;
    s.col = rng.next_unit() * col_span;
    const double speed =
        cfg.speed_min + rng.next_unit() * (cfg.speed_max - cfg.speed_min);
    const double angle = rng.next_unit() * 2.0 * std::numbers::pi;
    s.drow = speed * std::sin(angle);
    s.dcol = speed * std::cos(angle);
    states.push_back(s);
  }
  return states;
}

SequenceTensor render_sequence(std::vector<SpriteState> states,
                               std::int64_t frames, std::int64_t height,
                               std::int64_t width) {
  if (height < kSpriteSize || width < kSpriteSize || frames < 1) {
    throw ConfigError("render_sequence: invalid dims");
  }
  const std::int64_t frame_px = height * width;
  std::vector<float> data(static_cast<std::size_t>(frames * frame_px), 0.0f);
  for (std::int64_t t = 0; t < frames; ++t) {
    float* frame = data.data() + t * frame_px;
    for (auto& s : states) {
      const auto& bmp = sprite_bitmap(s.sprite_id);
      const auto r0 = static_cast<std::int64_t>(std::lround(s.row));
      const auto c0 = static_cast<std::int64_t>(std::lround(s.col));
      for (std::int64_t r = 0; r < kSpriteSize; ++r) {
        const std::uint16_t mask = bmp[static_cast<std::size_t>(r)];
        float* dst = frame + (r0 + r) * width + c0;
        for (std::int64_t c = 0; c < kSpriteSize; ++c) {
          if (mask & (0x8000u >> c)) dst[c] = 1.0f;
        }
      }
      if (t + 1 < frames) s = step_dynamics(s, height, width);
    }
  }
  return SequenceTensor(Shape4{frames, 1, height, width}, std::move(data),
                        ValueRange{0.0, 1.0});
}

SequenceTensor generate_sequence(const GenConfig& cfg) {
  return render_sequence(spawn_sprites(cfg), cfg.frames, cfg.height,
                         cfg.width);
}

std::uint64_t sequence_seed(std::uint64_t master_seed, std::int64_t index) {
  return master_seed +
         static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL;
}

}  // namespace stpeval::synthgen

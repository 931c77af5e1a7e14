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

#ifndef STPEVAL_SYNTHGEN_HPP
#define STPEVAL_SYNTHGEN_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "stpeval/tensor.hpp"

namespace stpeval::synthgen {

// Portable splitmix64 stream; the whole generator is specified so that
// reimplementations in any language reproduce sequences bit-exactly.
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
//   z = (z ^ z>>27) * 0x94D049BB133111EB; return z ^ z>>31
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double next_unit();  // uniform in [0, 1): (next() >> 11) * 2^-53

 private:
  std::uint64_t state_;
};

inline constexpr std::int64_t kSpriteSize = 16;

// One 16x16 binary bitmap per digit 0..9, row masks with bit 15 = col 0.
const std::array<std::uint16_t, 16>& sprite_bitmap(int sprite_id);

struct SpriteState {
  int sprite_id = 0;       // 0..9
  double row = 0.0;        // top-left, subpixel
  double col = 0.0;
  double drow = 0.0;       // pixels per frame
  double dcol = 0.0;
};

struct GenConfig {
  std::uint64_t seed = 0;
  std::int64_t n_sprites = 2;
  std::int64_t frames = 20;
  std::int64_t height = 64;
  std::int64_t width = 64;
  double speed_min = 2.0;  // px/frame; uniform speed, uniform angle
  double speed_max = 4.0;

  void validate() const;
};

// Advance one frame: position += velocity, wall overshoot mirrored back
// inside (pos' = 2*limit - pos) with the velocity component negated.
// Speed magnitude is conserved exactly.
SpriteState step_dynamics(const SpriteState& state, std::int64_t height,
                          std::int64_t width);

// Initial sprite states drawn from the seeded stream. Per sprite, in
// order: sprite_id = next() % 10, row, col, speed, angle (each one
// next_unit() draw).
std::vector<SpriteState> spawn_sprites(const GenConfig& cfg);

// Render the given states for `frames` steps (frame 0 is the initial
// state). Sprites composite by per-pixel max at nearest-integer
// positions; output is f32 [T,1,H,W] in [0,1].
SequenceTensor render_sequence(std::vector<SpriteState> states,
                               std::int64_t frames, std::int64_t height,
                               std::int64_t width);

// Pure function of cfg: identical configs give bit-identical tensors.
SequenceTensor generate_sequence(const GenConfig& cfg);

// Seed of the index-th sequence under a master seed: element index of
// the underlying splitmix counter stream, so parallel generation of
// independent sequences needs no shared state.
std::uint64_t sequence_seed(std::uint64_t master_seed, std::int64_t index);

}  // namespace stpeval::synthgen

#endif  // STPEVAL_SYNTHGEN_HPP

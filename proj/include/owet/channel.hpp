// Copyright 2026 The owet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Seed-reproducible Rayleigh block-fading gains. Each Monte Carlo trial owns
// an independent Philox4x64-10 substream:
//   key     = {master_seed, kStreamDomain}
//   counter = {block, 0, trial_index, 0}
// For a fixed key Philox is a bijection on counters, so distinct
// (trial_index, block) pairs never share random words and the mapping
// (master_seed, trial_index) -> substream is injective.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace owet {

namespace detail {
__extension__ typedef unsigned __int128 uint128;
}  // namespace detail

using Philox4x64Block = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al., Random123).
inline Philox4x64Block philox4x64(Philox4x64Block ctr, Philox4x64Key key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const detail::uint128 p0 = static_cast<detail::uint128>(kMul0) * ctr[0];
    const detail::uint128 p1 = static_cast<detail::uint128>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

/// Sequential view over one trial's substream.
class Substream {
 public:
  static constexpr std::uint64_t kStreamDomain = 0x6f7765742d676169ULL;  // "owet-gai"

  explicit Substream(SeedSpec seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    if (used_ == buffer_.size()) refill();
    return buffer_[used_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// |h|^2 for h ~ CN(0,1), i.e. Exponential with mean 1, by inverse CDF.
  double next_gain() { return -std::log1p(-next_uniform()); }

  /// Uniform index in [0, n) by 128-bit multiply-shift.
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_index: empty range");
    const detail::uint128 p = static_cast<detail::uint128>(next_u64()) * n;
    return static_cast<std::size_t>(p >> 64);
  }

 private:
  void refill() {
    buffer_ = philox4x64({block_, 0, seed_.trial_index, 0},
                         {seed_.master_seed, kStreamDomain});
    ++block_;
    used_ = 0;
  }

  SeedSpec seed_;
  std::uint64_t block_ = 0;
  Philox4x64Block buffer_{};
  std::size_t used_ = 4;
};

/// One episode's squared channel gains in time order: gains[0] belongs to
/// frame N-1 (first slot), gains[N-1] to frame 0 (the deadline).
struct ChannelTrace {
  std::vector<double> gains;

  [[nodiscard]] std::size_t frame_count() const { return gains.size(); }
  [[nodiscard]] double gain_at_frame(std::size_t frame) const {
    return gains[gains.size() - 1 - frame];
  }
};

/// Draws the next n gains from an existing substream.
inline ChannelTrace draw_trace(Substream& stream, std::size_t n) {
  ChannelTrace trace;
  trace.gains.resize(n);
  for (double& g : trace.gains) g = stream.next_gain();
  return trace;
}

inline ChannelTrace draw_trace(SeedSpec seed, std::size_t n) {
  if (n == 0) throw std::invalid_argument("draw_trace: frame count must be at least 1");
  Substream stream(seed);
  return draw_trace(stream, n);
}

}  // namespace owet

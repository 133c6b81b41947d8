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

// The four allocation schemes. Causal schemes expose a per-frame decision;
// the genie sees the whole trace.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "owet/analytics.hpp"
#include "owet/channel.hpp"

namespace owet {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolicySpec {
  Scheme scheme = Scheme::optimal;
  double budget = 1.0;
  double estimation_energy = 0.0;
  std::size_t frame_count = 1;
  std::optional<ThresholdTable> threshold_table;  // required for optimal
};

/// What the transmitter spends in one frame. Inactive frames spend nothing.
struct Decision {
  double transmit_energy = 0.0;
  bool active = false;
};

inline ThresholdTable make_threshold_table(double budget, double e_t, std::size_t n) {
  return e_t == 0.0 ? thresholds_no_estimation(n, budget)
                    : thresholds_with_estimation(budget, e_t, n);
}

inline void validate(const PolicySpec& spec) {
  detail::require_frames(spec.frame_count);
  detail::require_estimation(spec.budget, spec.estimation_energy);
  if (spec.scheme != Scheme::optimal) return;
  if (!spec.threshold_table) throw PolicyError("optimal policy requires a threshold table");
  const ThresholdTable& t = *spec.threshold_table;
  if (t.frame_count != spec.frame_count || t.budget != spec.budget ||
      t.estimation_energy != spec.estimation_energy ||
      t.thresholds.size() != spec.frame_count || t.available.size() != spec.frame_count) {
    throw PolicyError("threshold table does not match (budget, e_t, N) of the policy");
  }
}

inline PolicySpec make_policy(Scheme scheme, double budget, double e_t, std::size_t n) {
  PolicySpec spec{scheme, budget, e_t, n, std::nullopt};
  if (scheme == Scheme::optimal) spec.threshold_table = make_threshold_table(budget, e_t, n);
  validate(spec);
  return spec;
}

/// All-or-nothing threshold rule: send everything left when the gain reaches
/// the frame threshold (ties transmit), otherwise spend only e_t.
inline Decision decide_optimal(std::size_t frame, double available, double gain,
                               const ThresholdTable& table) {
  if (frame >= table.frame_count) throw PolicyError("frame index outside threshold table");
  const double slack = detail::energy_slack(table.budget);
  if (!(available > slack)) return {0.0, false};
  const double e_t = table.estimation_energy;
  if (available < e_t - slack) {
    throw PolicyError("frame " + std::to_string(frame) + " is active with " +
                      std::to_string(available) + " left, below the estimation cost " +
                      std::to_string(e_t));
  }
  if (gain >= table.thresholds[frame]) return {available, true};
  return {e_t, true};
}

struct GenieChoice {
  std::size_t frame = 0;
  double harvested = 0.0;
};

/// Non-causal benchmark: maximise (A_j - e_t) g_j over frames with
/// A_j = P - (N-1-j) e_t; ties go to the earliest frame (largest j).
inline GenieChoice decide_genie(const ChannelTrace& trace, double budget, double e_t,
                                std::size_t n) {
  if (trace.frame_count() != n) throw PolicyError("trace length differs from frame count");
  detail::require_frames(n);
  GenieChoice best{n - 1, -1.0};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t frame = n - 1 - k;
    const double weight = budget - static_cast<double>(k) * e_t - e_t;
    const double value = weight * trace.gains[k];
    if (value > best.harvested) best = {frame, value};
  }
  best.harvested = std::max(best.harvested, 0.0);
  return best;
}

/// Harvestable energy per frame under an equal split, clamped at zero.
inline double equal_share(double budget, double e_t, std::size_t n) {
  const double share = budget / static_cast<double>(n) - e_t;
  return share > detail::energy_slack(budget) ? share : 0.0;
}

/// Equal split sends P/N every frame; when P/N cannot cover e_t the frame is
/// left idle.
inline Decision decide_equal(std::size_t /*frame*/, double budget, double e_t, std::size_t n,
                             double /*gain*/) {
  detail::require_frames(n);
  const double per_frame = budget / static_cast<double>(n);
  if (per_frame < e_t - detail::energy_slack(budget)) return {0.0, false};
  return {per_frame, true};
}

/// Uniform frame choice from the trial's substream.
inline std::size_t decide_random(Substream& stream, std::size_t n) {
  detail::require_frames(n);
  return stream.next_index(n);
}

}  // namespace owet

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

// Episode accounting and Monte Carlo estimation.
//
// Determinism contract: trial t always uses Substream{master_seed, t}; it
// draws the N gains first (time order) and then one uniform frame index,
// whatever the scheme, so all schemes see common random numbers. Trials are
// grouped into fixed blocks of kBlockTrials; each block is reduced in trial
// order and blocks are merged in block order. Worker count only changes who
// computes a block, never the arithmetic, so results are bit-identical.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <optional>
#include <thread>
#include <vector>

#include "owet/channel.hpp"
#include "owet/numeric.hpp"
#include "owet/policies.hpp"

namespace owet {

struct EpisodeResult {
  double harvested = 0.0;
  std::optional<std::size_t> transmit_frame;  // empty for the equal split
  std::vector<Decision> ledger;               // indexed by frame

  [[nodiscard]] double energy_spent() const {
    CompensatedSum s;
    for (const Decision& d : ledger) s.add(d.transmit_energy);
    return s.value();
  }
};

struct MonteCarloSummary {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::optional<double> outage_frequency;

  /// Binomial standard error of outage_frequency.
  [[nodiscard]] double outage_std_error() const {
    if (!outage_frequency || trials == 0) return 0.0;
    const double p = *outage_frequency;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }
};

namespace detail {

inline void spend(EpisodeResult& out, std::size_t frame, Decision d, double gain,
                  double e_t) {
  out.ledger[frame] = d;
  if (d.active) out.harvested += (d.transmit_energy - e_t) * gain;
}

}  // namespace detail

/// Plays one episode from frame N-1 down to frame 0. `random_frame` is the
/// pre-drawn frame for the random scheme and ignored otherwise.
inline EpisodeResult run_episode(const PolicySpec& policy, const ChannelTrace& trace,
                                 std::optional<std::size_t> random_frame = std::nullopt) {
  validate(policy);
  const std::size_t n = policy.frame_count;
  if (trace.frame_count() != n) {
    throw PolicyError("trace has " + std::to_string(trace.frame_count()) +
                      " frames, policy expects " + std::to_string(n));
  }
  const double budget = policy.budget;
  const double e_t = policy.estimation_energy;
  const double slack = detail::energy_slack(budget);

  EpisodeResult out;
  out.ledger.assign(n, Decision{});

  switch (policy.scheme) {
    case Scheme::optimal: {
      const ThresholdTable& table = *policy.threshold_table;
      double available = budget;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t frame = n - 1 - k;
        if (!(available > slack)) break;
        if (std::abs(available - table.available[frame]) > slack * static_cast<double>(n)) {
          throw PolicyError("available energy left the precomputed schedule at frame " +
                            std::to_string(frame));
        }
        const Decision d = decide_optimal(frame, available, trace.gains[k], table);
        if (d.transmit_energy > available + slack) {
          throw PolicyError("policy requested more energy than available");
        }
        detail::spend(out, frame, d, trace.gains[k], e_t);
        if (d.transmit_energy == available) {
          out.transmit_frame = frame;
          break;
        }
        available -= d.transmit_energy;
      }
      break;
    }
    case Scheme::genie: {
      const GenieChoice choice = decide_genie(trace, budget, e_t, n);
      for (std::size_t frame = n - 1; frame > choice.frame; --frame) {
        detail::spend(out, frame, {e_t, true}, trace.gain_at_frame(frame), e_t);
      }
      const double available = budget - static_cast<double>(n - 1 - choice.frame) * e_t;
      if (available < e_t - slack) throw PolicyError("genie chose an unreachable frame");
      detail::spend(out, choice.frame, {available, true}, trace.gain_at_frame(choice.frame), e_t);
      out.transmit_frame = choice.frame;
      break;
    }
    case Scheme::equal: {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t frame = n - 1 - k;
        const Decision d = decide_equal(frame, budget, e_t, n, trace.gains[k]);
        detail::spend(out, frame, d, trace.gains[k], e_t);
      }
      break;
    }
    case Scheme::random: {
      if (!random_frame || *random_frame >= n) {
        throw PolicyError("random scheme needs a drawn frame index in [0, N)");
      }
      detail::spend(out, *random_frame, {budget, true}, trace.gain_at_frame(*random_frame), e_t);
      out.transmit_frame = *random_frame;
      break;
    }
  }
  if (out.energy_spent() > budget + slack) {
    throw PolicyError("episode overspent the budget");
  }
  return out;
}

inline constexpr std::uint64_t kBlockTrials = 4096;

inline unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Harvested energy of trial `trial_index` under `policy`.
inline double simulate_trial(const PolicySpec& policy, std::uint64_t master_seed,
                             std::uint64_t trial_index) {
  Substream stream({master_seed, trial_index});
  const ChannelTrace trace = draw_trace(stream, policy.frame_count);
  const std::size_t frame = decide_random(stream, policy.frame_count);
  return run_episode(policy, trace, frame).harvested;
}

namespace detail {

struct BlockStats {
  MomentAccumulator moments;
  std::uint64_t below = 0;
};

inline MonteCarloSummary run_blocks(const PolicySpec& policy, std::uint64_t trials,
                                    std::uint64_t master_seed, unsigned workers,
                                    std::optional<double> outage_threshold) {
  if (trials == 0) throw std::invalid_argument("trial count must be at least 1");
  validate(policy);
  const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<BlockStats> stats(blocks);

  auto run_block = [&](std::uint64_t b) {
    BlockStats& s = stats[b];
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(trials, begin + kBlockTrials);
    for (std::uint64_t t = begin; t < end; ++t) {
      const double e = simulate_trial(policy, master_seed, t);
      s.moments.add(e);
      if (outage_threshold && e < *outage_threshold) ++s.below;
    }
  };

  const unsigned pool = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_workers(workers), blocks));
  if (pool <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(pool);
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned w = 0; w < pool; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::uint64_t b = next++; b < blocks; b = next++) run_block(b);
        } catch (...) {
          errors[w] = std::current_exception();
          next = blocks;
        }
      });
    }
    for (std::thread& t : threads) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MomentAccumulator total;
  std::uint64_t below = 0;
  for (const BlockStats& s : stats) {
    total.merge(s.moments);
    below += s.below;
  }
  MonteCarloSummary out{trials, total.mean, total.standard_error(), std::nullopt};
  if (outage_threshold) {
    out.outage_frequency = static_cast<double>(below) / static_cast<double>(trials);
  }
  return out;
}

}  // namespace detail

inline MonteCarloSummary monte_carlo(const PolicySpec& policy, std::uint64_t trials,
                                     std::uint64_t master_seed, unsigned workers = 1) {
  return detail::run_blocks(policy, trials, master_seed, workers, std::nullopt);
}

/// Fraction of episodes whose realised harvest falls below `energy_threshold`.
inline MonteCarloSummary outage_probability(const PolicySpec& policy, double energy_threshold,
                                            std::uint64_t trials, std::uint64_t master_seed,
                                            unsigned workers = 1) {
  if (!(energy_threshold > 0.0)) throw std::invalid_argument("energy threshold must be positive");
  return detail::run_blocks(policy, trials, master_seed, workers, energy_threshold);
}

}  // namespace owet

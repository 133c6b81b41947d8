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

#include "owet/policies.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "owet/simulator.hpp"

namespace owet {
namespace {

TEST(DecideOptimal, LastFrameAlwaysTransmits) {
  const auto table = thresholds_no_estimation(3);
  const Decision d = decide_optimal(0, 1.0, 0.001, table);
  EXPECT_TRUE(d.active);
  EXPECT_EQ(d.transmit_energy, 1.0);
}

TEST(DecideOptimal, TwoFrameExamples) {
  const auto table = thresholds_no_estimation(2);
  const Decision wait = decide_optimal(1, 1.0, 0.9, table);
  EXPECT_TRUE(wait.active);
  EXPECT_EQ(wait.transmit_energy, 0.0);
  EXPECT_EQ(decide_optimal(1, 1.0, 1.1, table).transmit_energy, 1.0);
  EXPECT_EQ(decide_optimal(1, 1.0, 1.0, table).transmit_energy, 1.0);  // tie transmits
}

TEST(DecideOptimal, EstimationOnlyWhenBelowThreshold) {
  const auto table = thresholds_with_estimation(1.0, 0.1, 4);
  const Decision d = decide_optimal(3, 1.0, 0.01, table);
  EXPECT_TRUE(d.active);
  EXPECT_EQ(d.transmit_energy, 0.1);
}

TEST(DecideOptimal, ExhaustedBudgetIsInactive) {
  const auto table = thresholds_no_estimation(3);
  const Decision d = decide_optimal(1, 0.0, 5.0, table);
  EXPECT_FALSE(d.active);
  EXPECT_EQ(d.transmit_energy, 0.0);
}

TEST(DecideOptimal, SignalsActiveFrameBelowEstimationCost) {
  const auto table = thresholds_with_estimation(1.0, 0.1, 4);
  EXPECT_THROW(decide_optimal(0, 0.05, 1.0, table), PolicyError);
  EXPECT_THROW(decide_optimal(4, 1.0, 1.0, table), PolicyError);
}

TEST(DecideGenie, PicksLargestGain) {
  const ChannelTrace t{{0.2, 1.7, 0.4}};
  const GenieChoice c = decide_genie(t, 1.0, 0.0, 3);
  EXPECT_EQ(c.frame, 1u);
  EXPECT_DOUBLE_EQ(c.harvested, 1.7);
  EXPECT_DOUBLE_EQ(decide_genie(t, 2.0, 0.0, 3).harvested, 3.4);
}

TEST(DecideGenie, EqualGainsPreferEarliestFrame) {
  const ChannelTrace t{{1.0, 1.0, 1.0}};
  const GenieChoice c = decide_genie(t, 1.0, 0.1, 3);
  EXPECT_EQ(c.frame, 2u);
  EXPECT_DOUBLE_EQ(c.harvested, 0.9);
  EXPECT_EQ(decide_genie(t, 1.0, 0.0, 3).frame, 2u);
}

TEST(DecideGenie, SingleFrame) {
  const ChannelTrace t{{2.5}};
  const GenieChoice c = decide_genie(t, 1.0, 0.2, 1);
  EXPECT_EQ(c.frame, 0u);
  EXPECT_DOUBLE_EQ(c.harvested, 0.8 * 2.5);
  EXPECT_THROW(decide_genie(t, 1.0, 0.0, 2), PolicyError);
}

TEST(DecideEqual, Examples) {
  EXPECT_EQ(equal_share(1.0, 0.1, 10), 0.0);
  const Decision d = decide_equal(3, 1.0, 0.0, 4, 0.7);
  EXPECT_TRUE(d.active);
  EXPECT_EQ(d.transmit_energy, 0.25);
  EXPECT_NEAR(equal_share(1.0, 0.1, 2), 0.4, 1e-15);
  EXPECT_EQ(equal_share(1.0, 0.1, 20), 0.0);
  EXPECT_FALSE(decide_equal(0, 1.0, 0.1, 20, 1.0).active);
}

TEST(DecideRandom, SingleFrameAlwaysZero) {
  Substream s({1, 1});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(decide_random(s, 1), 0u);
}

TEST(PolicySpec, Validation) {
  PolicySpec spec{Scheme::optimal, 1.0, 0.0, 3, std::nullopt};
  EXPECT_THROW(validate(spec), PolicyError);
  spec.threshold_table = thresholds_no_estimation(4);
  EXPECT_THROW(validate(spec), PolicyError);
  spec.threshold_table = thresholds_with_estimation(1.0, 0.1, 3);
  EXPECT_THROW(validate(spec), PolicyError);
  spec.threshold_table = thresholds_no_estimation(3);
  EXPECT_NO_THROW(validate(spec));
  EXPECT_THROW(make_policy(Scheme::equal, 1.0, 1.0, 3), std::invalid_argument);
}

// Replaying a trace with different gains after the transmit frame must not
// change any decision up to and including that frame.
TEST(OptimalPolicy, Causality) {
  for (double e_t : {0.0, 0.05}) {
    const PolicySpec policy = make_policy(Scheme::optimal, 1.0, e_t, 8);
    for (std::uint64_t t = 0; t < 2000; ++t) {
      ChannelTrace trace = draw_trace({11, t}, 8);
      const EpisodeResult a = run_episode(policy, trace);
      ASSERT_TRUE(a.transmit_frame.has_value());
      const std::size_t stop = *a.transmit_frame;
      ChannelTrace perturbed = trace;
      const ChannelTrace noise = draw_trace({12, t}, 8);
      for (std::size_t k = 8 - stop; k < 8; ++k) perturbed.gains[k] = noise.gains[k];
      const EpisodeResult b = run_episode(policy, perturbed);
      ASSERT_EQ(b.transmit_frame, a.transmit_frame);
      for (std::size_t j = stop; j < 8; ++j) {
        ASSERT_EQ(a.ledger[j].transmit_energy, b.ledger[j].transmit_energy);
        ASSERT_EQ(a.ledger[j].active, b.ledger[j].active);
      }
    }
  }
}

TEST(AllSchemes, BudgetFeasibilityAndLedgerShape) {
  for (double frac : {0.0, 0.01, 0.05, 0.1}) {
    for (std::size_t n : {1u, 2u, 5u, 12u}) {
      for (Scheme s : kAllSchemes) {
        const PolicySpec policy = make_policy(s, 1.0, frac, n);
        for (std::uint64_t t = 0; t < 300; ++t) {
          Substream stream({99, t});
          const ChannelTrace trace = draw_trace(stream, n);
          const std::size_t r = decide_random(stream, n);
          const EpisodeResult ep = run_episode(policy, trace, r);
          ASSERT_LE(ep.energy_spent(), 1.0 + 1e-12);
          double harvested = 0.0;
          int harvesting_frames = 0;
          for (std::size_t j = 0; j < n; ++j) {
            const Decision& d = ep.ledger[j];
            if (!d.active) {
              ASSERT_EQ(d.transmit_energy, 0.0);
              continue;
            }
            if (frac > 0.0) {
              ASSERT_GE(d.transmit_energy, frac - 1e-12);
            }
            harvested += (d.transmit_energy - frac) * trace.gain_at_frame(j);
            harvesting_frames += d.transmit_energy - frac > 1e-12;
          }
          ASSERT_NEAR(ep.harvested, harvested, 1e-12);
          ASSERT_GE(ep.harvested, 0.0);
          if (s == Scheme::optimal) {
            ASSERT_LE(harvesting_frames, 1);
          }
        }
      }
    }
  }
}

TEST(GeniePolicy, DominatesOptimalOnEveryTrace) {
  for (std::size_t n : {2u, 5u, 20u}) {
    const PolicySpec opt = make_policy(Scheme::optimal, 1.0, 0.0, n);
    const PolicySpec genie = make_policy(Scheme::genie, 1.0, 0.0, n);
    for (std::uint64_t t = 0; t < 5000; ++t) {
      const ChannelTrace trace = draw_trace({3, t}, n);
      ASSERT_GE(run_episode(genie, trace).harvested, run_episode(opt, trace).harvested);
    }
  }
}

}  // namespace
}  // namespace owet

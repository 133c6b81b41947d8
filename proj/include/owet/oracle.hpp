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

// Bellman-recursion oracle. Solves
//   V_0(A) = max(A - e_t, 0)
//   V_j(A) = E_g[ max_{rho in [e_t, A]} (rho - e_t) g + V_{j-1}(A - rho) ]
// on a uniform budget grid with a discretised continuum of rho levels and no
// use of the closed forms. For a fixed budget node every candidate payoff is
// affine in the gain, so the inner max is the upper envelope of lines and its
// expectation against e^{-g} is integrated exactly segment by segment.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "owet/analytics.hpp"

namespace owet {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DpResolution {
  std::size_t budget_nodes = 2048;
  std::size_t rho_levels = 101;

  /// Halves both the budget step and the rho step.
  [[nodiscard]] DpResolution refined() const {
    return {2 * (budget_nodes - 1) + 1, 2 * (rho_levels - 1) + 1};
  }
};

struct DpGrid {
  std::size_t frame_count = 0;
  double budget = 0.0;
  double estimation_energy = 0.0;
  DpResolution resolution;
  std::vector<double> budget_nodes;        // uniform on [0, budget]
  std::vector<std::vector<double>> value;  // value[j][i] = V_j(budget_nodes[i])
  double refinement_change = 0.0;          // relative change of V_{n-1}(P) on refinement

  [[nodiscard]] double budget_step() const {
    return budget / static_cast<double>(resolution.budget_nodes - 1);
  }

  /// V_j(a) by linear interpolation; zero for a <= 0. The terminal stage is
  /// evaluated exactly so its kink at a = e_t does not smear across a cell.
  [[nodiscard]] double value_at(std::size_t frame, double a) const {
    if (a <= 0.0) return 0.0;
    if (frame == 0) return std::max(a - estimation_energy, 0.0);
    const std::vector<double>& v = value[frame];
    const double pos = std::min(a / budget_step(), static_cast<double>(v.size() - 1));
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] + frac * (v[i + 1] - v[i]);
  }

  [[nodiscard]] double top_value() const { return value.back().back(); }
};

namespace oracle_detail {

struct Line {
  double slope;
  double intercept;
  std::size_t level;
};

struct Segment {
  Line line;
  double from;
  double to;  // +inf for the last segment
};

// Candidate payoffs at frame j >= 1 with `available` energy.
inline std::vector<Line> candidate_lines(const DpGrid& grid, std::size_t frame,
                                         double available) {
  const double e_t = grid.estimation_energy;
  const std::size_t levels = grid.resolution.rho_levels;
  std::vector<Line> lines;
  lines.reserve(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    const double rho =
        k + 1 == levels ? available
                        : e_t + (available - e_t) * static_cast<double>(k) /
                                    static_cast<double>(levels - 1);
    lines.push_back({rho - e_t, grid.value_at(frame - 1, available - rho), k});
  }
  return lines;
}

// Upper envelope over g in [0, inf) of lines given in increasing slope order.
inline std::vector<Segment> upper_envelope(const std::vector<Line>& lines) {
  std::vector<Segment> hull;
  for (const Line& line : lines) {
    bool skip = false;
    while (!hull.empty()) {
      const Segment& top = hull.back();
      if (line.slope == top.line.slope) {
        if (line.intercept > top.line.intercept) {
          hull.pop_back();
          continue;
        }
        skip = true;
        break;
      }
      const double x = (top.line.intercept - line.intercept) / (line.slope - top.line.slope);
      if (x <= top.from) {
        hull.pop_back();
        continue;
      }
      break;
    }
    if (skip) continue;
    double from = 0.0;
    if (!hull.empty()) {
      const Segment& top = hull.back();
      from = (top.line.intercept - line.intercept) / (line.slope - top.line.slope);
    }
    hull.push_back({line, from, std::numeric_limits<double>::infinity()});
  }
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) hull[i].to = hull[i + 1].from;
  return hull;
}

// E[max_k (slope_k g + intercept_k)] for g ~ Exp(1).
inline double envelope_expectation(const std::vector<Segment>& hull) {
  double total = 0.0;
  for (const Segment& s : hull) {
    const double ea = std::exp(-s.from);
    const double eb = std::isinf(s.to) ? 0.0 : std::exp(-s.to);
    const double tail_b = std::isinf(s.to) ? 0.0 : (s.to + 1.0) * eb;
    total += s.line.intercept * (ea - eb) + s.line.slope * ((s.from + 1.0) * ea - tail_b);
  }
  return total;
}

inline DpGrid solve_once(std::size_t n, double budget, double e_t, DpResolution res) {
  DpGrid grid;
  grid.frame_count = n;
  grid.budget = budget;
  grid.estimation_energy = e_t;
  grid.resolution = res;
  grid.budget_nodes.resize(res.budget_nodes);
  for (std::size_t i = 0; i < res.budget_nodes; ++i) {
    grid.budget_nodes[i] =
        i + 1 == res.budget_nodes
            ? budget
            : budget * static_cast<double>(i) / static_cast<double>(res.budget_nodes - 1);
  }
  grid.value.assign(n, std::vector<double>(res.budget_nodes, 0.0));
  for (std::size_t i = 0; i < res.budget_nodes; ++i) {
    grid.value[0][i] = std::max(grid.budget_nodes[i] - e_t, 0.0);
  }
  const double slack = detail::energy_slack(budget);
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < res.budget_nodes; ++i) {
      const double a = grid.budget_nodes[i];
      if (a <= e_t + slack) continue;  // cannot pay for estimation
      grid.value[j][i] = envelope_expectation(upper_envelope(candidate_lines(grid, j, a)));
    }
  }
  return grid;
}

}  // namespace oracle_detail

/// Backward induction for n <= 6 frames. Also solves at the refined
/// resolution and throws OracleError if V_{n-1}(P) moves by more than
/// `tolerance` (relative).
inline DpGrid solve_bellman(std::size_t n, double budget, double e_t, DpResolution res = {},
                            double tolerance = 1e-5) {
  detail::require_frames(n);
  detail::require_estimation(budget, e_t);
  if (n > 6) throw std::invalid_argument("oracle is limited to at most 6 frames");
  if (res.budget_nodes < 2 || res.rho_levels < 2) {
    throw std::invalid_argument("oracle grid needs at least 2 budget nodes and 2 rho levels");
  }
  DpGrid grid = oracle_detail::solve_once(n, budget, e_t, res);
  const DpGrid fine = oracle_detail::solve_once(n, budget, e_t, res.refined());
  const double coarse_top = grid.top_value();
  grid.refinement_change =
      coarse_top == 0.0 ? std::abs(fine.top_value())
                        : std::abs(fine.top_value() - coarse_top) / std::abs(coarse_top);
  if (grid.refinement_change > tolerance) {
    throw OracleError("value did not converge under grid refinement: relative change " +
                      std::to_string(grid.refinement_change));
  }
  return grid;
}

/// Gain at which the DP-optimal action at (frame, available) switches from
/// estimation-only to sending everything, found by bisection on the gain axis.
/// Throws OracleError when the action is not monotone in the gain.
inline double extract_threshold(const DpGrid& grid, std::size_t frame, double available) {
  if (frame >= grid.frame_count) throw std::invalid_argument("frame outside solved grid");
  if (frame == 0) return 0.0;
  const std::vector<oracle_detail::Line> lines =
      oracle_detail::candidate_lines(grid, frame, available);
  auto best_level = [&](double g) {
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (const auto& l : lines) {
      const double v = l.intercept + l.slope * g;
      if (v > best_value) {
        best_value = v;
        best = l.level;
      }
    }
    return best;
  };
  const std::size_t top_level = grid.resolution.rho_levels - 1;
  const double step = grid.budget_step();
  const double e_t = grid.estimation_energy;
  auto transmits = [&](double g) {
    const std::size_t k = best_level(g);
    const double rho = e_t + (available - e_t) * static_cast<double>(k) /
                                 static_cast<double>(top_level);
    return rho >= available - step;
  };

  double hi = 1.0;
  while (!transmits(hi)) {
    hi *= 2.0;
    if (hi > 1e4) throw OracleError("no finite gain makes sending everything optimal");
  }
  constexpr int kSamples = 512;
  std::size_t previous = 0;
  for (int s = 0; s <= kSamples; ++s) {
    const std::size_t level = best_level(hi * s / kSamples);
    if (level < previous) {
      throw OracleError("optimal action is not monotone in the gain at frame " +
                        std::to_string(frame));
    }
    previous = level;
  }
  if (transmits(0.0)) return 0.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (transmits(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Number of (frame, budget node, envelope segment) triples whose optimal rho
/// is more than one budget step away from both e_t and the available energy.
/// Envelope segments shorter than 1e-9 in gain are floating-point ties and are
/// skipped.
inline std::size_t count_non_binary_actions(const DpGrid& grid) {
  const double e_t = grid.estimation_energy;
  const double step = grid.budget_step();
  const double slack = detail::energy_slack(grid.budget);
  const std::size_t top_level = grid.resolution.rho_levels - 1;
  std::size_t violations = 0;
  for (std::size_t j = 1; j < grid.frame_count; ++j) {
    for (double a : grid.budget_nodes) {
      if (a <= e_t + slack) continue;
      const auto hull =
          oracle_detail::upper_envelope(oracle_detail::candidate_lines(grid, j, a));
      for (const auto& seg : hull) {
        if (seg.to - seg.from < 1e-9) continue;
        const double rho = e_t + (a - e_t) * static_cast<double>(seg.line.level) /
                                     static_cast<double>(top_level);
        if (std::abs(rho - e_t) > step && std::abs(rho - a) > step) ++violations;
      }
    }
  }
  return violations;
}

inline bool binary_optimality_check(const DpGrid& grid) {
  return count_non_binary_actions(grid) == 0;
}

}  // namespace owet

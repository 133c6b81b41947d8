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

// Closed-form results for opportunistic energy transfer over N block-fading
// Rayleigh frames. Frames are indexed by the number of frames remaining after
// them: frame N-1 is the first slot, frame 0 is the deadline.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "owet/numeric.hpp"

namespace owet {

inline constexpr double kEulerMascheroni = 0.577215664901532860606512;

enum class Scheme { optimal, genie, equal, random };

inline constexpr Scheme kAllSchemes[] = {Scheme::optimal, Scheme::genie,
                                         Scheme::equal, Scheme::random};

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::optimal: return "optimal";
    case Scheme::genie: return "genie";
    case Scheme::equal: return "equal";
    case Scheme::random: return "random";
  }
  return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

/// Coefficients c_0..c_{n-1} with c_0 = 1 and c_j = exp(-(c_0 + ... + c_{j-1})).
/// c_j is the marginal expected gain (per unit budget) of having one more frame.
struct CoefficientSequence {
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] double sum() const {
    CompensatedSum s;
    for (double c : values) s.add(c);
    return s.value();
  }
};

/// Per-frame transmit thresholds and the available energy at each frame along
/// the path where no earlier frame has transmitted. Both vectors are indexed
/// by frame: thresholds[j] is the threshold of frame j.
struct ThresholdTable {
  std::size_t frame_count = 0;
  double estimation_energy = 0.0;
  double budget = 0.0;
  std::vector<double> thresholds;
  std::vector<double> available;
};

struct ExpectedEnergyReport {
  Scheme scheme = Scheme::optimal;
  std::size_t frame_count = 0;
  double budget = 0.0;
  double estimation_energy = 0.0;
  double expected_energy = 0.0;
};

namespace detail {

inline void require_frames(std::size_t n) {
  if (n == 0) throw std::invalid_argument("frame count must be at least 1");
}

inline void require_budget(double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("budget must be positive and finite, got " +
                                std::to_string(budget));
  }
}

inline void require_estimation(double budget, double e_t) {
  require_budget(budget);
  if (!(e_t >= 0.0)) {
    throw std::invalid_argument("estimation energy must be non-negative");
  }
  if (!(e_t < budget)) {
    throw std::invalid_argument(
        "estimation energy must be below the budget (cannot estimate even once)");
  }
}

// Absolute slack used when comparing energies that are built by repeated
// subtraction of e_t from the budget.
inline double energy_slack(double budget) { return 1e-12 * budget; }

}  // namespace detail

inline CoefficientSequence compute_c_sequence(std::size_t n) {
  detail::require_frames(n);
  CoefficientSequence seq;
  seq.values.reserve(n);
  double c = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    seq.values.push_back(c);
    c *= std::exp(-c);
  }
  return seq;
}

inline ExpectedEnergyReport optimal_expected_energy(double budget, std::size_t n) {
  detail::require_budget(budget);
  return {Scheme::optimal, n, budget, 0.0, budget * compute_c_sequence(n).sum()};
}

/// Thresholds without estimation cost: gamma_j = c_0 + ... + c_{j-1}.
inline ThresholdTable thresholds_no_estimation(std::size_t n, double budget = 1.0) {
  detail::require_frames(n);
  detail::require_budget(budget);
  const CoefficientSequence c = compute_c_sequence(n);
  ThresholdTable table{n, 0.0, budget, std::vector<double>(n, 0.0),
                       std::vector<double>(n, budget)};
  CompensatedSum partial;
  for (std::size_t j = 1; j < n; ++j) {
    partial.add(c.values[j - 1]);
    table.thresholds[j] = partial.value();
  }
  return table;
}

/// H_1..H_n, each accurate to a few ulp.
inline std::vector<double> harmonic_numbers(std::size_t n) {
  std::vector<double> h;
  h.reserve(n);
  CompensatedSum s;
  for (std::size_t k = 1; k <= n; ++k) {
    s.add(1.0 / static_cast<double>(k));
    h.push_back(s.value());
  }
  return h;
}

inline double harmonic_number(std::size_t n) {
  CompensatedSum s;
  for (std::size_t k = n; k >= 1; --k) s.add(1.0 / static_cast<double>(k));
  return s.value();
}

/// Expected energy when the transmitter knows every gain in advance and sends
/// the whole budget in the best frame: P * H_n.
inline ExpectedEnergyReport genie_expected_energy(double budget, std::size_t n) {
  detail::require_frames(n);
  detail::require_budget(budget);
  return {Scheme::genie, n, budget, 0.0, budget * harmonic_number(n)};
}

/// Gaps R_{n-1}(1) - ln(n) for n = 1..max_n, computed with one running sum.
inline std::vector<double> asymptotic_gap_sequence(std::size_t max_n, Scheme scheme) {
  std::vector<double> gaps;
  gaps.reserve(max_n);
  CompensatedSum s;
  double c = 1.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (scheme == Scheme::genie) {
      s.add(1.0 / static_cast<double>(n));
    } else if (scheme == Scheme::optimal) {
      s.add(c);
      c *= std::exp(-c);
    } else {
      throw std::invalid_argument("asymptotic gap is defined for optimal and genie only");
    }
    gaps.push_back(s.value() - std::log(static_cast<double>(n)));
  }
  return gaps;
}

inline double asymptotic_gap(std::size_t n, Scheme scheme) {
  detail::require_frames(n);
  return asymptotic_gap_sequence(n, scheme).back();
}

/// Thresholds with a per-frame estimation cost e_t. The recursion runs along
/// the reachable budget path A_j = P - (N-1-j) e_t:
///   gamma_0 = 0,
///   gamma_j = (A_j - 2e_t)/(A_j - e_t) * [gamma_{j-1} + exp(-gamma_{j-1})]  if A_j > 2e_t,
///   gamma_j = 0 otherwise.
/// Frames past the point where A_j <= 2e_t are never reached (that frame
/// transmits unconditionally); their entries are 0 with the raw schedule kept.
inline ThresholdTable thresholds_with_estimation(double budget, double e_t, std::size_t n) {
  detail::require_frames(n);
  detail::require_estimation(budget, e_t);
  ThresholdTable table{n, e_t, budget, std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0)};
  const double slack = detail::energy_slack(budget);
  for (std::size_t j = 0; j < n; ++j) {
    table.available[j] = budget - static_cast<double>(n - 1 - j) * e_t;
  }
  for (std::size_t j = 1; j < n; ++j) {
    const double a = table.available[j];
    if (a - 2.0 * e_t > slack) {
      const double prev = table.thresholds[j - 1];
      table.thresholds[j] = (a - 2.0 * e_t) / (a - e_t) * (prev + std::exp(-prev));
    }
  }
  return table;
}

/// R_{N-1}(P) = (P - e_t) * [gamma_{N-1} + exp(-gamma_{N-1})].
inline ExpectedEnergyReport optimal_expected_energy_with_estimation(double budget, double e_t,
                                                                    std::size_t n) {
  const ThresholdTable table = thresholds_with_estimation(budget, e_t, n);
  const double top = table.thresholds[n - 1];
  return {Scheme::optimal, n, budget, e_t, (budget - e_t) * (top + std::exp(-top))};
}

/// Equal split: every frame gets P/N and harvests (P/N - e_t) * g when that is
/// positive, so the mean is max(P - N e_t, 0).
inline ExpectedEnergyReport equal_expected_energy(double budget, double e_t, std::size_t n) {
  detail::require_frames(n);
  detail::require_estimation(budget, e_t);
  const double share = budget / static_cast<double>(n) - e_t;
  const double value =
      share > detail::energy_slack(budget) ? static_cast<double>(n) * share : 0.0;
  return {Scheme::equal, n, budget, e_t, value};
}

/// Random frame: one estimation, everything else in a uniformly chosen frame.
inline ExpectedEnergyReport random_expected_energy(double budget, double e_t, std::size_t n) {
  detail::require_frames(n);
  detail::require_estimation(budget, e_t);
  return {Scheme::random, n, budget, e_t, budget - e_t};
}

/// Closed-form expected energy for a scheme, when one exists. The genie with
/// e_t > 0 has none beyond the single-frame case.
inline std::optional<ExpectedEnergyReport> analytic_expected_energy(Scheme scheme, double budget,
                                                                    double e_t, std::size_t n) {
  detail::require_frames(n);
  detail::require_estimation(budget, e_t);
  switch (scheme) {
    case Scheme::optimal:
      return e_t == 0.0 ? optimal_expected_energy(budget, n)
                        : optimal_expected_energy_with_estimation(budget, e_t, n);
    case Scheme::genie:
      if (e_t == 0.0) return genie_expected_energy(budget, n);
      if (n == 1) return ExpectedEnergyReport{Scheme::genie, 1, budget, e_t, budget - e_t};
      return std::nullopt;
    case Scheme::equal:
      return equal_expected_energy(budget, e_t, n);
    case Scheme::random:
      return random_expected_energy(budget, e_t, n);
  }
  return std::nullopt;
}

}  // namespace owet

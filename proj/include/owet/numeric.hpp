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

#include <cmath>
#include <cstddef>

namespace owet {

// Neumaier-compensated running sum. Error stays O(eps) independent of the
// number of terms, which the harmonic-number bounds at N ~ 1e6 depend on.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Running mean / second central moment; merge() is Chan's pairwise update.
struct MomentAccumulator {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const MomentAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double n_a = static_cast<double>(count);
    const double n_b = static_cast<double>(other.count);
    const double n = n_a + n_b;
    const double delta = other.mean - mean;
    mean += delta * (n_b / n);
    m2 += other.m2 + delta * delta * (n_a * n_b / n);
    count += other.count;
  }

  [[nodiscard]] double sample_variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }

  [[nodiscard]] double standard_error() const {
    return count > 0 ? std::sqrt(sample_variance() / static_cast<double>(count))
                     : 0.0;
  }
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace owet

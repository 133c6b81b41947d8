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

// Tabular experiment output and the figure-reproduction presets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <iterator>
#include <vector>

#include <json.hpp>

#include "owet/analytics.hpp"
#include "owet/numeric.hpp"
#include "owet/oracle.hpp"
#include "owet/policies.hpp"
#include "owet/simulator.hpp"

namespace owet {

inline constexpr std::uint64_t kDefaultSeed = 20190711;

/// One output row. Missing fields serialise as an empty CSV cell / JSON null.
struct Record {
  std::string scheme;
  std::optional<std::int64_t> frames;
  std::optional<double> power;
  std::optional<double> power_dbm;
  std::optional<double> estimation_energy;
  std::optional<std::int64_t> frame;
  std::string metric;
  double value = 0.0;
  std::optional<double> std_error;

  bool operator==(const Record&) const = default;
};

using Dataset = std::vector<Record>;

enum class OutputFormat { csv, json };

inline std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  return std::nullopt;
}

inline constexpr std::string_view kCsvHeader = "scheme,N,P,P_dBm,e_t,frame,metric,value,std_error";

/// Nine significant digits, shortest "%g" style.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline double round_to_9_digits(double x) { return std::stod(format_number(x)); }

namespace experiment_detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }
inline std::string opt(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : "";
}

template <typename T>
nlohmann::ordered_json json_opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) {
    return round_to_9_digits(*v);
  } else {
    return *v;
  }
}

template <typename T>
std::optional<T> from_json_opt(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace experiment_detail

inline void write_csv(const Dataset& data, std::ostream& os) {
  using namespace experiment_detail;
  os << kCsvHeader << '\n';
  for (const Record& r : data) {
    os << csv_field(r.scheme) << ',' << opt(r.frames) << ',' << opt(r.power) << ','
       << opt(r.power_dbm) << ',' << opt(r.estimation_energy) << ',' << opt(r.frame) << ','
       << csv_field(r.metric) << ',' << format_number(r.value) << ',' << opt(r.std_error)
       << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Dataset& data) {
  using namespace experiment_detail;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Record& r : data) {
    nlohmann::ordered_json j;
    j["scheme"] = r.scheme;
    j["N"] = json_opt(r.frames);
    j["P"] = json_opt(r.power);
    j["P_dBm"] = json_opt(r.power_dbm);
    j["e_t"] = json_opt(r.estimation_energy);
    j["frame"] = json_opt(r.frame);
    j["metric"] = r.metric;
    j["value"] = round_to_9_digits(r.value);
    j["std_error"] = json_opt(r.std_error);
    arr.push_back(std::move(j));
  }
  return arr;
}

inline Dataset parse_json_dataset(std::string_view text) {
  using namespace experiment_detail;
  const auto arr = nlohmann::ordered_json::parse(text);
  if (!arr.is_array()) throw std::invalid_argument("dataset JSON must be an array");
  Dataset out;
  for (const auto& j : arr) {
    out.push_back({j.at("scheme").get<std::string>(), from_json_opt<std::int64_t>(j.at("N")),
                   from_json_opt<double>(j.at("P")), from_json_opt<double>(j.at("P_dBm")),
                   from_json_opt<double>(j.at("e_t")), from_json_opt<std::int64_t>(j.at("frame")),
                   j.at("metric").get<std::string>(), j.at("value").get<double>(),
                   from_json_opt<double>(j.at("std_error"))});
  }
  return out;
}

inline std::string render(const Dataset& data, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::csv) {
    write_csv(data, os);
  } else {
    os << to_json(data).dump(2) << '\n';
  }
  return os.str();
}

/// Writes the dataset to `path` via a temporary sibling file and a rename, so
/// a failure never leaves a partial file behind.
inline void emit(const Dataset& data, OutputFormat format, const std::filesystem::path& path) {
  const std::string text = render(data, format);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " +
                             ec.message());
  }
}

// ---------------------------------------------------------------------------
// Building blocks shared by the CLI subcommands and the figure presets.

struct PowerSetting {
  double linear = 1.0;
  std::optional<double> dbm;

  static PowerSetting from_dbm(double dbm) { return {dbm_to_mw(dbm), dbm}; }
};

struct RunSettings {
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  std::optional<std::uint64_t> trials;  // overrides preset trial counts
};

inline Record base_record(Scheme scheme, std::size_t n, PowerSetting p, double e_t) {
  Record r;
  r.scheme = std::string(to_string(scheme));
  r.frames = static_cast<std::int64_t>(n);
  r.power = p.linear;
  r.power_dbm = p.dbm;
  r.estimation_energy = e_t;
  return r;
}

/// Threshold table rows, frame N-1 first.
inline Dataset threshold_rows(PowerSetting p, double e_t, std::size_t n) {
  const ThresholdTable t = make_threshold_table(p.linear, e_t, n);
  Dataset out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = n - 1 - k;
    Record r = base_record(Scheme::optimal, n, p, e_t);
    r.frame = static_cast<std::int64_t>(j);
    r.metric = "threshold";
    r.value = t.thresholds[j];
    out.push_back(r);
    r.metric = "available_energy";
    r.value = t.available[j];
    out.push_back(r);
  }
  return out;
}

inline Dataset expectation_rows(const std::vector<Scheme>& schemes,
                                const std::vector<std::size_t>& frames, PowerSetting p,
                                double e_t) {
  Dataset out;
  for (std::size_t n : frames) {
    for (Scheme s : schemes) {
      const auto report = analytic_expected_energy(s, p.linear, e_t, n);
      if (!report) continue;
      Record r = base_record(s, n, p, e_t);
      r.metric = "expected_energy_analytic";
      r.value = report->expected_energy;
      out.push_back(r);
    }
  }
  return out;
}

inline Dataset simulation_rows(const std::vector<Scheme>& schemes,
                               const std::vector<std::size_t>& frames, PowerSetting p,
                               double e_t, std::uint64_t trials, const RunSettings& run) {
  Dataset out;
  for (std::size_t n : frames) {
    for (Scheme s : schemes) {
      const MonteCarloSummary mc =
          monte_carlo(make_policy(s, p.linear, e_t, n), trials, run.seed, run.workers);
      Record r = base_record(s, n, p, e_t);
      r.metric = "expected_energy_sim";
      r.value = mc.mean;
      r.std_error = mc.std_error;
      out.push_back(r);
    }
  }
  return out;
}

/// Genie outage with e_t = 0 in closed form: P(max of n gains < x).
inline double genie_outage_analytic(double budget, double energy_threshold, std::size_t n) {
  return std::pow(-std::expm1(-energy_threshold / budget), static_cast<double>(n));
}

inline Dataset outage_rows(const std::vector<Scheme>& schemes,
                           const std::vector<std::size_t>& frames,
                           const std::vector<PowerSetting>& powers, double et_fraction,
                           double energy_threshold, std::uint64_t trials,
                           const RunSettings& run) {
  Dataset out;
  for (std::size_t n : frames) {
    for (Scheme s : schemes) {
      for (const PowerSetting& p : powers) {
        const double e_t = et_fraction * p.linear;
        const MonteCarloSummary mc = outage_probability(make_policy(s, p.linear, e_t, n),
                                                        energy_threshold, trials, run.seed,
                                                        run.workers);
        Record r = base_record(s, n, p, e_t);
        r.metric = "outage_sim";
        r.value = *mc.outage_frequency;
        r.std_error = mc.outage_std_error();
        out.push_back(r);
        if (s == Scheme::genie && e_t == 0.0) {
          r.metric = "outage_analytic";
          r.value = genie_outage_analytic(p.linear, energy_threshold, n);
          r.std_error.reset();
          out.push_back(r);
        }
      }
    }
  }
  return out;
}

inline Dataset asymptotic_rows(const std::vector<std::size_t>& frames) {
  std::size_t max_n = 0;
  for (std::size_t n : frames) {
    detail::require_frames(n);
    max_n = std::max(max_n, n);
  }
  Dataset out;
  for (Scheme s : {Scheme::optimal, Scheme::genie}) {
    const std::vector<double> gaps = asymptotic_gap_sequence(max_n, s);
    for (std::size_t n : frames) {
      Record r = base_record(s, n, PowerSetting{}, 0.0);
      r.metric = "gap_analytic";
      r.value = gaps[n - 1];
      out.push_back(r);
    }
  }
  return out;
}

/// DP oracle against the closed forms for one (N, P, e_t).
inline Dataset oracle_rows(std::size_t n, PowerSetting p, double e_t) {
  const DpGrid grid = solve_bellman(n, p.linear, e_t);
  const ThresholdTable table = make_threshold_table(p.linear, e_t, n);
  Dataset out;
  Record r = base_record(Scheme::optimal, n, p, e_t);
  r.metric = "dp_value";
  r.value = grid.top_value();
  out.push_back(r);
  r.metric = "closed_form_value";
  r.value = analytic_expected_energy(Scheme::optimal, p.linear, e_t, n)->expected_energy;
  out.push_back(r);
  r.metric = "dp_refinement_change";
  r.value = grid.refinement_change;
  out.push_back(r);
  r.metric = "binary_optimal";
  r.value = binary_optimality_check(grid) ? 1.0 : 0.0;
  out.push_back(r);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = n - 1 - k;
    Record t = base_record(Scheme::optimal, n, p, e_t);
    t.frame = static_cast<std::int64_t>(j);
    t.metric = "dp_threshold";
    t.value = extract_threshold(grid, j, table.available[j]);
    out.push_back(t);
    t.metric = "threshold";
    t.value = table.thresholds[j];
    out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Figure presets.

enum class Figure { fig2, fig3, fig4, fig5, fig6 };

inline std::optional<Figure> parse_figure(std::string_view id) {
  if (id == "fig2") return Figure::fig2;
  if (id == "fig3") return Figure::fig3;
  if (id == "fig4") return Figure::fig4;
  if (id == "fig5") return Figure::fig5;
  if (id == "fig6") return Figure::fig6;
  return std::nullopt;
}

inline std::vector<std::size_t> frame_range(std::size_t first, std::size_t last,
                                            std::size_t step = 1) {
  if (first == 0 || last < first || step == 0) {
    throw std::invalid_argument("invalid frame range");
  }
  std::vector<std::size_t> out;
  for (std::size_t n = first; n <= last; n += step) out.push_back(n);
  return out;
}

inline constexpr std::uint64_t kTrialsNoEstimation = 1'000'000;
inline constexpr std::uint64_t kTrialsWithEstimation = 100'000;
inline constexpr double kOutageThresholdDbm = 10.0;

inline Dataset reproduce(Figure figure, const RunSettings& run = {}) {
  const std::vector<Scheme> all(std::begin(kAllSchemes), std::end(kAllSchemes));
  switch (figure) {
    case Figure::fig2: {
      const auto frames = frame_range(1, 30);
      const std::uint64_t trials = run.trials.value_or(kTrialsNoEstimation);
      Dataset out = simulation_rows(all, frames, PowerSetting{}, 0.0, trials, run);
      const Dataset analytic =
          expectation_rows({Scheme::optimal, Scheme::genie}, frames, PowerSetting{}, 0.0);
      out.insert(out.end(), analytic.begin(), analytic.end());
      return out;
    }
    case Figure::fig3: {
      std::vector<std::size_t> frames = frame_range(1, 100);
      for (std::size_t n : {200, 500, 1000, 2000, 5000, 10000}) frames.push_back(n);
      return asymptotic_rows(frames);
    }
    case Figure::fig4: {
      std::vector<PowerSetting> powers;
      for (int dbm = 0; dbm <= 30; dbm += 2) powers.push_back(PowerSetting::from_dbm(dbm));
      return outage_rows(all, {1, 2, 3}, powers, 0.0, dbm_to_mw(kOutageThresholdDbm),
                         run.trials.value_or(kTrialsNoEstimation), run);
    }
    case Figure::fig5: {
      Dataset out;
      for (double frac : {0.0, 0.01, 0.05, 0.10}) {
        for (const Record& r : threshold_rows(PowerSetting{}, frac, 10)) {
          if (r.metric == "threshold") out.push_back(r);
        }
      }
      return out;
    }
    case Figure::fig6: {
      const auto frames = frame_range(1, 30);
      const double e_t = 0.10;
      const std::uint64_t trials = run.trials.value_or(kTrialsWithEstimation);
      Dataset out = simulation_rows(all, frames, PowerSetting{}, e_t, trials, run);
      const Dataset analytic = expectation_rows(all, frames, PowerSetting{}, e_t);
      out.insert(out.end(), analytic.begin(), analytic.end());
      return out;
    }
  }
  throw std::invalid_argument("unknown figure");
}

}  // namespace owet

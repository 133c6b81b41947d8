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

// owet: command-line front end for thresholds, closed forms, Monte Carlo
// runs, the DP oracle and the figure presets.

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "owet/experiment.hpp"

namespace {

struct Options {
  std::vector<std::string> schemes;
  std::optional<std::size_t> frames;
  std::string frames_range;
  std::optional<double> power;
  std::optional<double> power_dbm;
  std::optional<double> et_frac;
  std::optional<double> et_abs;
  double energy_threshold_dbm = owet::kOutageThresholdDbm;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = owet::kDefaultSeed;
  bool random_seed = false;
  unsigned workers = 1;
  std::string format = "csv";
  std::string out = "-";
  std::string figure;
};

std::vector<std::size_t> parse_frames(const Options& o, std::size_t fallback) {
  if (o.frames) return {*o.frames};
  if (o.frames_range.empty()) return {fallback};
  std::vector<std::size_t> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = o.frames_range.find(':', start);
    const std::string piece = o.frames_range.substr(start, colon - start);
    std::size_t used = 0;
    const unsigned long value = std::stoul(piece, &used);
    if (used != piece.size()) throw std::invalid_argument("bad --frames-range: " + o.frames_range);
    parts.push_back(value);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw std::invalid_argument("--frames-range expects FIRST:LAST or FIRST:LAST:STEP");
  }
  return owet::frame_range(parts[0], parts[1], parts.size() == 3 ? parts[2] : 1);
}

std::vector<owet::Scheme> parse_schemes(const Options& o) {
  if (o.schemes.empty()) {
    return {std::begin(owet::kAllSchemes), std::end(owet::kAllSchemes)};
  }
  std::vector<owet::Scheme> out;
  for (const std::string& name : o.schemes) {
    const auto s = owet::parse_scheme(name);
    if (!s) throw std::invalid_argument("unknown scheme '" + name + "'");
    out.push_back(*s);
  }
  return out;
}

owet::PowerSetting power_of(const Options& o) {
  if (o.power_dbm) return owet::PowerSetting::from_dbm(*o.power_dbm);
  if (o.power) {
    if (!(*o.power > 0.0)) throw std::invalid_argument("--power must be positive");
    return {*o.power, std::nullopt};
  }
  return {};
}

double et_fraction_of(const Options& o, const owet::PowerSetting& p) {
  if (o.et_abs) return *o.et_abs / p.linear;
  return o.et_frac.value_or(0.0);
}

double estimation_energy_of(const Options& o, const owet::PowerSetting& p) {
  const double frac = et_fraction_of(o, p);
  if (!(frac >= 0.0 && frac < 1.0)) {
    throw std::invalid_argument("estimation energy must lie in [0, P)");
  }
  return o.et_abs ? *o.et_abs : frac * p.linear;
}

std::uint64_t default_trials(double e_t) {
  return e_t == 0.0 ? owet::kTrialsNoEstimation : owet::kTrialsWithEstimation;
}

void add_common(CLI::App* cmd, Options& o, bool stochastic) {
  cmd->add_option("--scheme", o.schemes, "optimal, genie, equal, random (repeatable)")
      ->delimiter(',');
  auto* frames = cmd->add_option("--frames", o.frames, "number of frames N");
  auto* range = cmd->add_option("--frames-range", o.frames_range, "FIRST:LAST[:STEP]");
  frames->excludes(range);
  auto* p = cmd->add_option("--power", o.power, "transmit energy budget, linear units");
  auto* pd = cmd->add_option("--power-dbm", o.power_dbm, "transmit energy budget in dBm");
  p->excludes(pd);
  auto* ef = cmd->add_option("--et-frac", o.et_frac, "estimation energy as a fraction of P");
  auto* ea = cmd->add_option("--et-abs", o.et_abs, "estimation energy, absolute");
  ef->excludes(ea);
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "output path, '-' for stdout");
  if (stochastic) {
    cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    auto* seed = cmd->add_option("--seed", o.seed, "master seed");
    auto* rnd = cmd->add_flag("--random-seed", o.random_seed, "draw a fresh master seed");
    seed->excludes(rnd);
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores); output is identical for any value");
  }
}

void write(const owet::Dataset& data, const Options& o) {
  const auto format = *owet::parse_format(o.format);
  if (o.out == "-") {
    std::cout << owet::render(data, format);
  } else {
    owet::emit(data, format, o.out);
  }
}

owet::RunSettings run_settings(const Options& o) {
  owet::RunSettings run{o.seed, o.workers, o.trials};
  if (o.random_seed) {
    run.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
    std::cerr << "master seed: " << run.seed << '\n';
  }
  if (run.trials && *run.trials == 0) throw std::invalid_argument("--trials must be positive");
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic wireless energy transfer: threshold policies and simulation"};
  app.require_subcommand(1);
  Options o;

  auto* thresholds = app.add_subcommand("thresholds", "per-frame transmit thresholds");
  add_common(thresholds, o, false);
  auto* expect = app.add_subcommand("expect", "closed-form expected harvested energy");
  add_common(expect, o, false);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo expected harvested energy");
  add_common(simulate, o, true);
  auto* outage = app.add_subcommand("outage", "Monte Carlo outage probability");
  add_common(outage, o, true);
  outage->add_option("--energy-threshold-dbm", o.energy_threshold_dbm,
                     "harvested-energy threshold in dBm");
  auto* asymptotics = app.add_subcommand("asymptotics", "R_{N-1}(1) - ln N for optimal and genie");
  add_common(asymptotics, o, false);
  auto* oracle = app.add_subcommand("oracle", "Bellman-recursion check of the closed forms");
  add_common(oracle, o, false);
  auto* reproduce = app.add_subcommand("reproduce", "regenerate a figure dataset");
  reproduce->add_option("figure", o.figure, "fig2, fig3, fig4, fig5 or fig6")->required();
  add_common(reproduce, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    owet::Dataset data;
    if (*thresholds) {
      const auto p = power_of(o);
      for (std::size_t n : parse_frames(o, 10)) {
        const auto rows = owet::threshold_rows(p, estimation_energy_of(o, p), n);
        data.insert(data.end(), rows.begin(), rows.end());
      }
    } else if (*expect) {
      const auto p = power_of(o);
      data = owet::expectation_rows(parse_schemes(o), parse_frames(o, 10), p,
                                    estimation_energy_of(o, p));
    } else if (*simulate) {
      const auto p = power_of(o);
      const double e_t = estimation_energy_of(o, p);
      const auto run = run_settings(o);
      data = owet::simulation_rows(parse_schemes(o), parse_frames(o, 10), p, e_t,
                                   run.trials.value_or(default_trials(e_t)), run);
    } else if (*outage) {
      const auto p = power_of(o);
      const double frac = et_fraction_of(o, p);
      estimation_energy_of(o, p);
      const auto run = run_settings(o);
      data = owet::outage_rows(parse_schemes(o), parse_frames(o, 1), {p}, frac,
                               owet::dbm_to_mw(o.energy_threshold_dbm),
                               run.trials.value_or(default_trials(frac)), run);
    } else if (*asymptotics) {
      data = owet::asymptotic_rows(parse_frames(o, 100));
    } else if (*oracle) {
      const auto p = power_of(o);
      for (std::size_t n : parse_frames(o, 3)) {
        const auto rows = owet::oracle_rows(n, p, estimation_energy_of(o, p));
        data.insert(data.end(), rows.begin(), rows.end());
      }
    } else if (*reproduce) {
      const auto figure = owet::parse_figure(o.figure);
      if (!figure) throw std::invalid_argument("unknown figure id '" + o.figure + "'");
      data = owet::reproduce(*figure, run_settings(o));
    }
    write(data, o);
  } catch (const std::exception& e) {
    std::cerr << "owet: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

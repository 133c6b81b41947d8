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

#include "owet/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace owet {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST(Emit, NumbersUseNineSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(3.9949871309203906), "3.99498713");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1e-7), "1e-07");
}

TEST(Emit, EmptyDataset) {
  EXPECT_EQ(render({}, OutputFormat::csv), std::string(kCsvHeader) + "\n");
  EXPECT_EQ(render({}, OutputFormat::json), "[]\n");
}

TEST(Emit, CsvRow) {
  Record r{"genie", 3, 1.0, std::nullopt, 0.0, std::nullopt, "expected_energy_sim",
           1.8333333333, 0.00123456789};
  EXPECT_EQ(render({r}, OutputFormat::csv),
            std::string(kCsvHeader) + "\ngenie,3,1,,0,,expected_energy_sim,1.83333333,0.00123456789\n");
}

TEST(Emit, JsonRecordRoundTrips) {
  Record r{"optimal", 10, dbm_to_mw(16.0), 16.0, 0.1, 4, "threshold", 1.2345678912345, 0.5};
  const Dataset parsed = parse_json_dataset(render({r}, OutputFormat::json));
  ASSERT_EQ(parsed.size(), 1u);
  Record expected = r;
  expected.power = round_to_9_digits(*r.power);
  expected.value = round_to_9_digits(r.value);
  EXPECT_EQ(parsed[0], expected);
  // Once rounded, a second pass is a fixed point.
  EXPECT_EQ(parse_json_dataset(render(parsed, OutputFormat::json)), parsed);
}

TEST(Emit, WritesThroughRename) {
  const fs::path dir = fs::temp_directory_path() / "owet_emit_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const Dataset d = reproduce(Figure::fig5);
  emit(d, OutputFormat::csv, dir / "fig5.csv");
  EXPECT_EQ(slurp(dir / "fig5.csv"), render(d, OutputFormat::csv));
  EXPECT_FALSE(fs::exists(dir / "fig5.csv.tmp"));
  fs::remove_all(dir);
}

TEST(Emit, ReportsPathOnFailure) {
  const fs::path bad = fs::temp_directory_path() / "owet_missing_dir" / "x" / "out.csv";
  try {
    emit({}, OutputFormat::csv, bad);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("out.csv"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(bad));
}

TEST(Reproduce, Fig5LastFrameThresholdIsZero) {
  const Dataset d = reproduce(Figure::fig5);
  EXPECT_EQ(d.size(), 40u);
  for (const Record& r : d) {
    if (*r.frame == 0) {
      EXPECT_EQ(r.value, 0.0);
    }
    if (*r.frame == 1 && std::abs(*r.estimation_energy - 0.1) < 1e-12) {
      EXPECT_EQ(r.value, 0.0);
    }
  }
  EXPECT_EQ(d.front().frame, 9);  // frame N-1 first
}

TEST(Reproduce, Fig6SingleFrameIsNinetyPercentForEveryScheme) {
  RunSettings run;
  run.trials = 2000;
  const Dataset d = reproduce(Figure::fig6, run);
  int analytic = 0;
  for (const Record& r : d) {
    if (*r.frames != 1 || r.metric != "expected_energy_analytic") continue;
    EXPECT_DOUBLE_EQ(r.value, 0.9) << r.scheme;
    ++analytic;
  }
  EXPECT_EQ(analytic, 4);
}

TEST(Reproduce, Fig2AnalyticGenieAtThirtyFrames) {
  RunSettings run;
  run.trials = 200;
  const Dataset d = reproduce(Figure::fig2, run);
  bool found = false;
  for (const Record& r : d) {
    if (r.scheme == "genie" && *r.frames == 30 && r.metric == "expected_energy_analytic") {
      EXPECT_NEAR(r.value, harmonic_number(30), 1e-15);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Reproduce, SameSeedSameBytesAnyWorkers) {
  RunSettings a;
  a.trials = 3000;
  a.workers = 1;
  RunSettings b = a;
  b.workers = 4;
  for (Figure f : {Figure::fig4, Figure::fig6}) {
    const auto x = render(reproduce(f, a), OutputFormat::json);
    EXPECT_EQ(x, render(reproduce(f, b), OutputFormat::json));
    EXPECT_EQ(x, render(reproduce(f, a), OutputFormat::json));
  }
}

TEST(Reproduce, FigureIds) {
  EXPECT_EQ(parse_figure("fig3"), Figure::fig3);
  EXPECT_FALSE(parse_figure("fig7").has_value());
  EXPECT_FALSE(parse_figure("").has_value());
}

TEST(Rows, OracleRowsCompareDpToClosedForm) {
  const Dataset d = oracle_rows(3, PowerSetting{}, 0.0);
  double dp = 0, cf = 0;
  for (const Record& r : d) {
    if (r.metric == "dp_value") dp = r.value;
    if (r.metric == "closed_form_value") cf = r.value;
    if (r.metric == "binary_optimal") {
      EXPECT_EQ(r.value, 1.0);
    }
  }
  EXPECT_NEAR(dp, cf, 1e-4 * cf);
}

TEST(Rows, ThresholdRowsCarryAvailableEnergy) {
  const Dataset d = threshold_rows(PowerSetting{}, 0.1, 3);
  ASSERT_EQ(d.size(), 6u);
  EXPECT_EQ(d[0].metric, "threshold");
  EXPECT_EQ(d[1].metric, "available_energy");
  EXPECT_DOUBLE_EQ(d[1].value, 1.0);
}

}  // namespace
}  // namespace owet

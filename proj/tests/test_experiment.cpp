// Copyright 2026 The lagc-sim Authors. All Rights Reserved.
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
// =============================================================================

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lagc/error.hpp"
#include "lagc/experiment.hpp"

using namespace lagc;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"(
[dataset]
dimension = 6
rows_per_partition = 4
partitions = 4
seed = 3

[experiment]
workers = 4
redundancy = 2
epsilon = 1e-8
max_iters = 5000
seeds = 1
step_scale = 0.5

[timing]
law = exponential
eta = 0.05

[scheme:GD]
)";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lagc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("full-size preset file") {
  const auto spec = parse_spec(fs::path(LAGC_SOURCE_DIR) / "configs" / "full.ini");
  CHECK(spec.workers == 20);
  CHECK(spec.dataset.partitions == 20);
  CHECK(spec.dataset.dimension == 784);
  CHECK(spec.dataset.smoothness.empty());
  CHECK(spec.redundancy == 4);
  CHECK(spec.history == 10);
  CHECK(spec.xi == 1.0);
  CHECK(spec.epsilon == 1e-8);
  CHECK(spec.seeds.size() == 100);
  CHECK(spec.timing.law() == TimeLaw::Pareto);
  CHECK(spec.timing.beta() == 1.1);
  CHECK(spec.timing.mean(1) == doctest::Approx(0.05));
  REQUIRE(spec.schemes.size() == 6);
  const auto gc = resolve_scheme(spec, spec.schemes[1], 1.0);
  CHECK(gc.name() == "GC");
  CHECK(gc.needed == 17);
  const auto glag = resolve_scheme(spec, spec.schemes[4], 1.0);
  CHECK(glag.preset == Preset::GroupedLAG);
  CHECK(glag.group_size == 4);
}

TEST_CASE("spec errors") {
  auto with_scheme = [](const std::string& body) {
    return std::string(kTiny) + "\n[scheme:X]\n" + body;
  };
  CHECK_THROWS_AS(parse_spec_text(with_scheme("preset = LAGC\n")), ConfigError);
  CHECK_THROWS_AS(parse_spec_text(with_scheme("preset = G-GD\ngroup_size = 3\n")), ConfigError);
  try {
    parse_spec_text(with_scheme("preset = GC\nF = 1\n"));
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("F < M_G - r_G + 1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_spec_text(with_scheme("preset = GD\ncolour = red\n")), ConfigError);
  CHECK_THROWS_AS(parse_spec_text(std::string(kTiny) + "[extra]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_spec_text(std::string(kTiny) + "[scheme:GD]\n"), ConfigError);
  CHECK_THROWS_AS(parse_spec_text("[experiment]\nepsilon = 0\n[scheme:GD]\n"), ConfigError);
  CHECK_THROWS_AS(parse_spec_text("[timing]\nlaw = pareto\n[scheme:GD]\n"), ConfigError);

  const std::string twenty = R"(
[dataset]
dimension = 5
rows_per_partition = 2
partitions = 20
[experiment]
workers = 20
[scheme:X]
preset = LAGC
group_size = 7
)";
  try {
    parse_spec_text(twenty);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("not an integer divisor") != std::string::npos);
  }
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(parse_seed_list("7, 9") == std::vector<std::uint64_t>{7, 9});
  CHECK(parse_seed_list("5,") == std::vector<std::uint64_t>{5});
  CHECK_THROWS_AS(parse_seed_list("0"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("a,b"), ConfigError);
}

TEST_CASE("tiny run writes one trace that reaches epsilon") {
  const auto spec = parse_spec_text(kTiny);
  const fs::path out = fresh_dir("tiny");
  const auto result = run_experiment(spec, out);
  REQUIRE(fs::exists(out / "traces" / "GD_seed1.csv"));
  CHECK(std::distance(fs::directory_iterator(out / "traces"), fs::directory_iterator{}) == 1);
  std::ifstream in(out / "traces" / "GD_seed1.csv");
  const auto trace = read_trace_csv(in);
  CHECK(trace.final_gap() <= spec.epsilon);
  CHECK(fs::exists(out / "aggregate.csv"));
  CHECK(fs::exists(out / "complexity.csv"));
  CHECK(fs::exists(out / "summary.csv"));
  std::ifstream cx(out / "complexity.csv");
  CHECK(read_complexity_csv(cx).size() == 1);
  CHECK(result.schemes[0].summary.reached == 1);
  fs::remove_all(out);
}

TEST_CASE("table-only skips simulation") {
  const auto spec = parse_spec_text(kTiny);
  const fs::path out = fresh_dir("table");
  const auto result = run_experiment(spec, out, {1, true});
  CHECK(fs::exists(out / "complexity.csv"));
  CHECK_FALSE(fs::exists(out / "traces"));
  CHECK_FALSE(fs::exists(out / "aggregate.csv"));
  CHECK(result.schemes[0].traces.empty());
  fs::remove_all(out);
}

TEST_CASE("time grid aggregate") {
  auto spec = parse_spec_text(kTiny);
  spec.seeds = {1, 2};
  const auto result = run_experiment(spec, std::nullopt);
  const auto& traces = result.schemes[0].traces;
  const std::vector<double> grid{0.0};
  const auto rows0 = emit_time_grid_aggregate(traces, grid);
  CHECK(rows0[0].loss_gap == traces[0].initial_gap);
  CHECK(rows0[0].communication == 0.0);
  CHECK(rows0[0].computation == 0.0);

  // One seed: the aggregate is the trace itself.
  const std::span<const MetricsTrace> one(traces.data(), 1);
  for (const auto& r : traces[0].records) {
    const std::vector<double> g{r.cum_time};
    const auto row = emit_time_grid_aggregate(one, g)[0];
    CHECK(row.loss_gap == r.loss_gap);
    CHECK(row.communication == r.comm_cum);
  }
  // Past termination the terminal values are held.
  const std::vector<double> late{traces[0].total_time() * 10 + 1.0};
  CHECK(emit_time_grid_aggregate(one, late)[0].loss_gap == traces[0].final_gap());

  // Load per iteration does not depend on the timing seed.
  for (int k = 0; k < std::min(traces[0].iterations(), traces[1].iterations()); ++k)
    CHECK(traces[0].records[k].comm_cum == traces[1].records[k].comm_cum);

  CHECK_THROWS_AS(emit_time_grid_aggregate(traces, std::vector<double>{}), Error);
}

TEST_CASE("outputs are reproducible and independent of the job count") {
  auto spec = parse_spec(fs::path(LAGC_SOURCE_DIR) / "configs" / "desk.ini");
  spec.seeds = {1, 2, 3};
  const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
  run_experiment(spec, a, {1, false});
  run_experiment(spec, b, {3, false});
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = b / fs::relative(entry.path(), a);
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("failed runs leave no partial output") {
  auto spec = parse_spec_text(kTiny);
  spec.step_scale = 3.0;
  const fs::path out = fresh_dir("fail");
  CHECK_THROWS_AS(run_experiment(spec, out), DivergenceError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("order statistic oracle") {
  const auto rows = order_stat_oracle(TimingModel::exponential(1.0), 1, 3, 200000, 2);
  CHECK(rows.size() == 6);
  for (const auto& r : rows) CHECK(r.rel_error < 0.02);
}

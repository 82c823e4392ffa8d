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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagc/analysis.hpp"
#include "lagc/dataset.hpp"
#include "lagc/engine.hpp"
#include "lagc/timing.hpp"

namespace lagc {

struct SchemeEntry {
  std::string label;
  Preset preset = Preset::Custom;
  std::optional<int> group_size;
  std::optional<int> needed;
  std::optional<int> redundancy;
  std::optional<double> xi;
  std::optional<int> history;
  std::optional<double> step_scale;
  std::uint64_t code_seed = 1;
};

struct ExperimentSpec {
  DatasetSpec dataset;
  int workers = 20;
  int redundancy = 4;
  int history = 10;
  double xi = 1.0;
  double step_scale = 1.0;  // α = step_scale / L
  double epsilon = 1e-8;
  int max_iterations = 100000;
  std::vector<std::uint64_t> seeds{1};
  int grid_points = 201;
  TimingModel timing = TimingModel::exponential(0.05);
  std::vector<SchemeEntry> schemes;
};

// "N" means seeds 1..N; a comma list names the seeds.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

ExperimentSpec parse_spec(const std::filesystem::path& file);
ExperimentSpec parse_spec_text(const std::string& text);

// Concrete configuration for a dataset whose global smoothness is L.
SchemeConfig resolve_scheme(const ExperimentSpec& spec, const SchemeEntry& entry,
                            double smoothness);

// Throws ConfigError on the first violated invariant.
void validate_spec(const ExperimentSpec& spec);

struct SchemeSummary {
  std::string scheme;
  int runs = 0;
  int reached = 0;
  double mean_time = 0.0;          // mean termination time over seeds
  double mean_iterations = 0.0;
  double mean_communication = 0.0;
  double mean_computation = 0.0;
  double mean_duration = 0.0;      // Σ duration / Σ iterations
  double mean_selected = 0.0;      // Σ |I^i| / Σ iterations
};

SchemeSummary summarize(const std::string& scheme, std::span<const MetricsTrace> traces);

struct AggregateRow {
  double t = 0.0;
  double loss_gap = 0.0;
  double communication = 0.0;
  double computation = 0.0;
  double iterations = 0.0;
};

// Seed-averaged I(t), C(t), P(t), L(t) on `grid`; values past a trace's end are
// held at the terminal values.
std::vector<AggregateRow> emit_time_grid_aggregate(std::span<const MetricsTrace> traces,
                                                   std::span<const double> grid);

std::vector<double> uniform_grid(double t_max, int points);

struct SchemeResult {
  SchemeConfig config;
  ComplexityReport analysis;
  std::vector<MetricsTrace> traces;
  SchemeSummary summary;
};

struct ExperimentResult {
  AnalysisInput input;
  std::vector<SchemeResult> schemes;
};

struct RunOptions {
  int jobs = 1;
  bool table_only = false;
};

// Runs every (scheme, seed) pair and, when `out` is given, writes
// traces/<scheme>_seed<k>.csv, aggregate.csv, complexity.csv and summary.csv.
// Files written by a failed run are removed.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::optional<std::filesystem::path>& out,
                                const RunOptions& options = {});

void write_aggregate_csv(const ExperimentResult& result, int grid_points, std::ostream& out);
void write_summary_csv(const ExperimentResult& result, std::ostream& out);

struct OracleRow {
  int a = 0;
  int b = 0;
  double formula = 0.0;
  double monte_carlo = 0.0;
  double rel_error = 0.0;
};

// Monte Carlo check of the expected order statistics for all a <= b <= b_max.
std::vector<OracleRow> order_stat_oracle(const TimingModel& model, int r, int b_max,
                                         long long samples, std::uint64_t seed);

}  // namespace lagc

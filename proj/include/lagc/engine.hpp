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

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagc/coding.hpp"
#include "lagc/dataset.hpp"
#include "lagc/gradient.hpp"
#include "lagc/selection.hpp"
#include "lagc/timing.hpp"

namespace lagc {

enum class Preset { GD, GC, LAG, GroupedGD, LAGC, GroupedLAG, Custom };

std::string to_string(Preset preset);
// Accepts GD, GC, LAG, G-GD, LAGC, G-LAG, custom (case-insensitive).
Preset parse_preset(const std::string& name);

// Unified scheme parameters; the named schemes are presets over these.
struct SchemeConfig {
  Preset preset = Preset::Custom;
  std::string label;
  int workers = 1;     // M
  int group_size = 1;  // M_G
  int redundancy = 1;  // r
  int needed = 1;      // F, workers the PS waits for in each selected group
  double xi = 0.0;
  int history = 10;  // D
  double step_size = 1.0;
  TimingModel timing = TimingModel::exponential(0.05);
  std::uint64_t code_seed = 1;

  int groups() const { return workers / group_size; }
  int group_redundancy() const { return std::min(redundancy, group_size); }
  int min_needed() const { return group_size - group_redundancy() + 1; }
  bool lazy() const { return xi > 0.0; }
  std::string name() const { return label.empty() ? to_string(preset) : label; }
  LazyRule lazy_rule() const { return {xi, step_size, workers, history, group_size}; }

  // Throws ConfigError naming the violated invariant.
  void validate() const;
};

struct PresetOptions {
  int workers = 20;
  int redundancy = 4;
  int group_size = 0;  // required for G-GD, G-LAG and LAGC
  int needed = 0;      // 0 picks the smallest decodable F
  double xi = 1.0;
  int history = 10;
  double step_size = 1.0;
  TimingModel timing = TimingModel::exponential(0.05);
};

// GD: M_G=1, r=1, ξ=0, F=1.      GC: M_G=M, ξ=0.
// LAG: M_G=1, r=1, F=1, ξ>0.     G-GD: ξ=0.
// G-LAG: M_G<=r, F=1, ξ>0.       LAGC: ξ>0.
SchemeConfig make_preset(Preset preset, const PresetOptions& options);

// Immutable per-scheme data shared by every run of that scheme: storage
// assignment, intra-group code, batch layout and group smoothness constants.
// Batch b (global index g·M_G + j) covers S/M consecutive partitions.
class PreparedScheme {
 public:
  PreparedScheme(const Dataset& data, SchemeConfig config);

  const Dataset& data() const { return *data_; }
  const SchemeConfig& config() const { return config_; }
  const Assignment& assignment() const { return assignment_; }
  const EncodingMatrix& code() const { return code_; }
  std::span<const int> batch_partitions(int group, int batch) const;
  std::vector<int> group_partitions(int group) const;
  // L_g = Σ L_s over the group's partitions.
  std::span<const double> group_smoothness() const { return group_smoothness_; }

 private:
  const Dataset* data_;
  SchemeConfig config_;
  Assignment assignment_;
  EncodingMatrix code_;
  std::vector<std::vector<int>> batches_;
  std::vector<double> group_smoothness_;
};

struct IterationRecord {
  int iteration = 0;
  double duration = 0.0;  // slowest F-th completion over selected groups
  int downloads = 0;      // |M_D| = |I|·M_G
  int uploads = 0;        // |M_U| = |I|·F
  double computation = 0.0;  // (r_G / M)·|M_D|
  double loss_gap = 0.0;     // after the update
  std::vector<int> selected;
  double cum_time = 0.0;
  long long comm_cum = 0;
  double comp_cum = 0.0;
};

enum class TraceStatus { ReachedTarget, MaxIterations };

struct MetricsTrace {
  std::string scheme;
  std::uint64_t seed = 0;
  double initial_gap = 0.0;
  TraceStatus status = TraceStatus::MaxIterations;
  bool step_size_warning = false;  // α >= 1/L
  std::vector<IterationRecord> records;

  int iterations() const { return static_cast<int>(records.size()); }
  double total_time() const { return records.empty() ? 0.0 : records.back().cum_time; }
  long long total_communication() const {
    return records.empty() ? 0 : records.back().comm_cum;
  }
  double total_computation() const { return records.empty() ? 0.0 : records.back().comp_cum; }
  double final_gap() const { return records.empty() ? initial_gap : records.back().loss_gap; }

  // Fills the cumulative columns of `r` from the previous record and appends.
  void append(IterationRecord r);
};

struct StopRule {
  double epsilon = 1e-8;
  int max_iterations = 100000;
};

// ĝ = Σ_{g∈I} g_g(θ^i) + Σ_{g∉I} g_g(θ_g^{i−1}). `fresh[k]` belongs to
// `selected[k]`; every unselected group needs a cached gradient.
Vector estimate_gradient(const LazyState& state, std::span<const int> selected,
                         std::span<const Vector> fresh);

// One synchronous PS run: selection, download, sampled computing times, the
// fastest F uploads per group, decoding, gradient estimate and update.
class Simulation {
 public:
  Simulation(const PreparedScheme& scheme, std::uint64_t timing_seed);
  Simulation(const PreparedScheme& scheme, std::uint64_t timing_seed, ParamVector initial);

  IterationRecord step();

  int iteration() const { return iteration_; }
  const ParamVector& theta() const { return theta_; }
  // Estimate used by the latest step (empty before the first step).
  const Vector& last_estimate() const { return estimate_; }
  const LazyState& lazy_state() const { return state_; }
  double gap() const { return gap_; }

 private:
  const PreparedScheme* scheme_;
  Rng rng_;
  ParamVector theta_;
  LazyState state_;
  Vector estimate_;
  double gap_;
  int iteration_ = 0;
};

// Runs until the gap reaches stop.epsilon or stop.max_iterations steps.
// Throws DivergenceError when the gap exceeds 10^6 times its initial value.
MetricsTrace run_until(const PreparedScheme& scheme, const StopRule& stop,
                       std::uint64_t timing_seed);

struct TraceValues {
  int iterations = 0;        // I(t)
  long long communication = 0;  // C(t)
  double computation = 0.0;     // P(t)
  double loss_gap = 0.0;        // L(t)
};

TraceValues trace_functions(const MetricsTrace& trace, double t);

// Columns: iter,duration,cum_time,md,mu,comm_cum,comp_cum,loss_gap. Row 0
// carries the initial gap.
void write_trace_csv(const MetricsTrace& trace, std::ostream& out);
MetricsTrace read_trace_csv(std::istream& in);

}  // namespace lagc

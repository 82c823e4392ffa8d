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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lagc/engine.hpp"

namespace lagc {

// Ī = κ ln(ΔL0/ε); divided by αL for lazy schemes.
double iteration_complexity(double kappa, double initial_gap, double epsilon, double alpha_l,
                            bool lazy);

// Expected number of units (workers or groups) selected per iteration under
// the lazy rule: count · Σ_d h(d)/(d+1), where h(d) is the fraction of
// constants whose square lies in [L̄²_{d+1}, L̄²_d) with
// L̄²_d = ξ/(D d α² count²), L̄_0 = ∞ and L̄_{D+1} = 0. ξ = 0 returns count.
double selection_bar(std::span<const double> constants, double xi, double step_size, int count,
                     int history);
// M̄ over per-worker constants, Ḡ over per-group constants.
double m_bar(std::span<const double> worker_constants, double xi, double step_size, int workers,
             int history);
double g_bar(std::span<const double> group_constants, double xi, double step_size, int groups,
             int history);

// Expected duration of one iteration in which `selected` groups report,
// T̄^G_a(r_G). Fractional counts interpolate linearly.
double expected_iteration_time(const SchemeConfig& cfg, double selected);

struct AnalysisInput {
  double kappa = 1.0;
  double initial_gap = 1.0;
  double epsilon = 1e-8;
  double smoothness = 1.0;  // global L
};

AnalysisInput analysis_input(const Dataset& data, double epsilon);

struct ComplexityReport {
  std::string scheme;
  double iterations = 0.0;
  double time = 0.0;
  double communication = 0.0;
  double computation = 0.0;
  double selected = 0.0;  // Ḡ (or G for exact schemes)
  bool bound_iterations = false;
  bool bound_time = false;
  bool bound_communication = false;
  bool bound_computation = false;
};

double time_complexity(const SchemeConfig& cfg, double iterations, double selected);
double communication_complexity(const SchemeConfig& cfg, double iterations, double selected);
double computation_complexity(const SchemeConfig& cfg, double iterations, double selected);

ComplexityReport analyze_scheme(const SchemeConfig& cfg, std::span<const double> group_constants,
                                const AnalysisInput& input);
ComplexityReport analyze_scheme(const PreparedScheme& scheme, double epsilon);

void write_complexity_csv(std::span<const ComplexityReport> reports, std::ostream& out);
std::vector<ComplexityReport> read_complexity_csv(std::istream& in);

}  // namespace lagc

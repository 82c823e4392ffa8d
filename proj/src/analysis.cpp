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

#include "lagc/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lagc/error.hpp"

namespace lagc {

double iteration_complexity(double kappa, double initial_gap, double epsilon, double alpha_l,
                            bool lazy) {
  if (!(epsilon > 0.0) || !(initial_gap > 0.0)) {
    throw DomainError("iteration complexity needs positive epsilon and initial gap");
  }
  if (epsilon > initial_gap) throw DomainError("iteration complexity needs epsilon <= initial gap");
  if (!(kappa >= 1.0)) throw DomainError("condition number must be >= 1");
  const double base = kappa * std::log(initial_gap / epsilon);
  if (!lazy) return base;
  if (!(alpha_l > 0.0 && alpha_l <= 1.0)) throw DomainError("need 0 < alpha*L <= 1");
  return base / alpha_l;
}

double selection_bar(std::span<const double> constants, double xi, double step_size, int count,
                     int history) {
  if (count < 1 || history < 1) throw DomainError("selection_bar: count and D must be >= 1");
  if (xi == 0.0) return count;
  if (!(xi > 0.0) || !(step_size > 0.0)) throw DomainError("selection_bar: need xi, alpha > 0");
  if (constants.empty()) throw DomainError("selection_bar: no constants");
  const double base = xi / (history * step_size * step_size * double(count) * count);
  double sum = 0.0;
  for (double c : constants) {
    const double sq = c * c;
    // Bucket d: L̄²_{d+1} <= sq < L̄²_d, with L̄²_d = base/d decreasing in d.
    int d = 0;
    while (d < history && sq < base / (d + 1)) ++d;
    sum += 1.0 / (d + 1);
  }
  return count * sum / static_cast<double>(constants.size());
}

double m_bar(std::span<const double> worker_constants, double xi, double step_size, int workers,
             int history) {
  return selection_bar(worker_constants, xi, step_size, workers, history);
}

double g_bar(std::span<const double> group_constants, double xi, double step_size, int groups,
             int history) {
  return selection_bar(group_constants, xi, step_size, groups, history);
}

double expected_iteration_time(const SchemeConfig& cfg, double selected) {
  const int r = cfg.group_redundancy();
  double t;
  if (cfg.group_size == 1) {
    t = expected_max_time(cfg.timing, selected, r);
  } else if (selected == 1.0) {
    t = expected_order_stat(cfg.timing, cfg.needed, cfg.group_size, r);
  } else {
    t = expected_max_group_time(cfg.timing, r, cfg.group_size, cfg.needed, selected);
  }
  if (!std::isfinite(t)) throw DomainError(cfg.name() + ": expected iteration time is not finite");
  return t;
}

double time_complexity(const SchemeConfig& cfg, double iterations, double selected) {
  return iterations * expected_iteration_time(cfg, selected);
}

double communication_complexity(const SchemeConfig& cfg, double iterations, double selected) {
  return (cfg.group_size + cfg.needed) * selected * iterations;
}

double computation_complexity(const SchemeConfig& cfg, double iterations, double selected) {
  return static_cast<double>(cfg.group_redundancy()) * cfg.group_size * selected / cfg.workers *
         iterations;
}

AnalysisInput analysis_input(const Dataset& data, double epsilon) {
  AnalysisInput in;
  in.kappa = data.condition_number();
  in.initial_gap = optimality_gap(data, Vector::Zero(data.dimension()));
  in.epsilon = epsilon;
  in.smoothness = data.smoothness;
  return in;
}

ComplexityReport analyze_scheme(const SchemeConfig& cfg, std::span<const double> group_constants,
                                const AnalysisInput& input) {
  cfg.validate();
  if (static_cast<int>(group_constants.size()) != cfg.groups()) {
    throw DimensionError(cfg.name() + ": expected one smoothness constant per group");
  }
  ComplexityReport rep;
  rep.scheme = cfg.name();
  const bool lazy = cfg.lazy();
  rep.iterations = iteration_complexity(input.kappa, input.initial_gap, input.epsilon,
                                        cfg.step_size * input.smoothness, lazy);
  rep.selected = lazy ? g_bar(group_constants, cfg.xi, cfg.step_size, cfg.groups(), cfg.history)
                      : static_cast<double>(cfg.groups());
  rep.time = time_complexity(cfg, rep.iterations, rep.selected);
  rep.communication = communication_complexity(cfg, rep.iterations, rep.selected);
  rep.computation = computation_complexity(cfg, rep.iterations, rep.selected);
  rep.bound_iterations = rep.bound_time = rep.bound_communication = rep.bound_computation = lazy;
  return rep;
}

ComplexityReport analyze_scheme(const PreparedScheme& scheme, double epsilon) {
  return analyze_scheme(scheme.config(), scheme.group_smoothness(),
                        analysis_input(scheme.data(), epsilon));
}

void write_complexity_csv(std::span<const ComplexityReport> reports, std::ostream& out) {
  out << "scheme,I,T,C,P,is_bound_T,is_bound_C,is_bound_P\n";
  out << std::setprecision(17);
  for (const auto& r : reports) {
    out << r.scheme << ',' << r.iterations << ',' << r.time << ',' << r.communication << ','
        << r.computation << ',' << int(r.bound_time) << ',' << int(r.bound_communication) << ','
        << int(r.bound_computation) << '\n';
  }
}

std::vector<ComplexityReport> read_complexity_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "scheme,I,T,C,P,is_bound_T,is_bound_C,is_bound_P") {
    throw Error("complexity csv: unexpected header");
  }
  std::vector<ComplexityReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> c;
    std::string cell;
    while (std::getline(row, cell, ',')) c.push_back(cell);
    if (c.size() != 8) throw Error("complexity csv: expected 8 columns in '" + line + "'");
    ComplexityReport r;
    r.scheme = c[0];
    r.iterations = std::stod(c[1]);
    r.time = std::stod(c[2]);
    r.communication = std::stod(c[3]);
    r.computation = std::stod(c[4]);
    r.bound_time = c[5] == "1";
    r.bound_communication = c[6] == "1";
    r.bound_computation = c[7] == "1";
    r.bound_iterations = r.bound_time;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lagc

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

#include <random>
#include <string>
#include <vector>

namespace lagc {

using Rng = std::mt19937_64;

enum class TimeLaw { Exponential, Pareto };

std::string to_string(TimeLaw law);

// Computing-time law of one worker. A worker storing r batches has mean
// completion time η·r under both laws; the Pareto law uses scale
// η·r·(β−1)/β and shape β.
class TimingModel {
 public:
  static TimingModel exponential(double eta);
  static TimingModel pareto(double eta, double beta);

  TimeLaw law() const { return law_; }
  double eta() const { return eta_; }
  double beta() const { return beta_; }

  double mean(int r) const { return eta_ * r; }
  double pareto_scale(int r) const;

  double cdf(int r, double x) const;
  double survival(int r, double x) const;
  double sample(int r, Rng& rng) const;

 private:
  TimingModel(TimeLaw law, double eta, double beta);

  TimeLaw law_;
  double eta_;
  double beta_;
};

std::vector<double> sample_times(const TimingModel& model, int r, int count, Rng& rng);

// H_k = Σ_{i<=k} 1/i, H_0 = 0.
double harmonic(int k);

// E[T_{a:b}], the a-th smallest of b i.i.d. computing times.
double expected_order_stat_exponential(int a, int b, double eta, int r);
double expected_order_stat_pareto(int a, int b, double eta, int r, double beta);
double expected_order_stat(const TimingModel& model, int a, int b, int r);

// E[max of a i.i.d. times], i.e. T̄_{a:a}. Non-integer a interpolates
// linearly between ⌊a⌋ and ⌈a⌉ with T̄_0 = 0.
double expected_max_time(const TimingModel& model, double a, int r);

// P(F-th fastest of M_G i.i.d. times <= x).
double group_time_cdf(const TimingModel& model, int r, int group_size, int needed, double x);

// E[max of a i.i.d. group completion times] = ∫ 1 − F^G(x)^a dx, evaluated by
// adaptive Simpson quadrature after mapping x onto the base survival
// probability. Non-integer a interpolates as in expected_max_time.
double expected_max_group_time(const TimingModel& model, int r, int group_size, int needed,
                               double a);

}  // namespace lagc

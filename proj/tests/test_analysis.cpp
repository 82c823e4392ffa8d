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

#include <cmath>
#include <random>
#include <sstream>

#include "lagc/analysis.hpp"
#include "lagc/error.hpp"
#include "oracles.hpp"

using namespace lagc;

namespace {

SchemeConfig make(Preset p, int M, int r, int group, TimingModel timing, double xi = 0.0,
                  double alpha = 1.0) {
  PresetOptions o;
  o.workers = M;
  o.redundancy = r;
  o.group_size = group;
  o.xi = xi;
  o.step_size = alpha;
  o.timing = timing;
  return make_preset(p, o);
}

}  // namespace

TEST_CASE("iteration complexity") {
  CHECK(iteration_complexity(10.0, std::exp(10.0), 1.0, 0.5, false) == doctest::Approx(100.0));
  CHECK(iteration_complexity(3.0, 5.0, 5.0, 0.5, false) == 0.0);
  const double exact = iteration_complexity(4.0, 100.0, 1e-3, 0.5, false);
  CHECK(iteration_complexity(4.0, 100.0, 1e-3, 0.5, true) == doctest::Approx(2.0 * exact));
  CHECK_THROWS_AS(iteration_complexity(4.0, 1.0, 2.0, 0.5, false), DomainError);
  CHECK_THROWS_AS(iteration_complexity(0.5, 2.0, 1.0, 0.5, false), DomainError);
  CHECK_THROWS_AS(iteration_complexity(2.0, 2.0, 1.0, 1.5, true), DomainError);
}

TEST_CASE("selection frequency buckets") {
  const std::vector<double> huge(20, 1e9), tiny(20, 1e-9);
  CHECK(m_bar(huge, 1.0, 1.0, 20, 10) == doctest::Approx(20.0));
  CHECK(m_bar(tiny, 1.0, 1.0, 20, 10) == doctest::Approx(20.0 / 11.0));
  CHECK(m_bar(tiny, 0.0, 1.0, 20, 10) == 20.0);

  // Independent bucket evaluation: the largest d with L² < ξ/(D d α² M²), capped at D.
  const auto L = geometric_smoothness_law(20);
  double total = 0.0;
  for (double l : L) total += l;
  const double alpha = 1.0 / total;
  const double xi = 1.0;
  const int M = 20, D = 10;
  double sum = 0.0;
  for (double l : L) {
    int bucket = 0;
    for (int d = 1; d <= D; ++d)
      if (l * l < xi / (D * d * alpha * alpha * M * M)) bucket = d;
    sum += 1.0 / (bucket + 1);
  }
  const double mb = m_bar(L, xi, alpha, M, D);
  CHECK(mb == doctest::Approx(sum));
  CHECK(mb <= M);
  CHECK(mb >= M / (D + 1.0));

  // A constant exactly on a threshold goes to the lower bucket.
  const double on = std::sqrt(1.0 / (2.0 * 2.0));  // L̄²_2 with ξ = α = M = 1, D = 2
  CHECK(m_bar(std::vector<double>{on}, 1.0, 1.0, 1, 2) == doctest::Approx(0.5));
}

TEST_CASE("time complexity") {
  const auto e = TimingModel::exponential(0.05);
  const auto gd1 = make(Preset::GD, 1, 1, 0, e);
  CHECK(time_complexity(gd1, 100.0, 1.0) == doctest::Approx(100.0 * 0.05));

  const auto gc = make(Preset::GC, 3, 2, 0, e);
  CHECK(time_complexity(gc, 10.0, 1.0) == doctest::Approx(10.0 * 2 * 0.05 * (5.0 / 6.0)));
  const auto mc = oracle::mc_order_stats(e, 2, 3, 1000000, 5);
  CHECK(oracle::rel_diff(expected_iteration_time(gc, 1.0), mc[1]) < 0.01);

  const auto p = TimingModel::pareto(0.05, 1.1);
  const auto gc_p = make(Preset::GC, 20, 4, 0, p);
  const auto ggd_p = make(Preset::GroupedGD, 20, 4, 4, p);
  CHECK(gc_p.needed == 17);
  CHECK(time_complexity(ggd_p, 1.0, 5.0) < time_complexity(gc_p, 1.0, 1.0));

  const auto gd = make(Preset::GD, 20, 1, 0, e);
  CHECK(expected_iteration_time(gd, 20.0) ==
        doctest::Approx(0.05 * oracle::harmonic_gap(20, 20)));
}

TEST_CASE("communication and computation complexity") {
  const auto e = TimingModel::exponential(0.05);
  CHECK(communication_complexity(make(Preset::GD, 20, 1, 0, e), 100.0, 20.0) ==
        doctest::Approx(4000.0));
  const auto gc = make(Preset::GC, 20, 4, 0, e);
  CHECK(communication_complexity(gc, 1.0, 1.0) == doctest::Approx(37.0));
  CHECK(communication_complexity(make(Preset::GD, 20, 1, 0, e), 1.0, 20.0) /
            communication_complexity(gc, 1.0, 1.0) ==
        doctest::Approx(2.0 / (1.0 + 17.0 / 20.0)));
  CHECK(communication_complexity(make(Preset::GroupedGD, 20, 4, 4, e), 1.0, 5.0) ==
        doctest::Approx(25.0));

  CHECK(computation_complexity(make(Preset::GD, 20, 1, 0, e), 7.0, 20.0) == doctest::Approx(7.0));
  CHECK(computation_complexity(gc, 7.0, 1.0) == doctest::Approx(28.0));
  const auto lagc = make(Preset::LAGC, 20, 4, 4, e, 1.0);
  CHECK(computation_complexity(lagc, 7.0, 2.5) == doctest::Approx(14.0));
  CHECK(communication_complexity(lagc, 1.0, 2.5) == doctest::Approx((4 + 1) * 2.5));
  const auto lag = make(Preset::LAG, 20, 4, 0, e, 1.0);
  CHECK(computation_complexity(lag, 10.0, 8.0) == doctest::Approx(8.0 / 20.0 * 10.0));
  CHECK(communication_complexity(lag, 10.0, 8.0) == doctest::Approx(160.0));
}

TEST_CASE("reports flag bounds for lazy schemes only") {
  const auto e = TimingModel::exponential(0.05);
  const AnalysisInput in{5.0, 100.0, 1e-6, 10.0};
  const std::vector<double> five(5, 2.0);
  const auto exact = analyze_scheme(make(Preset::GroupedGD, 20, 4, 4, e, 0.0, 0.1), five, in);
  CHECK_FALSE(exact.bound_time);
  CHECK(exact.iterations == doctest::Approx(5.0 * std::log(1e8)));
  CHECK(exact.selected == 5.0);
  const auto lazy = analyze_scheme(make(Preset::LAGC, 20, 4, 4, e, 1.0, 0.05), five, in);
  CHECK(lazy.bound_time);
  CHECK(lazy.bound_communication);
  CHECK(lazy.bound_computation);
  CHECK(lazy.iterations == doctest::Approx(exact.iterations / 0.5));
  CHECK(lazy.time > 0.0);
  CHECK_THROWS_AS(analyze_scheme(make(Preset::GD, 20, 1, 0, e), five, in), DimensionError);

  std::stringstream ss;
  const std::vector<ComplexityReport> rows{exact, lazy};
  write_complexity_csv(rows, ss);
  const auto back = read_complexity_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].scheme == "LAGC");
  CHECK(back[1].bound_time);
  CHECK(back[0].communication == exact.communication);
}

TEST_CASE("lazy bounds hold for random configurations") {
  std::mt19937_64 rng(2718);
  const std::vector<std::pair<int, int>> layouts{{4, 1}, {4, 2}, {6, 2}, {6, 3}, {8, 2},
                                                 {8, 4}, {12, 3}, {12, 4}, {12, 6}};
  std::uniform_int_distribution<std::size_t> pick(0, layouts.size() - 1);
  std::uniform_real_distribution<double> xi_d(0.1, 2.0);
  std::uniform_int_distribution<int> hist_d(1, 10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [M, group] = layouts[pick(rng)];
    std::uniform_int_distribution<int> r_d(1, M);
    const int r = std::max(r_d(rng), 1);
    const TimingModel timing =
        trial % 2 ? TimingModel::exponential(0.05) : TimingModel::pareto(0.05, 2.5);
    const Dataset data =
        generate_dataset(8, 6, M, geometric_smoothness_law(M), 1000 + trial);
    PresetOptions o;
    o.workers = M;
    o.redundancy = r;
    o.group_size = group;
    o.xi = xi_d(rng);
    o.history = hist_d(rng);
    o.step_size = 1.0 / data.smoothness;
    o.timing = timing;
    const Preset p = group == 1 ? Preset::LAG : Preset::LAGC;
    const PreparedScheme scheme(data, make_preset(p, o));
    const auto report = analyze_scheme(scheme, 1e-8);
    long double time = 0, comm = 0, comp = 0, selected = 0, iters = 0;
    const int seeds = 10;
    for (int s = 1; s <= seeds; ++s) {
      const auto t = run_until(scheme, {1e-8, 100000}, s);
      REQUIRE(t.status == TraceStatus::ReachedTarget);
      time += t.total_time();
      comm += t.total_communication();
      comp += t.total_computation();
      for (const auto& rec : t.records) selected += rec.selected.size();
      iters += t.iterations();
    }
    CAPTURE(trial);
    CHECK(double(time / seeds) <= 1.1 * report.time);
    CHECK(double(comm / seeds) <= report.communication);
    CHECK(double(comp / seeds) <= report.computation);
    CHECK(double(selected / iters) <= 1.1 * report.selected);
  }
}

TEST_CASE("empirical selection frequency stays under the bucket estimate") {
  const Dataset data = generate_dataset(30, 20, 20, geometric_smoothness_law(20), 4);
  PresetOptions o;
  o.workers = 20;
  o.redundancy = 1;
  o.xi = 1.0;
  o.history = 10;
  o.step_size = 1.0 / data.smoothness;
  const PreparedScheme lag(data, make_preset(Preset::LAG, o));
  const auto t = run_until(lag, {1e-8, 100000}, 1);
  long double uploads = 0;
  for (const auto& r : t.records) uploads += r.uploads;
  const double mean = double(uploads / t.iterations());
  const double bar = m_bar(data.partition_smoothness(), 1.0, o.step_size, 20, 10);
  CHECK(mean <= 1.1 * bar);
}

TEST_CASE("exact schemes: simulated iteration time matches the closed forms") {
  const Dataset data = generate_dataset(4, 3, 20, geometric_smoothness_law(20), 6);
  for (const auto& timing : {TimingModel::exponential(0.05), TimingModel::pareto(0.05, 2.5)}) {
    const double tol = timing.law() == TimeLaw::Exponential ? 0.02 : 0.05;
    for (const auto& cfg : {make(Preset::GD, 20, 4, 0, timing, 0.0, 0.5 / data.smoothness),
                            make(Preset::GC, 20, 4, 0, timing, 0.0, 0.5 / data.smoothness),
                            make(Preset::GroupedGD, 20, 4, 4, timing, 0.0,
                                 0.5 / data.smoothness)}) {
      const PreparedScheme s(data, cfg);
      Simulation sim(s, 8);
      long double sum = 0;
      const int n = 100000;
      for (int i = 0; i < n; ++i) sum += sim.step().duration;
      CAPTURE(cfg.name());
      CHECK(oracle::rel_diff(double(sum / n), expected_iteration_time(cfg, cfg.groups())) < tol);
    }
  }
}

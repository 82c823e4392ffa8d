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

// lagc_sim: experiment driver for the grouped / coded / lazy gradient schemes.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "lagc/analysis.hpp"
#include "lagc/error.hpp"
#include "lagc/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Common {
  std::string spec_file;
  std::string seeds;
};

lagc::ExperimentSpec load(const Common& c) {
  lagc::ExperimentSpec spec = lagc::parse_spec(c.spec_file);
  if (!c.seeds.empty()) spec.seeds = lagc::parse_seed_list(c.seeds);
  lagc::validate_spec(spec);
  return spec;
}

void print_table(const lagc::ExperimentResult& result) {
  std::cout << "kappa=" << result.input.kappa << " L=" << result.input.smoothness
            << " initial_gap=" << result.input.initial_gap << " eps=" << result.input.epsilon
            << '\n';
  lagc::write_complexity_csv(
      [&] {
        std::vector<lagc::ComplexityReport> r;
        for (const auto& s : result.schemes) r.push_back(s.analysis);
        return r;
      }(),
      std::cout);
}

void print_summary(const lagc::ExperimentResult& result) {
  std::cout << std::setprecision(6) << std::left << std::setw(10) << "scheme" << std::right << std::setw(9) << "reached"
            << std::setw(14) << "time" << std::setw(12) << "iters" << std::setw(14) << "comm"
            << std::setw(14) << "comp" << '\n';
  for (const auto& s : result.schemes) {
    const auto& m = s.summary;
    std::cout << std::left << std::setw(10) << m.scheme << std::right << std::setw(9)
              << (std::to_string(m.reached) + "/" + std::to_string(m.runs)) << std::setw(14) << m.mean_time
              << std::setw(12) << m.mean_iterations << std::setw(14) << m.mean_communication
              << std::setw(14) << m.mean_computation << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for grouped, coded and lazily aggregated gradient descent"};
  app.require_subcommand(1);

  Common common;
  std::string out_dir;
  int jobs = 1;
  bool table_only = false;

  auto add_spec = [&](CLI::App* cmd) {
    cmd->add_option("--spec", common.spec_file, "Experiment file (INI)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seeds", common.seeds, "Seed count N (1..N) or comma list");
  };

  auto* run = app.add_subcommand("run", "Simulate every scheme and seed, write CSV outputs");
  add_spec(run);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  run->add_flag("--table-only", table_only, "Only write the complexity table");

  auto* table = app.add_subcommand("table", "Print the closed-form complexity table");
  add_spec(table);
  table->add_option("--out", out_dir, "Also write complexity.csv here");

  auto* validate = app.add_subcommand("validate", "Check an experiment file");
  add_spec(validate);

  std::string law = "exponential";
  double eta = 0.05;
  double beta = 2.5;
  int redundancy = 1;
  int b_max = 10;
  long long samples = 1000000;
  std::uint64_t seed = 1;
  auto* oracle = app.add_subcommand("oracle", "Monte Carlo check of order-statistic means");
  oracle->add_option("--law", law)->check(CLI::IsMember({"exponential", "pareto"}));
  oracle->add_option("--eta", eta);
  oracle->add_option("--beta", beta);
  oracle->add_option("--r", redundancy)->check(CLI::PositiveNumber);
  oracle->add_option("--bmax", b_max)->check(CLI::PositiveNumber);
  oracle->add_option("--samples", samples)->check(CLI::PositiveNumber);
  oracle->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*validate) {
      const auto spec = load(common);
      std::cout << "ok: " << spec.schemes.size() << " schemes, " << spec.seeds.size()
                << " seeds\n";
    } else if (*table) {
      const auto spec = load(common);
      std::optional<std::filesystem::path> out;
      if (!out_dir.empty()) out = out_dir;
      print_table(lagc::run_experiment(spec, out, {1, true}));
    } else if (*run) {
      const auto spec = load(common);
      const auto result = lagc::run_experiment(spec, std::filesystem::path(out_dir),
                                               {jobs, table_only});
      print_table(result);
      if (!table_only) print_summary(result);
    } else if (*oracle) {
      const auto model = law == "pareto" ? lagc::TimingModel::pareto(eta, beta)
                                         : lagc::TimingModel::exponential(eta);
      std::cout << "a,b,formula,monte_carlo,rel_error\n" << std::setprecision(10);
      double worst = 0.0;
      for (const auto& row : lagc::order_stat_oracle(model, redundancy, b_max, samples, seed)) {
        std::cout << row.a << ',' << row.b << ',' << row.formula << ',' << row.monte_carlo << ','
                  << row.rel_error << '\n';
        worst = std::max(worst, row.rel_error);
      }
      std::cerr << "max relative error " << worst << '\n';
    }
  } catch (const lagc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

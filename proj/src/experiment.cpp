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

#include "lagc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "config_io.hpp"
#include "lagc/error.hpp"

namespace lagc {

namespace {

using detail::parse_double;
using detail::parse_int;
using detail::parse_u64;

void parse_experiment_section(const detail::IniSection& sec, ExperimentSpec& spec) {
  for (const auto& [key, value] : sec.entries) {
    if (key == "workers") {
      spec.workers = parse_int(key, value);
    } else if (key == "redundancy") {
      spec.redundancy = parse_int(key, value);
    } else if (key == "history") {
      spec.history = parse_int(key, value);
    } else if (key == "xi") {
      spec.xi = parse_double(key, value);
    } else if (key == "step_scale") {
      spec.step_scale = parse_double(key, value);
    } else if (key == "epsilon") {
      spec.epsilon = parse_double(key, value);
    } else if (key == "max_iters") {
      spec.max_iterations = parse_int(key, value);
    } else if (key == "seeds") {
      spec.seeds = parse_seed_list(value);
    } else if (key == "grid_points") {
      spec.grid_points = parse_int(key, value);
    } else {
      throw ConfigError("unknown experiment key '" + key + "'");
    }
  }
}

TimingModel parse_timing_section(const detail::IniSection& sec) {
  std::string law = "exponential";
  double eta = 0.05;
  double beta = 0.0;
  bool has_beta = false;
  for (const auto& [key, value] : sec.entries) {
    if (key == "law") {
      law = value;
    } else if (key == "eta") {
      eta = parse_double(key, value);
    } else if (key == "beta") {
      beta = parse_double(key, value);
      has_beta = true;
    } else {
      throw ConfigError("unknown timing key '" + key + "'");
    }
  }
  if (law == "exponential") {
    if (has_beta) throw ConfigError("timing: beta is only meaningful for the pareto law");
    return TimingModel::exponential(eta);
  }
  if (law == "pareto") {
    if (!has_beta) throw ConfigError("timing: pareto law requires beta");
    return TimingModel::pareto(eta, beta);
  }
  throw ConfigError("timing: unknown law '" + law + "' (expected exponential or pareto)");
}

SchemeEntry parse_scheme_section(const detail::IniSection& sec) {
  SchemeEntry e;
  e.label = sec.name.substr(sec.name.find(':') + 1);
  if (e.label.empty()) throw ConfigError("scheme section needs a name: [scheme:NAME]");
  for (char c : e.label) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      throw ConfigError("scheme name '" + e.label + "' may only use letters, digits, - _ .");
    }
  }
  bool has_preset = false;
  for (const auto& [key, value] : sec.entries) {
    if (key == "preset") {
      e.preset = parse_preset(value);
      has_preset = true;
    } else if (key == "group_size") {
      e.group_size = parse_int(key, value);
    } else if (key == "F") {
      e.needed = parse_int(key, value);
    } else if (key == "redundancy") {
      e.redundancy = parse_int(key, value);
    } else if (key == "xi") {
      e.xi = parse_double(key, value);
    } else if (key == "history") {
      e.history = parse_int(key, value);
    } else if (key == "step_scale") {
      e.step_scale = parse_double(key, value);
    } else if (key == "code_seed") {
      e.code_seed = parse_u64(key, value);
    } else {
      throw ConfigError("scheme " + e.label + ": unknown key '" + key + "'");
    }
  }
  if (!has_preset) {
    // The section name doubles as the preset when it is one.
    try {
      e.preset = parse_preset(e.label);
    } catch (const ConfigError&) {
      throw ConfigError("scheme " + e.label + ": missing preset");
    }
  }
  return e;
}

ExperimentSpec parse_sections(const std::vector<detail::IniSection>& sections) {
  ExperimentSpec spec;
  std::set<std::string> labels;
  for (const auto& sec : sections) {
    if (sec.name.empty()) {
      throw ConfigError("keys outside a section are not allowed");
    } else if (sec.name == "dataset") {
      spec.dataset = parse_dataset_spec(sec.as_map());
    } else if (sec.name == "experiment") {
      parse_experiment_section(sec, spec);
    } else if (sec.name == "timing") {
      spec.timing = parse_timing_section(sec);
    } else if (sec.name.rfind("scheme:", 0) == 0) {
      SchemeEntry e = parse_scheme_section(sec);
      if (!labels.insert(e.label).second) throw ConfigError("duplicate scheme " + e.label);
      spec.schemes.push_back(std::move(e));
    } else {
      throw ConfigError("unknown section [" + sec.name + "]");
    }
  }
  validate_spec(spec);
  return spec;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  const std::string t = detail::trim(text);
  std::vector<std::uint64_t> seeds;
  if (t.find(',') == std::string::npos) {
    const int n = parse_int("seeds", t);
    if (n < 1) throw ConfigError("seeds: count must be >= 1");
    for (int i = 1; i <= n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    return seeds;
  }
  for (const auto& item : detail::split_list(t)) {
    if (item.empty()) continue;
    seeds.push_back(parse_u64("seeds", item));
  }
  if (seeds.empty()) throw ConfigError("seeds: empty list");
  return seeds;
}

ExperimentSpec parse_spec(const std::filesystem::path& file) {
  return parse_sections(detail::read_ini(file));
}

ExperimentSpec parse_spec_text(const std::string& text) {
  std::istringstream in(text);
  return parse_sections(detail::read_ini(in, "<text>"));
}

SchemeConfig resolve_scheme(const ExperimentSpec& spec, const SchemeEntry& e, double smoothness) {
  PresetOptions o;
  o.workers = spec.workers;
  o.redundancy = e.redundancy.value_or(spec.redundancy);
  o.group_size = e.group_size.value_or(0);
  o.needed = e.needed.value_or(0);
  o.xi = e.xi.value_or(spec.xi);
  o.history = e.history.value_or(spec.history);
  o.step_size = e.step_scale.value_or(spec.step_scale) / smoothness;
  o.timing = spec.timing;
  SchemeConfig c;
  try {
    c = make_preset(e.preset, o);
  } catch (const ConfigError& err) {
    throw ConfigError("scheme " + e.label + ": " + err.what());
  }
  c.label = e.label;
  c.code_seed = e.code_seed;
  return c;
}

void validate_spec(const ExperimentSpec& spec) {
  if (!(spec.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (spec.seeds.empty()) throw ConfigError("at least one seed is required");
  if (spec.max_iterations < 1) throw ConfigError("max_iters must be >= 1");
  if (spec.grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (!(spec.step_scale > 0.0)) throw ConfigError("step_scale must be positive");
  if (spec.schemes.empty()) throw ConfigError("no [scheme:NAME] sections");
  if (spec.dataset.partitions % spec.workers != 0) {
    throw ConfigError("dataset partitions (" + std::to_string(spec.dataset.partitions) +
                      ") must be a multiple of M = " + std::to_string(spec.workers));
  }
  for (const auto& e : spec.schemes) resolve_scheme(spec, e, 1.0);
}

SchemeSummary summarize(const std::string& scheme, std::span<const MetricsTrace> traces) {
  SchemeSummary s;
  s.scheme = scheme;
  s.runs = static_cast<int>(traces.size());
  long double iters = 0, time = 0, comm = 0, comp = 0, dur = 0, sel = 0;
  for (const auto& t : traces) {
    if (t.status == TraceStatus::ReachedTarget) ++s.reached;
    iters += t.iterations();
    time += t.total_time();
    comm += t.total_communication();
    comp += t.total_computation();
    for (const auto& r : t.records) {
      dur += r.duration;
      sel += static_cast<long double>(r.selected.size());
    }
  }
  if (s.runs > 0) {
    s.mean_time = static_cast<double>(time / s.runs);
    s.mean_iterations = static_cast<double>(iters / s.runs);
    s.mean_communication = static_cast<double>(comm / s.runs);
    s.mean_computation = static_cast<double>(comp / s.runs);
  }
  if (iters > 0) {
    s.mean_duration = static_cast<double>(dur / iters);
    s.mean_selected = static_cast<double>(sel / iters);
  }
  return s;
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (points < 1) throw Error("time grid: need at least one point");
  std::vector<double> grid(points, 0.0);
  for (int k = 1; k < points; ++k) grid[k] = t_max * k / (points - 1);
  return grid;
}

std::vector<AggregateRow> emit_time_grid_aggregate(std::span<const MetricsTrace> traces,
                                                   std::span<const double> grid) {
  if (grid.empty()) throw Error("time grid is empty");
  if (traces.empty()) throw Error("aggregate needs at least one trace");
  std::vector<AggregateRow> rows;
  rows.reserve(grid.size());
  const double n = static_cast<double>(traces.size());
  for (double t : grid) {
    AggregateRow row;
    row.t = t;
    long double gap = 0, comm = 0, comp = 0, it = 0;
    for (const auto& trace : traces) {
      // trace_functions already holds the terminal values past the last record.
      const TraceValues v = trace_functions(trace, t);
      gap += v.loss_gap;
      comm += v.communication;
      comp += v.computation;
      it += v.iterations;
    }
    row.loss_gap = static_cast<double>(gap / n);
    row.communication = static_cast<double>(comm / n);
    row.computation = static_cast<double>(comp / n);
    row.iterations = static_cast<double>(it / n);
    rows.push_back(row);
  }
  return rows;
}

void write_aggregate_csv(const ExperimentResult& result, int grid_points, std::ostream& out) {
  double t_max = 0.0;
  for (const auto& s : result.schemes)
    for (const auto& t : s.traces) t_max = std::max(t_max, t.total_time());
  const auto grid = uniform_grid(t_max, grid_points);
  out << "scheme,t,loss_gap,communication,computation,iterations,mean_termination_time\n";
  for (const auto& s : result.schemes) {
    const auto rows = emit_time_grid_aggregate(s.traces, grid);
    const std::string term = fmt(s.summary.mean_time);
    for (const auto& r : rows) {
      out << s.config.name() << ',' << fmt(r.t) << ',' << fmt(r.loss_gap) << ','
          << fmt(r.communication) << ',' << fmt(r.computation) << ',' << fmt(r.iterations) << ','
          << term << '\n';
    }
  }
}

void write_summary_csv(const ExperimentResult& result, std::ostream& out) {
  out << "scheme,runs,reached,mean_time,mean_iterations,mean_communication,mean_computation,"
         "mean_duration,mean_selected\n";
  for (const auto& s : result.schemes) {
    const auto& m = s.summary;
    out << m.scheme << ',' << m.runs << ',' << m.reached << ',' << fmt(m.mean_time) << ','
        << fmt(m.mean_iterations) << ',' << fmt(m.mean_communication) << ','
        << fmt(m.mean_computation) << ',' << fmt(m.mean_duration) << ','
        << fmt(m.mean_selected) << '\n';
  }
}

namespace {

class OutputGuard {
 public:
  explicit OutputGuard(std::filesystem::path root) : root_(std::move(root)) {}
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = created_.rbegin(); it != created_.rend(); ++it) std::filesystem::remove(*it, ec);
  }

  void dir(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) {
      std::filesystem::create_directories(p);
      created_.push_back(p);
    }
  }

  template <typename Fn>
  void file(const std::filesystem::path& p, Fn&& write) {
    created_.push_back(p);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    write(out);
    if (!out) throw Error("write failed for " + p.string());
  }

  void commit() { committed_ = true; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> created_;
  bool committed_ = false;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::optional<std::filesystem::path>& out,
                                const RunOptions& options) {
  validate_spec(spec);
  const Dataset data = generate_dataset(spec.dataset);

  ExperimentResult result;
  result.input = analysis_input(data, spec.epsilon);
  std::vector<PreparedScheme> prepared;
  prepared.reserve(spec.schemes.size());
  for (const auto& e : spec.schemes) {
    prepared.emplace_back(data, resolve_scheme(spec, e, data.smoothness));
    SchemeResult sr;
    sr.config = prepared.back().config();
    sr.analysis = analyze_scheme(sr.config, prepared.back().group_smoothness(), result.input);
    result.schemes.push_back(std::move(sr));
  }

  if (!options.table_only) {
    const std::size_t n_seeds = spec.seeds.size();
    const std::size_t tasks = prepared.size() * n_seeds;
    for (auto& s : result.schemes) s.traces.resize(n_seeds);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    StopRule stop{spec.epsilon, spec.max_iterations};
    auto worker = [&]() {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= tasks || failed.load()) return;
        const std::size_t s = k / n_seeds;
        const std::size_t j = k % n_seeds;
        try {
          result.schemes[s].traces[j] = run_until(prepared[s], stop, spec.seeds[j]);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    };
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks)));
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    for (auto& s : result.schemes) s.summary = summarize(s.config.name(), s.traces);
  }

  if (out) {
    OutputGuard guard(*out);
    guard.dir(*out);
    std::vector<ComplexityReport> reports;
    for (const auto& s : result.schemes) reports.push_back(s.analysis);
    guard.file(*out / "complexity.csv", [&](std::ostream& o) { write_complexity_csv(reports, o); });
    if (!options.table_only) {
      const auto traces_dir = *out / "traces";
      guard.dir(traces_dir);
      for (const auto& s : result.schemes) {
        for (const auto& t : s.traces) {
          const auto name = s.config.name() + "_seed" + std::to_string(t.seed) + ".csv";
          guard.file(traces_dir / name, [&](std::ostream& o) { write_trace_csv(t, o); });
        }
      }
      guard.file(*out / "aggregate.csv",
                 [&](std::ostream& o) { write_aggregate_csv(result, spec.grid_points, o); });
      guard.file(*out / "summary.csv", [&](std::ostream& o) { write_summary_csv(result, o); });
    }
    guard.commit();
  }
  return result;
}

std::vector<OracleRow> order_stat_oracle(const TimingModel& model, int r, int b_max,
                                         long long samples, std::uint64_t seed) {
  if (b_max < 1 || samples < 1) throw Error("oracle: need b_max >= 1 and samples >= 1");
  std::vector<OracleRow> rows;
  Rng rng(seed);
  std::vector<double> draw;
  for (int b = 1; b <= b_max; ++b) {
    std::vector<long double> sums(b, 0.0L);
    draw.resize(b);
    for (long long n = 0; n < samples; ++n) {
      for (auto& x : draw) x = model.sample(r, rng);
      std::sort(draw.begin(), draw.end());
      for (int a = 0; a < b; ++a) sums[a] += draw[a];
    }
    for (int a = 1; a <= b; ++a) {
      OracleRow row;
      row.a = a;
      row.b = b;
      row.formula = expected_order_stat(model, a, b, r);
      row.monte_carlo = static_cast<double>(sums[a - 1] / samples);
      row.rel_error = std::abs(row.monte_carlo - row.formula) / row.formula;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace lagc

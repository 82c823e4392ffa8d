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

#include "lagc/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lagc/error.hpp"

namespace lagc {

namespace {

constexpr double kDecodeTolerance = 1e-9;
constexpr double kDivergenceFactor = 1e6;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

EncodingMatrix make_code(const SchemeConfig& cfg) {
  return build_encoding_matrix(cfg.group_size, cfg.group_redundancy(), cfg.code_seed);
}

}  // namespace

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::GD: return "GD";
    case Preset::GC: return "GC";
    case Preset::LAG: return "LAG";
    case Preset::GroupedGD: return "G-GD";
    case Preset::LAGC: return "LAGC";
    case Preset::GroupedLAG: return "G-LAG";
    case Preset::Custom: return "custom";
  }
  return "custom";
}

Preset parse_preset(const std::string& name) {
  const std::string n = lower(name);
  if (n == "gd") return Preset::GD;
  if (n == "gc") return Preset::GC;
  if (n == "lag") return Preset::LAG;
  if (n == "g-gd" || n == "ggd") return Preset::GroupedGD;
  if (n == "lagc") return Preset::LAGC;
  if (n == "g-lag" || n == "glag") return Preset::GroupedLAG;
  if (n == "custom") return Preset::Custom;
  throw ConfigError("unknown scheme preset '" + name + "'");
}

void SchemeConfig::validate() const {
  const std::string who = name() + ": ";
  if (workers < 1) throw ConfigError(who + "M must be >= 1");
  if (group_size < 1 || workers % group_size != 0) {
    throw ConfigError(who + "M_G = " + std::to_string(group_size) +
                      " is not an integer divisor of M = " + std::to_string(workers));
  }
  if (redundancy < 1 || redundancy > workers) throw ConfigError(who + "need 1 <= r <= M");
  if (needed < min_needed()) {
    throw ConfigError(who + "F < M_G - r_G + 1 (F = " + std::to_string(needed) +
                      ", M_G - r_G + 1 = " + std::to_string(min_needed()) + ")");
  }
  if (needed > group_size) throw ConfigError(who + "F > M_G");
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ConfigError(who + "xi must be >= 0");
  if (history < 1) throw ConfigError(who + "D must be >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError(who + "step size must be positive");
  }
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(who + to_string(preset) + " preset requires " + what);
  };
  switch (preset) {
    case Preset::GD:
      require(group_size == 1 && redundancy == 1 && xi == 0.0 && needed == 1,
              "M_G = 1, r = 1, xi = 0, F = 1");
      break;
    case Preset::GC:
      require(group_size == workers && xi == 0.0, "M_G = M and xi = 0");
      break;
    case Preset::LAG:
      require(group_size == 1 && redundancy == 1 && needed == 1 && xi > 0.0,
              "M_G = 1, r = 1, F = 1 and xi > 0");
      break;
    case Preset::GroupedGD:
      require(xi == 0.0, "xi = 0");
      break;
    case Preset::GroupedLAG:
      require(group_size <= redundancy && needed == 1 && xi > 0.0,
              "M_G <= r, F = 1 and xi > 0");
      break;
    case Preset::LAGC:
      require(xi > 0.0, "xi > 0");
      break;
    case Preset::Custom:
      break;
  }
}

SchemeConfig make_preset(Preset preset, const PresetOptions& o) {
  SchemeConfig c;
  c.preset = preset;
  c.workers = o.workers;
  c.redundancy = o.redundancy;
  c.xi = o.xi;
  c.history = o.history;
  c.step_size = o.step_size;
  c.timing = o.timing;
  auto needs_group = [&]() {
    if (o.group_size < 1) {
      throw ConfigError(to_string(preset) + " preset requires a group size M_G");
    }
    return o.group_size;
  };
  switch (preset) {
    case Preset::GD:
      c.group_size = 1;
      c.redundancy = 1;
      c.xi = 0.0;
      break;
    case Preset::GC:
      c.group_size = o.workers;
      c.xi = 0.0;
      break;
    case Preset::LAG:
      c.group_size = 1;
      c.redundancy = 1;
      break;
    case Preset::GroupedGD:
      c.group_size = needs_group();
      c.xi = 0.0;
      break;
    case Preset::GroupedLAG:
    case Preset::LAGC:
    case Preset::Custom:
      c.group_size = needs_group();
      break;
  }
  c.needed = o.needed > 0 ? o.needed : c.min_needed();
  c.validate();
  return c;
}

PreparedScheme::PreparedScheme(const Dataset& data, SchemeConfig config)
    : data_(&data),
      config_((config.validate(), std::move(config))),
      assignment_(config_.workers, config_.group_size, config_.redundancy),
      code_(make_code(config_)) {
  const int M = config_.workers;
  if (data.size() % M != 0) {
    throw ConfigError("dataset has " + std::to_string(data.size()) +
                      " partitions, which is not a multiple of M = " + std::to_string(M));
  }
  const int per_batch = data.size() / M;
  batches_.resize(M);
  for (int b = 0; b < M; ++b) {
    for (int k = 0; k < per_batch; ++k) batches_[b].push_back(b * per_batch + k);
  }
  group_smoothness_.assign(config_.groups(), 0.0);
  for (int g = 0; g < config_.groups(); ++g) {
    for (int s : group_partitions(g)) group_smoothness_[g] += data.partitions[s].smoothness;
  }
}

std::span<const int> PreparedScheme::batch_partitions(int group, int batch) const {
  return batches_.at(group * config_.group_size + batch);
}

std::vector<int> PreparedScheme::group_partitions(int group) const {
  std::vector<int> out;
  for (int j = 0; j < config_.group_size; ++j) {
    auto b = batch_partitions(group, j);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

void MetricsTrace::append(IterationRecord r) {
  const IterationRecord* prev = records.empty() ? nullptr : &records.back();
  r.cum_time = (prev ? prev->cum_time : 0.0) + r.duration;
  r.comm_cum = (prev ? prev->comm_cum : 0) + r.downloads + r.uploads;
  r.comp_cum = (prev ? prev->comp_cum : 0.0) + r.computation;
  records.push_back(std::move(r));
}

Vector estimate_gradient(const LazyState& state, std::span<const int> selected,
                         std::span<const Vector> fresh) {
  if (selected.size() != fresh.size()) {
    throw Error("estimate_gradient: fresh gradients do not match the selected groups");
  }
  Vector g;
  std::size_t k = 0;
  for (int group = 0; group < state.groups(); ++group) {
    const bool is_fresh = k < selected.size() && selected[k] == group;
    const Vector& term = is_fresh ? fresh[k] : state.stale_gradient(group);
    if (is_fresh) ++k;
    if (g.size() == 0) {
      g = term;
    } else {
      g += term;
    }
  }
  if (k != selected.size()) throw Error("estimate_gradient: selected groups must be sorted");
  return g;
}

Simulation::Simulation(const PreparedScheme& scheme, std::uint64_t timing_seed)
    : Simulation(scheme, timing_seed, ParamVector::zeros(scheme.data().dimension())) {}

Simulation::Simulation(const PreparedScheme& scheme, std::uint64_t timing_seed,
                       ParamVector initial)
    : scheme_(&scheme),
      rng_(timing_seed),
      theta_(std::move(initial)),
      state_(scheme.config().groups(), scheme.config().history, theta_),
      gap_(optimality_gap(scheme.data(), theta_)) {
  if (theta_.size() != scheme.data().dimension()) {
    throw DimensionError("initial parameter has the wrong dimension");
  }
}

IterationRecord Simulation::step() {
  const SchemeConfig& cfg = scheme_->config();
  const Dataset& data = scheme_->data();
  const Assignment& assign = scheme_->assignment();
  const EncodingMatrix& code = scheme_->code();
  const int n = cfg.group_size;
  const int F = cfg.needed;
  const int r_eff = cfg.group_redundancy();

  IterationRecord rec;
  rec.iteration = ++iteration_;
  rec.selected = select_groups(state_, theta_, scheme_->group_smoothness(), cfg.lazy_rule());

  std::vector<Vector> fresh;
  fresh.reserve(rec.selected.size());
  std::vector<double> times(n);
  std::vector<int> order(n);
  for (int g : rec.selected) {
    std::vector<Vector> batch_grads;
    batch_grads.reserve(n);
    for (int j = 0; j < n; ++j) {
      batch_grads.push_back(partitions_gradient(data, scheme_->batch_partitions(g, j), theta_));
    }
    Vector group_grad = batch_grads[0];
    for (int j = 1; j < n; ++j) group_grad += batch_grads[j];

    for (int m = 0; m < n; ++m) times[m] = cfg.timing.sample(r_eff, rng_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return times[a] < times[b]; });
    rec.duration = std::max(rec.duration, times[order[F - 1]]);

    if (!code.trivial()) {
      std::vector<int> uploaders(order.begin(), order.begin() + F);
      std::sort(uploaders.begin(), uploaders.end());
      std::vector<Vector> encoded;
      encoded.reserve(F);
      for (int m : uploaders) {
        std::vector<Vector> stored;
        for (int b : assign.stored_batches(assign.first_worker(g) + m))
          stored.push_back(batch_grads[b]);
        encoded.push_back(encode(code, m, stored));
      }
      const Vector decoded = decode(code, uploaders, encoded);
      const double err = (decoded - group_grad).norm();
      if (!(err <= kDecodeTolerance * group_grad.norm()) && err > 0.0) {
        throw DecodeError("group " + std::to_string(g) + " at iteration " +
                          std::to_string(rec.iteration) +
                          ": decoded gradient deviates from the group gradient");
      }
    }
    // The recovered group gradient enters the update; the decode above only
    // certifies recovery, so the trajectory does not depend on which F
    // workers answered.
    fresh.push_back(std::move(group_grad));
  }

  estimate_ = estimate_gradient(state_, rec.selected, fresh);
  const Vector old = theta_.values();
  Vector next = old - cfg.step_size * estimate_;
  if (!next.allFinite()) {
    throw DivergenceError("iterate became non-finite with step size " +
                          std::to_string(cfg.step_size));
  }
  theta_ = ParamVector(std::move(next));
  state_.commit(theta_, old, rec.selected, fresh);
  gap_ = optimality_gap(data, theta_);

  const int chosen = static_cast<int>(rec.selected.size());
  rec.downloads = chosen * n;
  rec.uploads = chosen * F;
  rec.computation = static_cast<double>(r_eff) / cfg.workers * rec.downloads;
  rec.loss_gap = gap_;
  return rec;
}

MetricsTrace run_until(const PreparedScheme& scheme, const StopRule& stop,
                       std::uint64_t timing_seed) {
  const SchemeConfig& cfg = scheme.config();
  Simulation sim(scheme, timing_seed);
  MetricsTrace trace;
  trace.scheme = cfg.name();
  trace.seed = timing_seed;
  trace.initial_gap = sim.gap();
  trace.step_size_warning = cfg.step_size * scheme.data().smoothness >= 1.0;
  if (trace.initial_gap <= stop.epsilon) {
    trace.status = TraceStatus::ReachedTarget;
    return trace;
  }
  const double limit = kDivergenceFactor * trace.initial_gap;
  for (int i = 0; i < stop.max_iterations; ++i) {
    trace.append(sim.step());
    const double gap = trace.records.back().loss_gap;
    if (!(gap <= limit)) {
      std::ostringstream os;
      os << trace.scheme << " diverged at iteration " << sim.iteration()
         << " with step size alpha = " << cfg.step_size << " (alpha*L = "
         << cfg.step_size * scheme.data().smoothness << ")";
      throw DivergenceError(os.str());
    }
    if (gap <= stop.epsilon) {
      trace.status = TraceStatus::ReachedTarget;
      return trace;
    }
  }
  trace.status = TraceStatus::MaxIterations;
  return trace;
}

TraceValues trace_functions(const MetricsTrace& trace, double t) {
  TraceValues v;
  v.loss_gap = trace.initial_gap;
  if (!(t >= 0.0)) return v;
  // I(t) = largest I whose cumulative duration stays within t.
  auto it = std::upper_bound(trace.records.begin(), trace.records.end(), t,
                             [](double x, const IterationRecord& r) { return x < r.cum_time; });
  v.iterations = static_cast<int>(it - trace.records.begin());
  if (v.iterations > 0) {
    const IterationRecord& r = trace.records[v.iterations - 1];
    v.communication = r.comm_cum;
    v.computation = r.comp_cum;
    v.loss_gap = r.loss_gap;
  }
  return v;
}

void write_trace_csv(const MetricsTrace& trace, std::ostream& out) {
  out << "iter,duration,cum_time,md,mu,comm_cum,comp_cum,loss_gap\n";
  out << std::setprecision(17);
  out << "0,0,0,0,0,0,0," << trace.initial_gap << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << r.duration << ',' << r.cum_time << ',' << r.downloads << ','
        << r.uploads << ',' << r.comm_cum << ',' << r.comp_cum << ',' << r.loss_gap << '\n';
  }
}

MetricsTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "iter,duration,cum_time,md,mu,comm_cum,comp_cum,loss_gap") {
    throw Error("trace csv: unexpected header");
  }
  MetricsTrace trace;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw Error("trace csv: expected 8 columns in '" + line + "'");
    if (first) {
      trace.initial_gap = std::stod(cells[7]);
      first = false;
      continue;
    }
    IterationRecord r;
    r.iteration = std::stoi(cells[0]);
    r.duration = std::stod(cells[1]);
    r.cum_time = std::stod(cells[2]);
    r.downloads = std::stoi(cells[3]);
    r.uploads = std::stoi(cells[4]);
    r.comm_cum = std::stoll(cells[5]);
    r.comp_cum = std::stod(cells[6]);
    r.loss_gap = std::stod(cells[7]);
    trace.records.push_back(std::move(r));
  }
  if (first) throw Error("trace csv: missing initial row");
  return trace;
}

}  // namespace lagc

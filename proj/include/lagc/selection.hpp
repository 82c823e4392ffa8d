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

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "lagc/dataset.hpp"

namespace lagc {

// Parameters of the group-selection inequality
//   L_g² ‖θ_g^{i−1} − θ^i‖² >= M_G² ξ / (α² M² D) · Σ_{d=1..D} ‖θ^{i+1−d} − θ^{i−d}‖².
struct LazyRule {
  double xi = 0.0;
  double step_size = 1.0;  // α
  int workers = 1;         // M
  int history = 1;         // D
  int group_size = 1;      // M_G
};

// PS-side bookkeeping for lazy aggregation: the parameter each group last
// computed at, the gradient it returned there, and the last D squared
// iterate moves.
class LazyState {
 public:
  LazyState(int groups, int history_length, const Vector& initial);

  int groups() const { return static_cast<int>(stale_params_.size()); }
  int history_length() const { return history_length_; }

  const Vector& stale_parameter(int group) const { return stale_params_.at(group); }
  bool has_gradient(int group) const { return stale_grads_.at(group).has_value(); }
  // Throws Error when the group has never reported.
  const Vector& stale_gradient(int group) const;

  // Most recent last; at most history_length() entries.
  const std::deque<double>& history() const { return history_; }

  // Selected groups move their stale parameter to `theta_old` (where their
  // fresh gradient was computed) and cache that gradient; then the squared
  // move ‖theta_new − theta_old‖² enters the history.
  void commit(const Vector& theta_new, const Vector& theta_old, std::span<const int> selected,
              std::span<const Vector> fresh_gradients);

 private:
  int history_length_;
  std::vector<Vector> stale_params_;
  std::vector<std::optional<Vector>> stale_grads_;
  std::deque<double> history_;
};

// Right-hand side of the selection inequality. Missing history terms count
// as zero. With M_G = 1 this is the per-worker threshold ξ/(α²M²D) Σ‖·‖².
double selection_threshold(std::span<const double> history, double xi, double step_size,
                           int workers, int history_length, int group_size);
double selection_threshold(const std::deque<double>& history, const LazyRule& rule);

// Groups whose left-hand side reaches the threshold (ties select). A group
// without a cached gradient is always selected.
std::vector<int> select_groups(const LazyState& state, const Vector& theta,
                               std::span<const double> group_smoothness, const LazyRule& rule);

}  // namespace lagc

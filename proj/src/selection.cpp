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

#include "lagc/selection.hpp"

#include <string>
#include <vector>

#include "lagc/error.hpp"

namespace lagc {

LazyState::LazyState(int groups, int history_length, const Vector& initial)
    : history_length_(history_length),
      stale_params_(static_cast<std::size_t>(groups), initial),
      stale_grads_(static_cast<std::size_t>(groups)) {
  if (groups < 1) throw ConfigError("lazy state: need at least one group");
  if (history_length < 1) throw ConfigError("lazy state: history length D must be >= 1");
}

const Vector& LazyState::stale_gradient(int group) const {
  const auto& g = stale_grads_.at(group);
  if (!g) throw Error("group " + std::to_string(group) + " has no cached gradient");
  return *g;
}

void LazyState::commit(const Vector& theta_new, const Vector& theta_old,
                       std::span<const int> selected, std::span<const Vector> fresh_gradients) {
  if (selected.size() != fresh_gradients.size()) {
    throw Error("commit: " + std::to_string(selected.size()) + " selected groups but " +
                std::to_string(fresh_gradients.size()) + " fresh gradients");
  }
  for (std::size_t k = 0; k < selected.size(); ++k) {
    const int g = selected[k];
    stale_params_.at(g) = theta_old;
    stale_grads_.at(g) = fresh_gradients[k];
  }
  history_.push_back((theta_new - theta_old).squaredNorm());
  while (static_cast<int>(history_.size()) > history_length_) history_.pop_front();
}

double selection_threshold(std::span<const double> history, double xi, double step_size,
                           int workers, int history_length, int group_size) {
  if (xi == 0.0) return 0.0;
  double sum = 0.0;
  const std::size_t n = std::min(history.size(), static_cast<std::size_t>(history_length));
  // Only the newest D entries count.
  for (std::size_t k = history.size() - n; k < history.size(); ++k) sum += history[k];
  const double mg = group_size;
  const double m = workers;
  return mg * mg * xi / (step_size * step_size * m * m * history_length) * sum;
}

double selection_threshold(const std::deque<double>& history, const LazyRule& rule) {
  const std::vector<double> h(history.begin(), history.end());
  return selection_threshold(h, rule.xi, rule.step_size, rule.workers, rule.history,
                             rule.group_size);
}

std::vector<int> select_groups(const LazyState& state, const Vector& theta,
                               std::span<const double> group_smoothness, const LazyRule& rule) {
  if (static_cast<int>(group_smoothness.size()) != state.groups()) {
    throw ConfigError("select_groups: need one smoothness constant per group");
  }
  const double threshold = selection_threshold(state.history(), rule);
  std::vector<int> selected;
  for (int g = 0; g < state.groups(); ++g) {
    const double L = group_smoothness[g];
    const double lhs = L * L * (state.stale_parameter(g) - theta).squaredNorm();
    if (!state.has_gradient(g) || lhs >= threshold) selected.push_back(g);
  }
  return selected;
}

}  // namespace lagc

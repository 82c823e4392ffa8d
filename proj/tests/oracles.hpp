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

// Independent reference computations used only by the tests.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <vector>

#include "lagc/dataset.hpp"
#include "lagc/timing.hpp"

namespace lagc::oracle {

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double dense_lambda_max(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double dense_lambda_min(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double smoothness_of(const Eigen::MatrixXd& X) {
  return 2.0 * dense_lambda_max(X.transpose() * X);
}

// Central differences of f at x.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double sq_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& theta) {
  return (X * theta - y).squaredNorm();
}

// Draws from the standard library distributions rather than the model's own sampler.
class ReferenceSampler {
 public:
  ReferenceSampler(const TimingModel& model, int r, std::uint64_t seed)
      : model_(model), r_(r), rng_(seed) {}

  double operator()() {
    if (model_.law() == TimeLaw::Exponential) {
      std::exponential_distribution<double> d(1.0 / (model_.eta() * r_));
      return d(rng_);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double v;
    do {
      v = u(rng_);
    } while (v <= 0.0);
    const double scale = model_.eta() * r_ * (model_.beta() - 1.0) / model_.beta();
    return scale * std::pow(v, -1.0 / model_.beta());
  }

 private:
  TimingModel model_;
  int r_;
  std::mt19937_64 rng_;
};

// Monte Carlo means of every order statistic of b draws.
inline std::vector<double> mc_order_stats(const TimingModel& model, int r, int b,
                                          long long samples, std::uint64_t seed) {
  ReferenceSampler draw(model, r, seed);
  std::vector<long double> sums(b, 0.0L);
  std::vector<double> x(b);
  for (long long n = 0; n < samples; ++n) {
    for (auto& v : x) v = draw();
    std::sort(x.begin(), x.end());
    for (int a = 0; a < b; ++a) sums[a] += x[a];
  }
  std::vector<double> out(b);
  for (int a = 0; a < b; ++a) out[a] = static_cast<double>(sums[a] / samples);
  return out;
}

// Monte Carlo mean of the maximum over `groups` of the F-th fastest of M_G draws.
inline double mc_max_group_time(const TimingModel& model, int r, int group_size, int needed,
                                int groups, long long samples, std::uint64_t seed) {
  ReferenceSampler draw(model, r, seed);
  std::vector<double> x(group_size);
  long double sum = 0.0L;
  for (long long n = 0; n < samples; ++n) {
    double worst = 0.0;
    for (int g = 0; g < groups; ++g) {
      for (auto& v : x) v = draw();
      std::nth_element(x.begin(), x.begin() + (needed - 1), x.end());
      worst = std::max(worst, x[needed - 1]);
    }
    sum += worst;
  }
  return static_cast<double>(sum / samples);
}

// Exact rational-free harmonic difference H_b - H_{b-a}.
inline double harmonic_gap(int a, int b) {
  double s = 0.0;
  for (int k = b - a + 1; k <= b; ++k) s += 1.0 / k;
  return s;
}

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (pick[i]) s.push_back(i);
    fn(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

// Worker-level lazy aggregation written in the gradient-difference form,
// ĝ^i = ĝ^{i-1} + Σ_{m selected} (g_m(θ^i) − g_m(θ_m^{i-1})), evaluated along
// the iterates broadcast by the parameter server. The running sum is kept in
// compensated extended precision so that its own rounding stays far below the
// tolerances it is compared at.
class RecursiveLag {
 public:
  RecursiveLag(const Dataset& data, double xi, double alpha, int D, const Vector& theta0)
      : data_(data), xi_(xi), alpha_(alpha), D_(D), last_(theta0) {
    stale_.assign(data.size(), theta0);
    sum_.assign(theta0.size(), 0.0L);
    comp_.assign(theta0.size(), 0.0L);
    for (const auto& p : data.partitions) add(grad(p, theta0), Vector::Zero(theta0.size()));
  }

  // Processes iterate θ^i; returns the workers that report at this iteration.
  std::vector<int> step(const Vector& theta) {
    if (started_) {
      history_.push_back((theta - last_).squaredNorm());
      if (static_cast<int>(history_.size()) > D_) history_.pop_front();
    }
    started_ = true;
    last_ = theta;
    const int M = data_.size();
    double hist = 0.0;
    for (double h : history_) hist += h;
    const double rhs = xi_ / (alpha_ * alpha_ * M * M * D_) * hist;
    std::vector<int> sel;
    for (int m = 0; m < M; ++m) {
      const double L = data_.partitions[m].smoothness;
      if (L * L * (stale_[m] - theta).squaredNorm() >= rhs) sel.push_back(m);
    }
    for (int m : sel) {
      add(grad(data_.partitions[m], theta), grad(data_.partitions[m], stale_[m]));
      stale_[m] = theta;
    }
    return sel;
  }

  Vector estimate() const {
    Vector e(sum_.size());
    for (std::size_t i = 0; i < sum_.size(); ++i) e(i) = static_cast<double>(sum_[i] + comp_[i]);
    return e;
  }

 private:
  static Vector grad(const Partition& p, const Vector& t) {
    return 2.0 * p.X.transpose() * (p.X * t - p.y);
  }

  void add(const Vector& plus, const Vector& minus) {
    for (Eigen::Index i = 0; i < plus.size(); ++i) {
      const long double term = static_cast<long double>(plus(i)) - minus(i);
      const long double s = sum_[i] + term;
      if (std::abs(sum_[i]) >= std::abs(term)) {
        comp_[i] += (sum_[i] - s) + term;
      } else {
        comp_[i] += (term - s) + sum_[i];
      }
      sum_[i] = s;
    }
  }

  const Dataset& data_;
  double xi_, alpha_;
  int D_;
  Vector last_;
  bool started_ = false;
  std::vector<Vector> stale_;
  std::vector<long double> sum_, comp_;
  std::deque<double> history_;
};

}  // namespace lagc::oracle

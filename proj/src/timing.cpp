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

#include "lagc/timing.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "lagc/error.hpp"

namespace lagc {

namespace {

constexpr int kSimpsonMaxDepth = 48;

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  // Split into fixed panels first so narrow features near an endpoint are seen.
  constexpr int kPanels = 16;
  double total = 0.0;
  const double h = (b - a) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == kPanels) ? b : lo + h;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / kPanels, kSimpsonMaxDepth);
  }
  return total;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(fewer than `needed` of n workers finished) given per-worker survival u.
double group_survival_from_base(double u, int n, int needed) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double s = 0.0;
  const double lu = std::log(u);
  const double lv = std::log1p(-u);
  for (int j = 0; j < needed; ++j) {
    s += std::exp(log_binomial(n, j) + j * lv + (n - j) * lu);
  }
  return std::min(s, 1.0);
}

// 1 − (1 − s)^a without cancellation for small s.
double max_survival(double group_survival, int a) {
  if (group_survival >= 1.0) return 1.0;
  return -std::expm1(a * std::log1p(-group_survival));
}

void check_order(int a, int b) {
  if (a < 1 || b < 1 || a > b) {
    throw DomainError("order statistic needs 1 <= a <= b (got a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ")");
  }
}

double integer_max_group_time(const TimingModel& model, int r, int n, int needed, int a) {
  const int tail_order = n - needed + 1;  // number of unfinished workers allowed + 1
  if (model.law() == TimeLaw::Exponential) {
    const double m = model.mean(r);
    // x = −m ln u with u = w²; the integrand vanishes at w = 0.
    auto f = [&](double w) {
      if (w <= 0.0) return 0.0;
      const double u = w * w;
      return max_survival(group_survival_from_base(u, n, needed), a) * 2.0 * m / w;
    };
    return adaptive_simpson(f, 0.0, 1.0, 1e-10 * m);
  }
  const double beta = model.beta();
  const double excess = tail_order - 1.0 / beta;
  if (!(excess > 0.0)) {
    throw DomainError("expected group time is infinite: M_G - F + 1 <= 1/beta");
  }
  const double s = model.pareto_scale(r);
  // x = s u^{-1/β}, u = w^p. With p(k − 1/β) >= 2 the integrand is O(w) at 0.
  const double p = std::ceil(2.0 / excess);
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double u = std::pow(w, p);
    const double jac = s * p / beta * std::pow(w, -p / beta - 1.0);
    return max_survival(group_survival_from_base(u, n, needed), a) * jac;
  };
  return s + adaptive_simpson(f, 0.0, 1.0, 1e-10 * model.mean(r));
}

template <typename Fn>
double interpolate_index(double a, Fn&& at) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("order index must be >= 0");
  const double lo = std::floor(a);
  const double frac = a - lo;
  const double v_lo = lo < 1.0 ? 0.0 : at(static_cast<int>(lo));
  if (frac == 0.0) return v_lo;
  return v_lo + frac * (at(static_cast<int>(lo) + 1) - v_lo);
}

}  // namespace

std::string to_string(TimeLaw law) {
  return law == TimeLaw::Exponential ? "exponential" : "pareto";
}

TimingModel::TimingModel(TimeLaw law, double eta, double beta)
    : law_(law), eta_(eta), beta_(beta) {}

TimingModel TimingModel::exponential(double eta) {
  if (!(eta > 0.0)) throw ConfigError("timing: eta must be positive");
  return TimingModel(TimeLaw::Exponential, eta, 0.0);
}

TimingModel TimingModel::pareto(double eta, double beta) {
  if (!(eta > 0.0)) throw ConfigError("timing: eta must be positive");
  if (!(beta > 1.0)) throw ConfigError("timing: Pareto shape beta must exceed 1");
  return TimingModel(TimeLaw::Pareto, eta, beta);
}

double TimingModel::pareto_scale(int r) const { return eta_ * r * (beta_ - 1.0) / beta_; }

double TimingModel::cdf(int r, double x) const { return 1.0 - survival(r, x); }

double TimingModel::survival(int r, double x) const {
  if (x <= 0.0) return 1.0;
  if (law_ == TimeLaw::Exponential) return std::exp(-x / mean(r));
  const double s = pareto_scale(r);
  return x <= s ? 1.0 : std::pow(s / x, beta_);
}

double TimingModel::sample(int r, Rng& rng) const {
  // U in (0, 1] from the top 53 bits keeps both inverse transforms finite.
  const double u = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
  if (law_ == TimeLaw::Exponential) return -mean(r) * std::log(u);
  return pareto_scale(r) * std::pow(u, -1.0 / beta_);
}

std::vector<double> sample_times(const TimingModel& model, int r, int count, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  for (auto& t : out) t = model.sample(r, rng);
  return out;
}

double harmonic(int k) {
  double h = 0.0;
  for (int i = k; i >= 1; --i) h += 1.0 / i;
  return h;
}

double expected_order_stat_exponential(int a, int b, double eta, int r) {
  check_order(a, b);
  return eta * r * (harmonic(b) - harmonic(b - a));
}

double expected_order_stat_pareto(int a, int b, double eta, int r, double beta) {
  check_order(a, b);
  if (!(beta > 1.0)) throw DomainError("Pareto order statistic needs beta > 1");
  const int k = b - a + 1;
  const double inv = 1.0 / beta;
  if (!(k > inv)) throw DomainError("Pareto order statistic is infinite: b - a + 1 <= 1/beta");
  const double scale = eta * r * (beta - 1.0) / beta;
  const double log_ratio = std::lgamma(k - inv) + std::lgamma(b + 1.0) - std::lgamma(k) -
                           std::lgamma(b + 1.0 - inv);
  return scale * std::exp(log_ratio);
}

double expected_order_stat(const TimingModel& model, int a, int b, int r) {
  if (model.law() == TimeLaw::Exponential)
    return expected_order_stat_exponential(a, b, model.eta(), r);
  return expected_order_stat_pareto(a, b, model.eta(), r, model.beta());
}

double expected_max_time(const TimingModel& model, double a, int r) {
  return interpolate_index(a, [&](int k) { return expected_order_stat(model, k, k, r); });
}

double group_time_cdf(const TimingModel& model, int r, int group_size, int needed, double x) {
  if (needed < 1 || needed > group_size) {
    throw DomainError("group_time_cdf: need 1 <= F <= M_G");
  }
  const double p = model.cdf(r, x);
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double out = 0.0;
  for (int j = needed; j <= group_size; ++j) {
    out += std::exp(log_binomial(group_size, j) + j * std::log(p) +
                    (group_size - j) * std::log1p(-p));
  }
  return std::min(out, 1.0);
}

double expected_max_group_time(const TimingModel& model, int r, int group_size, int needed,
                               double a) {
  if (needed < 1 || needed > group_size) {
    throw DomainError("expected_max_group_time: need 1 <= F <= M_G");
  }
  return interpolate_index(
      a, [&](int k) { return integer_max_group_time(model, r, group_size, needed, k); });
}

}  // namespace lagc

// Copyright 2026 The AMSS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Nonparametric tests and multiplicity adjustments: two-sample
// Kolmogorov-Smirnov (exact or asymptotic), Kendall's tau-b, and the
// Benjamini-Hochberg and Holm p-value adjustments.

#ifndef AMSS_STATISTICS_HPP_
#define AMSS_STATISTICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "amss/common.hpp"

namespace amss {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = true;
};

struct KsOptions {
  // Exact p-values while n * m does not exceed this.
  int64_t exact_max_product = 10000;
};

namespace internal {

// Pooled sample in ascending order with a flag per element saying whether it
// came from the first sample, plus tie-block boundaries: boundary[k] is true
// when the statistic may be evaluated after the first k pooled elements.
struct Pooled {
  std::vector<char> from_x;
  std::vector<char> boundary;
};

inline Pooled Pool(std::span<const double> x, std::span<const double> y) {
  std::vector<std::pair<double, char>> all;
  all.reserve(x.size() + y.size());
  for (double v : x) all.emplace_back(v, 1);
  for (double v : y) all.emplace_back(v, 0);
  std::sort(all.begin(), all.end());
  Pooled p;
  const size_t total = all.size();
  p.from_x.resize(total);
  p.boundary.assign(total + 1, 0);
  for (size_t k = 0; k < total; ++k) p.from_x[k] = all[k].second;
  p.boundary[total] = 1;
  for (size_t k = 1; k < total; ++k) p.boundary[k] = all[k - 1].first != all[k].first;
  return p;
}

// Scaled statistic max |i m - j n| over tie-block boundaries; D = value / (n m).
inline int64_t ScaledKsStatistic(const Pooled& p, int64_t n, int64_t m) {
  int64_t i = 0, j = 0, best = 0;
  for (size_t k = 0; k < p.from_x.size(); ++k) {
    (p.from_x[k] ? i : j) += 1;
    if (p.boundary[k + 1]) best = std::max(best, std::abs(i * m - j * n));
  }
  return best;
}

// P(scaled statistic < threshold) over all C(n+m, n) equally likely label
// arrangements, walking the lattice with transition probabilities so the
// counts never overflow.
inline double KsExactCdfBelow(const Pooled& p, int64_t n, int64_t m, int64_t threshold) {
  // prob[i][j]: chance of reaching (i, j) without hitting the threshold.
  std::vector<std::vector<double>> prob(n + 1, std::vector<double>(m + 1, 0.0));
  prob[0][0] = 1.0;
  const int64_t total = n + m;
  for (int64_t i = 0; i <= n; ++i) {
    for (int64_t j = 0; j <= m; ++j) {
      double& cur = prob[i][j];
      if (cur == 0.0) continue;
      const int64_t k = i + j;
      if (p.boundary[k] && std::abs(i * m - j * n) >= threshold) {
        cur = 0.0;
        continue;
      }
      if (k == total) continue;
      const double remaining = static_cast<double>(total - k);
      if (i < n) prob[i + 1][j] += cur * static_cast<double>(n - i) / remaining;
      if (j < m) prob[i][j + 1] += cur * static_cast<double>(m - j) / remaining;
    }
  }
  return prob[n][m];
}

// Limiting Kolmogorov survival function P(K > lambda).
inline double KolmogorovSurvival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    // Jacobi theta form converges fast for small lambda.
    const double pi = std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = (2.0 * k - 1.0) * pi / lambda;
      cdf += std::exp(-t * t / 8.0);
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace internal

// Two-sided two-sample KS test. D = sup |F_x - F_y|. The exact p-value is
// P(D >= observed) under random relabelling of the pooled sample (ties kept
// in place); the asymptotic one uses the Kolmogorov limit with
// sqrt(n m / (n + m)) scaling.
inline KsResult KsTwoSample(std::span<const double> x, std::span<const double> y,
                            const KsOptions& options = {}) {
  if (x.empty() || y.empty()) throw ArgumentError("KS test needs two non-empty samples");
  for (double v : x) if (!std::isfinite(v)) throw ValidationError("KS sample has non-finite value");
  for (double v : y) if (!std::isfinite(v)) throw ValidationError("KS sample has non-finite value");
  const auto n = static_cast<int64_t>(x.size());
  const auto m = static_cast<int64_t>(y.size());
  const internal::Pooled pooled = internal::Pool(x, y);
  const int64_t scaled = internal::ScaledKsStatistic(pooled, n, m);
  KsResult r;
  r.statistic = static_cast<double>(scaled) / static_cast<double>(n * m);
  if (n * m <= options.exact_max_product) {
    r.exact = true;
    r.p_value = scaled == 0 ? 1.0
                            : std::clamp(1.0 - internal::KsExactCdfBelow(pooled, n, m, scaled), 0.0, 1.0);
  } else {
    r.exact = false;
    const double en = static_cast<double>(n * m) / static_cast<double>(n + m);
    r.p_value = internal::KolmogorovSurvival(std::sqrt(en) * r.statistic);
  }
  return r;
}

namespace internal {

inline std::vector<size_t> AscendingOrder(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw RangeError("p-value outside [0, 1]");
  }
  std::vector<size_t> order(p.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return p[a] < p[b]; });
  return order;
}

}  // namespace internal

// Benjamini-Hochberg step-up: p'(i) = min_{j >= i} (m / j) p(j), capped at 1.
inline std::vector<double> BhAdjust(std::span<const double> p) {
  const auto order = internal::AscendingOrder(p);
  const size_t m = p.size();
  std::vector<double> out(m);
  double running = 1.0;
  for (size_t r = m; r-- > 0;) {
    const size_t idx = order[r];
    running = std::min(running, static_cast<double>(m) / static_cast<double>(r + 1) * p[idx]);
    out[idx] = std::min(1.0, running);
  }
  return out;
}

// Holm step-down: p'(i) = max_{j <= i} min(1, (m - j + 1) p(j)).
inline std::vector<double> HolmAdjust(std::span<const double> p) {
  const auto order = internal::AscendingOrder(p);
  const size_t m = p.size();
  std::vector<double> out(m);
  double running = 0.0;
  for (size_t r = 0; r < m; ++r) {
    const size_t idx = order[r];
    running = std::max(running, std::min(1.0, static_cast<double>(m - r) * p[idx]));
    out[idx] = running;
  }
  return out;
}

struct KendallResult {
  double tau = 0.0;
  double p_value = 1.0;
  // False when either input is constant and tau-b is undefined.
  bool defined = true;
};

// Kendall's tau-b with the tie-corrected normal approximation for the p-value
// (no continuity correction).
inline KendallResult KendallTauB(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("Kendall tau needs equal-length inputs");
  const size_t n = x.size();
  if (n < 2) throw ArgumentError("Kendall tau needs at least 2 pairs");
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const int sx = (dx > 0) - (dx < 0);
      const int sy = (dy > 0) - (dy < 0);
      s += sx * sy;
    }
  }
  // Tie-group sizes.
  auto ties = [](std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> groups;
    for (size_t i = 0; i < sorted.size();) {
      size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      if (j - i > 1) groups.push_back(static_cast<double>(j - i));
      i = j;
    }
    return groups;
  };
  const auto tx = ties(x);
  const auto ty = ties(y);
  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1.0) / 2.0;
  double n1 = 0.0, n2 = 0.0, vt = 0.0, vu = 0.0, t2 = 0.0, u2 = 0.0, t1 = 0.0, u1 = 0.0;
  for (double t : tx) {
    n1 += t * (t - 1.0) / 2.0;
    vt += t * (t - 1.0) * (2.0 * t + 5.0);
    t1 += t * (t - 1.0);
    t2 += t * (t - 1.0) * (t - 2.0);
  }
  for (double u : ty) {
    n2 += u * (u - 1.0) / 2.0;
    vu += u * (u - 1.0) * (2.0 * u + 5.0);
    u1 += u * (u - 1.0);
    u2 += u * (u - 1.0) * (u - 2.0);
  }
  KendallResult r;
  const double denom = std::sqrt((n0 - n1) * (n0 - n2));
  if (denom == 0.0) {
    r.defined = false;
    return r;
  }
  r.tau = std::clamp(s / denom, -1.0, 1.0);
  double var = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - vt - vu) / 18.0 +
               t1 * u1 / (2.0 * nd * (nd - 1.0));
  if (n > 2) var += t2 * u2 / (9.0 * nd * (nd - 1.0) * (nd - 2.0));
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = s / std::sqrt(var);
  r.p_value = std::clamp(std::erfc(std::abs(z) / std::numbers::sqrt2), 0.0, 1.0);
  return r;
}

}  // namespace amss

#endif  // AMSS_STATISTICS_HPP_

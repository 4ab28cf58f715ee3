// Copyright 2026 The credscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "credscore/credscore.hpp"

namespace credscore::testing {

inline const AccountId& account_a() {
  static const AccountId id("0x00000000000000000000000000000000000000aa");
  return id;
}

inline const AccountId& account_b() {
  static const AccountId id("0x00000000000000000000000000000000000000bb");
  return id;
}

// DAI 0.001 ETH with LT 0.75; ETH is the numeraire.
inline AssetRegistry toy_registry() {
  AssetRegistry r;
  r.add("DAI", {0.75, true});
  r.add("ETH", {0.825, false});
  r.add("LINK", {0.65, false});
  return r;
}

inline PriceTable toy_prices() {
  PriceTable p;
  p.add("DAI", 0, 0.001);
  p.add("ETH", 0, 1.0);
  p.add("LINK", 0, 0.01);
  return p;
}

inline Snapshot make_snapshot(const AccountId& account, Timestamp t, AssetCounter collateral, AssetCounter borrows,
                              const PriceTable& prices = toy_prices(), const AssetRegistry& registry = toy_registry()) {
  Snapshot s;
  s.account = account;
  s.timestamp = t;
  s.collateral = std::move(collateral);
  s.borrows = std::move(borrows);
  s.health_factor = compute_health_factor(s.collateral, s.borrows, t, prices, registry);
  return s;
}

// The P0, P0, P1, P1, P1, P2 sequence: DAI collateral 1000 / 1500 / 1000 against
// 0.1 ETH debt, one snapshot per `unit` seconds.
inline std::vector<Snapshot> worked_sequence(Timestamp unit = 1, const AccountId& account = account_a()) {
  const double dai[] = {1000, 1000, 1500, 1500, 1500, 1000};
  std::vector<Snapshot> out;
  for (int t = 0; t < 6; ++t)
    out.push_back(make_snapshot(account, t * unit, {{"DAI", dai[t]}}, {{"ETH", 0.1}}));
  return out;
}

inline SnapshotMap as_map(const std::vector<Snapshot>& seq) {
  SnapshotMap m;
  for (const auto& s : seq) m[s.account].push_back(s);
  return m;
}

}  // namespace credscore::testing

namespace credscore::testing {

// Largest per-component relative error between the analytic logistic gradient
// and central finite differences, at a random (X, y, w, b, l2) instance.
inline double logreg_gradient_check(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 20 + rng.below(80);
  const std::size_t d = 1 + rng.below(10);
  Matrix X(n, d);
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) X(r, c) = rng.normal();
    y[r] = rng.bernoulli(0.4) ? 1 : 0;
  }
  std::vector<double> w(d);
  for (auto& wi : w) wi = rng.normal();
  const double b = rng.normal();
  const double l2 = rng.uniform(0.0, 2.0);

  const auto g = logreg_gradient(X, y, w, b, l2);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t k = 0; k <= d; ++k) {
    auto wp = w, wm = w;
    double bp = b, bm = b;
    if (k < d) {
      wp[k] += h;
      wm[k] -= h;
    } else {
      bp += h;
      bm -= h;
    }
    const double fd = (logreg_objective(X, y, wp, bp, l2) - logreg_objective(X, y, wm, bm, l2)) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(g[k]), 1e-12});
    worst = std::max(worst, std::abs(fd - g[k]) / denom);
  }
  return worst;
}

}  // namespace credscore::testing

namespace credscore::testing {

// Rows with random features, in holdout order. With `signal`, the label leans on
// the prior delinquency frequency and the prior HF < 1 count.
inline std::vector<DatasetRow> random_rows(std::size_t n, std::uint64_t seed, double signal = 0.0) {
  Rng rng(seed);
  std::vector<DatasetRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    DatasetRow& r = rows[i];
    r.account = account_a();
    r.position_index = static_cast<int>(i);
    r.open_ts = static_cast<Timestamp>(i) * 3600;
    r.close_ts = r.open_ts + 20 * 86400;
    r.duration_days = 20.0;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (rng.bernoulli(0.1)) {
        r.features.mask(static_cast<Feature>(f));
      } else {
        r.features.set(static_cast<Feature>(f), rng.normal());
      }
    }
    const double freq = rng.uniform();
    const double count = static_cast<double>(rng.below(20));
    r.features.set(kPriorDelinquencyFrequency, freq);
    r.features.set(kPriorHfLt1Count, count);
    const double z = signal * (2.0 * (freq - 0.5) + 0.1 * (count - 10.0));
    r.label = rng.bernoulli(sigmoid(z)) ? 1 : 0;
  }
  return rows;
}

}  // namespace credscore::testing

namespace credscore::testing {

// Adaptive Simpson quadrature, used as an independent oracle.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-13,
                 int panels = 64) {
  // Fixed panels first, so a narrow peak cannot hide between the first three samples.
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * w, hi = lo + w;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    total += simpson(f, lo, hi, fa, fm, fb, w / 6.0 * (fa + 4.0 * fm + fb), eps / panels, 50);
  }
  return total;
}

}  // namespace credscore::testing

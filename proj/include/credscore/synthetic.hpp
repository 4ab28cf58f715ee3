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

// Seeded generator for desk-scale health-factor datasets.
//
// Prices: ETH is the numeraire (price 1). Every volatile token follows its own
// driftless geometric random walk in ETH; all stablecoins share a single, quieter
// walk (the USD/ETH rate). A long tail of generated tokens (TK001, ...) keeps
// outcomes of concurrent positions close to independent.
//
// Accounts: each account opens a sequence of positions whose holding times are
// exponential (Poisson-timed changes). A loan position holds one volatile
// collateral asset and one stablecoin debt sized to hit a target opening health
// factor; a fraction of positions are collateral-only. Every snapshot's health
// factor is computed from the counters and the price table, so the output
// validates exactly against its own registry and prices.
//
// Signal: each account has a latent risk trait z ~ N(0, 1). The target opening
// health factor is
//
//   h = 1 + (base_hf - 1) * exp(signal * 1.5 * (0.8 z + 0.6 eps)),  eps ~ N(0, 1)
//
// so with signal = 0 every loan opens at base_hf and delinquency is driven by
// price moves alone; with signal > 0 risky accounts open thin positions that
// dip below 1 repeatedly.
//
// The number of closed positions per account is drawn independently of the
// holding times and the account's data ends partway through its final
// (current) position. Closed-position durations are therefore untruncated.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "credscore/data_model.hpp"
#include "credscore/health.hpp"

namespace credscore {

struct SyntheticAsset {
  std::string symbol;
  double liquidation_threshold = 0.8;
  bool is_stablecoin = false;
  double initial_price_eth = 1.0;
};

inline std::vector<SyntheticAsset> default_asset_universe() {
  return {
      {"AAVE", 0.65, false, 0.1},   {"DAI", 0.80, true, 0.0005}, {"ETH", 0.825, false, 1.0},
      {"LINK", 0.75, false, 0.01},  {"MKR", 0.65, false, 1.0},   {"UNI", 0.65, false, 0.01},
      {"USDC", 0.85, true, 0.0005}, {"USDT", 0.80, true, 0.0005}, {"WBTC", 0.75, false, 15.0},
      {"YFI", 0.55, false, 10.0},
  };
}

struct SyntheticConfig {
  std::size_t n_accounts = 300;
  std::size_t snapshots_per_account = 365;  // mean stream length
  Timestamp interval_seconds = 86400;
  Timestamp start_ts = 1609459200;  // 2021-01-01T00:00:00Z
  std::size_t max_start_offset = 180;  // accounts join within this many intervals
  std::vector<SyntheticAsset> assets = default_asset_universe();
  std::size_t long_tail_tokens = 60;
  double daily_volatility = 0.03;    // log-price volatility per day, volatile tokens
  double stable_volatility = 0.005;  // same, for the shared stablecoin walk
  double mean_hold_days = 30.0;    // 1 / position-change rate
  double collateral_only_fraction = 0.1;
  double base_hf = 1.2;
  double signal = 0.0;  // delinquency signal strength
  std::uint64_t seed = 42;
};

struct SyntheticDataset {
  SnapshotMap snapshots;
  AssetRegistry registry;
  PriceTable prices;
};

namespace detail {

inline std::string random_address(Rng& rng) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s = "0x";
  for (int i = 0; i < 40; ++i) s += kHex[rng.below(16)];
  return s;
}

struct PlannedPosition {
  std::size_t open_step = 0;  // global interval index
  std::size_t length = 0;     // snapshots in the position
  bool loan = true;
  std::size_t collateral_asset = 0;
  std::size_t borrow_asset = 0;
  double collateral_value_eth = 0.0;
  double target_hf = 0.0;
};

}  // namespace detail

inline SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  if (config.n_accounts == 0 || config.snapshots_per_account < 2 || config.interval_seconds <= 0 ||
      !(config.mean_hold_days > 0.0) || config.daily_volatility < 0.0 || config.stable_volatility < 0.0 || !(config.base_hf > 0.0) || config.signal < 0.0 ||
      config.collateral_only_fraction < 0.0 || config.collateral_only_fraction > 1.0)
    throw std::invalid_argument("invalid synthetic config");

  std::vector<SyntheticAsset> assets = config.assets;
  for (std::size_t i = 1; i <= config.long_tail_tokens; ++i) {
    char sym[16];
    std::snprintf(sym, sizeof sym, "TK%03zu", i);
    assets.push_back({sym, 0.7, false, 0.01});
  }

  SyntheticDataset out;
  std::vector<std::size_t> volatile_assets;
  std::vector<std::size_t> stable_assets;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const auto& a = assets[i];
    out.registry.add(a.symbol, {a.liquidation_threshold, a.is_stablecoin});
    if (a.is_stablecoin) {
      stable_assets.push_back(i);
    } else if (a.symbol != "ETH") {
      volatile_assets.push_back(i);
    }
  }
  if (volatile_assets.empty() || stable_assets.empty())
    throw std::invalid_argument("synthetic config needs at least one volatile (non-ETH) asset and one stablecoin");

  const double interval_days = static_cast<double>(config.interval_seconds) / kSecondsPerDay;
  const double expected_positions =
      std::max(1.0, static_cast<double>(config.snapshots_per_account) * interval_days / config.mean_hold_days);

  // Account structure first so the price horizon is known.
  Rng structure(config.seed ^ 0x5eed0001ULL);
  struct PlannedAccount {
    std::string address;
    std::size_t start = 0;
    std::size_t end = 0;  // one past the last step
    double risk = 0.0;
    std::vector<detail::PlannedPosition> positions;
  };
  std::vector<PlannedAccount> accounts(config.n_accounts);
  std::size_t horizon = 0;
  for (auto& acc : accounts) {
    acc.address = detail::random_address(structure);
    acc.start = structure.below(config.max_start_offset + 1);
    acc.risk = structure.normal();
    const auto closed = static_cast<std::size_t>(structure.below(static_cast<std::uint64_t>(2.0 * expected_positions)));
    std::size_t step = acc.start;
    for (std::size_t k = 0; k <= closed; ++k) {
      detail::PlannedPosition p;
      p.open_step = step;
      const double hold_days = k < closed ? structure.exponential(config.mean_hold_days)
                                          : structure.uniform(0.0, 2.0 * config.mean_hold_days);
      p.length = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hold_days / interval_days)));
      p.loan = !structure.bernoulli(config.collateral_only_fraction);
      p.collateral_asset = volatile_assets[structure.below(volatile_assets.size())];
      p.borrow_asset = stable_assets[structure.below(stable_assets.size())];
      p.collateral_value_eth = std::exp(std::log(10.0) + structure.normal());
      const double eps = structure.normal();
      p.target_hf = 1.0 + (config.base_hf - 1.0) * std::exp(config.signal * 1.5 * (0.8 * acc.risk + 0.6 * eps));
      step += p.length;
      acc.positions.push_back(p);
    }
    acc.end = step;
    horizon = std::max(horizon, step);
  }

  // Prices on every step of the horizon.
  Rng walk(config.seed ^ 0x5eed0002ULL);
  const double step_vol = config.daily_volatility * std::sqrt(interval_days);
  const double stable_step_vol = config.stable_volatility * std::sqrt(interval_days);
  std::vector<std::vector<double>> price(assets.size(), std::vector<double>(horizon));
  std::vector<double> usd(horizon);
  double usd_log = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t > 0) usd_log += stable_step_vol * walk.normal();
    usd[t] = std::exp(usd_log);
  }
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const auto& a = assets[i];
    double lp = std::log(a.initial_price_eth);
    for (std::size_t t = 0; t < horizon; ++t) {
      if (a.is_stablecoin) {
        price[i][t] = a.initial_price_eth * usd[t];
      } else if (a.symbol == "ETH") {
        price[i][t] = 1.0;
      } else {
        if (t > 0) lp += step_vol * walk.normal();
        price[i][t] = std::exp(lp);
      }
      out.prices.add(a.symbol, config.start_ts + static_cast<Timestamp>(t) * config.interval_seconds, price[i][t]);
    }
  }

  for (const auto& acc : accounts) {
    AccountId id(acc.address);
    auto& seq = out.snapshots[id];
    AssetCounter prev_collateral;
    for (const auto& p : acc.positions) {
      const auto& c = assets[p.collateral_asset];
      const auto& b = assets[p.borrow_asset];
      double coll_amount = p.collateral_value_eth / price[p.collateral_asset][p.open_step];
      // Keep consecutive positions distinguishable under any reasonable segmentation tolerance.
      if (prev_collateral.contains(c.symbol) && prev_collateral.size() == 1 &&
          std::abs(prev_collateral.get(c.symbol) - coll_amount) <= 0.05 * coll_amount)
        coll_amount *= 1.25;
      AssetCounter collateral;
      collateral.set(c.symbol, coll_amount);
      AssetCounter borrows;
      if (p.loan) {
        const double weighted = coll_amount * price[p.collateral_asset][p.open_step] * c.liquidation_threshold;
        borrows.set(b.symbol, weighted / p.target_hf / price[p.borrow_asset][p.open_step]);
      }
      for (std::size_t t = p.open_step; t < p.open_step + p.length; ++t) {
        Snapshot s;
        s.account = id;
        s.timestamp = config.start_ts + static_cast<Timestamp>(t) * config.interval_seconds;
        s.collateral = collateral;
        s.borrows = borrows;
        s.health_factor = compute_health_factor(collateral, borrows, s.timestamp, out.prices, out.registry);
        seq.push_back(std::move(s));
      }
      prev_collateral = std::move(collateral);
    }
  }
  return out;
}

}  // namespace credscore

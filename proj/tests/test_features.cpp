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

#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"

namespace credscore {
namespace {

using testing::account_a;

constexpr Timestamp kDay = 86400;

TEST(FeatureNames, FixedList) {
  const auto& names = feature_names();
  ASSERT_EQ(names.size(), 17u);
  EXPECT_EQ(names[3], "prior_hf_lt1_count");
  EXPECT_EQ(names.front(), "account_age_days");
  EXPECT_EQ(names.back(), "days_since_prev_position");
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
}

// Account whose positions alternate DAI collateral amounts, each held `hold`
// days with daily snapshots; dips[i] puts one HF < 1 snapshot into position i.
struct History {
  std::vector<Snapshot> snapshots;
  AssetRegistry registry = testing::toy_registry();
  PriceTable prices = testing::toy_prices();
};

History history(const std::vector<bool>& dips, int hold = 12) {
  History h;
  Timestamp t = 5 * kDay;
  for (std::size_t i = 0; i < dips.size(); ++i) {
    for (int d = 0; d < hold; ++d) {
      Snapshot s = testing::make_snapshot(account_a(), t, {{"DAI", 1000.0 + static_cast<double>(i)}}, {{"ETH", 0.1}},
                                          h.prices, h.registry);
      if (dips[i] && d == 3) s.health_factor = 0.9;
      h.snapshots.push_back(s);
      t += kDay;
    }
  }
  return h;
}

FeatureVector features_of(const History& h, std::size_t target) {
  const auto ps = segment_positions(h.snapshots, 0.0);
  return extract_features(ps, target, h.prices, h.registry);
}

TEST(ExtractFeatures, FirstPositionHasEmptyHistory) {
  const auto h = history({false, false});
  const auto f = features_of(h, 0);
  EXPECT_EQ(f[kAccountAgeDays], 0.0);
  EXPECT_EQ(f[kNPriorPositions], 0.0);
  for (Feature m : {kPriorDelinquencyFrequency, kPriorHfMin, kPriorHfMax, kPriorHfMean, kPriorHfStd,
                    kDaysSincePrevPosition}) {
    EXPECT_TRUE(f.is_missing(m)) << feature_names()[m];
    EXPECT_EQ(f[m], 0.0);
  }
  EXPECT_EQ(f[kPriorHfLt1Count], 0.0);
  EXPECT_EQ(f[kPriorSnapshotCount], 0.0);
  EXPECT_FALSE(f.is_missing(kOpeningHf));
}

TEST(ExtractFeatures, PriorDelinquencyFrequency) {
  const auto h = history({true, false, true, false, false});
  const auto f = features_of(h, 4);
  EXPECT_EQ(f[kPriorDelinquencyFrequency], 0.5);
  EXPECT_EQ(f[kPriorHfLt1Count], 2.0);
  EXPECT_EQ(f[kNPriorPositions], 4.0);
  EXPECT_EQ(f[kPriorSnapshotCount], 48.0);
  EXPECT_EQ(f[kAccountAgeDays], 48.0);
  EXPECT_EQ(f[kDaysSincePrevPosition], 12.0);
  EXPECT_EQ(f[kPriorHfMin], 0.9);
}

TEST(ExtractFeatures, OpeningValuesAndStableFractions) {
  History h;
  h.prices.add("USDC", 0, 0.0005);
  h.registry.add("USDC", {0.85, true});
  h.snapshots.push_back(testing::make_snapshot(account_a(), 0, {{"DAI", 1000.0}, {"LINK", 100.0}},
                                               {{"USDC", 1000.0}, {"ETH", 0.5}}, h.prices, h.registry));
  const auto f = features_of(h, 0);
  EXPECT_DOUBLE_EQ(f[kCollateralValueEth], 2.0);
  EXPECT_DOUBLE_EQ(f[kBorrowValueEth], 1.0);
  EXPECT_DOUBLE_EQ(f[kStableCollateralFraction], 0.5);
  EXPECT_DOUBLE_EQ(f[kStableBorrowFraction], 0.5);
  EXPECT_EQ(f[kNBorrowAssets], 2.0);
  EXPECT_EQ(f[kNCollateralAssets], 2.0);
  EXPECT_DOUBLE_EQ(f[kOpeningHf], (1000 * 0.001 * 0.75 + 100 * 0.01 * 0.65) / 1.0);
}

TEST(ExtractFeatures, EmptySidesAndInfiniteHfAreMasked) {
  History h;
  h.snapshots.push_back(testing::make_snapshot(account_a(), 0, {{"DAI", 1000.0}}, {}));
  const auto f = features_of(h, 0);
  EXPECT_TRUE(f.is_missing(kOpeningHf));
  EXPECT_TRUE(f.is_missing(kStableBorrowFraction));
  EXPECT_FALSE(f.is_missing(kStableCollateralFraction));
  EXPECT_EQ(f[kBorrowValueEth], 0.0);
  EXPECT_EQ(f[kNBorrowAssets], 0.0);
}

TEST(ExtractFeatures, InfiniteHistoryExcludedFromMoments) {
  History h;
  h.snapshots.push_back(testing::make_snapshot(account_a(), 0, {{"DAI", 1000.0}}, {}));
  h.snapshots.push_back(testing::make_snapshot(account_a(), kDay, {{"DAI", 1000.0}}, {}));
  h.snapshots.push_back(testing::make_snapshot(account_a(), 2 * kDay, {{"DAI", 1000.0}}, {{"ETH", 0.1}}));
  const auto f = features_of(h, 1);
  EXPECT_EQ(f[kPriorSnapshotCount], 2.0);
  EXPECT_EQ(f[kPriorHfLt1Count], 0.0);
  EXPECT_TRUE(f.is_missing(kPriorHfMean));
  // Collateral-only priors are not labelable.
  EXPECT_TRUE(f.is_missing(kPriorDelinquencyFrequency));
}

// Independent oracle: aggregates recomputed from the flat snapshot stream,
// restricted to timestamps strictly before the opening.
struct Oracle {
  double count = 0, below = 0, min = kInf, max = -kInf, mean = 0, var = 0;
  std::size_t finite = 0;
};

Oracle oracle(const std::vector<Snapshot>& stream, Timestamp open) {
  Oracle o;
  std::vector<double> hf;
  for (const auto& s : stream) {
    if (s.timestamp >= open) continue;
    ++o.count;
    if (s.health_factor < 1.0) ++o.below;
    if (std::isfinite(s.health_factor)) hf.push_back(s.health_factor);
  }
  o.finite = hf.size();
  if (hf.empty()) return o;
  long double sum = 0;
  for (double v : hf) {
    sum += v;
    o.min = std::min(o.min, v);
    o.max = std::max(o.max, v);
  }
  o.mean = static_cast<double>(sum / hf.size());
  long double ss = 0;
  for (double v : hf) ss += (v - o.mean) * (v - o.mean);
  o.var = static_cast<double>(ss / hf.size());
  return o;
}

TEST(ExtractFeatures, MatchesFlatStreamOracleOnSyntheticData) {
  SyntheticConfig cfg;
  cfg.n_accounts = 25;
  cfg.snapshots_per_account = 150;
  cfg.signal = 1.0;
  const auto ds = generate_synthetic(cfg);
  std::size_t checked = 0;
  for (const auto& [account, seq] : ds.snapshots) {
    const auto ps = segment_positions(seq);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto f = extract_features(ps, i, ds.prices, ds.registry);
      const auto o = oracle(seq, ps[i].open_ts);
      EXPECT_EQ(f[kPriorSnapshotCount], o.count);
      EXPECT_EQ(f[kPriorHfLt1Count], o.below);
      EXPECT_EQ(f[kAccountAgeDays], static_cast<double>(ps[i].open_ts - seq.front().timestamp) / kDay);
      if (o.finite == 0) {
        EXPECT_TRUE(f.is_missing(kPriorHfMean));
      } else {
        EXPECT_EQ(f[kPriorHfMin], o.min);
        EXPECT_EQ(f[kPriorHfMax], o.max);
        EXPECT_NEAR(f[kPriorHfMean], o.mean, 1e-12 * std::abs(o.mean));
        EXPECT_NEAR(f[kPriorHfStd], std::sqrt(o.var), 1e-9 * (1.0 + std::sqrt(o.var)));
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(ExtractFeatures, NoLookahead) {
  const auto base = history({true, false, false, true, false});
  const auto ps = segment_positions(base.snapshots, 0.0);
  for (std::size_t target = 0; target < ps.size(); ++target) {
    const auto before = extract_features(ps, target, base.prices, base.registry);
    History poisoned = base;
    for (auto& s : poisoned.snapshots)
      if (s.timestamp > ps[target].open_ts) s.health_factor = s.health_factor < 1.0 ? 5.0 : 0.1;
    const auto pps = segment_positions(poisoned.snapshots, 0.0);
    EXPECT_EQ(extract_features(pps, target, poisoned.prices, poisoned.registry), before) << target;
  }
}

TEST(ExtractFeatures, MissingOpeningPriceThrows) {
  History h;
  h.snapshots.push_back(testing::make_snapshot(account_a(), 0, {{"DAI", 1000.0}}, {}));
  h.prices = {};
  EXPECT_THROW(features_of(h, 0), DataError);
  EXPECT_THROW(features_of(history({false}), 3), std::out_of_range);
}

}  // namespace
}  // namespace credscore

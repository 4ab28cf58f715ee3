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

#include "test_util.hpp"

namespace credscore {
namespace {

using testing::account_a;
using testing::make_snapshot;
using testing::worked_sequence;

constexpr Timestamp kDay = 86400;

// Snapshot with a prescribed (not recomputed) health factor.
Snapshot with_hf(Timestamp t, double hf, AssetCounter borrows = {{"ETH", 0.1}}) {
  Snapshot s;
  s.account = account_a();
  s.timestamp = t;
  s.collateral.set("DAI", 1000.0);
  s.borrows = std::move(borrows);
  s.health_factor = hf;
  return s;
}

Position single_position(std::vector<Snapshot> snaps) {
  auto ps = segment_positions(snaps, 0.0);
  EXPECT_EQ(ps.size(), 1u);
  return ps.front();
}

TEST(SegmentPositions, WorkedSequence) {
  const auto ps = segment_positions(worked_sequence(), 0.0);
  ASSERT_EQ(ps.size(), 3u);
  const Timestamp opens[] = {0, 2, 5};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(ps[i].index, i);
    EXPECT_EQ(ps[i].open_ts, opens[i]);
  }
  EXPECT_EQ(ps[0].opening().collateral, ps[2].opening().collateral);
  EXPECT_EQ(ps[0].opening().borrows, ps[2].opening().borrows);
  EXPECT_EQ(ps[0].close_ts, 2);
  EXPECT_EQ(ps[1].close_ts, 5);
  EXPECT_TRUE(ps[2].is_current());
  EXPECT_EQ(ps[1].snapshots.size(), 3u);
}

TEST(SegmentPositions, ConstantCountersAreOnePosition) {
  std::vector<Snapshot> seq;
  for (int t = 0; t < 10; ++t) seq.push_back(make_snapshot(account_a(), t, {{"DAI", 10.0}}, {}));
  const auto ps = segment_positions(seq);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].snapshots.size(), 10u);
}

TEST(SegmentPositions, DriftTolerance) {
  std::vector<Snapshot> seq;
  double amount = 1000.0;
  for (int t = 0; t < 5; ++t) {
    seq.push_back(make_snapshot(account_a(), t, {{"DAI", 2000.0}}, {{"DAI", amount}}));
    amount *= 1.001;
  }
  EXPECT_EQ(segment_positions(seq, 0.005).size(), 1u);
  EXPECT_EQ(segment_positions(seq, 0.0005).size(), 5u);
}

TEST(SegmentPositions, AssetSetChangeAlwaysSplits) {
  std::vector<Snapshot> seq = {make_snapshot(account_a(), 0, {{"DAI", 1.0}}, {}),
                               make_snapshot(account_a(), 1, {{"DAI", 1.0}, {"LINK", 1e-12}}, {})};
  EXPECT_EQ(segment_positions(seq, 0.5).size(), 2u);
}

TEST(SegmentPositions, Errors) {
  auto seq = worked_sequence();
  std::swap(seq[0], seq[1]);
  EXPECT_THROW(segment_positions(seq), std::invalid_argument);
  seq = worked_sequence();
  seq[3].account = testing::account_b();
  EXPECT_THROW(segment_positions(seq), std::invalid_argument);
  EXPECT_TRUE(segment_positions({}).empty());
}

// Brute-force rule with tolerance 0: split wherever consecutive counters differ.
std::vector<std::size_t> brute_force_opens(const std::vector<Snapshot>& seq) {
  std::vector<std::size_t> opens;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (i == 0 || seq[i].collateral != seq[i - 1].collateral || seq[i].borrows != seq[i - 1].borrows) opens.push_back(i);
  return opens;
}

TEST(SegmentPositions, PartitionAndBruteForceAgreement) {
  Rng rng(5);
  const std::vector<std::string> assets = {"DAI", "ETH", "LINK"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Snapshot> seq;
    AssetCounter c, b;
    const int n = 1 + static_cast<int>(rng.below(40));
    for (int t = 0; t < n; ++t) {
      if (t == 0 || rng.bernoulli(0.3)) {
        c = {};
        b = {};
        for (const auto& a : assets) {
          if (rng.bernoulli(0.5)) c.set(a, static_cast<double>(1 + rng.below(3)));
          if (rng.bernoulli(0.3)) b.set(a, static_cast<double>(1 + rng.below(3)));
        }
      }
      Snapshot s;
      s.account = account_a();
      s.timestamp = t * 7;
      s.collateral = c;
      s.borrows = b;
      s.health_factor = 1.0;
      seq.push_back(s);
    }
    const auto ps = segment_positions(seq, 0.0);
    const auto opens = brute_force_opens(seq);
    ASSERT_EQ(ps.size(), opens.size());
    std::vector<Snapshot> concat;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      EXPECT_EQ(ps[i].index, static_cast<int>(i));
      EXPECT_EQ(ps[i].open_ts, seq[opens[i]].timestamp);
      if (i > 0) {
        EXPECT_GT(ps[i].open_ts, ps[i - 1].open_ts);
      }
      concat.insert(concat.end(), ps[i].snapshots.begin(), ps[i].snapshots.end());
    }
    EXPECT_EQ(concat, seq);
    // Idempotent: re-segmenting the concatenated runs changes nothing.
    const auto again = segment_positions(concat, 0.0);
    ASSERT_EQ(again.size(), ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(again[i].snapshots, ps[i].snapshots);
  }
}

TEST(PositionDuration, Units) {
  Position closed;
  closed.open_ts = 0;
  closed.close_ts = 864000;
  EXPECT_EQ(position_duration_days(closed, 0), 10.0);

  Position current;
  current.open_ts = 100 * kDay;
  EXPECT_EQ(position_duration_days(current, 105 * kDay), 5.0);

  const auto ps = segment_positions(worked_sequence(kDay), 0.0);
  EXPECT_EQ(position_duration_days(ps[0]), 2.0);
  EXPECT_EQ(position_duration_days(ps[1]), 3.0);
  EXPECT_EQ(position_duration_days(ps[2]), 0.0);
}

std::vector<Position> positions_with_durations(const std::vector<int>& days) {
  std::vector<Snapshot> seq;
  Timestamp t = 0;
  double amount = 1.0;
  for (int d : days) {
    seq.push_back(make_snapshot(account_a(), t, {{"DAI", amount}}, {}));
    t += d * kDay;
    amount += 1.0;
  }
  seq.push_back(make_snapshot(account_a(), t, {{"DAI", amount}}, {}));
  auto ps = segment_positions(seq, 0.0);
  ps.pop_back();  // the trailing current position only closes the last one
  return ps;
}

TEST(FilterShortTerm, BoundaryIsKept) {
  const auto ps = positions_with_durations({5, 10, 30});
  const auto kept = filter_short_term(ps, 10);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(position_duration_days(kept[0]), 10.0);
  EXPECT_EQ(position_duration_days(kept[1]), 30.0);
  EXPECT_EQ(filter_short_term(ps, 0).size(), 3u);
  EXPECT_TRUE(filter_short_term(positions_with_durations({1, 1, 1}), 10).empty());
}

TEST(FilterShortTerm, Idempotent) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> days;
    for (int i = 0; i < 20; ++i) days.push_back(1 + static_cast<int>(rng.below(30)));
    const auto once = filter_short_term(positions_with_durations(days));
    const auto twice = filter_short_term(once);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].open_ts, twice[i].open_ts);
  }
}

TEST(SplitCurrent, Cases) {
  auto ps = segment_positions(worked_sequence(), 0.0);
  auto [closed, current] = split_current(ps);
  EXPECT_EQ(closed.size(), 2u);
  EXPECT_EQ(current.size(), 1u);

  auto all_closed = positions_with_durations({3, 4});
  auto [c2, cur2] = split_current(all_closed);
  EXPECT_EQ(c2.size(), 2u);
  EXPECT_TRUE(cur2.empty());

  auto single = segment_positions({make_snapshot(account_a(), 0, {{"DAI", 1.0}}, {})});
  auto [c3, cur3] = split_current(single);
  EXPECT_TRUE(c3.empty());
  EXPECT_EQ(cur3.size(), 1u);
}

TEST(LabelDelinquency, DipInsideWindow) {
  std::vector<Snapshot> seq;
  for (int d = 0; d <= 120; ++d) seq.push_back(with_hf(d * kDay, d == 30 ? 0.95 : 1.5));
  const auto lp = label_delinquency(single_position(seq));
  EXPECT_EQ(lp.label, 1);
  EXPECT_EQ(lp.observed_days, 90.0);
}

TEST(LabelDelinquency, DipAfterWindowIgnored) {
  std::vector<Snapshot> seq;
  for (int d = 0; d <= 120; ++d) seq.push_back(with_hf(d * kDay, d == 100 ? 0.5 : 1.5));
  EXPECT_EQ(label_delinquency(single_position(seq)).label, 0);
  EXPECT_EQ(label_delinquency(single_position(seq), 100).label, 1);
}

TEST(LabelDelinquency, WindowBoundaryInclusive) {
  std::vector<Snapshot> seq = {with_hf(0, 1.5), with_hf(90 * kDay, 0.99), with_hf(90 * kDay + 1, 0.5)};
  EXPECT_EQ(delinquency_label(single_position(seq)), 1);
  seq[1].health_factor = 1.0;
  EXPECT_EQ(delinquency_label(single_position(seq)), 0);
}

TEST(LabelDelinquency, InfiniteHfIsNeverDelinquent) {
  std::vector<Snapshot> seq;
  for (int d = 0; d < 20; ++d) seq.push_back(with_hf(d * kDay, kInf, {}));
  const auto lp = label_delinquency(single_position(seq));
  EXPECT_EQ(lp.label, 0);
  EXPECT_EQ(lp.observed_days, 19.0);
}

TEST(LabelDelinquency, MonotoneInWindow) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Snapshot> seq;
    for (int d = 0; d < 60; ++d) seq.push_back(with_hf(d * 3 * kDay, rng.uniform(0.97, 3.0)));
    const auto p = single_position(seq);
    int prev = 0;
    for (double w = 0; w <= 200; w += 5) {
      const int y = delinquency_label(p, w);
      EXPECT_GE(y, prev);
      prev = y;
    }
  }
}

}  // namespace
}  // namespace credscore

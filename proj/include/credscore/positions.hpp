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

// Positions: contiguous runs of snapshots with unchanged borrow and collateral
// counters. Each run gets its own temporal index, so a position that reappears
// later with identical counters is still a new position.

#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "credscore/data_model.hpp"

namespace credscore {

inline constexpr double kDefaultSegmentTolerance = 0.005;
inline constexpr double kDefaultMinHoldDays = 10.0;
inline constexpr double kDefaultWindowDays = 90.0;

struct Position {
  AccountId account;
  int index = 0;
  Timestamp open_ts = 0;
  std::optional<Timestamp> close_ts;  // empty while the position is current
  std::vector<Snapshot> snapshots;

  bool is_current() const noexcept { return !close_ts.has_value(); }
  const Snapshot& opening() const { return snapshots.front(); }
  bool has_borrows() const { return !snapshots.front().borrows.empty(); }
};

struct LabeledPosition {
  Position position;
  int label = 0;
  double observed_days = 0.0;
};

// Same asset set and every amount within `rel_tolerance` relative error.
inline bool counters_match(const AssetCounter& a, const AssetCounter& b, double rel_tolerance) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const double x = ia->second;
    const double y = ib->second;
    if (std::abs(x - y) > rel_tolerance * std::max(std::abs(x), std::abs(y))) return false;
  }
  return true;
}

inline bool same_position(const Snapshot& prev, const Snapshot& next, double rel_tolerance) {
  return counters_match(prev.collateral, next.collateral, rel_tolerance) &&
         counters_match(prev.borrows, next.borrows, rel_tolerance);
}

// Consecutive snapshots are compared pairwise; any violation opens a new
// position. The close time of position i is the open time of position i+1.
inline std::vector<Position> segment_positions(const std::vector<Snapshot>& snapshots,
                                               double rel_tolerance = kDefaultSegmentTolerance) {
  if (rel_tolerance < 0.0) throw std::invalid_argument("segmentation tolerance must be >= 0");
  std::vector<Position> out;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const Snapshot& s = snapshots[i];
    if (i > 0 && s.timestamp <= snapshots[i - 1].timestamp)
      throw std::invalid_argument("segment_positions: snapshots of " + s.account.str() + " are not strictly increasing in time");
    if (i > 0 && s.account != snapshots[i - 1].account)
      throw std::invalid_argument("segment_positions: snapshots belong to more than one account");
    if (out.empty() || !same_position(snapshots[i - 1], s, rel_tolerance)) {
      if (!out.empty()) out.back().close_ts = s.timestamp;
      Position p;
      p.account = s.account;
      p.index = static_cast<int>(out.size());
      p.open_ts = s.timestamp;
      out.push_back(std::move(p));
    }
    out.back().snapshots.push_back(s);
  }
  return out;
}

inline double position_duration_days(const Position& p, Timestamp account_last_ts) {
  const Timestamp end = p.close_ts ? *p.close_ts : account_last_ts;
  return static_cast<double>(end - p.open_ts) / kSecondsPerDay;
}

// The current position always holds the account's last snapshot.
inline double position_duration_days(const Position& p) {
  return position_duration_days(p, p.snapshots.back().timestamp);
}

// Keeps positions held for at least `min_days`; shorter ones are dropped.
inline std::vector<Position> filter_short_term(std::vector<Position> positions, double min_days = kDefaultMinHoldDays) {
  std::erase_if(positions, [&](const Position& p) { return position_duration_days(p) < min_days; });
  return positions;
}

inline std::pair<std::vector<Position>, std::vector<Position>> split_current(std::vector<Position> positions) {
  std::pair<std::vector<Position>, std::vector<Position>> out;
  for (auto& p : positions) (p.is_current() ? out.second : out.first).push_back(std::move(p));
  return out;
}

// Label 1 iff a member snapshot inside the first `window_days` of the position
// has HF < 1. Positions that end before the window closes are labeled over
// their observed lifetime.
inline int delinquency_label(const Position& p, double window_days = kDefaultWindowDays) {
  const double horizon = static_cast<double>(p.open_ts) + window_days * kSecondsPerDay;
  for (const auto& s : p.snapshots) {
    if (static_cast<double>(s.timestamp) > horizon) break;
    if (s.health_factor < 1.0) return 1;
  }
  return 0;
}

inline LabeledPosition label_delinquency(Position p, double window_days = kDefaultWindowDays) {
  LabeledPosition out;
  out.label = delinquency_label(p, window_days);
  out.observed_days = std::min(position_duration_days(p), window_days);
  out.position = std::move(p);
  return out;
}

}  // namespace credscore

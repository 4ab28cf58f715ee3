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

// Health factor:
//
//        sum_i collateral_i [ETH] * liquidation_threshold_i
//   HF = --------------------------------------------------
//                    total borrows [ETH]
//
// HF < 1 means the position is eligible for liquidation. A position without
// debt has HF = +inf.

#pragma once

#include <string>
#include <vector>

#include "credscore/data_model.hpp"

namespace credscore {

inline constexpr double kDefaultHfTolerance = 1e-6;

inline double collateral_value_weighted(const AssetCounter& collateral, Timestamp t, const PriceTable& prices,
                                        const AssetRegistry& registry) {
  double total = 0.0;
  for (const auto& [asset, amount] : collateral)
    total += amount * prices.at(asset, t) * registry.at(asset).liquidation_threshold;
  return total;
}

// Unweighted ETH value of a counter.
inline double counter_value(const AssetCounter& counter, Timestamp t, const PriceTable& prices) {
  double total = 0.0;
  for (const auto& [asset, amount] : counter) total += amount * prices.at(asset, t);
  return total;
}

inline double borrow_value(const AssetCounter& borrows, Timestamp t, const PriceTable& prices) {
  return counter_value(borrows, t, prices);
}

inline double compute_health_factor(const AssetCounter& collateral, const AssetCounter& borrows, Timestamp t,
                                    const PriceTable& prices, const AssetRegistry& registry) {
  const double debt = borrow_value(borrows, t, prices);
  const double weighted = collateral_value_weighted(collateral, t, prices, registry);
  if (debt == 0.0) return kInf;
  return weighted / debt;
}

inline bool is_liquidatable(double health_factor) { return health_factor < 1.0; }

struct HfDivergence {
  AccountId account;
  Timestamp timestamp = 0;
  double stored = 0.0;
  double recomputed = 0.0;
};

// Relative deviation of a stored health factor from its recomputation. Infinite
// values match only each other.
inline double hf_relative_error(double stored, double recomputed) {
  if (std::isinf(stored) || std::isinf(recomputed)) return stored == recomputed ? 0.0 : kInf;
  if (recomputed == 0.0) return stored == 0.0 ? 0.0 : kInf;
  return std::abs(stored - recomputed) / std::abs(recomputed);
}

// Snapshots whose stored HF differs from the recomputed one by more than
// `tolerance` (relative). Snapshots whose recomputation fails for lack of price
// or registry data are skipped; validate_dataset reports those separately.
inline std::vector<HfDivergence> recheck_stored_hf(const SnapshotMap& snapshots, const PriceTable& prices,
                                                   const AssetRegistry& registry,
                                                   double tolerance = kDefaultHfTolerance) {
  std::vector<HfDivergence> out;
  for (const auto& [account, seq] : snapshots) {
    for (const auto& s : seq) {
      double recomputed;
      try {
        recomputed = compute_health_factor(s.collateral, s.borrows, s.timestamp, prices, registry);
      } catch (const DataError&) {
        continue;
      }
      if (hf_relative_error(s.health_factor, recomputed) > tolerance)
        out.push_back({account, s.timestamp, s.health_factor, recomputed});
    }
  }
  return out;
}

}  // namespace credscore

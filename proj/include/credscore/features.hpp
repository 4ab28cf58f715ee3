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

// Features describing an account at the instant it opens a position. History
// aggregates use only snapshots strictly before the opening snapshot; the
// opening-state features (opening_hf .. collateral_value_eth) use the opening
// snapshot itself. Nothing after open_ts is read.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "credscore/health.hpp"
#include "credscore/positions.hpp"

namespace credscore {

enum Feature : std::size_t {
  kAccountAgeDays,
  kNPriorPositions,
  kPriorDelinquencyFrequency,
  kPriorHfLt1Count,
  kPriorHfMin,
  kPriorHfMax,
  kPriorHfMean,
  kPriorHfStd,
  kPriorSnapshotCount,
  kOpeningHf,
  kNBorrowAssets,
  kNCollateralAssets,
  kStableBorrowFraction,
  kStableCollateralFraction,
  kBorrowValueEth,
  kCollateralValueEth,
  kDaysSincePrevPosition,
  kNumFeatures
};

inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "account_age_days",
      "n_prior_positions",
      "prior_delinquency_frequency",
      "prior_hf_lt1_count",
      "prior_hf_min",
      "prior_hf_max",
      "prior_hf_mean",
      "prior_hf_std",
      "prior_snapshot_count",
      "opening_hf",
      "n_borrow_assets",
      "n_collateral_assets",
      "stable_borrow_fraction",
      "stable_collateral_fraction",
      "borrow_value_eth",
      "collateral_value_eth",
      "days_since_prev_position",
  };
  return names;
}

// Masked entries carry 0.0.
struct FeatureVector {
  std::vector<double> values = std::vector<double>(kNumFeatures, 0.0);
  std::vector<bool> missing = std::vector<bool>(kNumFeatures, false);

  void set(Feature f, double v) {
    values[f] = v;
    missing[f] = false;
  }
  void mask(Feature f) {
    values[f] = 0.0;
    missing[f] = true;
  }
  bool is_missing(Feature f) const { return missing[f]; }
  double operator[](Feature f) const { return values[f]; }

  bool operator==(const FeatureVector&) const = default;
};

struct FeatureConfig {
  double window_days = kDefaultWindowDays;
  double min_hold_days = kDefaultMinHoldDays;
};

// A position that contributes a label: it carries debt and was held long enough.
inline bool is_labelable(const Position& p, double min_hold_days) {
  return p.has_borrows() && position_duration_days(p) >= min_hold_days;
}

// Features of `positions[target]`, given the full segmentation of its account.
inline FeatureVector extract_features(const std::vector<Position>& positions, std::size_t target,
                                      const PriceTable& prices, const AssetRegistry& registry,
                                      const FeatureConfig& config = {}) {
  if (target >= positions.size()) throw std::out_of_range("extract_features: position index out of range");
  const Position& p = positions[target];
  const Snapshot& open = p.opening();
  FeatureVector fv;

  fv.set(kAccountAgeDays, static_cast<double>(open.timestamp - positions.front().open_ts) / kSecondsPerDay);
  fv.set(kNPriorPositions, static_cast<double>(target));

  int labeled = 0;
  int delinquent = 0;
  std::size_t n_snapshots = 0;
  std::size_t n_below = 0;
  std::size_t n_finite = 0;
  double hf_min = std::numeric_limits<double>::infinity();
  double hf_max = -std::numeric_limits<double>::infinity();
  double hf_sum = 0.0;
  for (std::size_t j = 0; j < target; ++j) {
    const Position& prior = positions[j];
    if (is_labelable(prior, config.min_hold_days)) {
      ++labeled;
      delinquent += delinquency_label(prior, config.window_days);
    }
    for (const auto& s : prior.snapshots) {
      ++n_snapshots;
      if (s.health_factor < 1.0) ++n_below;
      if (std::isfinite(s.health_factor)) {
        ++n_finite;
        hf_min = std::min(hf_min, s.health_factor);
        hf_max = std::max(hf_max, s.health_factor);
        hf_sum += s.health_factor;
      }
    }
  }

  if (labeled > 0) {
    fv.set(kPriorDelinquencyFrequency, static_cast<double>(delinquent) / labeled);
  } else {
    fv.mask(kPriorDelinquencyFrequency);
  }
  fv.set(kPriorHfLt1Count, static_cast<double>(n_below));
  if (n_finite > 0) {
    // Rounding in the running sum may push the mean a hair outside [min, max].
    const double mean = std::clamp(hf_sum / static_cast<double>(n_finite), hf_min, hf_max);
    double ss = 0.0;
    for (std::size_t j = 0; j < target; ++j)
      for (const auto& s : positions[j].snapshots)
        if (std::isfinite(s.health_factor)) ss += (s.health_factor - mean) * (s.health_factor - mean);
    fv.set(kPriorHfMin, hf_min);
    fv.set(kPriorHfMax, hf_max);
    fv.set(kPriorHfMean, mean);
    fv.set(kPriorHfStd, std::sqrt(ss / static_cast<double>(n_finite)));
  } else {
    fv.mask(kPriorHfMin);
    fv.mask(kPriorHfMax);
    fv.mask(kPriorHfMean);
    fv.mask(kPriorHfStd);
  }
  fv.set(kPriorSnapshotCount, static_cast<double>(n_snapshots));

  if (std::isfinite(open.health_factor)) {
    fv.set(kOpeningHf, open.health_factor);
  } else {
    fv.mask(kOpeningHf);
  }
  fv.set(kNBorrowAssets, static_cast<double>(open.borrows.size()));
  fv.set(kNCollateralAssets, static_cast<double>(open.collateral.size()));

  auto stable_fraction = [&](const AssetCounter& counter, Feature f, Feature value_feature) {
    double total = 0.0;
    double stable = 0.0;
    for (const auto& [asset, amount] : counter) {
      const double v = amount * prices.at(asset, open.timestamp);
      total += v;
      if (registry.at(asset).is_stablecoin) stable += v;
    }
    fv.set(value_feature, total);
    if (total > 0.0) {
      fv.set(f, stable / total);
    } else {
      fv.mask(f);
    }
  };
  stable_fraction(open.borrows, kStableBorrowFraction, kBorrowValueEth);
  stable_fraction(open.collateral, kStableCollateralFraction, kCollateralValueEth);

  if (target > 0) {
    fv.set(kDaysSincePrevPosition, static_cast<double>(p.open_ts - positions[target - 1].open_ts) / kSecondsPerDay);
  } else {
    fv.mask(kDaysSincePrevPosition);
  }
  return fv;
}

}  // namespace credscore

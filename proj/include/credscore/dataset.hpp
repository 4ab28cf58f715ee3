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

// Snapshots -> labeled, featurized position rows.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <tuple>
#include <vector>

#include "credscore/features.hpp"
#include "credscore/matrix.hpp"
#include "credscore/positions.hpp"

namespace credscore {

struct PipelineConfig {
  double window_days = kDefaultWindowDays;
  double min_hold_days = kDefaultMinHoldDays;
  double segment_tolerance = kDefaultSegmentTolerance;

  FeatureConfig features() const { return {window_days, min_hold_days}; }
};

struct DatasetRow {
  AccountId account;
  int position_index = 0;
  Timestamp open_ts = 0;
  std::optional<Timestamp> close_ts;
  double duration_days = 0.0;
  int label = 0;
  FeatureVector features;

  bool operator==(const DatasetRow&) const = default;
};

// Closed positions form the training set; current positions are scored.
struct Dataset {
  std::vector<DatasetRow> training;
  std::vector<DatasetRow> current;
};

// Holdout order: open time, then account, then position index.
inline void sort_rows(std::vector<DatasetRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const DatasetRow& a, const DatasetRow& b) {
    return std::tie(a.open_ts, a.account, a.position_index) < std::tie(b.open_ts, b.account, b.position_index);
  });
}

// Positions without debt and positions held for less than min_hold_days are
// dropped from both sets; they still feed the history features of later rows.
inline Dataset build_dataset(const SnapshotMap& snapshots, const AssetRegistry& registry, const PriceTable& prices,
                             const PipelineConfig& config = {}) {
  Dataset out;
  for (const auto& [account, seq] : snapshots) {
    const auto positions = segment_positions(seq, config.segment_tolerance);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const Position& p = positions[i];
      if (!is_labelable(p, config.min_hold_days)) continue;
      DatasetRow row;
      row.account = account;
      row.position_index = p.index;
      row.open_ts = p.open_ts;
      row.close_ts = p.close_ts;
      row.duration_days = position_duration_days(p);
      row.label = delinquency_label(p, config.window_days);
      row.features = extract_features(positions, i, prices, registry, config.features());
      (p.is_current() ? out.current : out.training).push_back(std::move(row));
    }
  }
  sort_rows(out.training);
  sort_rows(out.current);
  return out;
}

inline std::vector<int> labels_of(const std::vector<DatasetRow>& rows) {
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = rows[i].label;
  return y;
}

enum class MissingEncoding {
  kZero,  // masked values stay 0.0 (linear model)
  kNaN,   // masked values become NaN and follow the tree's default direction
};

// Columns: the feature values followed by one 0/1 mask column per feature.
inline Matrix design_matrix(const std::vector<DatasetRow>& rows, MissingEncoding encoding) {
  const std::size_t d = kNumFeatures;
  Matrix X(rows.size(), 2 * d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const FeatureVector& f = rows[r].features;
    for (std::size_t c = 0; c < d; ++c) {
      const bool miss = f.missing[c];
      X(r, c) = miss && encoding == MissingEncoding::kNaN ? std::nan("") : f.values[c];
      X(r, d + c) = miss ? 1.0 : 0.0;
    }
  }
  return X;
}

// ------------------------------------------------------------
// exports
// ------------------------------------------------------------

inline void write_labeled_positions(const std::vector<DatasetRow>& rows, std::ostream& out) {
  out << "account,position_index,open_ts,close_ts,duration_days,label\n";
  for (const auto& r : rows) {
    out << r.account << ',' << r.position_index << ',' << r.open_ts << ',';
    if (r.close_ts) out << *r.close_ts;
    out << ',' << format_double(r.duration_days) << ',' << r.label << '\n';
  }
}

inline void write_feature_matrix(const std::vector<DatasetRow>& rows, std::ostream& out) {
  const auto& names = feature_names();
  out << "account,position_index,open_ts,label";
  for (const auto& n : names) out << ',' << n;
  for (const auto& n : names) out << ',' << n << "_missing";
  out << '\n';
  for (const auto& r : rows) {
    out << r.account << ',' << r.position_index << ',' << r.open_ts << ',' << r.label;
    for (double v : r.features.values) out << ',' << format_double(v);
    for (bool m : r.features.missing) out << ',' << (m ? 1 : 0);
    out << '\n';
  }
}

}  // namespace credscore

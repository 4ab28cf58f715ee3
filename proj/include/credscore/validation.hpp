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

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "credscore/data_model.hpp"
#include "credscore/health.hpp"

namespace credscore {

struct ValidationIssue {
  enum class Kind { kHfDeviation, kMissingRegistry, kMissingPrice, kTimestampOrder };

  Kind kind;
  AccountId account;
  Timestamp timestamp = 0;
  std::string detail;
};

inline const char* to_string(ValidationIssue::Kind k) {
  switch (k) {
    case ValidationIssue::Kind::kHfDeviation: return "hf_deviation";
    case ValidationIssue::Kind::kMissingRegistry: return "missing_registry";
    case ValidationIssue::Kind::kMissingPrice: return "missing_price";
    case ValidationIssue::Kind::kTimestampOrder: return "timestamp_order";
  }
  return "unknown";
}

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const noexcept { return issues.empty(); }
  std::size_t size() const noexcept { return issues.size(); }

  std::size_t count(ValidationIssue::Kind k) const {
    std::size_t n = 0;
    for (const auto& i : issues) n += i.kind == k;
    return n;
  }
};

// Problems are collected, never thrown.
inline ValidationReport validate_dataset(const SnapshotMap& snapshots, const AssetRegistry& registry,
                                         const PriceTable& prices, double tolerance = kDefaultHfTolerance) {
  ValidationReport report;
  using Kind = ValidationIssue::Kind;

  // Coverage: each missing registry entry is reported once per asset, each
  // missing price once per (account, timestamp, asset).
  std::set<std::string> unregistered;
  for (const auto& [account, seq] : snapshots) {
    for (const auto& s : seq) {
      for (const AssetCounter* counter : {&s.collateral, &s.borrows}) {
        for (const auto& [asset, amount] : *counter) {
          if (!registry.contains(asset) && unregistered.insert(asset).second)
            report.issues.push_back({Kind::kMissingRegistry, account, s.timestamp, "asset " + asset + " has no registry entry"});
          if (!prices.find(asset, s.timestamp))
            report.issues.push_back({Kind::kMissingPrice, account, s.timestamp, "no price for " + asset});
        }
      }
    }
  }

  for (const auto& d : recheck_stored_hf(snapshots, prices, registry, tolerance)) {
    report.issues.push_back({Kind::kHfDeviation, d.account, d.timestamp,
                             "stored " + format_double(d.stored) + " vs recomputed " + format_double(d.recomputed)});
  }

  for (const auto& [account, seq] : snapshots) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (seq[i].timestamp <= seq[i - 1].timestamp)
        report.issues.push_back({Kind::kTimestampOrder, account, seq[i].timestamp, "timestamps not strictly increasing"});
    }
  }
  return report;
}

inline void write_validation_report(const ValidationReport& report, std::ostream& out) {
  out << "kind,account,timestamp,detail\n";
  for (const auto& i : report.issues) out << to_string(i.kind) << ',' << i.account << ',' << i.timestamp << ',' << i.detail << '\n';
}

}  // namespace credscore

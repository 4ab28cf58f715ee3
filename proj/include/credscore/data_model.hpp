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

// Canonical records of the health-factor dataset and their CSV encodings.
//
// Snapshots use a long format, one row per (account, timestamp, side, asset):
//
//   account,timestamp,side,asset,amount,health_factor
//   0x00..01,1609459200,collateral,DAI,1000,11.25
//   0x00..01,1609459200,borrow,ETH,0.1,11.25
//
// The health factor is repeated on every row of a snapshot; `inf` marks a
// snapshot without debt.

#pragma once

#include <algorithm>
#include <compare>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "credscore/common.hpp"

namespace credscore {

// ------------------------------------------------------------
// identifiers
// ------------------------------------------------------------

class AccountId {
 public:
  AccountId() = default;

  // Throws std::invalid_argument unless `address` matches 0x[0-9a-f]{40}.
  explicit AccountId(std::string address) : address_(std::move(address)) {
    if (!is_valid(address_)) throw std::invalid_argument("invalid account id: '" + address_ + "'");
  }

  static bool is_valid(std::string_view s) {
    if (s.size() != 42 || s[0] != '0' || s[1] != 'x') return false;
    return std::all_of(s.begin() + 2, s.end(), [](char c) {
      return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
  }

  const std::string& str() const noexcept { return address_; }

  auto operator<=>(const AccountId&) const = default;

 private:
  std::string address_;
};

inline std::ostream& operator<<(std::ostream& os, const AccountId& id) { return os << id.str(); }

inline bool is_valid_asset_symbol(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

// ------------------------------------------------------------
// AssetCounter
// ------------------------------------------------------------

// Asset -> non-negative amount. Zero amounts are never stored, so a counter that
// had an asset set to zero compares equal to one that never held it.
class AssetCounter {
 public:
  using Map = std::map<std::string, double>;

  AssetCounter() = default;
  AssetCounter(std::initializer_list<std::pair<const std::string, double>> entries) {
    for (const auto& [asset, amount] : entries) set(asset, amount);
  }

  void set(const std::string& asset, double amount) {
    if (!(amount >= 0.0) || !std::isfinite(amount))
      throw std::invalid_argument("asset amount must be finite and >= 0 (" + asset + ")");
    if (amount == 0.0) {
      entries_.erase(asset);
    } else {
      entries_[asset] = amount;
    }
  }

  void add(const std::string& asset, double amount) { set(asset, get(asset) + amount); }

  double get(const std::string& asset) const {
    auto it = entries_.find(asset);
    return it == entries_.end() ? 0.0 : it->second;
  }

  bool contains(const std::string& asset) const { return entries_.count(asset) != 0; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  bool operator==(const AssetCounter&) const = default;

 private:
  Map entries_;
};

// ------------------------------------------------------------
// Snapshot
// ------------------------------------------------------------

struct Snapshot {
  AccountId account;
  Timestamp timestamp = 0;
  AssetCounter collateral;
  AssetCounter borrows;
  double health_factor = kInf;  // +inf when there is no debt

  bool operator==(const Snapshot&) const = default;
};

// Per-account, time-sorted snapshot streams.
using SnapshotMap = std::map<AccountId, std::vector<Snapshot>>;

enum class SnapshotFileFormat { kLongCsv };

// ------------------------------------------------------------
// AssetRegistry
// ------------------------------------------------------------

struct AssetInfo {
  double liquidation_threshold = 1.0;
  bool is_stablecoin = false;

  bool operator==(const AssetInfo&) const = default;
};

class AssetRegistry {
 public:
  void add(const std::string& asset, AssetInfo info) {
    if (!is_valid_asset_symbol(asset)) throw std::invalid_argument("invalid asset symbol: '" + asset + "'");
    if (!(info.liquidation_threshold > 0.0 && info.liquidation_threshold <= 1.0))
      throw std::invalid_argument("liquidation threshold for " + asset + " must be in (0, 1]");
    if (!entries_.emplace(asset, info).second) throw std::invalid_argument("duplicate asset " + asset);
  }

  const AssetInfo& at(const std::string& asset) const {
    auto it = entries_.find(asset);
    if (it == entries_.end()) throw DataError("asset " + asset + " missing from registry");
    return it->second;
  }

  bool contains(const std::string& asset) const { return entries_.count(asset) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<std::string, AssetInfo> entries_;
};

// ------------------------------------------------------------
// PriceTable
// ------------------------------------------------------------

// ETH-denominated prices with backward step interpolation: a lookup resolves to
// the latest price at or before the requested time. Looking up before an asset's
// first price is an error; after its last price the last value carries forward.
class PriceTable {
 public:
  void add(const std::string& asset, Timestamp t, double price_eth) {
    if (!(price_eth > 0.0) || !std::isfinite(price_eth))
      throw std::invalid_argument("price of " + asset + " must be positive");
    if (!series_[asset].emplace(t, price_eth).second)
      throw std::invalid_argument("duplicate price for (" + std::to_string(t) + ", " + asset + ")");
  }

  std::optional<double> find(const std::string& asset, Timestamp t) const {
    auto sit = series_.find(asset);
    if (sit == series_.end()) return std::nullopt;
    const auto& series = sit->second;
    auto it = series.upper_bound(t);
    if (it == series.begin()) return std::nullopt;
    return std::prev(it)->second;
  }

  double at(const std::string& asset, Timestamp t) const {
    if (auto p = find(asset, t)) return *p;
    throw DataError("no price for " + asset + " at or before t=" + std::to_string(t));
  }

  bool has_asset(const std::string& asset) const { return series_.count(asset) != 0; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [asset, series] : series_) n += series.size();
    return n;
  }

  const std::map<std::string, std::map<Timestamp, double>>& series() const { return series_; }

 private:
  std::map<std::string, std::map<Timestamp, double>> series_;
};

// ------------------------------------------------------------
// parsing
// ------------------------------------------------------------

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

inline void expect_header(std::istream& in, std::string_view expected) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header, expected '" + std::string(expected) + "'", 1);
  if (strip_cr(line) != expected)
    throw ParseError("unexpected header '" + std::string(strip_cr(line)) + "', expected '" +
                         std::string(expected) + "'",
                     1, 1);
}

inline void expect_fields(const std::vector<std::string_view>& fields, std::size_t n, std::size_t line) {
  if (fields.size() != n)
    throw ParseError("expected " + std::to_string(n) + " fields, found " + std::to_string(fields.size()), line);
}

}  // namespace detail

inline constexpr std::string_view kSnapshotHeader = "account,timestamp,side,asset,amount,health_factor";
inline constexpr std::string_view kRegistryHeader = "asset,liquidation_threshold,is_stablecoin";
inline constexpr std::string_view kPriceHeader = "timestamp,asset,price_eth";

inline SnapshotMap parse_snapshots(std::istream& in) {
  detail::expect_header(in, kSnapshotHeader);

  struct Group {
    Snapshot snapshot;
    std::size_t first_line;
  };
  std::map<AccountId, std::map<Timestamp, Group>> groups;
  std::set<std::tuple<std::string, Timestamp, bool, std::string>> seen;

  std::string raw;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    detail::expect_fields(f, 6, line_no);

    if (!AccountId::is_valid(f[0])) throw ParseError("invalid account '" + std::string(f[0]) + "'", line_no, column_of(f, 0));
    Timestamp ts;
    if (!parse_int64(f[1], ts)) throw ParseError("invalid timestamp '" + std::string(f[1]) + "'", line_no, column_of(f, 1));
    bool is_borrow;
    if (f[2] == "collateral") {
      is_borrow = false;
    } else if (f[2] == "borrow") {
      is_borrow = true;
    } else {
      throw ParseError("side must be 'collateral' or 'borrow', got '" + std::string(f[2]) + "'", line_no, column_of(f, 2));
    }
    if (!is_valid_asset_symbol(f[3])) throw ParseError("invalid asset '" + std::string(f[3]) + "'", line_no, column_of(f, 3));
    double amount;
    if (!parse_double(f[4], amount) || amount < 0.0)
      throw ParseError("invalid amount '" + std::string(f[4]) + "'", line_no, column_of(f, 4));
    double hf;
    if (f[5] == "inf") {
      hf = kInf;
    } else if (!parse_double(f[5], hf) || hf < 0.0) {
      throw ParseError("invalid health_factor '" + std::string(f[5]) + "'", line_no, column_of(f, 5));
    }

    const std::string asset(f[3]);
    if (!seen.emplace(std::string(f[0]), ts, is_borrow, asset).second)
      throw ParseError("duplicate row for (account, timestamp, side, asset)", line_no);

    AccountId account{std::string(f[0])};
    auto [it, inserted] = groups[account].try_emplace(ts);
    Group& g = it->second;
    if (inserted) {
      g.snapshot.account = account;
      g.snapshot.timestamp = ts;
      g.snapshot.health_factor = hf;
      g.first_line = line_no;
    } else if (g.snapshot.health_factor != hf) {
      throw ParseError("health_factor differs from line " + std::to_string(g.first_line) +
                           " for the same (account, timestamp)",
                       line_no, column_of(f, 5));
    }
    (is_borrow ? g.snapshot.borrows : g.snapshot.collateral).set(asset, amount);
  }

  SnapshotMap out;
  for (auto& [account, by_time] : groups) {
    auto& seq = out[account];
    seq.reserve(by_time.size());
    for (auto& [ts, g] : by_time) seq.push_back(std::move(g.snapshot));
  }
  return out;
}

inline SnapshotMap parse_snapshots(const std::string& path, SnapshotFileFormat = SnapshotFileFormat::kLongCsv) {
  auto in = detail::open_input(path);
  return parse_snapshots(in);
}

inline AssetRegistry parse_asset_registry(std::istream& in) {
  std::string raw;
  // An empty file is an empty registry.
  if (in.peek() == std::char_traits<char>::eof()) return {};
  detail::expect_header(in, kRegistryHeader);
  AssetRegistry registry;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    detail::expect_fields(f, 3, line_no);
    if (!is_valid_asset_symbol(f[0])) throw ParseError("invalid asset '" + std::string(f[0]) + "'", line_no, 1);
    double lt;
    if (!parse_double(f[1], lt)) throw ParseError("invalid liquidation_threshold", line_no, column_of(f, 1));
    if (!(lt > 0.0 && lt <= 1.0))
      throw ParseError("liquidation_threshold " + std::string(f[1]) + " outside (0, 1]", line_no, column_of(f, 1));
    bool stable;
    if (f[2] == "true") {
      stable = true;
    } else if (f[2] == "false") {
      stable = false;
    } else {
      throw ParseError("is_stablecoin must be 'true' or 'false'", line_no, column_of(f, 2));
    }
    const std::string asset(f[0]);
    if (registry.contains(asset)) throw ParseError("duplicate asset " + asset, line_no, 1);
    registry.add(asset, {lt, stable});
  }
  return registry;
}

inline AssetRegistry parse_asset_registry(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_asset_registry(in);
}

inline PriceTable parse_price_table(std::istream& in) {
  detail::expect_header(in, kPriceHeader);
  PriceTable table;
  std::string raw;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    detail::expect_fields(f, 3, line_no);
    Timestamp ts;
    if (!parse_int64(f[0], ts)) throw ParseError("invalid timestamp", line_no, 1);
    if (!is_valid_asset_symbol(f[1])) throw ParseError("invalid asset", line_no, column_of(f, 1));
    double price;
    if (!parse_double(f[2], price) || price <= 0.0)
      throw ParseError("price must be a positive number", line_no, column_of(f, 2));
    const std::string asset(f[1]);
    if (table.has_asset(asset) && table.series().at(asset).count(ts))
      throw ParseError("duplicate price for (" + std::string(f[0]) + ", " + asset + ")", line_no);
    table.add(asset, ts, price);
  }
  return table;
}

inline PriceTable parse_price_table(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_price_table(in);
}

// ------------------------------------------------------------
// writing
// ------------------------------------------------------------

// Every snapshot must hold at least one asset: the long format has no row for an
// empty snapshot.
inline void write_snapshots(const SnapshotMap& snapshots, std::ostream& out) {
  out << kSnapshotHeader << '\n';
  for (const auto& [account, seq] : snapshots) {
    for (const auto& s : seq) {
      if (s.collateral.empty() && s.borrows.empty())
        throw std::invalid_argument("snapshot of " + account.str() + " at t=" + std::to_string(s.timestamp) +
                                    " has no assets and cannot be written");
      const std::string hf = format_double(s.health_factor);
      for (const auto& [asset, amount] : s.collateral)
        out << account << ',' << s.timestamp << ",collateral," << asset << ',' << format_double(amount) << ',' << hf << '\n';
      for (const auto& [asset, amount] : s.borrows)
        out << account << ',' << s.timestamp << ",borrow," << asset << ',' << format_double(amount) << ',' << hf << '\n';
    }
  }
}

inline void write_snapshots(const SnapshotMap& snapshots, const std::string& path,
                            SnapshotFileFormat = SnapshotFileFormat::kLongCsv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_snapshots(snapshots, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_asset_registry(const AssetRegistry& registry, std::ostream& out) {
  out << kRegistryHeader << '\n';
  for (const auto& [asset, info] : registry)
    out << asset << ',' << format_double(info.liquidation_threshold) << ',' << (info.is_stablecoin ? "true" : "false") << '\n';
}

inline void write_price_table(const PriceTable& prices, std::ostream& out) {
  out << kPriceHeader << '\n';
  // Time-major order reads naturally and keeps files diff-friendly.
  std::map<Timestamp, std::vector<std::pair<std::string, double>>> by_time;
  for (const auto& [asset, series] : prices.series())
    for (const auto& [t, p] : series) by_time[t].emplace_back(asset, p);
  for (const auto& [t, row] : by_time)
    for (const auto& [asset, p] : row) out << t << ',' << asset << ',' << format_double(p) << '\n';
}

}  // namespace credscore

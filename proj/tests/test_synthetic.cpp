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

#include <sstream>

#include "test_util.hpp"

namespace credscore {
namespace {

SyntheticConfig small_config(double signal = 0.0, std::uint64_t seed = 42) {
  SyntheticConfig c;
  c.n_accounts = 60;
  c.signal = signal;
  c.seed = seed;
  return c;
}

std::string dump(const SyntheticDataset& d) {
  std::ostringstream out;
  write_snapshots(d.snapshots, out);
  write_asset_registry(d.registry, out);
  write_price_table(d.prices, out);
  return out.str();
}

TEST(Synthetic, DeterministicPerSeed) {
  EXPECT_EQ(dump(generate_synthetic(small_config())), dump(generate_synthetic(small_config())));
  EXPECT_NE(dump(generate_synthetic(small_config(0.0, 1))), dump(generate_synthetic(small_config(0.0, 2))));
}

TEST(Synthetic, ValidatesAgainstItsOwnTables) {
  for (double signal : {0.0, 2.0}) {
    const auto d = generate_synthetic(small_config(signal));
    EXPECT_EQ(d.snapshots.size(), 60u);
    EXPECT_TRUE(validate_dataset(d.snapshots, d.registry, d.prices, 1e-9).empty());
  }
}

TEST(Synthetic, UniverseIncludesLongTail) {
  const auto d = generate_synthetic(small_config());
  EXPECT_TRUE(d.registry.contains("TK001"));
  EXPECT_TRUE(d.registry.contains("TK060"));
  EXPECT_FALSE(d.registry.contains("TK061"));
  EXPECT_TRUE(d.registry.at("DAI").is_stablecoin);
  EXPECT_FALSE(d.registry.at("TK001").is_stablecoin);
}

TEST(Synthetic, EveryAccountHasACurrentPosition) {
  const auto d = generate_synthetic(small_config());
  for (const auto& [id, seq] : d.snapshots) {
    ASSERT_GE(seq.size(), 1u);
    const auto pos = segment_positions(seq);
    ASSERT_GE(pos.size(), 1u);
    EXPECT_TRUE(pos.back().is_current());
  }
}

double delinquency_rate(const SyntheticDataset& d) {
  double n = 0, bad = 0;
  for (const auto& [id, seq] : d.snapshots) {
    for (const auto& p : filter_short_term(segment_positions(seq))) {
      if (p.is_current()) continue;
      n += 1;
      bad += delinquency_label(p);
    }
  }
  return bad / n;
}

TEST(Synthetic, SignalRaisesDelinquency) {
  auto base = small_config(0.0);
  base.n_accounts = 300;
  auto strong = base;
  strong.signal = 2.0;
  EXPECT_GT(delinquency_rate(generate_synthetic(strong)), delinquency_rate(generate_synthetic(base)));
}

TEST(Synthetic, RejectsBadConfig) {
  auto c = small_config();
  c.n_accounts = 0;
  EXPECT_THROW(generate_synthetic(c), std::invalid_argument);
  c = small_config();
  c.signal = -1;
  EXPECT_THROW(generate_synthetic(c), std::invalid_argument);
  c = small_config();
  c.collateral_only_fraction = 1.5;
  EXPECT_THROW(generate_synthetic(c), std::invalid_argument);
  c = small_config();
  c.assets = {{"ETH", 0.8, false, 1.0}, {"DAI", 0.8, true, 0.0005}};
  c.long_tail_tokens = 0;
  EXPECT_THROW(generate_synthetic(c), std::invalid_argument);
}

}  // namespace
}  // namespace credscore

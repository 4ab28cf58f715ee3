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

// The five delinquency scorers behind one fit/predict surface:
//
//   random                uniform draw, seeded
//   E(y)_lagged           the account's delinquency rate over prior positions
//   count_HF_lt_1_lagged  the account's count of prior snapshots with HF < 1
//   log-reg               logistic regression on features + missing masks
//   tree-based            boosted trees on features (NaN for missing) + masks
//
// Higher scores mean more likely delinquent.

#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "credscore/dataset.hpp"
#include "credscore/gbdt.hpp"
#include "credscore/logreg.hpp"

namespace credscore {

enum class ModelKind { kRandom, kLaggedFrequency, kLaggedHfCount, kLogReg, kTreeBased };

inline constexpr std::array<ModelKind, 5> kAllModels = {ModelKind::kRandom, ModelKind::kLaggedFrequency,
                                                        ModelKind::kLaggedHfCount, ModelKind::kLogReg,
                                                        ModelKind::kTreeBased};

inline const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::kRandom: return "random";
    case ModelKind::kLaggedFrequency: return "E(y)_lagged";
    case ModelKind::kLaggedHfCount: return "count_HF_lt_1_lagged";
    case ModelKind::kLogReg: return "log-reg";
    case ModelKind::kTreeBased: return "tree-based";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto k : kAllModels)
    if (name == model_name(k)) return k;
  return std::nullopt;
}

// ------------------------------------------------------------
// baselines
// ------------------------------------------------------------

inline std::vector<double> predict_random(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.uniform();
  return out;
}

// Accounts without prior positions score 0.
inline double predict_lagged_frequency(std::span<const int> prior_labels) {
  if (prior_labels.empty()) return 0.0;
  double s = 0.0;
  for (int y : prior_labels) s += y;
  return s / static_cast<double>(prior_labels.size());
}

inline double predict_lagged_hf_count(std::span<const Snapshot> prior_snapshots) {
  double n = 0.0;
  for (const auto& s : prior_snapshots) n += s.health_factor < 1.0;
  return n;
}

// ------------------------------------------------------------
// model variant
// ------------------------------------------------------------

struct RandomModel {
  std::uint64_t seed = 42;
  bool operator==(const RandomModel&) const = default;
};
struct LaggedFrequencyModel {
  bool operator==(const LaggedFrequencyModel&) const = default;
};
struct LaggedHfCountModel {
  bool operator==(const LaggedHfCountModel&) const = default;
};

using Model = std::variant<RandomModel, LaggedFrequencyModel, LaggedHfCountModel, LogRegModel, GbdtModel>;

inline ModelKind kind_of(const Model& m) { return static_cast<ModelKind>(m.index()); }

struct ModelConfig {
  std::uint64_t seed = 42;
  LogRegConfig logreg;
  GbdtConfig gbdt;
};

inline Model fit_model(ModelKind kind, const std::vector<DatasetRow>& rows, const ModelConfig& config = {}) {
  switch (kind) {
    case ModelKind::kRandom: return RandomModel{config.seed};
    case ModelKind::kLaggedFrequency: return LaggedFrequencyModel{};
    case ModelKind::kLaggedHfCount: return LaggedHfCountModel{};
    case ModelKind::kLogReg: {
      const auto y = labels_of(rows);
      return train_logreg(design_matrix(rows, MissingEncoding::kZero), y, config.logreg);
    }
    case ModelKind::kTreeBased: {
      const auto y = labels_of(rows);
      return train_gbdt(design_matrix(rows, MissingEncoding::kNaN), y, config.gbdt);
    }
  }
  throw std::invalid_argument("unknown model kind");
}

inline std::vector<double> predict(const Model& model, const std::vector<DatasetRow>& rows) {
  struct Visitor {
    const std::vector<DatasetRow>& rows;

    std::vector<double> operator()(const RandomModel& m) const { return predict_random(rows.size(), m.seed); }
    std::vector<double> operator()(const LaggedFrequencyModel&) const {
      std::vector<double> out(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i].features;
        out[i] = f.is_missing(kPriorDelinquencyFrequency) ? 0.0 : f[kPriorDelinquencyFrequency];
      }
      return out;
    }
    std::vector<double> operator()(const LaggedHfCountModel&) const {
      std::vector<double> out(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].features[kPriorHfLt1Count];
      return out;
    }
    std::vector<double> operator()(const LogRegModel& m) const {
      return predict_logreg(m, design_matrix(rows, MissingEncoding::kZero));
    }
    std::vector<double> operator()(const GbdtModel& m) const {
      return predict_gbdt(m, design_matrix(rows, MissingEncoding::kNaN));
    }
  };
  return std::visit(Visitor{rows}, model);
}

// ------------------------------------------------------------
// serialization
// ------------------------------------------------------------
//
//   credscore-model 1
//   kind <name>
//   ... kind-specific lines ...
//
// Reals are written in shortest round-trip form, so load(save(m)) == m.

inline constexpr std::string_view kModelMagic = "credscore-model";
inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline void write_reals(std::ostream& out, std::string_view key, const std::vector<double>& v) {
  out << key << ' ' << v.size();
  for (double x : v) out << ' ' << format_double(x);
  out << '\n';
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string s;
    if (!(in_ >> s)) throw ParseError("model file truncated");
    return s;
  }

  void expect(std::string_view key) {
    const auto s = word();
    if (s != key) throw ParseError("model file: expected '" + std::string(key) + "', found '" + s + "'");
  }

  double real() {
    const auto s = word();
    double v;
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (!parse_double(s, v)) throw ParseError("model file: bad number '" + s + "'");
    return v;
  }

  std::int64_t integer() {
    const auto s = word();
    std::int64_t v;
    if (!parse_int64(s, v)) throw ParseError("model file: bad integer '" + s + "'");
    return v;
  }

  std::uint64_t unsigned_integer() {
    const auto s = word();
    std::uint64_t v;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("model file: bad integer '" + s + "'");
    return v;
  }

  std::vector<double> reals(std::string_view key) {
    expect(key);
    const auto n = integer();
    if (n < 0) throw ParseError("model file: negative length");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = real();
    return v;
  }

 private:
  std::istream& in_;
};

inline void write_tree(std::ostream& out, const RegressionTree& tree, int id) {
  const TreeNode& n = tree.nodes[id];
  if (n.is_leaf()) {
    out << "leaf " << format_double(n.value) << '\n';
    return;
  }
  out << "split " << n.column << ' ' << format_double(n.threshold) << ' ' << (n.default_left ? 'L' : 'R') << '\n';
  write_tree(out, tree, n.left);
  write_tree(out, tree, n.right);
}

inline int read_tree(TokenReader& in, RegressionTree& tree, std::size_t columns, int depth) {
  if (depth > 64) throw ParseError("model file: tree too deep");
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  const auto tag = in.word();
  if (tag == "leaf") {
    tree.nodes[id].value = in.real();
    return id;
  }
  if (tag != "split") throw ParseError("model file: expected 'split' or 'leaf', found '" + tag + "'");
  const auto col = in.integer();
  if (col < 0 || static_cast<std::size_t>(col) >= columns) throw ParseError("model file: split column out of range");
  const double thr = in.real();
  const auto dir = in.word();
  if (dir != "L" && dir != "R") throw ParseError("model file: default direction must be L or R");
  tree.nodes[id].column = static_cast<int>(col);
  tree.nodes[id].threshold = thr;
  tree.nodes[id].default_left = dir == "L";
  const int l = read_tree(in, tree, columns, depth + 1);
  const int r = read_tree(in, tree, columns, depth + 1);
  tree.nodes[id].left = l;
  tree.nodes[id].right = r;
  return id;
}

}  // namespace detail

inline void save_model(const Model& model, std::ostream& out) {
  out << kModelMagic << ' ' << kModelFormatVersion << '\n';
  out << "kind " << model_name(kind_of(model)) << '\n';
  if (const auto* m = std::get_if<RandomModel>(&model)) {
    out << "seed " << m->seed << '\n';
  } else if (const auto* m = std::get_if<LogRegModel>(&model)) {
    out << "columns " << m->columns() << '\n';
    detail::write_reals(out, "means", m->means);
    detail::write_reals(out, "scales", m->scales);
    detail::write_reals(out, "weights", m->weights);
    out << "bias " << format_double(m->bias) << '\n';
  } else if (const auto* m = std::get_if<GbdtModel>(&model)) {
    const auto& c = m->config;
    out << "columns " << m->columns << '\n';
    out << "config rounds " << c.rounds << " max_depth " << c.max_depth << " learning_rate "
        << format_double(c.learning_rate) << " min_leaf " << c.min_leaf << " lambda " << format_double(c.lambda) << '\n';
    out << "base_score " << format_double(m->base_score) << '\n';
    out << "trees " << m->trees.size() << '\n';
    for (const auto& t : m->trees) {
      out << "tree " << t.nodes.size() << '\n';
      detail::write_tree(out, t, 0);
    }
  }
}

inline Model load_model(std::istream& in) {
  detail::TokenReader r(in);
  r.expect(kModelMagic);
  const auto version = r.integer();
  if (version != kModelFormatVersion) throw ParseError("model file: unsupported version " + std::to_string(version));
  r.expect("kind");
  const auto name = r.word();
  const auto kind = parse_model_kind(name);
  if (!kind) throw ParseError("model file: unknown kind '" + name + "'");
  switch (*kind) {
    case ModelKind::kRandom: {
      r.expect("seed");
      return RandomModel{r.unsigned_integer()};
    }
    case ModelKind::kLaggedFrequency: return LaggedFrequencyModel{};
    case ModelKind::kLaggedHfCount: return LaggedHfCountModel{};
    case ModelKind::kLogReg: {
      LogRegModel m;
      r.expect("columns");
      const auto cols = r.integer();
      m.means = r.reals("means");
      m.scales = r.reals("scales");
      m.weights = r.reals("weights");
      r.expect("bias");
      m.bias = r.real();
      const auto n = static_cast<std::size_t>(cols);
      if (cols < 0 || m.means.size() != n || m.scales.size() != n || m.weights.size() != n)
        throw ParseError("model file: inconsistent column counts");
      return m;
    }
    case ModelKind::kTreeBased: {
      GbdtModel m;
      r.expect("columns");
      const auto cols = r.integer();
      if (cols < 0) throw ParseError("model file: negative column count");
      m.columns = static_cast<std::size_t>(cols);
      r.expect("config");
      r.expect("rounds");
      m.config.rounds = static_cast<int>(r.integer());
      r.expect("max_depth");
      m.config.max_depth = static_cast<int>(r.integer());
      r.expect("learning_rate");
      m.config.learning_rate = r.real();
      r.expect("min_leaf");
      m.config.min_leaf = static_cast<int>(r.integer());
      r.expect("lambda");
      m.config.lambda = r.real();
      r.expect("base_score");
      m.base_score = r.real();
      r.expect("trees");
      const auto n_trees = r.integer();
      if (n_trees < 0) throw ParseError("model file: negative tree count");
      m.trees.resize(static_cast<std::size_t>(n_trees));
      for (auto& t : m.trees) {
        r.expect("tree");
        const auto n_nodes = r.integer();
        detail::read_tree(r, t, m.columns, 0);
        if (static_cast<std::int64_t>(t.nodes.size()) != n_nodes) throw ParseError("model file: node count mismatch");
      }
      return m;
    }
  }
  throw ParseError("model file: unknown kind");
}

inline void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_model(model, out);
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_model(in);
}

}  // namespace credscore

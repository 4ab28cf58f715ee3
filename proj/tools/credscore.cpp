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

// credscore command-line front end.
//
// Exit codes: 0 success, 1 validation findings, 2 usage, parse or data errors.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "credscore/credscore.hpp"

namespace fs = std::filesystem;
using namespace credscore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string snapshots;
  std::string registry;
  std::string prices;
  std::string out_dir;
  std::uint64_t seed = 42;
  double window_days = kDefaultWindowDays;
  double min_hold_days = kDefaultMinHoldDays;
  double tolerance = kDefaultSegmentTolerance;
  std::string model = "tree-based";
  std::size_t holdout = 2500;
  std::size_t chunk = 500;
  std::string bins;
  int score_min = kScoreMin;
  int score_max = kScoreMax;

  PipelineConfig pipeline() const { return {window_days, min_hold_days, tolerance}; }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required flag ") + flag);
  return value;
}

fs::path out_path(const RunConfig& c, const char* name) {
  const fs::path dir = need(c.out_dir, "--out-dir");
  fs::create_directories(dir);
  return dir / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

struct Inputs {
  SnapshotMap snapshots;
  AssetRegistry registry;
  PriceTable prices;
};

Inputs load_inputs(const RunConfig& c) {
  Inputs in;
  in.snapshots = parse_snapshots(need(c.snapshots, "--snapshots"));
  in.registry = parse_asset_registry(need(c.registry, "--registry"));
  in.prices = parse_price_table(need(c.prices, "--prices"));
  return in;
}

Dataset load_dataset(const RunConfig& c) {
  const Inputs in = load_inputs(c);
  return build_dataset(in.snapshots, in.registry, in.prices, c.pipeline());
}

ModelKind model_kind(const RunConfig& c) {
  const auto k = parse_model_kind(c.model);
  if (!k) throw UsageError("unknown model " + c.model);
  return *k;
}

// ------------------------------------------------------------
// commands
// ------------------------------------------------------------

int cmd_validate(const RunConfig& c, double hf_tolerance) {
  const Inputs in = load_inputs(c);
  const auto report = validate_dataset(in.snapshots, in.registry, in.prices, hf_tolerance);
  if (!c.out_dir.empty()) {
    auto out = open_out(out_path(c, "validation_report.csv"));
    write_validation_report(report, out);
  } else {
    write_validation_report(report, std::cout);
  }
  std::cerr << report.size() << " issue(s) in " << in.snapshots.size() << " account(s)\n";
  return report.empty() ? kExitOk : kExitFindings;
}

int cmd_gen_synthetic(const RunConfig& c, SyntheticConfig s) {
  s.seed = c.seed;
  const auto d = generate_synthetic(s);
  write_snapshots(d.snapshots, out_path(c, "snapshots.csv").string());
  auto reg = open_out(out_path(c, "registry.csv"));
  write_asset_registry(d.registry, reg);
  auto px = open_out(out_path(c, "prices.csv"));
  write_price_table(d.prices, px);
  return kExitOk;
}

int cmd_label(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  auto train = open_out(out_path(c, "labeled_train.csv"));
  write_labeled_positions(d.training, train);
  auto cur = open_out(out_path(c, "labeled_current.csv"));
  write_labeled_positions(d.current, cur);
  std::cerr << d.training.size() << " closed, " << d.current.size() << " current position(s)\n";
  return kExitOk;
}

int cmd_featurize(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  auto train = open_out(out_path(c, "features_train.csv"));
  write_feature_matrix(d.training, train);
  auto cur = open_out(out_path(c, "features_current.csv"));
  write_feature_matrix(d.current, cur);
  return kExitOk;
}

int cmd_train(const RunConfig& c, const std::string& model_file) {
  const ModelKind kind = model_kind(c);
  const Dataset d = load_dataset(c);
  if (d.training.empty()) throw std::invalid_argument("no closed positions to train on");
  ModelConfig mc;
  mc.seed = c.seed;
  const Model m = fit_model(kind, d.training, mc);
  save_model(m, model_file.empty() ? out_path(c, "model.txt").string() : model_file);
  return kExitOk;
}

int cmd_evaluate(const RunConfig& c) {
  const Dataset d = load_dataset(c);
  HoldoutConfig hc;
  hc.holdout = c.holdout;
  hc.chunk = c.chunk;
  hc.model.seed = c.seed;
  const std::vector<ModelKind> kinds = {ModelKind::kRandom, ModelKind::kLaggedFrequency, ModelKind::kLaggedHfCount,
                                        ModelKind::kLogReg, ModelKind::kTreeBased};
  const auto report = rolling_holdout(d.training, kinds, hc);
  auto auc_out = open_out(out_path(c, "auc.csv"));
  write_auc_csv(report, auc_out);
  auto oof = open_out(out_path(c, "oof_predictions.csv"));
  write_oof_csv(report, oof);
  auto roc = open_out(out_path(c, "roc.csv"));
  write_roc_csv(report, roc);
  auto svg = open_out(out_path(c, "roc.svg"));
  write_roc_svg(report, svg);
  for (const auto& m : report.models) std::cerr << model_name(m.kind) << "  auc " << format_double(m.auc) << '\n';
  return kExitOk;
}

int cmd_fit_scores(const RunConfig& c, std::size_t samples) {
  const auto bins = parse_score_bins(need(c.bins, "--bins"));
  validate_bins(bins);
  const auto fit = fit_score_distribution(bins, samples, c.seed, c.score_min, c.score_max);
  auto out = open_out(out_path(c, "score_params.csv"));
  write_skew_normal_params(fit.params, out);
  std::cerr << "xi " << format_double(fit.params.xi) << "  omega " << format_double(fit.params.omega) << "  alpha "
            << format_double(fit.params.alpha) << '\n';
  return kExitOk;
}

// An account is as risky as its riskiest current position.
int cmd_score(const RunConfig& c, std::string model_file, std::string params_file) {
  if (model_file.empty()) model_file = (fs::path(need(c.out_dir, "--out-dir")) / "model.txt").string();
  if (params_file.empty()) params_file = (fs::path(need(c.out_dir, "--out-dir")) / "score_params.csv").string();
  const Model model = load_model(model_file);
  const SkewNormalParams params = read_skew_normal_params(params_file);
  const Dataset d = load_dataset(c);

  const auto preds = predict(model, d.current);
  std::map<AccountId, double> worst;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto [it, fresh] = worst.emplace(d.current[i].account, preds[i]);
    if (!fresh) it->second = std::max(it->second, preds[i]);
  }
  auto out = open_out(out_path(c, "scores.csv"));
  out << "account,prediction,score\n";
  if (worst.empty()) return kExitOk;
  std::vector<double> account_preds;
  for (const auto& [a, p] : worst) account_preds.push_back(p);
  const auto scores = quantile_transform(account_preds, params, c.score_min, c.score_max);
  std::size_t i = 0;
  for (const auto& [a, p] : worst) out << a << ',' << format_double(p) << ',' << scores[i++] << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"credscore: health-factor delinquency models and credit scores"};
  app.set_config("--config", "", "TOML key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig c;
  app.add_option("--snapshots", c.snapshots, "Snapshot CSV");
  app.add_option("--registry", c.registry, "Asset registry CSV");
  app.add_option("--prices", c.prices, "Price table CSV");
  app.add_option("--out-dir", c.out_dir, "Output directory");
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app.add_option("--window-days", c.window_days, "Delinquency window")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--min-hold-days", c.min_hold_days, "Short-term position cutoff")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tolerance", c.tolerance, "Relative tolerance for position segmentation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--model", c.model, "Model name")
      ->check(CLI::IsMember({"random", "E(y)_lagged", "count_HF_lt_1_lagged", "log-reg", "tree-based"}))
      ->capture_default_str();
  app.add_option("--holdout", c.holdout, "Rows in the rolling holdout")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--chunk", c.chunk, "Rows per holdout chunk")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--bins", c.bins, "Score bin table CSV");
  app.add_option("--score-min", c.score_min, "Lowest score")->capture_default_str();
  app.add_option("--score-max", c.score_max, "Highest score")->capture_default_str();

  double hf_tolerance = kDefaultHfTolerance;
  auto* validate = app.add_subcommand("validate", "Check snapshots against registry and prices");
  validate->add_option("--hf-tolerance", hf_tolerance, "Relative tolerance for recomputed health factors")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SyntheticConfig synth;
  double interval = static_cast<double>(synth.interval_seconds);
  auto* gen = app.add_subcommand("gen-synthetic", "Write a seeded synthetic dataset");
  gen->add_option("--accounts", synth.n_accounts, "Number of accounts")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--snapshots-per-account", synth.snapshots_per_account, "Mean stream length")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  gen->add_option("--interval", interval, "Seconds between snapshots")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--volatility", synth.daily_volatility, "Daily log-price volatility")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  gen->add_option("--hold-days", synth.mean_hold_days, "Mean position holding time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--signal", synth.signal, "Delinquency signal strength")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* label = app.add_subcommand("label", "Write labeled closed and current positions");
  auto* featurize = app.add_subcommand("featurize", "Write feature matrices");

  std::string model_file;
  auto* train = app.add_subcommand("train", "Fit one model on all closed positions");
  train->add_option("--model-file", model_file, "Where to save the model (default OUT_DIR/model.txt)");

  auto* evaluate = app.add_subcommand("evaluate", "Rolling-holdout evaluation of all five models");

  std::size_t samples = 100000;
  auto* fit = app.add_subcommand("fit-scores", "Fit the skew-normal score distribution to a bin table");
  fit->add_option("--samples", samples, "Samples drawn from the stretched bins")
      ->check(CLI::Range(std::size_t{100}, std::size_t{100000000}))
      ->capture_default_str();

  std::string params_file;
  std::string score_model_file;
  auto* score = app.add_subcommand("score", "Score accounts by their current positions");
  score->add_option("--model-file", score_model_file, "Trained model (default OUT_DIR/model.txt)");
  score->add_option("--params", params_file, "Fitted score parameters (default OUT_DIR/score_params.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (c.score_min >= c.score_max) throw UsageError("--score-min must be below --score-max");
    if (*validate) return cmd_validate(c, hf_tolerance);
    if (*gen) {
      synth.interval_seconds = static_cast<Timestamp>(interval);
      return cmd_gen_synthetic(c, synth);
    }
    if (*label) return cmd_label(c);
    if (*featurize) return cmd_featurize(c);
    if (*train) return cmd_train(c, model_file);
    if (*evaluate) return cmd_evaluate(c);
    if (*fit) return cmd_fit_scores(c, samples);
    if (*score) return cmd_score(c, score_model_file, params_file);
  } catch (const std::exception& e) {
    std::cerr << "credscore: " << e.what() << '\n';
  }
  return kExitUsage;
}

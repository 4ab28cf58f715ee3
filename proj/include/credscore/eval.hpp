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

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "credscore/models.hpp"

namespace credscore {

namespace detail {

inline std::pair<std::size_t, std::size_t> class_counts(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    pos += y;
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("AUC needs at least one positive and one negative");
  return {pos, neg};
}

}  // namespace detail

// Mann-Whitney form: (sum of positive midranks - n+(n+ + 1)/2) / (n+ n-).
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = detail::class_counts(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are doubled so midranks stay integral.
  double rank_sum_x2 = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank_x2 = static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]]) rank_sum_x2 += midrank_x2;
    i = j + 1;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum_x2 / 2.0 - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

// O(n+ n-) pairwise count, ties worth one half.
inline double auc_bruteforce(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = detail::class_counts(scores, labels);
  double wins = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), strictest threshold first
};

// One point per distinct score, sweeping the threshold downward.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = detail::class_counts(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp)++;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return curve;
}

inline double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

// ------------------------------------------------------------
// rolling holdout
// ------------------------------------------------------------

struct HoldoutConfig {
  std::size_t holdout = 2500;
  std::size_t chunk = 500;
  ModelConfig model;
};

struct ModelEvaluation {
  ModelKind kind;
  std::vector<double> predictions;  // aligned with EvalReport::holdout rows
  double auc = 0.0;
};

struct EvalReport {
  std::size_t holdout_start = 0;
  std::vector<std::size_t> chunk_starts;
  std::vector<std::size_t> train_sizes;
  std::vector<DatasetRow> holdout;  // the rows that received out-of-fold predictions
  std::vector<ModelEvaluation> models;

  const ModelEvaluation& at(ModelKind k) const {
    for (const auto& m : models)
      if (m.kind == k) return m;
    throw std::out_of_range(std::string("no evaluation for model ") + model_name(k));
  }
};

// Out-of-fold predictions for one model: chunk k is predicted by a model trained
// on every row before the chunk's first index. The random baseline is reseeded
// per chunk with seed + k.
inline std::vector<double> rolling_predictions(const std::vector<DatasetRow>& rows, ModelKind kind,
                                               const HoldoutConfig& config,
                                               std::vector<std::size_t>* train_sizes = nullptr) {
  if (config.chunk == 0 || config.holdout == 0 || config.holdout % config.chunk != 0)
    throw std::invalid_argument("holdout must be a positive multiple of chunk");
  if (rows.size() <= config.holdout)
    throw std::invalid_argument("need more than " + std::to_string(config.holdout) + " rows for the holdout, have " +
                                std::to_string(rows.size()));
  const std::size_t start = rows.size() - config.holdout;
  std::vector<double> out;
  out.reserve(config.holdout);
  if (train_sizes) train_sizes->clear();
  for (std::size_t k = 0; k < config.holdout / config.chunk; ++k) {
    const std::size_t begin = start + k * config.chunk;
    const std::vector<DatasetRow> train(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(begin));
    const std::vector<DatasetRow> test(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                       rows.begin() + static_cast<std::ptrdiff_t>(begin + config.chunk));
    ModelConfig mc = config.model;
    mc.seed = config.model.seed + k;
    const Model model = fit_model(kind, train, mc);
    const auto preds = predict(model, test);
    out.insert(out.end(), preds.begin(), preds.end());
    if (train_sizes) train_sizes->push_back(train.size());
  }
  return out;
}

// `rows` must be in holdout order (see sort_rows). AUC is pooled over the whole
// holdout.
inline EvalReport rolling_holdout(const std::vector<DatasetRow>& rows, std::span<const ModelKind> kinds,
                                  const HoldoutConfig& config = {}) {
  EvalReport report;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].open_ts < rows[i - 1].open_ts) throw std::invalid_argument("rolling_holdout: rows not sorted by open time");

  std::vector<std::size_t> sizes;
  for (ModelKind kind : kinds) {
    ModelEvaluation ev{kind, rolling_predictions(rows, kind, config, &sizes), 0.0};
    report.models.push_back(std::move(ev));
  }
  if (kinds.empty()) rolling_predictions(rows, ModelKind::kRandom, config, &sizes);

  report.holdout_start = rows.size() - config.holdout;
  report.train_sizes = sizes;
  for (std::size_t k = 0; k < config.holdout / config.chunk; ++k)
    report.chunk_starts.push_back(report.holdout_start + k * config.chunk);
  report.holdout.assign(rows.begin() + static_cast<std::ptrdiff_t>(report.holdout_start), rows.end());
  const auto y = labels_of(report.holdout);
  for (auto& m : report.models) m.auc = auc(m.predictions, y);
  return report;
}

inline EvalReport rolling_holdout(const std::vector<DatasetRow>& rows, ModelKind kind, const HoldoutConfig& config = {}) {
  const std::array<ModelKind, 1> kinds{kind};
  return rolling_holdout(rows, kinds, config);
}

// ------------------------------------------------------------
// exports
// ------------------------------------------------------------

inline void write_auc_csv(const EvalReport& report, std::ostream& out) {
  out << "model,auc\n";
  for (const auto& m : report.models) out << model_name(m.kind) << ',' << format_double(m.auc) << '\n';
}

inline void write_oof_csv(const EvalReport& report, std::ostream& out) {
  out << "account,position_index,model,prediction,label\n";
  for (const auto& m : report.models)
    for (std::size_t i = 0; i < report.holdout.size(); ++i) {
      const auto& r = report.holdout[i];
      out << r.account << ',' << r.position_index << ',' << model_name(m.kind) << ',' << format_double(m.predictions[i])
          << ',' << r.label << '\n';
    }
}

inline void write_roc_csv(const EvalReport& report, std::ostream& out) {
  out << "model,fpr,tpr\n";
  const auto y = labels_of(report.holdout);
  for (const auto& m : report.models)
    for (const auto& p : roc_curve(m.predictions, y).points)
      out << model_name(m.kind) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

// Unit-square ROC plot: one polyline per model plus a dashed chance diagonal.
inline void write_roc_svg(const EvalReport& report, std::ostream& out) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 50.0;
  constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  auto px = [&](double fpr) { return kMargin + fpr * kSize; };
  auto py = [&](double tpr) { return kMargin + (1.0 - tpr) * kSize; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  const double total = kSize + 2 * kMargin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(total + 160) << "\" height=\"" << num(total)
      << "\" viewBox=\"0 0 " << num(total + 160) << ' ' << num(total) << "\">\n";
  out << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(kSize) << "\" height=\""
      << num(kSize) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = 0.25 * i;
    out << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(t)) << "\" y2=\""
        << num(py(0) + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(py(0) + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
        << num(t) << "</text>\n";
    out << "<line x1=\"" << num(px(0) - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(px(0)) << "\" y2=\""
        << num(py(t)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(0) - 8) << "\" y=\"" << num(py(t) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
        << num(t) << "</text>\n";
  }
  out << "<text x=\"" << num(px(0.5)) << "\" y=\"" << num(total - 8) << "\" font-size=\"12\" text-anchor=\"middle\">"
      << "False positive rate</text>\n";
  out << "<text x=\"14\" y=\"" << num(py(0.5)) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << num(py(0.5)) << ")\">True positive rate</text>\n";
  out << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(1)) << "\" y2=\"" << num(py(1))
      << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";

  const auto y = labels_of(report.holdout);
  for (std::size_t k = 0; k < report.models.size(); ++k) {
    const auto& m = report.models[k];
    const char* color = kColors[k % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const auto curve = roc_curve(m.predictions, y);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      if (i) out << ' ';
      out << num(px(curve.points[i].fpr)) << ',' << num(py(curve.points[i].tpr));
    }
    out << "\"/>\n";
    const double ly = kMargin + 14.0 + 18.0 * static_cast<double>(k);
    out << "<rect x=\"" << num(total) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\"" << color
        << "\"/>\n";
    out << "<text x=\"" << num(total + 14) << "\" y=\"" << num(ly) << "\" font-size=\"11\">" << model_name(m.kind)
        << " (AUC " << num(m.auc) << ")</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace credscore

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

// L2-regularized logistic regression fit by full-batch gradient descent on
// standardized columns.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "credscore/common.hpp"
#include "credscore/matrix.hpp"

namespace credscore {

struct LogRegConfig {
  double l2 = 1.0;
  int iters = 500;
  double step = 0.1;

  bool operator==(const LogRegConfig&) const = default;
};

struct LogRegModel {
  std::vector<double> means;
  std::vector<double> scales;  // > 0; zero-variance columns get 1
  std::vector<double> weights;
  double bias = 0.0;

  std::size_t columns() const noexcept { return weights.size(); }
  bool operator==(const LogRegModel&) const = default;
};

// log(1 + e^z)
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline void check_binary_labels(std::span<const int> y) {
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw std::invalid_argument("labels must be 0 or 1");
    (v ? pos : neg) = true;
  }
  if (!pos || !neg) throw std::invalid_argument("training labels contain a single class");
}

// Column means and population standard deviations.
inline void fit_standardization(const Matrix& X, std::vector<double>& means, std::vector<double>& scales) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  means.assign(d, 0.0);
  scales.assign(d, 1.0);
  if (n == 0) return;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) means[c] += X(r, c);
  for (auto& m : means) m /= static_cast<double>(n);
  std::vector<double> ss(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) ss[c] += (X(r, c) - means[c]) * (X(r, c) - means[c]);
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(n));
    scales[c] = (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
  }
}

inline Matrix standardize(const Matrix& X, const std::vector<double>& means, const std::vector<double>& scales) {
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) out(r, c) = (X(r, c) - means[c]) / scales[c];
  return out;
}

// Mean logistic loss + (l2/2)||w||^2 on already-standardized inputs. The bias
// is not penalized.
inline double logreg_objective(const Matrix& Xs, std::span<const int> y, std::span<const double> w, double b,
                               double l2) {
  const std::size_t n = Xs.rows();
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double z = b;
    const auto x = Xs.row(r);
    for (std::size_t c = 0; c < w.size(); ++c) z += w[c] * x[c];
    loss += softplus(z) - y[r] * z;
  }
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  return loss / static_cast<double>(n) + 0.5 * l2 * reg;
}

// Gradient of logreg_objective; the last entry is d/db.
inline std::vector<double> logreg_gradient(const Matrix& Xs, std::span<const int> y, std::span<const double> w,
                                           double b, double l2) {
  const std::size_t n = Xs.rows();
  const std::size_t d = w.size();
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto x = Xs.row(r);
    double z = b;
    for (std::size_t c = 0; c < d; ++c) z += w[c] * x[c];
    const double resid = sigmoid(z) - y[r];
    for (std::size_t c = 0; c < d; ++c) g[c] += resid * x[c];
    g[d] += resid;
  }
  for (auto& gi : g) gi /= static_cast<double>(n);
  for (std::size_t c = 0; c < d; ++c) g[c] += l2 * w[c];
  return g;
}

inline LogRegModel train_logreg(const Matrix& X, std::span<const int> y, const LogRegConfig& config = {}) {
  if (X.rows() != y.size()) throw std::invalid_argument("train_logreg: row count does not match label count");
  check_binary_labels(y);
  if (config.iters < 0 || !(config.step > 0.0) || config.l2 < 0.0) throw std::invalid_argument("train_logreg: bad config");

  LogRegModel m;
  fit_standardization(X, m.means, m.scales);
  const Matrix Xs = standardize(X, m.means, m.scales);
  m.weights.assign(X.cols(), 0.0);
  m.bias = 0.0;
  for (int it = 0; it < config.iters; ++it) {
    const auto g = logreg_gradient(Xs, y, m.weights, m.bias, config.l2);
    for (std::size_t c = 0; c < m.weights.size(); ++c) m.weights[c] -= config.step * g[c];
    m.bias -= config.step * g.back();
  }
  return m;
}

inline double predict_logreg(const LogRegModel& m, std::span<const double> x) {
  if (x.size() != m.columns()) throw std::invalid_argument("predict_logreg: expected " + std::to_string(m.columns()) +
                                                           " columns, got " + std::to_string(x.size()));
  double z = m.bias;
  for (std::size_t c = 0; c < x.size(); ++c) z += m.weights[c] * (x[c] - m.means[c]) / m.scales[c];
  return sigmoid(z);
}

inline std::vector<double> predict_logreg(const LogRegModel& m, const Matrix& X) {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_logreg(m, X.row(r));
  return out;
}

}  // namespace credscore

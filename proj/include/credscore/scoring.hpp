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

// Mapping delinquency predictions to integer scores.
//
// A binned score distribution (lower, upper, mass) is stretched onto the score
// range, sampled, and fit with a skew-normal by maximum likelihood. Predictions
// are then quantile-transformed into that distribution: the empirical midrank
// quantile q of each prediction maps to the skew-normal quantile at 1 - q, so
// the riskiest prediction gets the lowest score. Scores are floored and clamped
// to [score_lo, score_hi].

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "credscore/common.hpp"

namespace credscore {

inline constexpr int kScoreMin = 300;
inline constexpr int kScoreMax = 1000;
inline constexpr double kFicoLo = 300.0;
inline constexpr double kFicoHi = 850.0;

// ------------------------------------------------------------
// bins
// ------------------------------------------------------------

struct ScoreBin {
  double lower = 0.0;
  double upper = 0.0;
  double mass = 0.0;

  bool operator==(const ScoreBin&) const = default;
};

using ScoreBins = std::vector<ScoreBin>;

// Contiguous, lower < upper, masses in [0, 1] summing to 1 within 1e-9.
inline void validate_bins(const ScoreBins& bins) {
  if (bins.empty()) throw std::invalid_argument("score bins: empty table");
  double total = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto& b = bins[i];
    if (!(b.lower < b.upper)) throw std::invalid_argument("score bins: bin " + std::to_string(i) + " has lower >= upper");
    if (!(b.mass >= 0.0 && b.mass <= 1.0)) throw std::invalid_argument("score bins: mass outside [0, 1]");
    if (i > 0 && b.lower != bins[i - 1].upper) throw std::invalid_argument("score bins: bins are not contiguous");
    total += b.mass;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("score bins: masses sum to " + format_double(total));
}

inline ScoreBins stretch_bins(const ScoreBins& bins, double source_lo = kFicoLo, double source_hi = kFicoHi,
                              double target_lo = kScoreMin, double target_hi = kScoreMax) {
  if (!(source_hi > source_lo)) throw std::invalid_argument("stretch_bins: degenerate source interval");
  const double k = (target_hi - target_lo) / (source_hi - source_lo);
  ScoreBins out = bins;
  for (auto& b : out) {
    b.lower = target_lo + (b.lower - source_lo) * k;
    b.upper = target_lo + (b.upper - source_lo) * k;
  }
  return out;
}

// Pick a bin by mass, then a uniform point inside it.
inline std::vector<double> sample_from_bins(const ScoreBins& bins, std::size_t n, std::uint64_t seed) {
  validate_bins(bins);
  std::vector<double> cumulative(bins.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) cumulative[i] = (acc += bins[i].mass);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), bins.size() - 1);
    while (bins[i].mass == 0.0 && i > 0) --i;
    x = rng.uniform(bins[i].lower, bins[i].upper);
  }
  return out;
}

inline ScoreBins parse_score_bins(std::istream& in) {
  std::string raw;
  if (!std::getline(in, raw) || strip_cr(raw) != "lower,upper,mass")
    throw ParseError("bin table: expected header 'lower,upper,mass'", 1);
  ScoreBins bins;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 3) throw ParseError("bin table: expected 3 fields", line_no);
    ScoreBin b;
    if (!parse_double(f[0], b.lower)) throw ParseError("bin table: bad lower", line_no, 1);
    if (!parse_double(f[1], b.upper)) throw ParseError("bin table: bad upper", line_no, column_of(f, 1));
    if (!parse_double(f[2], b.mass)) throw ParseError("bin table: bad mass", line_no, column_of(f, 2));
    bins.push_back(b);
  }
  return bins;
}

inline ScoreBins parse_score_bins(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_score_bins(in);
}

// ------------------------------------------------------------
// skew-normal distribution
// ------------------------------------------------------------

struct SkewNormalParams {
  double xi = 0.0;     // location
  double omega = 1.0;  // scale, > 0
  double alpha = 0.0;  // shape

  bool operator==(const SkewNormalParams&) const = default;
};

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double log_normal_cdf(double z) {
  if (z > -30.0) return std::log(normal_cdf(z));
  // Asymptotic series of the Mills ratio.
  const double z2 = z * z;
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(-1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2));
}

namespace detail {

struct GaussLegendre {
  static constexpr int kN = 20;
  std::array<double, kN> nodes{};
  std::array<double, kN> weights{};

  GaussLegendre() {
    for (int i = 0; i < kN; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kN + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= kN; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kN * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre& get() {
    static const GaussLegendre rule;
    return rule;
  }
};

// T(h, a) for h >= 0, 0 <= a <= 1 by composite Gauss-Legendre.
inline double owens_t_small_a(double h, double a) {
  constexpr int kPanels = 8;
  const auto& gl = GaussLegendre::get();
  const double half_h2 = 0.5 * h * h;
  const double width = a / kPanels;
  double sum = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int i = 0; i < GaussLegendre::kN; ++i) {
      const double x = mid + 0.5 * width * gl.nodes[i];
      const double q = 1.0 + x * x;
      sum += gl.weights[i] * std::exp(-half_h2 * q) / q;
    }
  }
  return sum * 0.5 * width / (2.0 * std::numbers::pi);
}

}  // namespace detail

// Owen's T function, T(h, a) = 1/(2 pi) * integral_0^a exp(-h^2 (1 + x^2) / 2) / (1 + x^2) dx.
inline double owens_t(double h, double a) {
  if (a == 0.0) return 0.0;
  const double sign = a < 0.0 ? -1.0 : 1.0;
  h = std::abs(h);
  a = std::abs(a);
  if (a <= 1.0) return sign * detail::owens_t_small_a(h, a);
  // Reflection onto a' = 1/a (h >= 0).
  const double ah = a * h;
  const double qh = normal_sf(h);
  const double qah = normal_sf(ah);
  return sign * (0.5 * qh + 0.5 * qah - qh * qah - detail::owens_t_small_a(ah, 1.0 / a));
}

inline double skew_normal_pdf(double x, const SkewNormalParams& p) {
  const double z = (x - p.xi) / p.omega;
  return 2.0 / p.omega * normal_pdf(z) * normal_cdf(p.alpha * z);
}

inline double skew_normal_log_pdf(double x, const SkewNormalParams& p) {
  const double z = (x - p.xi) / p.omega;
  return std::log(2.0) - std::log(p.omega) - 0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) +
         log_normal_cdf(p.alpha * z);
}

// F(x) = Phi(z) - 2 T(z, alpha)
inline double skew_normal_cdf(double x, const SkewNormalParams& p) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double z = (x - p.xi) / p.omega;
  const double f = normal_cdf(z) - 2.0 * owens_t(z, p.alpha);
  return std::clamp(f, 0.0, 1.0);
}

// Bracketed bisection, run until the bracket collapses to adjacent doubles.
inline double skew_normal_quantile(double q, const SkewNormalParams& p) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("skew_normal_quantile: q must be in (0, 1)");
  double lo = p.xi - p.omega;
  double hi = p.xi + p.omega;
  double step = p.omega;
  while (skew_normal_cdf(lo, p) > q) {
    lo -= step;
    step *= 2.0;
  }
  step = p.omega;
  while (skew_normal_cdf(hi, p) < q) {
    hi += step;
    step *= 2.0;
  }
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f = skew_normal_cdf(mid, p);
    if (f == q || !(mid > lo && mid < hi)) break;
    (f < q ? lo : hi) = mid;
  }
  return mid;
}

inline std::vector<double> sample_skew_normal(const SkewNormalParams& p, std::size_t n, std::uint64_t seed) {
  const double delta = p.alpha / std::sqrt(1.0 + p.alpha * p.alpha);
  const double rest = std::sqrt(1.0 - delta * delta);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double u0 = rng.normal();
    const double u1 = rng.normal();
    x = p.xi + p.omega * (delta * std::abs(u0) + rest * u1);
  }
  return out;
}

inline double skew_normal_log_likelihood(std::span<const double> samples, const SkewNormalParams& p) {
  double s = 0.0;
  for (double x : samples) s += skew_normal_log_pdf(x, p);
  return s;
}

// ------------------------------------------------------------
// fitting
// ------------------------------------------------------------

// Largest skewness a skew-normal can reach (alpha -> infinity).
inline double skew_normal_max_skewness() {
  const double d2 = 2.0 / std::numbers::pi;
  return (4.0 - std::numbers::pi) / 2.0 * std::pow(d2, 1.5) / std::pow(1.0 - d2, 1.5);
}

// Moment matching, with sample skewness clipped to 99% of the attainable range.
inline SkewNormalParams skew_normal_moments_init(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (!(m2 > 0.0)) throw std::invalid_argument("skew-normal fit: samples have zero variance");
  const double sd = std::sqrt(m2);
  const double limit = 0.99 * skew_normal_max_skewness();
  const double skew = std::clamp(m3 / (sd * sd * sd), -limit, limit);

  const double g23 = std::pow(std::abs(skew), 2.0 / 3.0);
  const double c = std::pow((4.0 - std::numbers::pi) / 2.0, 2.0 / 3.0);
  const double abs_delta = std::sqrt(std::numbers::pi / 2.0 * g23 / (g23 + c));
  const double delta = skew < 0 ? -abs_delta : abs_delta;

  SkewNormalParams p;
  p.alpha = delta / std::sqrt(1.0 - delta * delta);
  p.omega = sd / std::sqrt(1.0 - 2.0 * delta * delta / std::numbers::pi);
  p.xi = mean - p.omega * delta * std::sqrt(2.0 / std::numbers::pi);
  return p;
}

struct SkewNormalFit {
  SkewNormalParams params;
  SkewNormalParams initial;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;
  int evaluations = 0;
};

namespace detail {

// Minimizes f over R^3 with Nelder-Mead (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2) until the spread of f over the simplex drops
// below `ftol`.
template <typename F>
std::array<double, 3> nelder_mead(F&& f, std::array<double, 3> x0, std::array<double, 3> steps, double ftol,
                                  int max_evals, int& evals) {
  constexpr int kDim = 3;
  std::array<std::array<double, 3>, kDim + 1> simplex;
  std::array<double, kDim + 1> value;
  simplex[0] = x0;
  for (int i = 0; i < kDim; ++i) {
    simplex[i + 1] = x0;
    simplex[i + 1][i] += steps[i];
  }
  for (int i = 0; i <= kDim; ++i) {
    value[i] = f(simplex[i]);
    ++evals;
  }

  auto lerp = [](const std::array<double, 3>& a, const std::array<double, 3>& b, double t) {
    std::array<double, 3> out;
    for (int i = 0; i < kDim; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };

  std::array<int, kDim + 1> order;
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return value[a] < value[b]; });
    const int best = order[0];
    const int worst = order[kDim];
    const int second = order[kDim - 1];
    if (value[worst] - value[best] < ftol) break;

    std::array<double, 3> centroid{};
    for (int k = 0; k < kDim; ++k)
      for (int i = 0; i < kDim; ++i) centroid[i] += simplex[order[k]][i] / kDim;

    const auto reflected = lerp(centroid, simplex[worst], -1.0);
    const double fr = f(reflected);
    ++evals;
    if (fr < value[best]) {
      const auto expanded = lerp(centroid, simplex[worst], -2.0);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    const auto contracted = outside ? lerp(centroid, reflected, 0.5) : lerp(centroid, simplex[worst], 0.5);
    const double fc = f(contracted);
    ++evals;
    if (fc < (outside ? fr : value[worst])) {
      simplex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (int k = 1; k <= kDim; ++k) {
      const int v = order[k];
      simplex[v] = lerp(simplex[best], simplex[v], 0.5);
      value[v] = f(simplex[v]);
      ++evals;
    }
  }
  int best = 0;
  for (int i = 1; i <= kDim; ++i)
    if (value[i] < value[best]) best = i;
  return simplex[best];
}

}  // namespace detail

// Maximum likelihood over (xi, log omega, alpha) by Nelder-Mead on the mean
// negative log-likelihood, started from moment matching. The search restarts
// from its best point until a restart stops improving.
inline SkewNormalFit fit_skew_normal(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("skew-normal fit: need at least 100 samples");
  SkewNormalFit fit;
  fit.initial = skew_normal_moments_init(samples);
  fit.initial_log_likelihood = skew_normal_log_likelihood(samples, fit.initial);

  const double n = static_cast<double>(samples.size());
  auto to_params = [](const std::array<double, 3>& t) { return SkewNormalParams{t[0], std::exp(t[1]), t[2]}; };
  auto objective = [&](const std::array<double, 3>& t) {
    const double v = -skew_normal_log_likelihood(samples, to_params(t)) / n;
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  std::array<double, 3> theta{fit.initial.xi, std::log(fit.initial.omega), fit.initial.alpha};
  double best = objective(theta);
  ++fit.evaluations;
  for (int restart = 0; restart < 10; ++restart) {
    const double omega = std::exp(theta[1]);
    const std::array<double, 3> steps{0.1 * omega, 0.1, 0.25 * std::max(1.0, std::abs(theta[2]))};
    const auto next = detail::nelder_mead(objective, theta, steps, 1e-10, 20000, fit.evaluations);
    const double value = objective(next);
    ++fit.evaluations;
    const bool improved = value < best - 1e-12;
    if (value <= best) {
      theta = next;
      best = value;
    }
    if (!improved) break;
  }
  fit.params = to_params(theta);
  fit.log_likelihood = skew_normal_log_likelihood(samples, fit.params);
  return fit;
}

// Stretch -> sample -> fit.
inline SkewNormalFit fit_score_distribution(const ScoreBins& bins, std::size_t n_samples, std::uint64_t seed,
                                            double target_lo = kScoreMin, double target_hi = kScoreMax,
                                            double source_lo = kFicoLo, double source_hi = kFicoHi) {
  validate_bins(bins);
  const auto stretched = stretch_bins(bins, source_lo, source_hi, target_lo, target_hi);
  const auto samples = sample_from_bins(stretched, n_samples, seed);
  return fit_skew_normal(samples);
}

// ------------------------------------------------------------
// transform
// ------------------------------------------------------------

// Midranks (1-based) with ties sharing their average rank.
inline std::vector<double> midranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline int score_from_real(double s, int score_lo, int score_hi) {
  const double f = std::floor(s);
  if (f <= score_lo) return score_lo;
  if (f >= score_hi) return score_hi;
  return static_cast<int>(f);
}

inline std::vector<int> quantile_transform(std::span<const double> predictions, const SkewNormalParams& params,
                                           int score_lo = kScoreMin, int score_hi = kScoreMax) {
  if (predictions.empty()) throw std::invalid_argument("quantile_transform: no predictions");
  if (score_lo > score_hi) throw std::invalid_argument("quantile_transform: score_lo > score_hi");
  const double n = static_cast<double>(predictions.size());
  const auto ranks = midranks(predictions);
  std::vector<int> out(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double q = (ranks[i] - 0.5) / n;
    out[i] = score_from_real(skew_normal_quantile(1.0 - q, params), score_lo, score_hi);
  }
  return out;
}

// ------------------------------------------------------------
// params file
// ------------------------------------------------------------

inline void write_skew_normal_params(const SkewNormalParams& p, std::ostream& out) {
  out << "xi,omega,alpha\n" << format_double(p.xi) << ',' << format_double(p.omega) << ',' << format_double(p.alpha) << '\n';
}

inline SkewNormalParams read_skew_normal_params(std::istream& in) {
  std::string raw;
  if (!std::getline(in, raw) || strip_cr(raw) != "xi,omega,alpha")
    throw ParseError("params file: expected header 'xi,omega,alpha'", 1);
  if (!std::getline(in, raw)) throw ParseError("params file: missing values", 2);
  const auto f = split_csv(strip_cr(raw));
  SkewNormalParams p;
  if (f.size() != 3 || !parse_double(f[0], p.xi) || !parse_double(f[1], p.omega) || !parse_double(f[2], p.alpha))
    throw ParseError("params file: expected three numbers", 2);
  if (!(p.omega > 0.0)) throw ParseError("params file: omega must be positive", 2, column_of(f, 1));
  return p;
}

inline SkewNormalParams read_skew_normal_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_skew_normal_params(in);
}

}  // namespace credscore

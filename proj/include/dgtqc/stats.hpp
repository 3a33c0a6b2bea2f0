// Copyright 2026 the dgtqc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Self-contained statistical kernel: empirical CDF distances, the two-sample
// Kolmogorov-Smirnov test (asymptotic and exact permutation forms), Pearson
// correlation, and ordinary least squares with F/t significance through the
// regularized incomplete beta function. Everything here is a pure function of
// its arguments; Monte-Carlo paths take explicit seeds.

#ifndef DGTQC_STATS_HPP_
#define DGTQC_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dgtqc/error.hpp"
#include "dgtqc/rng.hpp"

namespace dgtqc {

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

enum class KsMethod { kAsymptotic, kExactEnumeration, kExactMonteCarlo };

inline const char* to_string(KsMethod m) {
  switch (m) {
    case KsMethod::kAsymptotic: return "asymptotic";
    case KsMethod::kExactEnumeration: return "exact-enumeration";
    case KsMethod::kExactMonteCarlo: return "exact-montecarlo";
  }
  return "unknown";
}

struct KsResult {
  double d_statistic = 0.0;
  double p_value = 1.0;
  KsMethod method = KsMethod::kAsymptotic;
  std::size_t n = 0;  // |x|
  std::size_t m = 0;  // |y|
  // Exact paths: p_value == ge_count / total_count. Enumeration counts every
  // relabeling; Monte-Carlo counts replicates plus the observed labeling.
  long long ge_count = -1;
  long long total_count = -1;
};

enum class KsPValueMethod { kAsymptotic, kExact };

struct KsSettings {
  KsPValueMethod pmethod = KsPValueMethod::kAsymptotic;
  std::uint64_t seed = 0;
  int mc_replicates = 10000;
  long long enumeration_limit = 200000;  // max C(n+m, n) enumerated exactly
};

namespace detail {

// The two-sample KS statistic over pooled samples, kept in integer units:
// D * n * m = max over pooled value boundaries of |cx*m - cy*n| where cx, cy
// count sample points <= the boundary value. Integer units make permutation
// counting tie-safe (no floating-point >= at the decision boundary).
//
// `values` must be sorted ascending; labels[i] is true where values[i] came
// from the x sample.
inline long long ks_numerator_sorted(const std::vector<double>& values,
                                     const std::vector<char>& labels,
                                     long long n, long long m) {
  long long cx = 0;
  long long cy = 0;
  long long best = 0;
  const std::size_t total = values.size();
  for (std::size_t i = 0; i < total; ++i) {
    if (labels[i]) ++cx;
    else ++cy;
    if (i + 1 < total && values[i + 1] == values[i]) continue;  // not a boundary
    best = std::max(best, std::llabs(cx * m - cy * n));
  }
  return best;
}

struct PooledSamples {
  std::vector<double> values;  // sorted ascending
  std::vector<char> labels;    // true = from x
  long long n = 0;
  long long m = 0;
};

inline PooledSamples pool_samples(std::span<const double> x, std::span<const double> y) {
  PooledSamples pooled;
  pooled.n = static_cast<long long>(x.size());
  pooled.m = static_cast<long long>(y.size());
  std::vector<std::pair<double, char>> merged;
  merged.reserve(x.size() + y.size());
  for (double v : x) merged.emplace_back(v, 1);
  for (double v : y) merged.emplace_back(v, 0);
  std::stable_sort(merged.begin(), merged.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  pooled.values.reserve(merged.size());
  pooled.labels.reserve(merged.size());
  for (const auto& [v, l] : merged) {
    pooled.values.push_back(v);
    pooled.labels.push_back(l);
  }
  return pooled;
}

// C(n, k) capped at `cap` (returns cap + 1 when the true value exceeds it).
inline long long binomial_capped(long long n, long long k, long long cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (long long i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > static_cast<double>(cap) * 2.0) return cap + 1;
  }
  const long long rounded = static_cast<long long>(c + 0.5);
  return rounded > cap ? cap + 1 : rounded;
}

}  // namespace detail

// Largest gap between the two right-continuous empirical CDFs, evaluated at
// every distinct pooled value. Ties across samples are handled by the pooled
// evaluation grid.
inline double ecdf_sup_distance(std::span<const double> x, std::span<const double> y) {
  require(!x.empty() && !y.empty(), ErrorKind::kArgument,
          "ecdf_sup_distance needs non-empty samples");
  const auto pooled = detail::pool_samples(x, y);
  const long long numerator =
      detail::ks_numerator_sorted(pooled.values, pooled.labels, pooled.n, pooled.m);
  return static_cast<double>(numerator) /
         (static_cast<double>(pooled.n) * static_cast<double>(pooled.m));
}

// Survival function of the Kolmogorov distribution,
//   Q(lambda) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2),
// summed to convergence (terms below 1e-16, well past the 1e-12 the p-values
// need). Q(0) = 1 by continuity.
inline double kolmogorov_sf(double lambda) {
  require(lambda >= 0.0, ErrorKind::kArgument, "kolmogorov_sf needs lambda >= 0");
  if (lambda == 0.0) return 1.0;
  // Below 0.05 the CDF is ~exp(-pi^2/(8 lambda^2)) < 1e-200: indistinguishable
  // from 0 in double precision, so the survival function is exactly 1.
  if (lambda < 0.05) return 1.0;
  const double a = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100000; ++k) {
    const double term = std::exp(a * static_cast<double>(k) * static_cast<double>(k));
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace detail {

// Exact permutation p-value: the share of all C(n+m, n) relabelings of the
// pooled multiset whose D reaches the observed D. Lexicographic walk over
// index subsets; comparisons stay in integer units.
inline void ks_exact_enumerate(const PooledSamples& pooled, long long observed,
                               long long& ge_count, long long& total_count) {
  const long long n = pooled.n;
  const long long total = n + pooled.m;
  std::vector<long long> comb(static_cast<std::size_t>(n));
  std::iota(comb.begin(), comb.end(), 0);
  ge_count = 0;
  total_count = 0;
  std::vector<char> labels(static_cast<std::size_t>(total));
  while (true) {
    std::fill(labels.begin(), labels.end(), 0);
    for (long long idx : comb) labels[static_cast<std::size_t>(idx)] = 1;
    if (ks_numerator_sorted(pooled.values, labels, n, pooled.m) >= observed) ++ge_count;
    ++total_count;
    // next lexicographic combination
    long long i = n - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == total - n + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (long long j = i + 1; j < n; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

inline void ks_exact_monte_carlo(const PooledSamples& pooled, long long observed,
                                 std::uint64_t seed, int replicates,
                                 long long& ge_count, long long& total_count) {
  Rng rng(derive_stream(seed, 0x6b73));  // "ks"
  std::vector<char> labels = pooled.labels;
  long long hits = 0;
  for (int r = 0; r < replicates; ++r) {
    rng.shuffle(labels);
    if (ks_numerator_sorted(pooled.values, labels, pooled.n, pooled.m) >= observed) ++hits;
  }
  // The observed labeling itself counts toward the numerator.
  ge_count = hits + 1;
  total_count = replicates + 1;
}

}  // namespace detail

// Two-sample Kolmogorov-Smirnov test. The asymptotic p applies the
// small-sample effective-size correction sqrt(ne) + 0.12 + 0.11/sqrt(ne)
// (Stephens 1970); the exact p conditions on the pooled multiset, which is
// the correct null in the presence of ties.
inline KsResult ks_two_sample(std::span<const double> x, std::span<const double> y,
                              const KsSettings& settings = {}) {
  require(x.size() >= 2 && y.size() >= 2, ErrorKind::kArgument,
          "ks_two_sample needs at least 2 values per sample");
  const auto pooled = detail::pool_samples(x, y);
  const long long numerator =
      detail::ks_numerator_sorted(pooled.values, pooled.labels, pooled.n, pooled.m);
  KsResult result;
  result.n = x.size();
  result.m = y.size();
  result.d_statistic = static_cast<double>(numerator) /
                       (static_cast<double>(pooled.n) * static_cast<double>(pooled.m));
  if (settings.pmethod == KsPValueMethod::kAsymptotic) {
    result.method = KsMethod::kAsymptotic;
    const double ne = static_cast<double>(pooled.n) * static_cast<double>(pooled.m) /
                      static_cast<double>(pooled.n + pooled.m);
    const double sqrt_ne = std::sqrt(ne);
    const double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * result.d_statistic;
    result.p_value = std::clamp(kolmogorov_sf(lambda), 0.0, 1.0);
    return result;
  }
  const long long combinations = detail::binomial_capped(
      pooled.n + pooled.m, pooled.n, settings.enumeration_limit);
  if (combinations <= settings.enumeration_limit) {
    result.method = KsMethod::kExactEnumeration;
    detail::ks_exact_enumerate(pooled, numerator, result.ge_count, result.total_count);
  } else {
    result.method = KsMethod::kExactMonteCarlo;
    require(settings.mc_replicates > 0, ErrorKind::kArgument,
            "Monte-Carlo p-value needs replicates > 0");
    detail::ks_exact_monte_carlo(pooled, numerator, settings.seed,
                                 settings.mc_replicates, result.ge_count,
                                 result.total_count);
  }
  result.p_value = static_cast<double>(result.ge_count) /
                   static_cast<double>(result.total_count);
  return result;
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta and the t / F tails built on it

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 3e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// I_x(a, b), absolute accuracy better than 1e-10 over the domain.
inline double regularized_incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, ErrorKind::kArgument,
          "regularized_incomplete_beta needs a, b > 0");
  require(x >= 0.0 && x <= 1.0, ErrorKind::kArgument,
          "regularized_incomplete_beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-tailed Student-t tail probability with df degrees of freedom.
inline double student_t_sf_two_tailed(double t, double df) {
  require(df > 0.0, ErrorKind::kArgument, "t distribution needs df > 0");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2));
}

// P(F' >= f) for an F distribution with (d1, d2) degrees of freedom.
inline double f_sf(double f, double d1, double d2) {
  require(d1 > 0.0 && d2 > 0.0, ErrorKind::kArgument, "F distribution needs df > 0");
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

// F implied by a model's R-squared: F = (R^2/k) / ((1-R^2)/df_denominator).
inline double f_from_r_squared(double r_squared, long long df_denominator, int k = 1) {
  require(k > 0 && df_denominator > 0, ErrorKind::kArgument, "invalid degrees of freedom");
  require(r_squared >= 0.0 && r_squared <= 1.0, ErrorKind::kArgument,
          "r_squared must lie in [0, 1]");
  if (r_squared >= 1.0) return std::numeric_limits<double>::infinity();
  return (r_squared / k) / ((1.0 - r_squared) / static_cast<double>(df_denominator));
}

// ---------------------------------------------------------------------------
// Pearson correlation

struct CorrelationResult {
  double r = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::kArgument, "pearson needs equal lengths");
  const std::size_t n = x.size();
  require(n >= 3, ErrorKind::kArgument, "pearson needs n >= 3");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  require(sxx > 0.0 && syy > 0.0, ErrorKind::kDegenerate,
          "pearson is undefined for a constant variable");
  CorrelationResult result;
  result.n = n;
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - result.r * result.r;
  if (one_minus_r2 < 1e-15) {
    result.t_statistic = result.r > 0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
    result.p_value = 0.0;
  } else {
    result.t_statistic = result.r * std::sqrt(df / one_minus_r2);
    result.p_value = student_t_sf_two_tailed(std::fabs(result.t_statistic), df);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Ordinary least squares

struct RegressionResult {
  double intercept = 0.0;
  std::vector<double> slopes;
  std::vector<double> standardized_betas;
  double r_squared = 0.0;
  double f_statistic = 0.0;
  long long df_numerator = 0;
  long long df_denominator = 0;
  double p_value = 1.0;
  std::size_t n = 0;
};

namespace detail {

// Gaussian elimination with partial pivoting; throws on rank deficiency.
inline std::vector<double> solve_linear_system(std::vector<std::vector<double>> mat,
                                               std::vector<double> rhs) {
  const std::size_t dim = rhs.size();
  double scale = 0.0;
  for (const auto& row : mat) {
    for (double v : row) scale = std::max(scale, std::fabs(v));
  }
  const double threshold = std::max(scale, 1.0) * 1e-12;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < dim; ++row) {
      if (std::fabs(mat[row][col]) > std::fabs(mat[pivot][col])) pivot = row;
    }
    if (std::fabs(mat[pivot][col]) <= threshold) {
      throw Error(ErrorKind::kSingular, "design matrix is rank deficient");
    }
    std::swap(mat[col], mat[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t row = col + 1; row < dim; ++row) {
      const double factor = mat[row][col] / mat[col][col];
      for (std::size_t k = col; k < dim; ++k) mat[row][k] -= factor * mat[col][k];
      rhs[row] -= factor * rhs[col];
    }
  }
  std::vector<double> solution(dim);
  for (std::size_t i = dim; i-- > 0;) {
    double sum = rhs[i];
    for (std::size_t k = i + 1; k < dim; ++k) sum -= mat[i][k] * solution[k];
    solution[i] = sum / mat[i][i];
  }
  return solution;
}

inline double sample_sd(std::span<const double> values) {
  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace detail

// Least-squares fit with intercept. Significance is the standard overall
// F test with (k, n-k-1) degrees of freedom.
inline RegressionResult ols(const std::vector<std::vector<double>>& predictors,
                            std::span<const double> y) {
  const std::size_t k = predictors.size();
  const std::size_t n = y.size();
  require(k >= 1, ErrorKind::kArgument, "ols needs at least one predictor");
  for (const auto& column : predictors) {
    require(column.size() == n, ErrorKind::kArgument, "predictor length mismatch");
  }
  require(n >= k + 2, ErrorKind::kArgument,
          "ols needs n > predictors + 1 (no residual degrees of freedom)");

  // Normal equations over [1, x_1, ..., x_k].
  const std::size_t dim = k + 1;
  std::vector<std::vector<double>> gram(dim, std::vector<double>(dim, 0.0));
  std::vector<double> moment(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(dim);
    row[0] = 1.0;
    for (std::size_t j = 0; j < k; ++j) row[j + 1] = predictors[j][i];
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a; b < dim; ++b) gram[a][b] += row[a] * row[b];
      moment[a] += row[a] * y[i];
    }
  }
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < a; ++b) gram[a][b] = gram[b][a];
  }
  const std::vector<double> coef = detail::solve_linear_system(gram, moment);

  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(n);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = coef[0];
    for (std::size_t j = 0; j < k; ++j) fitted += coef[j + 1] * predictors[j][i];
    ss_res += (y[i] - fitted) * (y[i] - fitted);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  require(ss_tot > 0.0, ErrorKind::kDegenerate, "response variable is constant");

  RegressionResult result;
  result.n = n;
  result.intercept = coef[0];
  result.slopes.assign(coef.begin() + 1, coef.end());
  result.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  result.df_numerator = static_cast<long long>(k);
  result.df_denominator = static_cast<long long>(n - k - 1);
  if (1.0 - result.r_squared < 1e-14) {
    result.f_statistic = std::numeric_limits<double>::infinity();
    result.p_value = 0.0;
  } else {
    result.f_statistic = (result.r_squared / static_cast<double>(k)) /
                         ((1.0 - result.r_squared) / static_cast<double>(result.df_denominator));
    result.p_value = f_sf(result.f_statistic, static_cast<double>(result.df_numerator),
                          static_cast<double>(result.df_denominator));
  }
  const double sd_y = detail::sample_sd(y);
  result.standardized_betas.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    result.standardized_betas[j] = result.slopes[j] * detail::sample_sd(predictors[j]) / sd_y;
  }
  return result;
}

}  // namespace dgtqc

#endif  // DGTQC_STATS_HPP_

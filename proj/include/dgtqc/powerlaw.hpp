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

// Power-law fitting in the style of Clauset, Shalizi & Newman (2009):
// maximum-likelihood scaling exponents, cutoff selection by KS-distance
// minimization over the candidate xmins, and the semi-parametric bootstrap
// goodness-of-fit p-value. Continuous and discrete (Hurwitz zeta) variants.

#ifndef DGTQC_POWERLAW_HPP_
#define DGTQC_POWERLAW_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dgtqc/error.hpp"
#include "dgtqc/rng.hpp"

namespace dgtqc {

enum class PowerLawMode { kContinuous, kDiscrete };

inline const char* to_string(PowerLawMode m) {
  return m == PowerLawMode::kContinuous ? "continuous" : "discrete";
}

struct PowerLawFit {
  double alpha = 0.0;       // scaling exponent, > 1
  double xmin = 0.0;        // tail cutoff
  std::size_t n_tail = 0;   // points >= xmin
  double d_statistic = 0.0; // KS distance between empirical and fitted tail CDFs
  PowerLawMode mode = PowerLawMode::kContinuous;
};

struct GofResult {
  PowerLawFit fit;
  double p_value = 0.0;
  int replicates = 0;  // successful replicate refits behind p_value
  int discarded = 0;   // replicate refits that failed
  std::uint64_t seed = 0;
};

// Hurwitz zeta sum_{k>=0} (q+k)^-s for s > 1, q > 0: direct summation until
// q+k >= 25, then Euler-Maclaurin tail with three Bernoulli corrections
// (absolute error well below 1e-12 over alpha in (1, 8]).
inline double hurwitz_zeta(double s, double q) {
  require(s > 1.0, ErrorKind::kArgument, "hurwitz_zeta needs s > 1");
  require(q > 0.0, ErrorKind::kArgument, "hurwitz_zeta needs q > 0");
  double sum = 0.0;
  double k = 0.0;
  while (q + k < 25.0) {
    sum += std::pow(q + k, -s);
    k += 1.0;
  }
  const double n = q + k;
  const double n_pow = std::pow(n, -s);
  sum += n * n_pow / (s - 1.0);  // integral term: n^(1-s)/(s-1)
  sum += 0.5 * n_pow;
  sum += s * n_pow / (12.0 * n);
  sum -= s * (s + 1.0) * (s + 2.0) * n_pow / (720.0 * n * n * n);
  sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n_pow /
         (30240.0 * n * n * n * n * n);
  return sum;
}

namespace detail {

inline std::vector<double> sorted_positive(std::span<const double> data,
                                           bool require_integers) {
  require(data.size() >= 3, ErrorKind::kArgument,
          "power-law fit needs at least 3 values");
  std::vector<double> sorted(data.begin(), data.end());
  for (double v : sorted) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::kArgument,
            "power-law fit needs strictly positive data");
    if (require_integers) {
      require(v == std::floor(v), ErrorKind::kArgument,
              "discrete power-law fit needs integer data");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  require(sorted.front() < sorted.back(), ErrorKind::kArgument,
          "power-law fit needs at least 2 distinct values");
  return sorted;
}

// Sup distance between the tail's empirical step CDF and a continuous
// fitted CDF, evaluated at both sides of every step.
inline double tail_ks_continuous(const std::vector<double>& sorted, std::size_t start,
                                 double xmin, double alpha) {
  const double n = static_cast<double>(sorted.size() - start);
  double best = 0.0;
  for (std::size_t i = start; i < sorted.size(); ++i) {
    const double fitted = 1.0 - std::pow(sorted[i] / xmin, 1.0 - alpha);
    const double lower = static_cast<double>(i - start) / n;
    const double upper = static_cast<double>(i - start + 1) / n;
    best = std::max({best, std::fabs(fitted - lower), std::fabs(fitted - upper)});
  }
  return best;
}

// Discrete variant: both CDFs evaluated at the distinct tail values, with
// P(v) = 1 - zeta(alpha, v+1) / zeta(alpha, xmin).
inline double tail_ks_discrete(const std::vector<double>& sorted, std::size_t start,
                               double xmin, double alpha) {
  const double n = static_cast<double>(sorted.size() - start);
  const double z0 = hurwitz_zeta(alpha, xmin);
  double best = 0.0;
  for (std::size_t i = start; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    const double fitted = 1.0 - hurwitz_zeta(alpha, sorted[i] + 1.0) / z0;
    const double empirical = static_cast<double>(i - start + 1) / n;
    best = std::max(best, std::fabs(fitted - empirical));
  }
  return best;
}

// Golden-section maximization of a unimodal function on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& f, double lo,
                                 double hi, double tolerance) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace detail

// Continuous fit: for each candidate cutoff among the distinct data values
// (or the pinned value, when given), the MLE alpha = 1 + n / sum(ln(x/xmin))
// over the tail; the returned candidate minimizes the tail KS distance.
// Candidates leaving fewer than 3 tail points are skipped.
inline PowerLawFit fit_continuous(std::span<const double> data,
                                  std::optional<double> fixed_xmin = std::nullopt) {
  const auto sorted = detail::sorted_positive(data, false);
  const std::size_t n = sorted.size();
  std::vector<double> suffix_log(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    suffix_log[i] = suffix_log[i + 1] + std::log(sorted[i]);
  }
  std::vector<double> candidates;
  if (fixed_xmin) {
    require(*fixed_xmin > 0.0, ErrorKind::kArgument, "xmin must be positive");
    candidates.push_back(*fixed_xmin);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || sorted[i] != sorted[i - 1]) candidates.push_back(sorted[i]);
    }
  }
  std::optional<PowerLawFit> best;
  for (double xmin : candidates) {
    const std::size_t start = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), xmin) - sorted.begin());
    const std::size_t n_tail = n - start;
    if (n_tail < 3) continue;
    const double log_sum =
        suffix_log[start] - static_cast<double>(n_tail) * std::log(xmin);
    if (log_sum <= 0.0) continue;  // tail has no spread above xmin
    PowerLawFit fit;
    fit.mode = PowerLawMode::kContinuous;
    fit.xmin = xmin;
    fit.n_tail = n_tail;
    fit.alpha = 1.0 + static_cast<double>(n_tail) / log_sum;
    fit.d_statistic = detail::tail_ks_continuous(sorted, start, xmin, fit.alpha);
    if (!best || fit.d_statistic < best->d_statistic) best = fit;
  }
  require(best.has_value(), ErrorKind::kInsufficientTail,
          "no cutoff leaves a fittable tail (need 3+ points with spread)");
  return *best;
}

// Discrete fit: alpha maximizes -n*ln zeta(alpha, xmin) - alpha*sum(ln x)
// by golden-section search over (1, 6]; xmin selected by KS minimization as
// in the continuous case.
inline PowerLawFit fit_discrete(std::span<const double> data,
                                std::optional<double> fixed_xmin = std::nullopt) {
  const auto sorted = detail::sorted_positive(data, true);
  const std::size_t n = sorted.size();
  std::vector<double> candidates;
  if (fixed_xmin) {
    require(*fixed_xmin >= 1.0 && *fixed_xmin == std::floor(*fixed_xmin),
            ErrorKind::kArgument, "discrete xmin must be a positive integer");
    candidates.push_back(*fixed_xmin);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || sorted[i] != sorted[i - 1]) candidates.push_back(sorted[i]);
    }
  }
  std::optional<PowerLawFit> best;
  for (double xmin : candidates) {
    const std::size_t start = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), xmin) - sorted.begin());
    const std::size_t n_tail = n - start;
    if (n_tail < 3) continue;
    double log_sum = 0.0;
    for (std::size_t i = start; i < n; ++i) log_sum += std::log(sorted[i]);
    const auto log_likelihood = [&](double alpha) {
      return -static_cast<double>(n_tail) * std::log(hurwitz_zeta(alpha, xmin)) -
             alpha * log_sum;
    };
    PowerLawFit fit;
    fit.mode = PowerLawMode::kDiscrete;
    fit.xmin = xmin;
    fit.n_tail = n_tail;
    fit.alpha = detail::golden_section_max(log_likelihood, 1.0 + 1e-6, 6.0, 1e-7);
    fit.d_statistic = detail::tail_ks_discrete(sorted, start, xmin, fit.alpha);
    if (!best || fit.d_statistic < best->d_statistic) best = fit;
  }
  require(best.has_value(), ErrorKind::kInsufficientTail,
          "no cutoff leaves a fittable tail (need 3+ points)");
  return *best;
}

inline PowerLawFit fit_power_law(std::span<const double> data, PowerLawMode mode,
                                 std::optional<double> fixed_xmin = std::nullopt) {
  return mode == PowerLawMode::kContinuous ? fit_continuous(data, fixed_xmin)
                                           : fit_discrete(data, fixed_xmin);
}

namespace detail {

inline double sample_powerlaw_continuous(Rng& rng, double alpha, double xmin) {
  return xmin * std::pow(rng.uniform_open01(), -1.0 / (alpha - 1.0));
}

inline double sample_powerlaw_discrete(Rng& rng, double alpha, double xmin) {
  const double u = rng.uniform01();
  const double z0 = hurwitz_zeta(alpha, xmin);
  const auto cdf = [&](double v) { return 1.0 - hurwitz_zeta(alpha, v + 1.0) / z0; };
  // Double the bracket, then bisect to the smallest integer with CDF >= u.
  double lo = xmin;
  if (cdf(lo) >= u) return lo;
  double hi = 2.0 * xmin;
  while (cdf(hi) < u) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) return hi;  // u astronomically close to 1
  }
  while (hi - lo > 0.5) {
    const double mid = std::floor((lo + hi) / 2.0);
    if (cdf(mid) >= u) hi = mid;
    else lo = mid + 1.0;
    if (lo >= hi) break;
  }
  return hi;
}

inline void parallel_for(std::size_t count, unsigned max_threads,
                         const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
  unsigned workers = std::max(1u, std::min(max_threads, std::thread::hardware_concurrency()));
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    chunk_fn(0, count);
    return;
  }
  std::vector<std::thread> threads;
  const std::size_t per = (count + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = t * per;
    const std::size_t end = std::min(count, begin + per);
    if (begin >= end) break;
    threads.emplace_back(chunk_fn, begin, end);
  }
  for (auto& thread : threads) thread.join();
}

}  // namespace detail

// Deterministic power-law variates: continuous by inverse CDF
// xmin * u^(-1/(alpha-1)); discrete by CDF inversion on the zeta mass
// function.
inline std::vector<double> sample_powerlaw(double alpha, double xmin, std::size_t n,
                                           std::uint64_t seed,
                                           PowerLawMode mode = PowerLawMode::kContinuous) {
  require(alpha > 1.0, ErrorKind::kArgument, "sample_powerlaw needs alpha > 1");
  require(xmin > 0.0, ErrorKind::kArgument, "sample_powerlaw needs xmin > 0");
  require(n >= 1, ErrorKind::kArgument, "sample_powerlaw needs n >= 1");
  if (mode == PowerLawMode::kDiscrete) {
    require(xmin == std::floor(xmin) && xmin >= 1.0, ErrorKind::kArgument,
            "discrete sampling needs integer xmin >= 1");
  }
  Rng rng(derive_stream(seed, 0x706c));  // "pl"
  std::vector<double> draws(n);
  for (double& v : draws) {
    v = mode == PowerLawMode::kContinuous
            ? detail::sample_powerlaw_continuous(rng, alpha, xmin)
            : detail::sample_powerlaw_discrete(rng, alpha, xmin);
  }
  return draws;
}

// Semi-parametric bootstrap p-value for "the data are power-law above xmin".
// Each replicate draws |data| points, each from the fitted tail with
// probability n_tail/n and otherwise uniformly from the empirical values
// below xmin; the replicate is re-fitted by the full procedure (cutoff search
// included) and its KS distance compared with the observed one. Replicates
// run in parallel on substreams derived from (seed, replicate index), so the
// result depends only on (data, fit, replicates, seed).
inline GofResult gof_pvalue(std::span<const double> data, const PowerLawFit& fit,
                            int replicates, std::uint64_t seed,
                            std::vector<std::string>* warnings = nullptr,
                            unsigned max_threads = 64) {
  require(replicates >= 100, ErrorKind::kArgument, "gof_pvalue needs replicates >= 100");
  require(fit.n_tail >= 3 && fit.n_tail <= data.size(), ErrorKind::kArgument,
          "fit does not belong to this data");
  std::vector<double> body;
  for (double v : data) {
    if (v < fit.xmin) body.push_back(v);
  }
  const std::size_t n = data.size();
  const double tail_share = static_cast<double>(fit.n_tail) / static_cast<double>(n);

  std::vector<int> outcome(static_cast<std::size_t>(replicates), -1);  // -1 fail, 0 below, 1 >=
  detail::parallel_for(
      static_cast<std::size_t>(replicates), max_threads,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> synthetic(n);
        for (std::size_t r = begin; r < end; ++r) {
          Rng rng(derive_stream(seed, 0x676f66 + r));  // "gof" + replicate
          for (double& v : synthetic) {
            if (body.empty() || rng.bernoulli(tail_share)) {
              v = fit.mode == PowerLawMode::kContinuous
                      ? detail::sample_powerlaw_continuous(rng, fit.alpha, fit.xmin)
                      : detail::sample_powerlaw_discrete(rng, fit.alpha, fit.xmin);
            } else {
              v = body[rng.below(body.size())];
            }
          }
          try {
            const PowerLawFit refit = fit_power_law(synthetic, fit.mode);
            outcome[r] = refit.d_statistic >= fit.d_statistic ? 1 : 0;
          } catch (const Error&) {
            outcome[r] = -1;
          }
        }
      });

  GofResult result;
  result.fit = fit;
  result.seed = seed;
  long long ge = 0;
  for (std::size_t r = 0; r < outcome.size(); ++r) {
    if (outcome[r] < 0) {
      ++result.discarded;
      if (warnings) {
        warnings->push_back("gof replicate " + std::to_string(r) + " failed to refit");
      }
    } else {
      ++result.replicates;
      ge += outcome[r];
    }
  }
  require(result.discarded * 10 <= replicates, ErrorKind::kInstability,
          "more than 10% of bootstrap replicates failed to refit");
  result.p_value = static_cast<double>(ge) / static_cast<double>(result.replicates);
  return result;
}

}  // namespace dgtqc

#endif  // DGTQC_POWERLAW_HPP_

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

// The distributional-ground-truth method: rank the trusted labelers by
// quality index, score each crowdworker by the averaged two-sample KS
// p-values between their class distribution and every trusted labeler's,
// carve non-overlapping testing subsets per trusted-set size, and fit the
// prediction and baseline regressions.
//
// The two vocabularies are deliberately never aligned: a worker's value list
// and a trusted labeler's value list enter the KS test with their own
// lengths, so the method works independently of the particular class lists.

#ifndef DGTQC_METHOD_HPP_
#define DGTQC_METHOD_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgtqc/corpus.hpp"
#include "dgtqc/metrics.hpp"
#include "dgtqc/powerlaw.hpp"
#include "dgtqc/stats.hpp"

namespace dgtqc {

// How distributions are turned into KS inputs and how p-values are computed.
struct KsConfig {
  Normalization norm = Normalization::kMean;
  KsPValueMethod pmethod = KsPValueMethod::kAsymptotic;
  std::uint64_t seed = 0;
  int mc_replicates = 10000;
  long long enumeration_limit = 200000;

  KsSettings settings() const {
    KsSettings s;
    s.pmethod = pmethod;
    s.seed = seed;
    s.mc_replicates = mc_replicates;
    s.enumeration_limit = enumeration_limit;
    return s;
  }
};

struct DgtScore {
  std::string worker_id;
  // (trusted labeler id, KS p-value), in trusted-set order.
  std::vector<std::pair<std::string, double>> per_trusted_p;
  double avg_p = 0.0;
  // Echo of how the comparisons were configured.
  Normalization norm = Normalization::kMean;
  KsPValueMethod pmethod = KsPValueMethod::kAsymptotic;
};

// Trusted labelers ranked by quality index, descending; ties broken by
// precision, then id. Profiles without a quality index (nothing verified)
// are excluded with a warning.
inline std::vector<TrustedProfile> order_trusted(
    std::span<const TrustedProfile> profiles,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<TrustedProfile> ordered;
  for (const auto& profile : profiles) {
    if (profile.q.has_value()) {
      ordered.push_back(profile);
    } else if (warnings) {
      warnings->push_back("trusted labeler " + profile.labeler_id +
                          " has no quality index; excluded from the trusted ordering");
    }
  }
  std::sort(ordered.begin(), ordered.end(), [](const TrustedProfile& a,
                                               const TrustedProfile& b) {
    if (*a.q != *b.q) return *a.q > *b.q;
    const double pa = a.precision_t.value_or(0.0);
    const double pb = b.precision_t.value_or(0.0);
    if (pa != pb) return pa > pb;
    return a.labeler_id < b.labeler_id;
  });
  return ordered;
}

// One worker against the whole trusted set: each side's distribution is
// normalized by its own statistics, the two bare value lists go through the
// two-sample KS test, and the p-values are averaged.
inline DgtScore dgt_score(const WorkerProfile& worker,
                          std::span<const TrustedProfile> trusted,
                          const KsConfig& config = {}) {
  require(!trusted.empty(), ErrorKind::kArgument, "dgt_score needs a non-empty trusted set");
  require(worker.distribution.total > 0, ErrorKind::kDegenerate,
          "worker " + worker.worker_id + " has an empty class distribution");
  DgtScore score;
  score.worker_id = worker.worker_id;
  score.norm = config.norm;
  score.pmethod = config.pmethod;
  const auto worker_values = normalize_distribution(worker.distribution, config.norm);
  double sum = 0.0;
  for (const auto& profile : trusted) {
    require(profile.distribution.total > 0, ErrorKind::kDegenerate,
            "trusted labeler " + profile.labeler_id + " has an empty class distribution");
    const auto trusted_values = normalize_distribution(profile.distribution, config.norm);
    const KsResult ks = ks_two_sample(worker_values, trusted_values, config.settings());
    score.per_trusted_p.emplace_back(profile.labeler_id, ks.p_value);
    sum += ks.p_value;
  }
  score.avg_p = sum / static_cast<double>(score.per_trusted_p.size());
  return score;
}

// Who gets tested: attempted-HIT and labeled-element floors, re-applied
// inside every subset.
struct InclusionRule {
  long long min_attempted = 10;
  long long min_elements = 100;
};

struct TestingSubset {
  std::vector<std::string> trusted_ids;       // top-k, in trusted-set order
  std::set<std::string> removed_screenshots;  // labeled by those k labelers
  std::size_t pool_screenshots = 0;           // distinct screenshots in the corpus
  std::vector<WorkerProfile> workers;         // recomputed on surviving records
  std::set<std::string> subset_screenshots;   // screenshots behind those workers
  long long accepted_hits = 0;                // over the subset workers
  long long rejected_hits = 0;
  double precision_mean = 0.0;
  double precision_sd = 0.0;
};

// Removes the top-k trusted labelers' screenshots from the worker record
// pool, recomputes every worker profile over the surviving records, and
// re-applies the inclusion rule. By construction the trusted and testing
// screenshots never overlap.
inline TestingSubset testing_subset(const Corpus& corpus,
                                    std::span<const TrustedProfile> ordered_trusted,
                                    std::size_t k, const InclusionRule& rule = {},
                                    const MetricsConfig& metrics_config = {}) {
  require(k >= 1 && k <= ordered_trusted.size(), ErrorKind::kArgument,
          "trusted-set size " + std::to_string(k) + " out of range [1, " +
              std::to_string(ordered_trusted.size()) + "]");
  TestingSubset subset;
  for (std::size_t i = 0; i < k; ++i) {
    subset.trusted_ids.push_back(ordered_trusted[i].labeler_id);
    subset.removed_screenshots.insert(ordered_trusted[i].screenshots.begin(),
                                      ordered_trusted[i].screenshots.end());
  }
  std::set<std::string> pool;
  for (const auto& labeling : corpus.trusted_labelings) pool.insert(labeling.screenshot_id);
  for (const auto& record : corpus.worker_records) pool.insert(record.screenshot_id);
  subset.pool_screenshots = pool.size();

  std::vector<WorkerTaskRecord> surviving;
  for (const auto& record : corpus.worker_records) {
    if (!subset.removed_screenshots.contains(record.screenshot_id)) {
      surviving.push_back(record);
    }
  }
  auto profiles = build_worker_profiles(surviving, corpus.worker_vocabulary, metrics_config);
  std::vector<double> precisions;
  std::set<std::string> included_workers;
  for (auto& profile : profiles) {
    if (profile.attempted < rule.min_attempted ||
        profile.total_elements < rule.min_elements) {
      continue;
    }
    subset.accepted_hits += profile.accepted;
    subset.rejected_hits += profile.rejected;
    precisions.push_back(profile.precision_amt);
    included_workers.insert(profile.worker_id);
    subset.workers.push_back(std::move(profile));
  }
  for (const auto& record : surviving) {
    if (included_workers.contains(record.worker_id)) {
      subset.subset_screenshots.insert(record.screenshot_id);
    }
  }
  if (!precisions.empty()) {
    double sum = 0.0;
    for (double p : precisions) sum += p;
    subset.precision_mean = sum / static_cast<double>(precisions.size());
    subset.precision_sd = detail::sd_of(precisions);
  }
  return subset;
}

struct SweepRow {
  std::size_t trusted_size = 0;
  std::vector<std::string> trusted_ids;
  std::size_t uis_removed = 0;
  double uis_removed_fraction = 0.0;  // of the trusted-labeled screenshot pool
  std::size_t workers_in_subset = 0;
  long long accepted_hits = 0;
  long long rejected_hits = 0;
  double precision_mean = 0.0;
  double precision_sd = 0.0;
  std::vector<DgtScore> scores;               // one per scoreable subset worker
  std::vector<double> score_precisions;       // aligned with scores
  std::optional<RegressionResult> model;      // absent below 3 workers or degenerate
};

// One row per trusted-set size: carve the subset, score its workers, regress
// subset precision on the averaged p-value.
inline std::vector<SweepRow> sweep(const Corpus& corpus,
                                   std::span<const TrustedProfile> ordered_trusted,
                                   std::size_t k_min, std::size_t k_max,
                                   const KsConfig& ks_config = {},
                                   const InclusionRule& rule = {},
                                   const MetricsConfig& metrics_config = {}) {
  require(k_min >= 1 && k_min <= k_max && k_max <= ordered_trusted.size(),
          ErrorKind::kArgument, "trusted-set size range out of bounds");
  std::vector<SweepRow> rows;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const TestingSubset subset =
        testing_subset(corpus, ordered_trusted, k, rule, metrics_config);
    SweepRow row;
    row.trusted_size = k;
    row.trusted_ids = subset.trusted_ids;
    row.uis_removed = subset.removed_screenshots.size();
    row.uis_removed_fraction =
        subset.pool_screenshots == 0
            ? 0.0
            : static_cast<double>(row.uis_removed) /
                  static_cast<double>(subset.pool_screenshots);
    row.workers_in_subset = subset.workers.size();
    row.accepted_hits = subset.accepted_hits;
    row.rejected_hits = subset.rejected_hits;
    row.precision_mean = subset.precision_mean;
    row.precision_sd = subset.precision_sd;
    for (const auto& worker : subset.workers) {
      if (worker.distribution.total == 0) continue;  // nothing to compare
      row.scores.push_back(
          dgt_score(worker, ordered_trusted.subspan(0, k), ks_config));
      row.score_precisions.push_back(worker.precision_amt);
    }
    if (row.scores.size() >= 3) {
      std::vector<double> avg_p;
      for (const auto& score : row.scores) avg_p.push_back(score.avg_p);
      try {
        row.model = ols({avg_p}, row.score_precisions);
      } catch (const Error&) {
        row.model.reset();  // degenerate subset; row keeps the absence marker
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Baseline and alternative factors

struct PowerLawConfig {
  PowerLawMode mode = PowerLawMode::kContinuous;
  int replicates = 1000;
  std::uint64_t seed = 0;
};

struct BaselineRow {
  std::string worker_id;
  double precision_amt = 0.0;
  std::vector<std::pair<std::string, double>> per_trusted_p;
  double avg_p = 0.0;
  long long attempted = 0;
  double tot_s = 0.0;
  double eui = 0.0;
  std::optional<PowerLawFit> pl_fit;
  std::optional<double> gof_pl;
};

struct BaselineReport {
  std::vector<BaselineRow> rows;
  std::optional<RegressionResult> model_avg_p;
  std::optional<RegressionResult> model_attempted;
  std::optional<RegressionResult> model_tot;
  std::optional<RegressionResult> model_eui;
  std::optional<RegressionResult> model_gof_pl;
  // avg_p and EUI together, with standardized betas.
  std::optional<RegressionResult> model_two_factor;
};

namespace detail {

inline std::optional<RegressionResult> try_single_factor(
    const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3) return std::nullopt;
  try {
    return ols({xs}, ys);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Per-worker factor table plus the single-factor regressions of worker
// precision on each factor and the (avg_p, EUI) two-factor model. The
// power-law factor fits each worker's positive class counts; workers whose
// fit fails are excluded from that regression only.
inline BaselineReport baseline_compare(std::span<const WorkerProfile> workers,
                                       std::span<const TrustedProfile> trusted,
                                       const KsConfig& ks_config = {},
                                       const PowerLawConfig& pl_config = {},
                                       std::vector<std::string>* warnings = nullptr) {
  require(!workers.empty(), ErrorKind::kArgument, "baseline_compare needs workers");
  BaselineReport report;
  for (std::size_t i = 0; i < workers.size(); ++i) {
    const WorkerProfile& worker = workers[i];
    BaselineRow row;
    row.worker_id = worker.worker_id;
    row.precision_amt = worker.precision_amt;
    row.attempted = worker.attempted;
    row.tot_s = worker.tot_amt_s;
    row.eui = worker.eui_amt;
    const DgtScore score = dgt_score(worker, trusted, ks_config);
    row.per_trusted_p = score.per_trusted_p;
    row.avg_p = score.avg_p;

    std::vector<double> positive_counts;
    for (long long c : worker.distribution.counts) {
      if (c > 0) positive_counts.push_back(static_cast<double>(c));
    }
    if (positive_counts.size() < worker.distribution.counts.size() && warnings) {
      warnings->push_back("worker " + worker.worker_id +
                          ": zero-count classes dropped before the power-law fit");
    }
    try {
      const PowerLawFit fit = fit_power_law(positive_counts, pl_config.mode);
      const GofResult gof =
          gof_pvalue(positive_counts, fit, pl_config.replicates,
                     derive_stream(pl_config.seed, 0xb00 + i));
      row.pl_fit = fit;
      row.gof_pl = gof.p_value;
    } catch (const Error& e) {
      row.pl_fit.reset();
      row.gof_pl.reset();
      if (warnings) {
        warnings->push_back("worker " + worker.worker_id +
                            ": power-law factor unavailable (" + e.what() + ")");
      }
    }
    report.rows.push_back(std::move(row));
  }

  std::vector<double> precision;
  std::vector<double> avg_p;
  std::vector<double> attempted;
  std::vector<double> tot;
  std::vector<double> eui;
  std::vector<double> gof_precision;
  std::vector<double> gof;
  for (const auto& row : report.rows) {
    precision.push_back(row.precision_amt);
    avg_p.push_back(row.avg_p);
    attempted.push_back(static_cast<double>(row.attempted));
    tot.push_back(row.tot_s);
    eui.push_back(row.eui);
    if (row.gof_pl) {
      gof.push_back(*row.gof_pl);
      gof_precision.push_back(row.precision_amt);
    }
  }
  report.model_avg_p = detail::try_single_factor(avg_p, precision);
  report.model_attempted = detail::try_single_factor(attempted, precision);
  report.model_tot = detail::try_single_factor(tot, precision);
  report.model_eui = detail::try_single_factor(eui, precision);
  report.model_gof_pl = detail::try_single_factor(gof, gof_precision);
  if (precision.size() >= 4) {
    try {
      report.model_two_factor = ols({avg_p, eui}, precision);
    } catch (const Error&) {
      report.model_two_factor.reset();
    }
  }
  return report;
}

}  // namespace dgtqc

#endif  // DGTQC_METHOD_HPP_

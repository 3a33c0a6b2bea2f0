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

// Per-person quality quantities: trusted precision / subjective completeness /
// quality index, crowdworker precision from HIT acceptance, class-frequency
// distributions with their normalizations, and profile assembly.

#ifndef DGTQC_METRICS_HPP_
#define DGTQC_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgtqc/corpus.hpp"
#include "dgtqc/error.hpp"

namespace dgtqc {

// ---------------------------------------------------------------------------
// Class distributions

struct ClassDistribution {
  std::vector<std::string> vocabulary;
  std::vector<long long> counts;  // aligned with vocabulary
  long long total = 0;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

enum class Normalization { kRaw, kMean, kProportion };

inline const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::kRaw: return "raw";
    case Normalization::kMean: return "mean";
    case Normalization::kProportion: return "proportion";
  }
  return "unknown";
}

struct DistributionOptions {
  bool include_zeros = true;    // keep zero-count vocabulary classes
  bool include_custom = false;  // append out-of-vocabulary labels as new classes
  std::map<std::string, std::string> aliases;  // curation merges, e.g. textt -> text
};

// Frequency table of `labels` over `vocabulary`. Labels are matched
// case-sensitively after alias substitution; out-of-vocabulary labels are
// dropped unless include_custom appends them (in first-appearance order).
inline ClassDistribution class_distribution(std::span<const std::string> labels,
                                            const std::vector<std::string>& vocabulary,
                                            const DistributionOptions& options = {}) {
  require(!vocabulary.empty(), ErrorKind::kArgument, "vocabulary must be non-empty");
  std::map<std::string, std::size_t> index;
  ClassDistribution dist;
  dist.vocabulary = vocabulary;
  dist.counts.assign(vocabulary.size(), 0);
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index[vocabulary[i]] = i;
  for (const std::string& raw : labels) {
    const auto alias = options.aliases.find(raw);
    const std::string& label = alias == options.aliases.end() ? raw : alias->second;
    auto found = index.find(label);
    if (found == index.end()) {
      if (!options.include_custom) continue;
      found = index.emplace(label, dist.vocabulary.size()).first;
      dist.vocabulary.push_back(label);
      dist.counts.push_back(0);
    }
    ++dist.counts[found->second];
    ++dist.total;
  }
  if (!options.include_zeros) {
    ClassDistribution filtered;
    filtered.total = dist.total;
    for (std::size_t i = 0; i < dist.vocabulary.size(); ++i) {
      if (dist.counts[i] > 0) {
        filtered.vocabulary.push_back(dist.vocabulary[i]);
        filtered.counts.push_back(dist.counts[i]);
      }
    }
    return filtered;
  }
  return dist;
}

// Rank-pair averaging, a presentation device for comparing distributions of
// different vocabulary sizes on one axis: sort descending, then average
// consecutive pairs into single ranks (an odd trailing value stays alone).
// Never applied before a KS comparison.
inline std::vector<double> rank_pair_average(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  std::vector<double> collapsed;
  for (std::size_t i = 0; i < values.size(); i += 2) {
    if (i + 1 < values.size()) collapsed.push_back((values[i] + values[i + 1]) / 2.0);
    else collapsed.push_back(values[i]);
  }
  return collapsed;
}

// raw: counts as numbers. mean: each count over the mean count, so the result
// averages exactly 1. proportion: each count over the total, summing to 1.
inline std::vector<double> normalize_distribution(const ClassDistribution& dist,
                                                  Normalization mode) {
  require(dist.total > 0, ErrorKind::kDegenerate,
          "cannot normalize a distribution with zero total");
  std::vector<double> values(dist.counts.size());
  switch (mode) {
    case Normalization::kRaw:
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<double>(dist.counts[i]);
      }
      break;
    case Normalization::kMean: {
      const double mean = static_cast<double>(dist.total) /
                          static_cast<double>(dist.counts.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<double>(dist.counts[i]) / mean;
      }
      break;
    }
    case Normalization::kProportion:
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<double>(dist.counts[i]) /
                    static_cast<double>(dist.total);
      }
      break;
  }
  return values;
}

// ---------------------------------------------------------------------------
// Quality quantities

// Per-screenshot precision averaged over screenshots (macro average), not
// pooled counts: [(9,1),(4,1)] gives mean(0.9, 0.8) = 0.85, not 13/15.
inline double precision_trusted(std::span<const std::pair<long, long>> per_screenshot) {
  require(!per_screenshot.empty(), ErrorKind::kArgument,
          "precision_trusted needs at least one screenshot");
  double sum = 0.0;
  for (const auto& [correct, incorrect] : per_screenshot) {
    const long total = correct + incorrect;
    require(total > 0, ErrorKind::kArgument,
            "screenshot with zero rated elements in precision_trusted");
    sum += static_cast<double>(correct) / static_cast<double>(total);
  }
  return sum / static_cast<double>(per_screenshot.size());
}

// Mean completeness rating rescaled to [0, 1]; screenshots without a rating
// are skipped.
inline double subjective_completeness(std::span<const std::optional<double>> scores) {
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& score : scores) {
    if (!score) continue;
    require(*score >= 0.0 && *score <= 100.0, ErrorKind::kArgument,
            "completeness score out of [0, 100]");
    sum += *score;
    ++present;
  }
  require(present > 0, ErrorKind::kArgument, "no completeness scores present");
  return sum / static_cast<double>(present) / 100.0;
}

inline double subjective_completeness(std::span<const double> scores) {
  std::vector<std::optional<double>> wrapped(scores.begin(), scores.end());
  return subjective_completeness(std::span<const std::optional<double>>(wrapped));
}

inline double quality_index(double precision, double sc) {
  require(precision >= 0.0 && precision <= 1.0, ErrorKind::kArgument,
          "precision out of [0, 1]");
  require(sc >= 0.0 && sc <= 1.0, ErrorKind::kArgument, "sc out of [0, 1]");
  return precision * sc;
}

inline double precision_worker(long long accepted, long long rejected) {
  require(accepted >= 0 && rejected >= 0, ErrorKind::kArgument, "negative HIT count");
  require(accepted + rejected > 0, ErrorKind::kUndefined,
          "worker precision undefined with zero attempted HITs");
  return static_cast<double>(accepted) / static_cast<double>(accepted + rejected);
}

// ---------------------------------------------------------------------------
// Profiles

struct TrustedProfile {
  std::string labeler_id;
  ClassDistribution distribution;  // over the trusted vocabulary
  std::set<std::string> screenshots;
  std::size_t n_uis = 0;         // screenshots labeled
  std::size_t verified_uis = 0;  // labelings with every box rated
  std::optional<double> precision_t;
  std::optional<double> precision_sd;
  std::optional<double> sc;     // in [0, 1]
  std::optional<double> sc_sd;  // in [0, 1]
  std::optional<double> q;
  double eui_t = 0.0;  // elements per UI, custom classes included
};

struct WorkerProfile {
  std::string worker_id;
  ClassDistribution distribution;  // over the worker vocabulary
  long long attempted = 0;
  long long accepted = 0;
  long long rejected = 0;
  double precision_amt = 0.0;
  double eui_amt = 0.0;    // labeled elements per attempted HIT
  double tot_amt_s = 0.0;  // mean seconds per attempted HIT
  long long total_elements = 0;
};

struct MetricsConfig {
  DistributionOptions distribution;
};

namespace detail {

inline double sd_of(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace detail

// Builds one profile per trusted labeler from their labelings. Quality fields
// stay absent for labelers with no fully verified screenshot; those profiles
// are later excluded from the trusted ordering.
inline std::vector<TrustedProfile> build_trusted_profiles(
    const Corpus& corpus, const MetricsConfig& config = {},
    std::vector<std::string>* warnings = nullptr) {
  std::map<std::string, std::vector<const ScreenshotLabeling*>> by_labeler;
  for (const auto& labeling : corpus.trusted_labelings) {
    by_labeler[labeling.labeler_id].push_back(&labeling);
  }
  std::vector<TrustedProfile> profiles;
  for (const auto& [labeler_id, labelings] : by_labeler) {
    TrustedProfile profile;
    profile.labeler_id = labeler_id;
    std::vector<std::string> labels;
    long long total_elements = 0;
    std::vector<double> precisions;
    std::vector<double> completeness;
    for (const ScreenshotLabeling* labeling : labelings) {
      profile.screenshots.insert(labeling->screenshot_id);
      total_elements += static_cast<long long>(labeling->boxes.size());
      for (const auto& box : labeling->boxes) labels.push_back(box.class_label);
      if (labeling->fully_verified()) {
        const auto [correct, incorrect] = labeling->verdict_counts();
        precisions.push_back(static_cast<double>(correct) /
                             static_cast<double>(correct + incorrect));
      }
      if (labeling->completeness) completeness.push_back(*labeling->completeness);
    }
    profile.n_uis = labelings.size();
    profile.verified_uis = precisions.size();
    profile.eui_t = profile.n_uis == 0
                        ? 0.0
                        : static_cast<double>(total_elements) /
                              static_cast<double>(profile.n_uis);
    profile.distribution =
        class_distribution(labels, corpus.trusted_vocabulary, config.distribution);
    if (!precisions.empty()) {
      double sum = 0.0;
      for (double p : precisions) sum += p;
      profile.precision_t = sum / static_cast<double>(precisions.size());
      profile.precision_sd = detail::sd_of(precisions);
    } else if (warnings) {
      warnings->push_back("trusted labeler " + labeler_id +
                          " has no fully verified screenshots; quality fields absent");
    }
    if (!completeness.empty()) {
      double sum = 0.0;
      for (double c : completeness) sum += c;
      profile.sc = sum / static_cast<double>(completeness.size()) / 100.0;
      profile.sc_sd = detail::sd_of(completeness) / 100.0;
    }
    if (profile.precision_t && profile.sc) {
      profile.q = quality_index(*profile.precision_t, *profile.sc);
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

// Builds one profile per worker over the given records (all attempted HITs:
// accepted and rejected both count, and zero-box submissions still enter the
// EUI and ToT averages).
inline std::vector<WorkerProfile> build_worker_profiles(
    std::span<const WorkerTaskRecord> records,
    const std::vector<std::string>& worker_vocabulary,
    const MetricsConfig& config = {}) {
  std::map<std::string, std::vector<const WorkerTaskRecord*>> by_worker;
  for (const auto& record : records) {
    by_worker[record.worker_id].push_back(&record);
  }
  std::vector<WorkerProfile> profiles;
  for (const auto& [worker_id, worker_records] : by_worker) {
    WorkerProfile profile;
    profile.worker_id = worker_id;
    std::vector<std::string> labels;
    double time_sum = 0.0;
    for (const WorkerTaskRecord* record : worker_records) {
      profile.attempted += 1;
      (record->status == HitStatus::kAccepted ? profile.accepted : profile.rejected) += 1;
      profile.total_elements += static_cast<long long>(record->boxes.size());
      time_sum += record->time_on_task_s;
      for (const auto& box : record->boxes) labels.push_back(box.class_label);
    }
    profile.precision_amt = precision_worker(profile.accepted, profile.rejected);
    profile.eui_amt = static_cast<double>(profile.total_elements) /
                      static_cast<double>(profile.attempted);
    profile.tot_amt_s = time_sum / static_cast<double>(profile.attempted);
    profile.distribution =
        class_distribution(labels, worker_vocabulary, config.distribution);
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

inline std::pair<std::vector<TrustedProfile>, std::vector<WorkerProfile>> build_profiles(
    const Corpus& corpus, const MetricsConfig& config = {},
    std::vector<std::string>* warnings = nullptr) {
  return {build_trusted_profiles(corpus, config, warnings),
          build_worker_profiles(corpus.worker_records, corpus.worker_vocabulary, config)};
}

}  // namespace dgtqc

#endif  // DGTQC_METRICS_HPP_

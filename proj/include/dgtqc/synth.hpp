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

// Seeded synthetic-corpus generator for self-contained end-to-end runs:
// trusted labelings with verdicts and completeness drawn from archetype
// quality parameters, plus a crowdworker log mixing honest and malicious
// labeling behaviors. Geometry is placeholder (unit-spaced rectangles); the
// method never looks at it.

#ifndef DGTQC_SYNTH_HPP_
#define DGTQC_SYNTH_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dgtqc/corpus.hpp"
#include "dgtqc/error.hpp"
#include "dgtqc/metrics.hpp"
#include "dgtqc/rng.hpp"

namespace dgtqc {

// Built-in per-class count profiles measured from two real trusted labeling
// sessions, in the default 20-class vocabulary order. They anchor the
// synthetic trusted archetypes to realistic frequency shapes.
inline constexpr std::array<long long, 20> kBuiltinTrustedCountsTop{
    509, 23, 124, 0, 0, 133, 6, 1022, 8, 0, 2, 58, 2, 22, 81, 128, 10, 23, 41, 1263};
inline constexpr std::array<long long, 20> kBuiltinTrustedCountsSecond{
    368, 71, 22, 18, 2, 128, 239, 375, 5, 4, 20, 63, 43, 1, 280, 226, 20, 19, 19, 1322};

struct TrustedArchetype {
  std::string labeler_id;
  std::vector<double> proportions;  // over the trusted vocabulary, sums to 1
  double correct_prob = 0.93;       // per-box chance of a "correct" verdict
  double sc_mean = 90.0;            // completeness rating, 0..100
  double sc_sd = 8.0;
  std::size_t uis = 25;             // screenshots this labeler covers
  double elements_per_ui = 60.0;
};

enum class WorkerArchetype { kHonest, kSloppy, kSpammer, kUniform };

inline const char* to_string(WorkerArchetype a) {
  switch (a) {
    case WorkerArchetype::kHonest: return "honest";
    case WorkerArchetype::kSloppy: return "sloppy";
    case WorkerArchetype::kSpammer: return "spammer";
    case WorkerArchetype::kUniform: return "uniform";
  }
  return "unknown";
}

struct WorkerArchetypeSpec {
  WorkerArchetype kind = WorkerArchetype::kHonest;
  std::size_t count = 0;
  double accept_prob = 0.5;  // per-HIT acceptance chance
};

inline std::vector<double> proportions_from_counts(std::span<const long long> counts) {
  double total = 0.0;
  for (long long c : counts) total += static_cast<double>(c);
  std::vector<double> proportions;
  for (long long c : counts) proportions.push_back(static_cast<double>(c) / total);
  return proportions;
}

inline std::vector<TrustedArchetype> default_trusted_archetypes() {
  TrustedArchetype top;
  top.labeler_id = "trusted01";
  top.proportions = proportions_from_counts(kBuiltinTrustedCountsTop);
  top.correct_prob = 0.93;
  top.sc_mean = 95.5;
  top.sc_sd = 7.0;
  TrustedArchetype second;
  second.labeler_id = "trusted02";
  second.proportions = proportions_from_counts(kBuiltinTrustedCountsSecond);
  second.correct_prob = 0.97;
  second.sc_mean = 80.4;
  second.sc_sd = 12.9;
  return {top, second};
}

struct SyntheticSpec {
  std::vector<TrustedArchetype> trusted = default_trusted_archetypes();
  std::vector<WorkerArchetypeSpec> workers = {
      {WorkerArchetype::kHonest, 10, 0.95},
      {WorkerArchetype::kSloppy, 4, 0.50},
      {WorkerArchetype::kSpammer, 3, 0.05},
      {WorkerArchetype::kUniform, 3, 0.05},
  };
  std::size_t screenshot_pool = 500;
  std::size_t hits_per_worker = 12;
  double elements_per_hit = 40.0;
  double sloppy_element_scale = 0.35;  // sloppy workers label this share of elements
  // Per-worker Dirichlet jitter around the archetype shape; 0 disables it.
  double dirichlet_concentration = 150.0;
  std::vector<std::string> trusted_vocabulary = trusted_vocabulary_default();
  std::vector<std::string> worker_vocabulary = worker_vocabulary_default();

  void validate() const {
    require(!trusted.empty(), ErrorKind::kArgument, "need at least one trusted archetype");
    std::size_t trusted_uis = 0;
    for (const auto& archetype : trusted) {
      require(archetype.proportions.size() == trusted_vocabulary.size(),
              ErrorKind::kArgument,
              "archetype " + archetype.labeler_id + " proportions length mismatch");
      double sum = 0.0;
      for (double p : archetype.proportions) {
        require(p >= 0.0, ErrorKind::kArgument, "negative class proportion");
        sum += p;
      }
      require(std::fabs(sum - 1.0) <= 1e-9, ErrorKind::kArgument,
              "archetype " + archetype.labeler_id + " proportions sum to " +
                  std::to_string(sum) + ", expected 1");
      require(archetype.correct_prob >= 0.0 && archetype.correct_prob <= 1.0 &&
                  archetype.sc_mean >= 0.0 && archetype.sc_mean <= 100.0,
              ErrorKind::kArgument, "archetype quality parameters out of range");
      require(archetype.uis >= 1 && archetype.elements_per_ui >= 1.0,
              ErrorKind::kArgument, "archetype needs uis >= 1 and elements >= 1");
      trusted_uis += archetype.uis;
    }
    require(screenshot_pool >= trusted_uis, ErrorKind::kArgument,
            "screenshot pool smaller than the trusted labelers' coverage");
    require(hits_per_worker >= 1 && hits_per_worker <= screenshot_pool,
            ErrorKind::kArgument, "hits_per_worker out of range");
    require(elements_per_hit >= 1.0, ErrorKind::kArgument, "elements_per_hit < 1");
    for (const auto& spec : workers) {
      require(spec.accept_prob >= 0.0 && spec.accept_prob <= 1.0, ErrorKind::kArgument,
              "accept_prob out of [0, 1]");
    }
  }
};

struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, WorkerArchetype> worker_archetypes;
};

namespace detail {

inline std::string synth_screenshot_id(std::size_t index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "ui%05zu", index + 1);
  return buffer;
}

inline BoundingBox placeholder_box(std::size_t index, const std::string& label) {
  const long x = static_cast<long>(index) * 10;
  return BoundingBox{x, 0, x + 8, 10, label};
}

// Worker shape for one archetype. Honest and sloppy workers inherit a
// trusted archetype's shape collapsed onto the (shorter) worker vocabulary
// by rank-pair averaging; spammers put nearly all mass on one class;
// uniform workers spread evenly.
inline std::vector<double> worker_shape(const SyntheticSpec& spec, WorkerArchetype kind,
                                        std::size_t worker_index, Rng& rng) {
  const std::size_t classes = spec.worker_vocabulary.size();
  std::vector<double> shape(classes, 0.0);
  switch (kind) {
    case WorkerArchetype::kHonest:
    case WorkerArchetype::kSloppy: {
      const auto& archetype = spec.trusted[worker_index % spec.trusted.size()];
      std::vector<double> collapsed = rank_pair_average(archetype.proportions);
      collapsed.resize(classes, 0.0);
      double sum = 0.0;
      for (double v : collapsed) sum += v;
      for (auto& v : collapsed) v /= sum;
      if (spec.dirichlet_concentration > 0.0) {
        std::vector<double> alpha;
        for (double v : collapsed) {
          alpha.push_back(std::max(1e-3, v * spec.dirichlet_concentration));
        }
        collapsed = rng.dirichlet(alpha);
      }
      shape = collapsed;
      break;
    }
    case WorkerArchetype::kSpammer: {
      const std::size_t dominant = worker_index % classes;
      const double rest = 0.09 / static_cast<double>(classes - 1);
      for (std::size_t i = 0; i < classes; ++i) shape[i] = i == dominant ? 0.91 : rest;
      break;
    }
    case WorkerArchetype::kUniform:
      shape.assign(classes, 1.0 / static_cast<double>(classes));
      break;
  }
  return shape;
}

}  // namespace detail

// Deterministic per seed: same (spec, seed) yields an identical corpus,
// hence byte-identical snapshots.
inline SyntheticCorpus generate_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  SyntheticCorpus result;
  result.corpus.trusted_vocabulary = spec.trusted_vocabulary;
  result.corpus.worker_vocabulary = spec.worker_vocabulary;
  Rng rng(derive_stream(seed, 0x73796e));  // "syn"

  // Trusted labelings over disjoint slices of the screenshot pool.
  std::size_t next_screenshot = 0;
  for (const auto& archetype : spec.trusted) {
    for (std::size_t u = 0; u < archetype.uis; ++u) {
      ScreenshotLabeling labeling;
      labeling.screenshot_id = detail::synth_screenshot_id(next_screenshot++);
      labeling.labeler_id = archetype.labeler_id;
      const double jitter = 0.8 + 0.4 * rng.uniform01();
      const auto elements = static_cast<std::size_t>(
          std::max(1.0, std::round(archetype.elements_per_ui * jitter)));
      for (std::size_t e = 0; e < elements; ++e) {
        const std::size_t cls = rng.categorical(archetype.proportions);
        labeling.boxes.push_back(
            detail::placeholder_box(e, spec.trusted_vocabulary[cls]));
        labeling.verdicts.emplace_back(rng.bernoulli(archetype.correct_prob)
                                           ? Verdict::kCorrect
                                           : Verdict::kIncorrect);
      }
      labeling.completeness =
          std::clamp(rng.normal(archetype.sc_mean, archetype.sc_sd), 0.0, 100.0);
      result.corpus.trusted_labelings.push_back(std::move(labeling));
    }
  }

  // Crowdworkers label HITs drawn from the whole pool, so higher trusted-set
  // sizes genuinely shrink their testing subsets.
  std::size_t worker_index = 0;
  for (const auto& worker_spec : spec.workers) {
    for (std::size_t w = 0; w < worker_spec.count; ++w, ++worker_index) {
      char buffer[24];
      std::snprintf(buffer, sizeof(buffer), "w%03zu_%s", worker_index + 1,
                    to_string(worker_spec.kind));
      const std::string worker_id = buffer;
      result.worker_archetypes[worker_id] = worker_spec.kind;
      const auto shape = detail::worker_shape(spec, worker_spec.kind, worker_index, rng);

      // Sample distinct screenshots via a partial Fisher-Yates over indices.
      std::vector<std::size_t> indices(spec.screenshot_pool);
      for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
      for (std::size_t i = 0; i < spec.hits_per_worker; ++i) {
        const std::size_t j = i + rng.below(indices.size() - i);
        std::swap(indices[i], indices[j]);
      }
      const double element_scale = worker_spec.kind == WorkerArchetype::kSloppy
                                       ? spec.sloppy_element_scale
                                       : 1.0;
      for (std::size_t h = 0; h < spec.hits_per_worker; ++h) {
        WorkerTaskRecord record;
        record.worker_id = worker_id;
        record.screenshot_id = detail::synth_screenshot_id(indices[h]);
        record.status = rng.bernoulli(worker_spec.accept_prob) ? HitStatus::kAccepted
                                                               : HitStatus::kRejected;
        // Time on task is archetype-independent: the method must not need it.
        record.time_on_task_s = std::round(60.0 + 840.0 * rng.uniform01());
        const double jitter = 0.75 + 0.5 * rng.uniform01();
        const auto elements = static_cast<std::size_t>(
            std::max(1.0, std::round(spec.elements_per_hit * element_scale * jitter)));
        for (std::size_t e = 0; e < elements; ++e) {
          const std::size_t cls = rng.categorical(shape);
          record.boxes.push_back(
              detail::placeholder_box(e, spec.worker_vocabulary[cls]));
        }
        result.corpus.worker_records.push_back(std::move(record));
      }
    }
  }
  result.corpus.validate();
  return result;
}

}  // namespace dgtqc

#endif  // DGTQC_SYNTH_HPP_

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

// Acceptance suite: one pass/fail line per criterion, each at its pinned
// tolerance and runtime budget. Exit code is nonzero when any criterion
// fails. Criterion 8 is conditional on an externally downloaded dataset and
// skips (without failing) when the dataset is absent.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dgtqc/corpus.hpp"
#include "dgtqc/method.hpp"
#include "dgtqc/metrics.hpp"
#include "dgtqc/powerlaw.hpp"
#include "dgtqc/rng.hpp"
#include "dgtqc/stats.hpp"
#include "dgtqc/synth.hpp"
#include "oracles.hpp"
#include "reference_tables.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  bool skipped = false;
  std::string detail;

  void check(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v, int decimals = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, v);
  return buffer;
}

// --------------------------------------------------------------------------
// 1. Published verification-table arithmetic and trusted ordering.

Outcome criterion_1() {
  Outcome outcome;
  int within = 0;
  for (const auto& row : reference::kTrustedVerification) {
    const double q = dgtqc::quality_index(row.precision_mean, row.sc_mean / 100.0);
    if (std::fabs(q - row.q) <= 0.001) ++within;
  }
  outcome.check(within == 11, "only " + std::to_string(within) + "/11 Q values within 0.001");

  std::vector<dgtqc::TrustedProfile> profiles;
  const std::vector<int> shuffled{7, 3, 10, 1, 8, 0, 5, 9, 2, 6, 4};
  for (int i : shuffled) {
    const auto& row = reference::kTrustedVerification[static_cast<std::size_t>(i)];
    dgtqc::TrustedProfile profile;
    profile.labeler_id = row.labeler_id;
    profile.precision_t = row.precision_mean;
    profile.sc = row.sc_mean / 100.0;
    profile.q = dgtqc::quality_index(row.precision_mean, row.sc_mean / 100.0);
    profiles.push_back(std::move(profile));
  }
  const auto ordered = dgtqc::order_trusted(profiles);
  bool exact_order = ordered.size() == 11;
  for (std::size_t i = 0; exact_order && i < ordered.size(); ++i) {
    exact_order = ordered[i].labeler_id == reference::kTrustedVerification[i].labeler_id;
  }
  outcome.check(exact_order, "trusted ordering deviates from the published order");
  if (outcome.pass) outcome.note("11/11 Q within 0.001, ordering exact");
  return outcome;
}

// --------------------------------------------------------------------------
// 2. F identity against every populated published sweep row.

Outcome criterion_2() {
  Outcome outcome;
  for (const auto& row : reference::kSweepModels) {
    const double f = dgtqc::f_from_r_squared(row.r_squared, row.df_denominator);
    outcome.check(std::fabs(f - row.f) <= 0.5,
                  "size " + std::to_string(row.trusted_size) + ": F " + fmt(f, 2) +
                      " vs published " + fmt(row.f, 1));
  }
  if (outcome.pass) {
    outcome.note("8/8 rows within 0.5 (e.g. " +
                 fmt(dgtqc::f_from_r_squared(0.658, 17), 1) + " vs 32.7)");
  }
  return outcome;
}

// --------------------------------------------------------------------------
// 3. Published per-worker averaging.

Outcome criterion_3() {
  Outcome outcome;
  int within = 0;
  for (const auto& row : reference::kWorkerFactors) {
    const double mean = (row.p_first + row.p_second) / 2.0;
    if (std::fabs(mean - row.avg_p) <= 0.001) ++within;
  }
  outcome.check(within == 18, "only " + std::to_string(within) + "/18 averages within 0.001");
  if (outcome.pass) outcome.note("18/18 averages within 0.001");
  return outcome;
}

// --------------------------------------------------------------------------
// 4. Exact-KS oracle equivalence and Monte-Carlo calibration.

Outcome criterion_4() {
  Outcome outcome;
  std::mt19937_64 gen(20260811);
  dgtqc::KsSettings exact;
  exact.pmethod = dgtqc::KsPValueMethod::kExact;
  dgtqc::KsSettings notation = exact;
  notation.enumeration_limit = 0;  // force Monte-Carlo
  notation.mc_replicates = 10000;

  // Every size pair with n, m >= 2 and n + m <= 12; datasets spread across
  // the pairs until at least 200 have been tested.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t m = 2; n + m <= 12; ++m) pairs.emplace_back(n, m);
  }
  const std::size_t per_pair = (200 + pairs.size() - 1) / pairs.size();
  int cases = 0;
  int enumeration_mismatches = 0;
  int mc_inside = 0;
  int mc_cases = 0;
  for (const auto& [n, m] : pairs) {
    for (std::size_t d = 0; d < per_pair; ++d) {
      std::vector<double> x(n);
      std::vector<double> y(m);
      for (auto& v : x) v = static_cast<double>(gen() % 5);  // ties on purpose
      for (auto& v : y) v = static_cast<double>(gen() % 5);
      const auto enumerated = dgtqc::ks_two_sample(x, y, exact);
      const auto reference = oracles::brute_force_exact_ks(x, y);
      if (enumerated.method != dgtqc::KsMethod::kExactEnumeration ||
          enumerated.ge_count != reference.ge_count ||
          enumerated.total_count != reference.total) {
        ++enumeration_mismatches;
      }
      notation.seed = gen();
      const auto mc = dgtqc::ks_two_sample(x, y, notation);
      const double p = enumerated.p_value;
      const double half_width =
          2.5758 * std::sqrt(p * (1.0 - p) / notation.mc_replicates) +
          2.0 / (notation.mc_replicates + 1.0);
      if (std::fabs(mc.p_value - p) <= half_width) ++mc_inside;
      ++mc_cases;
      ++cases;
    }
  }
  outcome.check(enumeration_mismatches == 0,
                std::to_string(enumeration_mismatches) + " enumeration mismatches");
  outcome.check(mc_inside >= static_cast<int>(std::ceil(0.99 * mc_cases)),
                "Monte-Carlo inside the 99% interval in only " + std::to_string(mc_inside) +
                    "/" + std::to_string(mc_cases));
  const double sf = dgtqc::kolmogorov_sf(1.36);
  outcome.check(std::fabs(sf - 0.0494) <= 0.0005,
                "kolmogorov_sf(1.36) = " + fmt(sf, 5));
  if (outcome.pass) {
    outcome.note(std::to_string(cases) + " datasets over " + std::to_string(pairs.size()) +
                 " size pairs, exact match " + std::to_string(cases) + "/" +
                 std::to_string(cases) + ", MC inside " + std::to_string(mc_inside) + "/" +
                 std::to_string(mc_cases) + ", Q(1.36) = " + fmt(sf, 5));
  }
  return outcome;
}

// --------------------------------------------------------------------------
// 5. Power-law recovery, null calibration, and alternative rejection.

Outcome criterion_5() {
  Outcome outcome;
  double alpha_sum = 0.0;
  int null_above = 0;
  int alt_rejected = 0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const auto sample = dgtqc::sample_powerlaw(2.5, 1.0, 5000, 51000 + s);
    alpha_sum += dgtqc::fit_continuous(sample).alpha;
    const std::vector<double> subsample(sample.begin(), sample.begin() + 200);
    const auto fit = dgtqc::fit_continuous(subsample);
    const auto gof = dgtqc::gof_pvalue(subsample, fit, 1000, 52000 + s);
    if (gof.p_value > 0.1) ++null_above;

    // Alternative data: standard exponential, n = 1000 (the operation's own
    // fixture size for this check).
    dgtqc::Rng rng(dgtqc::derive_stream(53000 + s, 1));
    std::vector<double> exponential(1000);
    for (auto& v : exponential) v = -std::log(rng.uniform_open01());
    const auto alt_fit = dgtqc::fit_continuous(exponential);
    const auto alt_gof = dgtqc::gof_pvalue(exponential, alt_fit, 1000, 54000 + s);
    if (alt_gof.p_value <= 0.05) ++alt_rejected;
  }
  const double mean_alpha = alpha_sum / seeds;
  outcome.check(mean_alpha >= 2.45 && mean_alpha <= 2.55,
                "mean recovered alpha " + fmt(mean_alpha) + " outside [2.45, 2.55]");
  outcome.check(null_above >= 16, "null p > 0.1 in only " + std::to_string(null_above) +
                                      "/" + std::to_string(seeds) + " power-law runs");
  outcome.check(alt_rejected > seeds / 2,
                "exponential rejected (p <= 0.05) in " + std::to_string(alt_rejected) + "/" +
                    std::to_string(seeds) +
                    " runs, not a majority. The free-cutoff fit truncates an "
                    "exponential's tail to a locally power-law-like segment, so the "
                    "bootstrap rarely rejects at this sample size (see the decisions "
                    "ledger; majority rejection needs n around 5000, beyond this "
                    "criterion's runtime budget)");
  outcome.note("mean alpha " + fmt(mean_alpha) + ", null p > 0.1 in " +
               std::to_string(null_above) + "/20, exponential rejected in " +
               std::to_string(alt_rejected) + "/20");
  return outcome;
}

// --------------------------------------------------------------------------
// Shared synthetic corpus for criteria 6 and 7.

dgtqc::SyntheticCorpus synthetic_fixture() {
  dgtqc::SyntheticSpec spec;  // trusted archetypes: the two built-in profiles
  spec.workers = {{dgtqc::WorkerArchetype::kHonest, 10, 0.95},
                  {dgtqc::WorkerArchetype::kSpammer, 5, 0.05},
                  {dgtqc::WorkerArchetype::kUniform, 5, 0.05}};
  spec.hits_per_worker = 12;
  spec.elements_per_hit = 40.0;
  return dgtqc::generate_corpus(spec, 606);
}

bool is_malicious(const dgtqc::SyntheticCorpus& synthetic, const std::string& worker_id) {
  const auto kind = synthetic.worker_archetypes.at(worker_id);
  return kind == dgtqc::WorkerArchetype::kSpammer ||
         kind == dgtqc::WorkerArchetype::kUniform;
}

// 6. End-to-end synthetic separation.

Outcome criterion_6() {
  Outcome outcome;
  const auto synthetic = synthetic_fixture();
  const auto& corpus = synthetic.corpus;
  const auto trusted = dgtqc::order_trusted(dgtqc::build_trusted_profiles(corpus));
  outcome.check(trusted.size() == 2, "expected 2 ordered trusted labelers");
  if (!outcome.pass) return outcome;

  const auto rows = dgtqc::sweep(corpus, trusted, 1, 2);
  const auto& k2 = rows.back();
  double honest_sum = 0.0;
  double malicious_sum = 0.0;
  int honest_count = 0;
  int malicious_count = 0;
  for (const auto& score : k2.scores) {
    if (is_malicious(synthetic, score.worker_id)) {
      malicious_sum += score.avg_p;
      ++malicious_count;
    } else {
      honest_sum += score.avg_p;
      ++honest_count;
    }
  }
  outcome.check(honest_count >= 3 && malicious_count >= 3,
                "too few scored workers per group");
  const double honest_mean = honest_sum / std::max(1, honest_count);
  const double malicious_mean = malicious_sum / std::max(1, malicious_count);
  outcome.check(honest_mean > malicious_mean,
                "honest mean avg_p " + fmt(honest_mean) + " not above malicious " +
                    fmt(malicious_mean));
  outcome.check(k2.model.has_value() && k2.model->r_squared >= 0.5,
                "avg_p model R^2 " +
                    (k2.model ? fmt(k2.model->r_squared) : std::string("absent")) +
                    " below 0.5");

  // (c) non-overlap and nesting at every trusted-set size.
  std::set<std::string> previous_shots;
  std::size_t previous_workers = 0;
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto subset = dgtqc::testing_subset(corpus, trusted, k);
    for (const auto& shot : subset.subset_screenshots) {
      if (subset.removed_screenshots.contains(shot)) {
        outcome.check(false, "overlap at size " + std::to_string(k));
        break;
      }
    }
    if (k > 1) {
      outcome.check(subset.workers.size() <= previous_workers,
                    "worker count grew from size " + std::to_string(k - 1));
      for (const auto& shot : subset.subset_screenshots) {
        if (!previous_shots.contains(shot)) {
          outcome.check(false, "subset screenshots not nested at size " + std::to_string(k));
          break;
        }
      }
    }
    previous_shots = subset.subset_screenshots;
    previous_workers = subset.workers.size();
  }
  if (outcome.pass) {
    outcome.note("honest avg_p " + fmt(honest_mean) + " > malicious " + fmt(malicious_mean) +
                 ", R^2 = " + fmt(k2.model->r_squared) + ", invariants hold");
  }
  return outcome;
}

// --------------------------------------------------------------------------
// 7. Scale robustness: tripled malicious volume moves EUI, not avg_p.

Outcome criterion_7() {
  Outcome outcome;
  const auto synthetic = synthetic_fixture();
  auto tripled = synthetic.corpus;
  for (auto& record : tripled.worker_records) {
    if (!is_malicious(synthetic, record.worker_id)) continue;
    const auto original = record.boxes;
    record.boxes.insert(record.boxes.end(), original.begin(), original.end());
    record.boxes.insert(record.boxes.end(), original.begin(), original.end());
  }
  const auto trusted =
      dgtqc::order_trusted(dgtqc::build_trusted_profiles(synthetic.corpus));
  for (const auto norm : {dgtqc::Normalization::kMean, dgtqc::Normalization::kProportion}) {
    dgtqc::KsConfig ks;
    ks.norm = norm;
    const auto base = dgtqc::testing_subset(synthetic.corpus, trusted, 2);
    const auto scaled = dgtqc::testing_subset(tripled, trusted, 2);
    outcome.check(base.workers.size() == scaled.workers.size(),
                  "subset membership changed under volume scaling");
    std::map<std::string, const dgtqc::WorkerProfile*> scaled_by_id;
    for (const auto& worker : scaled.workers) scaled_by_id[worker.worker_id] = &worker;
    double max_dp = 0.0;
    int compared = 0;
    for (const auto& worker : base.workers) {
      if (worker.distribution.total == 0) continue;
      const auto* twin = scaled_by_id.at(worker.worker_id);
      const double p_base =
          dgtqc::dgt_score(worker, std::span(trusted).subspan(0, 2), ks).avg_p;
      const double p_scaled =
          dgtqc::dgt_score(*twin, std::span(trusted).subspan(0, 2), ks).avg_p;
      max_dp = std::max(max_dp, std::fabs(p_base - p_scaled));
      if (is_malicious(synthetic, worker.worker_id)) {
        const double ratio = twin->eui_amt / worker.eui_amt;
        outcome.check(std::fabs(ratio - 3.0) <= 1e-12,
                      worker.worker_id + ": EUI ratio " + fmt(ratio, 6));
        ++compared;
      }
    }
    outcome.check(max_dp <= 1e-9, std::string("avg_p drifted by ") + fmt(max_dp, 12) +
                                      " under " + dgtqc::to_string(norm));
    outcome.check(compared >= 3, "too few malicious workers compared");
  }
  if (outcome.pass) outcome.note("avg_p unchanged within 1e-9, malicious EUI exactly tripled");
  return outcome;
}

// --------------------------------------------------------------------------
// 8. Conditional published-dataset reproduction.

Outcome criterion_8() {
  Outcome outcome;
  const fs::path root = fs::path(DGTQC_SOURCE_DIR) / "data" / "published";
  if (!fs::is_directory(root / "annotations")) {
    outcome.skipped = true;
    outcome.note("dataset not present at " + root.string() + " (see README for the layout)");
    return outcome;
  }
  dgtqc::Corpus corpus;
  std::vector<std::string> warnings;
  corpus.trusted_labelings = dgtqc::load_annotation_dir(root / "annotations", &warnings);
  {
    std::ifstream log(root / "worker_log.ndjson");
    outcome.check(log.good(), "worker_log.ndjson missing");
    if (!outcome.pass) return outcome;
    corpus.worker_records = dgtqc::load_worker_log(log);
  }
  corpus = dgtqc::load_verification(
      dgtqc::read_text_file(root / "verification.csv"), corpus);
  corpus = dgtqc::load_verification(
      dgtqc::read_text_file(root / "completeness.csv"), corpus);
  corpus.validate();
  const auto trusted = dgtqc::order_trusted(dgtqc::build_trusted_profiles(corpus));
  const std::size_t k_max = std::min<std::size_t>(4, trusted.size());

  double best_dev = 1e9;
  std::string best_mode;
  int modes_run = 0;
  for (const auto norm : {dgtqc::Normalization::kRaw, dgtqc::Normalization::kMean,
                          dgtqc::Normalization::kProportion}) {
    for (const bool zeros : {true, false}) {
      dgtqc::KsConfig ks;
      ks.norm = norm;
      dgtqc::MetricsConfig metrics;
      metrics.distribution.include_zeros = zeros;
      const auto rows =
          dgtqc::sweep(corpus, trusted, 1, k_max, ks, dgtqc::InclusionRule{}, metrics);
      ++modes_run;
      double max_dev = -1.0;
      for (const auto& row : rows) {
        if (!row.model) continue;
        const auto it =
            std::find_if(reference::kSweepModels.begin(), reference::kSweepModels.end(),
                         [&](const auto& m) {
                           return m.trusted_size == static_cast<int>(row.trusted_size);
                         });
        if (it == reference::kSweepModels.end()) continue;
        max_dev = std::max(max_dev, std::fabs(row.model->r_squared - it->r_squared));
      }
      if (max_dev >= 0.0 && max_dev < best_dev) {
        best_dev = max_dev;
        best_mode = std::string(dgtqc::to_string(norm)) + (zeros ? "_zeros" : "_nozeros");
      }
    }
  }
  outcome.check(modes_run >= 4, "fewer than 4 modes ran");
  outcome.check(!best_mode.empty(), "no mode produced models at sizes 1..4");
  outcome.check(best_dev <= 0.05, "nearest mode " + best_mode + " deviates by " +
                                      fmt(best_dev) + " (> 0.05) at sizes 1..4");
  if (!best_mode.empty()) {
    outcome.note("nearest mode " + best_mode + ", max |dev| " + fmt(best_dev) +
                 " at sizes 1.." + std::to_string(k_max));
  }
  return outcome;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "published verification-table arithmetic and trusted ordering", 1.0, criterion_1},
      {2, "F identity on the published sweep models", 1.0, criterion_2},
      {3, "published per-worker p-value averaging", 1.0, criterion_3},
      {4, "exact-KS oracle equivalence and Monte-Carlo calibration", 60.0, criterion_4},
      {5, "power-law recovery and bootstrap GOF behavior", 300.0, criterion_5},
      {6, "synthetic end-to-end DGT separation", 120.0, criterion_6},
      {7, "scale robustness of avg_p versus volume factors", 60.0, criterion_7},
      {8, "published-dataset reproduction (conditional)", 3600.0, criterion_8},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criterion.budget_s) {
      outcome.pass = false;
      outcome.detail += (outcome.detail.empty() ? "" : "; ") + std::string("over budget ") +
                        fmt(criterion.budget_s, 0) + " s";
    }
    const char* verdict = outcome.skipped ? "SKIP" : outcome.pass ? "PASS" : "FAIL";
    if (!outcome.pass) ++failures;
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", verdict, criterion.id, criterion.name,
                elapsed, outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

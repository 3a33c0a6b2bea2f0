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

// Command-line front end: corpus ingestion, verification and profile
// reports, DGT scoring, the trusted-set-size sweep, baseline comparison,
// power-law fitting, and a seeded synthetic-corpus generator.
//
// Exit codes: 0 success, 1 computation error, 2 input/usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dgtqc/corpus.hpp"
#include "dgtqc/method.hpp"
#include "dgtqc/metrics.hpp"
#include "dgtqc/powerlaw.hpp"
#include "dgtqc/report.hpp"
#include "dgtqc/stats.hpp"
#include "dgtqc/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Command-line / config-file mistakes, distinct from data and computation
// failures so they can map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Published reference R-squared per trusted-set size from the source study,
// used by the sweep mode-comparison report.
const std::map<int, double> kReferenceR2{{1, 0.658}, {2, 0.855}, {3, 0.789},
                                         {4, 0.716}, {5, 0.539}, {6, 0.789},
                                         {7, 0.107}, {8, 0.501}};

struct RunOptions {
  std::string config_path;
  std::string corpus_dir;
  std::string worker_log;
  std::vector<std::string> verification;
  std::vector<std::string> completeness;
  std::string snapshot;
  std::string out_dir = "out";

  std::string norm = "mean";
  std::string pmethod = "asymptotic";
  bool include_zeros = true;
  bool include_custom = false;
  std::map<std::string, std::string> aliases;

  long long min_hits = 10;
  long long min_elements = 100;

  int k = -1;
  std::string k_range;
  int replicates = 1000;
  int mc_replicates = 10000;
  std::string pl_mode = "continuous";
  std::uint64_t seed = 42;
  std::string format = "both";
  bool all_modes = false;

  std::string synth_spec_path;
  std::string raw_dir;
  std::string data_file;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw UsageError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
}

// Flags win over the config file; the config file wins over defaults.
void apply_config_file(CLI::App* cmd, RunOptions& opt) {
  json cfg = json::object();
  if (!opt.config_path.empty()) cfg = read_json_file(opt.config_path);
  const auto take = [&](const char* flag, const char* key, auto& field) {
    if (cfg.contains(key) && cmd->count(flag) == 0) {
      field = cfg[key].get<std::decay_t<decltype(field)>>();
    }
  };
  const auto take_paths = [&](const char* flag, const char* key,
                              std::vector<std::string>& field) {
    if (cfg.contains(key) && cmd->count(flag) == 0) {
      if (cfg[key].is_string()) field = {cfg[key].get<std::string>()};
      else field = cfg[key].get<std::vector<std::string>>();
    }
  };
  take("--corpus", "corpus", opt.corpus_dir);
  take("--worker-log", "worker_log", opt.worker_log);
  take_paths("--verification", "verification", opt.verification);
  take_paths("--completeness", "completeness", opt.completeness);
  take("--snapshot", "snapshot", opt.snapshot);
  take("--out", "out", opt.out_dir);
  take("--norm", "norm", opt.norm);
  take("--pmethod", "pmethod", opt.pmethod);
  take("--include-zeros", "include_zeros", opt.include_zeros);
  take("--include-custom", "include_custom", opt.include_custom);
  take("--min-hits", "min_hits", opt.min_hits);
  take("--min-elements", "min_elements", opt.min_elements);
  take("--k", "k", opt.k);
  take("--k-range", "k_range", opt.k_range);
  take("--replicates", "replicates", opt.replicates);
  take("--mc-replicates", "mc_replicates", opt.mc_replicates);
  take("--pl-mode", "pl_mode", opt.pl_mode);
  take("--format", "format", opt.format);
  if (cfg.contains("aliases") && opt.aliases.empty()) {
    opt.aliases = cfg["aliases"].get<std::map<std::string, std::string>>();
  }
  if (cmd->count("--seed") == 0) {
    if (cfg.contains("seed")) {
      opt.seed = cfg["seed"].get<std::uint64_t>();
    } else if (const char* env = std::getenv("DGTQC_SEED")) {
      opt.seed = std::strtoull(env, nullptr, 10);
    }
  }
}

dgtqc::Normalization parse_norm(const std::string& name) {
  if (name == "raw") return dgtqc::Normalization::kRaw;
  if (name == "mean") return dgtqc::Normalization::kMean;
  if (name == "proportion") return dgtqc::Normalization::kProportion;
  throw UsageError("unknown --norm '" + name + "' (raw|mean|proportion)");
}

dgtqc::KsPValueMethod parse_pmethod(const std::string& name) {
  if (name == "asymptotic") return dgtqc::KsPValueMethod::kAsymptotic;
  if (name == "exact") return dgtqc::KsPValueMethod::kExact;
  throw UsageError("unknown --pmethod '" + name + "' (asymptotic|exact)");
}

dgtqc::PowerLawMode parse_pl_mode(const std::string& name) {
  if (name == "continuous") return dgtqc::PowerLawMode::kContinuous;
  if (name == "discrete") return dgtqc::PowerLawMode::kDiscrete;
  throw UsageError("unknown --pl-mode '" + name + "' (continuous|discrete)");
}

dgtqc::MetricsConfig metrics_config(const RunOptions& opt) {
  dgtqc::MetricsConfig config;
  config.distribution.include_zeros = opt.include_zeros;
  config.distribution.include_custom = opt.include_custom;
  config.distribution.aliases = opt.aliases;
  return config;
}

dgtqc::KsConfig ks_config(const RunOptions& opt) {
  dgtqc::KsConfig config;
  config.norm = parse_norm(opt.norm);
  config.pmethod = parse_pmethod(opt.pmethod);
  config.seed = opt.seed;
  config.mc_replicates = opt.mc_replicates;
  return config;
}

dgtqc::InclusionRule inclusion_rule(const RunOptions& opt) {
  if (opt.min_hits <= 0 || opt.min_elements <= 0) {
    throw UsageError("--min-hits and --min-elements must be positive");
  }
  return {opt.min_hits, opt.min_elements};
}

dgtqc::ConfigEcho config_echo(const RunOptions& opt,
                              std::initializer_list<std::pair<std::string, std::string>>
                                  extra = {}) {
  dgtqc::ConfigEcho echo{
      {"norm", opt.norm},
      {"pmethod", opt.pmethod},
      {"include_zeros", opt.include_zeros ? "true" : "false"},
      {"include_custom", opt.include_custom ? "true" : "false"},
      {"min_hits", std::to_string(opt.min_hits)},
      {"min_elements", std::to_string(opt.min_elements)},
      {"seed", std::to_string(opt.seed)},
      {"mc_replicates", std::to_string(opt.mc_replicates)},
  };
  for (const auto& pair : extra) echo.push_back(pair);
  return echo;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& warning : warnings) std::cerr << "warning: " << warning << "\n";
}

dgtqc::Corpus load_corpus(const RunOptions& opt) {
  std::vector<std::string> warnings;
  dgtqc::Corpus corpus;
  if (!opt.snapshot.empty()) {
    std::ifstream in(opt.snapshot);
    dgtqc::require(in.good(), dgtqc::ErrorKind::kIo,
                   "cannot open snapshot " + opt.snapshot);
    corpus = dgtqc::load_corpus_snapshot(in);
  } else {
    if (opt.corpus_dir.empty()) {
      throw UsageError("need --snapshot FILE or --corpus DIR");
    }
    corpus.trusted_labelings = dgtqc::load_annotation_dir(opt.corpus_dir, &warnings);
    if (!opt.worker_log.empty()) {
      std::ifstream in(opt.worker_log);
      dgtqc::require(in.good(), dgtqc::ErrorKind::kIo,
                     "cannot open worker log " + opt.worker_log);
      corpus.worker_records = dgtqc::load_worker_log(in);
    }
    for (const auto& path : opt.verification) {
      corpus = dgtqc::load_verification(dgtqc::read_text_file(path), corpus);
    }
    for (const auto& path : opt.completeness) {
      corpus = dgtqc::load_verification(dgtqc::read_text_file(path), corpus);
    }
    corpus.validate();
  }
  print_warnings(warnings);
  return corpus;
}

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  dgtqc::require(out.good(), dgtqc::ErrorKind::kIo, "cannot write " + path.string());
  out << content;
}

void write_report(const RunOptions& opt, const std::string& stem,
                  const std::string& csv, const json& body) {
  const fs::path dir(opt.out_dir);
  if (opt.format == "csv" || opt.format == "both") {
    write_text(dir / (stem + ".csv"), csv);
  }
  if (opt.format == "json" || opt.format == "both") {
    write_text(dir / (stem + ".json"), body.dump(2) + "\n");
  }
}

std::vector<dgtqc::TrustedProfile> ordered_trusted_or_die(const dgtqc::Corpus& corpus,
                                                          const RunOptions& opt) {
  std::vector<std::string> warnings;
  const auto profiles = dgtqc::build_trusted_profiles(corpus, metrics_config(opt), &warnings);
  const auto ordered = dgtqc::order_trusted(profiles, &warnings);
  print_warnings(warnings);
  dgtqc::require(!ordered.empty(), dgtqc::ErrorKind::kDegenerate,
                 "no trusted labeler has verification data");
  return ordered;
}

std::pair<std::size_t, std::size_t> parse_k_range(const RunOptions& opt,
                                                  std::size_t trusted_count) {
  std::size_t lo = 1;
  std::size_t hi = trusted_count;
  if (!opt.k_range.empty()) {
    const auto sep = opt.k_range.find("..");
    if (sep == std::string::npos) throw UsageError("--k-range must look like A..B");
    try {
      lo = std::stoul(opt.k_range.substr(0, sep));
      hi = std::stoul(opt.k_range.substr(sep + 2));
    } catch (const std::exception&) {
      throw UsageError("--k-range must look like A..B");
    }
  } else if (opt.k > 0) {
    lo = hi = static_cast<std::size_t>(opt.k);
  }
  if (lo < 1 || lo > hi || hi > trusted_count) {
    throw UsageError("trusted-set size range " + std::to_string(lo) + ".." +
                     std::to_string(hi) + " out of bounds (have " +
                     std::to_string(trusted_count) + " ordered trusted labelers)");
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------

int cmd_ingest(const RunOptions& opt) {
  if (opt.corpus_dir.empty()) throw UsageError("ingest needs --corpus DIR");
  const auto corpus = load_corpus(opt);
  const fs::path out = fs::path(opt.out_dir) / "corpus.ndjson";
  fs::create_directories(out.parent_path());
  std::ofstream file(out, std::ios::binary);
  dgtqc::require(file.good(), dgtqc::ErrorKind::kIo, "cannot write " + out.string());
  dgtqc::export_corpus(corpus, file);
  const auto summary = dgtqc::corpus_summary(corpus);
  std::cout << "snapshot: " << out.string() << "\n"
            << "screenshots: " << summary.screenshots << "\n"
            << "trusted_uis: " << summary.trusted_uis << "\n"
            << "trusted_labelers: " << summary.trusted_labelers << "\n"
            << "trusted_elements: " << summary.trusted_elements << "\n"
            << "workers: " << summary.workers << "\n"
            << "worker_elements: " << summary.worker_elements << "\n"
            << "accepted_hits: " << summary.accepted_hits << "\n"
            << "rejected_hits: " << summary.rejected_hits << "\n";
  return 0;
}

int cmd_verify_report(const RunOptions& opt) {
  const auto corpus = load_corpus(opt);
  const auto ordered = ordered_trusted_or_die(corpus, opt);
  const auto echo = config_echo(opt);
  write_report(opt, "verify", dgtqc::verify_report_csv(ordered, echo),
               dgtqc::verify_report_json(ordered, echo));
  std::cout << "labeler_id verified_uis precision_t sc q\n";
  for (const auto& profile : ordered) {
    std::cout << profile.labeler_id << " " << profile.verified_uis << " "
              << dgtqc::format_fixed(profile.precision_t.value_or(0.0), 3) << " "
              << dgtqc::format_fixed(profile.sc.value_or(0.0) * 100.0, 1) << " "
              << dgtqc::format_fixed(profile.q.value_or(0.0), 3) << "\n";
  }
  return 0;
}

int cmd_profiles(const RunOptions& opt) {
  const auto corpus = load_corpus(opt);
  std::vector<std::string> warnings;
  const auto [trusted, workers] =
      dgtqc::build_profiles(corpus, metrics_config(opt), &warnings);
  print_warnings(warnings);
  const auto echo = config_echo(opt);
  const fs::path dir(opt.out_dir);
  if (opt.format == "csv" || opt.format == "both") {
    write_text(dir / "profiles_trusted.csv", dgtqc::profiles_trusted_csv(trusted, echo));
    write_text(dir / "profiles_workers.csv", dgtqc::profiles_workers_csv(workers, echo));
  }
  if (opt.format == "json" || opt.format == "both") {
    write_text(dir / "profiles.json",
               dgtqc::profiles_json(trusted, workers, echo).dump(2) + "\n");
  }
  std::cout << "trusted profiles: " << trusted.size() << "\n"
            << "worker profiles: " << workers.size() << "\n";
  return 0;
}

int cmd_dgt_score(const RunOptions& opt) {
  const auto corpus = load_corpus(opt);
  const auto ordered = ordered_trusted_or_die(corpus, opt);
  const std::size_t k = opt.k > 0 ? static_cast<std::size_t>(opt.k) : ordered.size();
  if (k < 1 || k > ordered.size()) {
    throw UsageError("--k out of range (have " + std::to_string(ordered.size()) +
                     " ordered trusted labelers)");
  }
  const auto subset = dgtqc::testing_subset(corpus, ordered, k, inclusion_rule(opt),
                                            metrics_config(opt));
  std::vector<dgtqc::DgtScore> scores;
  std::vector<double> precisions;
  for (const auto& worker : subset.workers) {
    if (worker.distribution.total == 0) continue;
    scores.push_back(dgtqc::dgt_score(
        worker, std::span(ordered).subspan(0, k), ks_config(opt)));
    precisions.push_back(worker.precision_amt);
  }
  const auto echo = config_echo(opt, {{"k", std::to_string(k)}});
  write_report(opt, "scores",
               dgtqc::scores_csv(scores, precisions, subset.trusted_ids, echo),
               dgtqc::scores_json(scores, precisions, echo));
  std::cout << "trusted set:";
  for (const auto& id : subset.trusted_ids) std::cout << " " << id;
  std::cout << "\nscored workers: " << scores.size() << "\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::cout << scores[i].worker_id << " avg_p="
              << dgtqc::format_fixed(scores[i].avg_p, 4)
              << " precision=" << dgtqc::format_fixed(precisions[i], 4) << "\n";
  }
  return 0;
}

void print_best_row(const std::vector<dgtqc::SweepRow>& rows) {
  const dgtqc::SweepRow* best = nullptr;
  for (const auto& row : rows) {
    if (row.model && (!best || row.model->r_squared > best->model->r_squared)) {
      best = &row;
    }
  }
  if (best) {
    std::cout << "best model: trusted_size=" << best->trusted_size
              << " R2=" << dgtqc::format_fixed(best->model->r_squared, 4)
              << " F=" << dgtqc::format_fixed(best->model->f_statistic, 1) << " df=("
              << best->model->df_numerator << "," << best->model->df_denominator
              << ") p=" << dgtqc::format_fixed(best->model->p_value, 4) << "\n";
  } else {
    std::cout << "no trusted-set size produced a model\n";
  }
}

int cmd_sweep(const RunOptions& opt) {
  const auto corpus = load_corpus(opt);
  const auto ordered = ordered_trusted_or_die(corpus, opt);
  const auto [lo, hi] = parse_k_range(opt, ordered.size());
  const auto rule = inclusion_rule(opt);

  if (!opt.all_modes) {
    const auto rows =
        dgtqc::sweep(corpus, ordered, lo, hi, ks_config(opt), rule, metrics_config(opt));
    const auto echo = config_echo(
        opt, {{"k_range", std::to_string(lo) + ".." + std::to_string(hi)}});
    write_report(opt, "sweep", dgtqc::sweep_csv(rows, echo),
                 dgtqc::sweep_json(rows, echo));
    print_best_row(rows);
    return 0;
  }

  // Mode comparison: all normalization and zero-handling combinations, with
  // deviations from the published reference column where sizes overlap.
  std::string comparison_csv;
  json comparison_json;
  json modes = json::array();
  struct ModeSummary {
    std::string label;
    double max_dev = -1.0;
  };
  std::optional<ModeSummary> best_mode;
  for (const std::string norm : {"raw", "mean", "proportion"}) {
    for (const bool zeros : {true, false}) {
      RunOptions mode_opt = opt;
      mode_opt.norm = norm;
      mode_opt.include_zeros = zeros;
      const std::string label = norm + std::string(zeros ? "_zeros" : "_nozeros");
      const auto rows = dgtqc::sweep(corpus, ordered, lo, hi, ks_config(mode_opt), rule,
                                     metrics_config(mode_opt));
      const auto echo = config_echo(
          mode_opt, {{"k_range", std::to_string(lo) + ".." + std::to_string(hi)}});
      write_report(mode_opt, "sweep_" + label, dgtqc::sweep_csv(rows, echo),
                   dgtqc::sweep_json(rows, echo));
      json mode{{"norm", norm}, {"include_zeros", zeros}};
      json by_k = json::object();
      double max_dev = -1.0;
      for (const auto& row : rows) {
        if (!row.model) continue;
        by_k[std::to_string(row.trusted_size)] = dgtqc::round_to(row.model->r_squared, 4);
        const auto ref = kReferenceR2.find(static_cast<int>(row.trusted_size));
        std::string ref_field;
        std::string dev_field;
        if (ref != kReferenceR2.end()) {
          const double dev = std::fabs(row.model->r_squared - ref->second);
          ref_field = dgtqc::format_fixed(ref->second, 4);
          dev_field = dgtqc::format_fixed(dev, 4);
          if (row.trusted_size <= 4) max_dev = std::max(max_dev, dev);
        }
        comparison_csv += dgtqc::join_csv({norm, zeros ? "true" : "false",
                                           std::to_string(row.trusted_size),
                                           dgtqc::format_fixed(row.model->r_squared, 4),
                                           ref_field, dev_field}) +
                          "\n";
      }
      mode["r_squared_by_k"] = by_k;
      if (max_dev >= 0.0) {
        mode["max_abs_dev_k1_4"] = dgtqc::round_to(max_dev, 4);
        if (!best_mode || max_dev < best_mode->max_dev) best_mode = {label, max_dev};
      }
      modes.push_back(std::move(mode));
    }
  }
  const auto echo = config_echo(
      opt, {{"k_range", std::to_string(lo) + ".." + std::to_string(hi)},
            {"all_modes", "true"}});
  std::string full_csv = dgtqc::detail::csv_header_comment(echo);
  full_csv += "norm,include_zeros,trusted_size,r_squared,reference_r_squared,abs_dev\n";
  full_csv += comparison_csv;
  comparison_json["config"] = dgtqc::detail::config_json(echo);
  comparison_json["modes"] = std::move(modes);
  if (best_mode) {
    comparison_json["nearest_mode"] = best_mode->label;
    comparison_json["nearest_mode_max_abs_dev_k1_4"] = dgtqc::round_to(best_mode->max_dev, 4);
    std::cout << "nearest mode to the reference column: " << best_mode->label
              << " (max |dev| at sizes 1..4: "
              << dgtqc::format_fixed(best_mode->max_dev, 4) << ")\n";
  }
  write_report(opt, "mode_comparison", full_csv, comparison_json);
  return 0;
}

int cmd_baselines(const RunOptions& opt) {
  const auto corpus = load_corpus(opt);
  const auto ordered = ordered_trusted_or_die(corpus, opt);
  if (opt.k == 0) throw UsageError("--k must be at least 1 (no trusted set otherwise)");
  const std::size_t k = opt.k > 0 ? static_cast<std::size_t>(opt.k)
                                  : std::min<std::size_t>(2, ordered.size());
  if (k > ordered.size()) {
    throw UsageError("--k out of range (have " + std::to_string(ordered.size()) +
                     " ordered trusted labelers)");
  }
  const auto subset = dgtqc::testing_subset(corpus, ordered, k, inclusion_rule(opt),
                                            metrics_config(opt));
  std::vector<dgtqc::WorkerProfile> scoreable;
  for (const auto& worker : subset.workers) {
    if (worker.distribution.total > 0) scoreable.push_back(worker);
  }
  dgtqc::require(!scoreable.empty(), dgtqc::ErrorKind::kDegenerate,
                 "testing subset has no scoreable workers");
  dgtqc::PowerLawConfig pl;
  pl.mode = parse_pl_mode(opt.pl_mode);
  pl.replicates = opt.replicates;
  pl.seed = opt.seed;
  std::vector<std::string> warnings;
  const auto report = dgtqc::baseline_compare(
      scoreable, std::span(ordered).subspan(0, k), ks_config(opt), pl, &warnings);
  print_warnings(warnings);
  const auto echo = config_echo(opt, {{"k", std::to_string(k)},
                                      {"pl_mode", opt.pl_mode},
                                      {"replicates", std::to_string(opt.replicates)}});
  const fs::path dir(opt.out_dir);
  write_report(opt, "baselines", dgtqc::baselines_csv(report, subset.trusted_ids, echo),
               dgtqc::baselines_json(report, echo));
  if (opt.format == "csv" || opt.format == "both") {
    write_text(dir / "baselines_summary.csv", dgtqc::baselines_summary_csv(report, echo));
  }
  const auto print_model = [](const char* name,
                              const std::optional<dgtqc::RegressionResult>& model) {
    std::cout << name << ": ";
    if (model) {
      std::cout << "R2=" << dgtqc::format_fixed(model->r_squared, 4)
                << " p=" << dgtqc::format_fixed(model->p_value, 4) << "\n";
    } else {
      std::cout << "-\n";
    }
  };
  print_model("avg_p", report.model_avg_p);
  print_model("attempted_hits", report.model_attempted);
  print_model("tot_amt", report.model_tot);
  print_model("eui_amt", report.model_eui);
  print_model("gof_pl", report.model_gof_pl);
  print_model("avg_p+eui_amt", report.model_two_factor);
  return 0;
}

int cmd_powerlaw(const RunOptions& opt) {
  dgtqc::PowerLawConfig pl;
  pl.mode = parse_pl_mode(opt.pl_mode);
  pl.replicates = opt.replicates;
  pl.seed = opt.seed;
  const auto echo = config_echo(opt, {{"pl_mode", opt.pl_mode},
                                      {"replicates", std::to_string(opt.replicates)}});
  if (!opt.data_file.empty()) {
    std::ifstream in(opt.data_file);
    dgtqc::require(in.good(), dgtqc::ErrorKind::kIo, "cannot open " + opt.data_file);
    std::vector<double> data;
    double value = 0.0;
    while (in >> value) data.push_back(value);
    const auto fit = dgtqc::fit_power_law(data, pl.mode);
    const auto gof = dgtqc::gof_pvalue(data, fit, pl.replicates, pl.seed);
    json body{{"config", dgtqc::detail::config_json(echo)},
              {"alpha", dgtqc::round_to(fit.alpha, 4)},
              {"xmin", dgtqc::round_to(fit.xmin, 4)},
              {"n_tail", fit.n_tail},
              {"d", dgtqc::round_to(fit.d_statistic, 4)},
              {"gof_p", dgtqc::round_to(gof.p_value, 4)},
              {"replicates", gof.replicates},
              {"discarded", gof.discarded}};
    write_text(fs::path(opt.out_dir) / "powerlaw.json", body.dump(2) + "\n");
    std::cout << "alpha=" << dgtqc::format_fixed(fit.alpha, 4)
              << " xmin=" << dgtqc::format_fixed(fit.xmin, 4) << " n_tail=" << fit.n_tail
              << " D=" << dgtqc::format_fixed(fit.d_statistic, 4)
              << " gof_p=" << dgtqc::format_fixed(gof.p_value, 4) << "\n";
    return 0;
  }
  // Corpus mode: one fit per worker's positive class counts.
  const auto corpus = load_corpus(opt);
  std::vector<std::string> warnings;
  const auto workers = dgtqc::build_worker_profiles(
      corpus.worker_records, corpus.worker_vocabulary, metrics_config(opt));
  std::string csv = dgtqc::detail::csv_header_comment(echo);
  csv += "worker_id,pl_alpha,pl_xmin,pl_n_tail,pl_d,gof_pl\n";
  json rows = json::array();
  for (std::size_t i = 0; i < workers.size(); ++i) {
    const auto& worker = workers[i];
    std::vector<double> counts;
    for (long long c : worker.distribution.counts) {
      if (c > 0) counts.push_back(static_cast<double>(c));
    }
    std::vector<std::string> fields{worker.worker_id};
    json row{{"worker_id", worker.worker_id}};
    try {
      const auto fit = dgtqc::fit_power_law(counts, pl.mode);
      const auto gof = dgtqc::gof_pvalue(counts, fit, pl.replicates,
                                         dgtqc::derive_stream(pl.seed, 0xb00 + i));
      fields.insert(fields.end(),
                    {dgtqc::format_fixed(fit.alpha, 4), dgtqc::format_fixed(fit.xmin, 4),
                     std::to_string(fit.n_tail), dgtqc::format_fixed(fit.d_statistic, 4),
                     dgtqc::format_fixed(gof.p_value, 4)});
      row["alpha"] = dgtqc::round_to(fit.alpha, 4);
      row["xmin"] = dgtqc::round_to(fit.xmin, 4);
      row["n_tail"] = fit.n_tail;
      row["d"] = dgtqc::round_to(fit.d_statistic, 4);
      row["gof_pl"] = dgtqc::round_to(gof.p_value, 4);
    } catch (const dgtqc::Error& e) {
      fields.insert(fields.end(), {"", "", "", "", ""});
      row["error"] = e.what();
      warnings.push_back("worker " + worker.worker_id + ": " + e.what());
    }
    csv += dgtqc::join_csv(fields) + "\n";
    rows.push_back(std::move(row));
  }
  print_warnings(warnings);
  json body{{"config", dgtqc::detail::config_json(echo)}, {"rows", std::move(rows)}};
  write_report(opt, "powerlaw", csv, body);
  std::cout << "fitted workers: " << workers.size() << "\n";
  return 0;
}

dgtqc::SyntheticSpec parse_synth_spec(const std::string& path) {
  if (path.empty()) return {};
  const json j = read_json_file(path);
  dgtqc::SyntheticSpec spec;
  if (j.contains("trusted")) {
    spec.trusted.clear();
    for (const auto& jt : j["trusted"]) {
      dgtqc::TrustedArchetype archetype;
      archetype.labeler_id = jt.at("labeler_id").get<std::string>();
      archetype.proportions = jt.at("proportions").get<std::vector<double>>();
      archetype.correct_prob = jt.value("correct_prob", archetype.correct_prob);
      archetype.sc_mean = jt.value("sc_mean", archetype.sc_mean);
      archetype.sc_sd = jt.value("sc_sd", archetype.sc_sd);
      archetype.uis = jt.value("uis", archetype.uis);
      archetype.elements_per_ui = jt.value("elements_per_ui", archetype.elements_per_ui);
      spec.trusted.push_back(std::move(archetype));
    }
  }
  if (j.contains("workers")) {
    spec.workers.clear();
    for (const auto& jw : j["workers"]) {
      dgtqc::WorkerArchetypeSpec worker;
      const std::string kind = jw.at("kind").get<std::string>();
      if (kind == "honest") worker.kind = dgtqc::WorkerArchetype::kHonest;
      else if (kind == "sloppy") worker.kind = dgtqc::WorkerArchetype::kSloppy;
      else if (kind == "spammer") worker.kind = dgtqc::WorkerArchetype::kSpammer;
      else if (kind == "uniform") worker.kind = dgtqc::WorkerArchetype::kUniform;
      else throw UsageError("unknown worker archetype '" + kind + "'");
      worker.count = jw.at("count").get<std::size_t>();
      worker.accept_prob = jw.value("accept_prob", worker.accept_prob);
      spec.workers.push_back(worker);
    }
  }
  spec.screenshot_pool = j.value("screenshot_pool", spec.screenshot_pool);
  spec.hits_per_worker = j.value("hits_per_worker", spec.hits_per_worker);
  spec.elements_per_hit = j.value("elements_per_hit", spec.elements_per_hit);
  spec.sloppy_element_scale = j.value("sloppy_element_scale", spec.sloppy_element_scale);
  spec.dirichlet_concentration =
      j.value("dirichlet_concentration", spec.dirichlet_concentration);
  return spec;
}

void write_raw_layout(const dgtqc::Corpus& corpus, const fs::path& dir) {
  for (const auto& labeling : corpus.trusted_labelings) {
    write_text(dir / "annotations" / labeling.labeler_id /
                   (labeling.screenshot_id + ".xml"),
               dgtqc::annotation_to_xml(labeling));
  }
  std::string log;
  for (const auto& record : corpus.worker_records) {
    log += dgtqc::worker_record_to_json(record).dump() + "\n";
  }
  write_text(dir / "worker_log.ndjson", log);
  std::string verdicts = "screenshot_id,box_index,verdict\n";
  std::string completeness = "screenshot_id,sc\n";
  for (const auto& labeling : corpus.trusted_labelings) {
    for (std::size_t i = 0; i < labeling.verdicts.size(); ++i) {
      if (!labeling.verdicts[i]) continue;
      verdicts += dgtqc::join_csv(
                      {labeling.screenshot_id, std::to_string(i),
                       *labeling.verdicts[i] == dgtqc::Verdict::kCorrect ? "correct"
                                                                         : "incorrect"}) +
                  "\n";
    }
    if (labeling.completeness) {
      // Shortest round-trip representation so raw and snapshot paths agree.
      completeness += dgtqc::join_csv({labeling.screenshot_id,
                                       json(*labeling.completeness).dump()}) +
                      "\n";
    }
  }
  write_text(dir / "verification.csv", verdicts);
  write_text(dir / "completeness.csv", completeness);
}

int cmd_synth(const RunOptions& opt) {
  const auto spec = parse_synth_spec(opt.synth_spec_path);
  dgtqc::SyntheticCorpus synthetic;
  try {
    synthetic = dgtqc::generate_corpus(spec, opt.seed);
  } catch (const dgtqc::Error& e) {
    // A bad synthetic spec is an input mistake, not a computation failure.
    if (e.kind() == dgtqc::ErrorKind::kArgument) throw UsageError(e.what());
    throw;
  }
  const fs::path out = fs::path(opt.out_dir) / "corpus.ndjson";
  fs::create_directories(out.parent_path());
  std::ofstream file(out, std::ios::binary);
  dgtqc::require(file.good(), dgtqc::ErrorKind::kIo, "cannot write " + out.string());
  dgtqc::export_corpus(synthetic.corpus, file);
  file.close();
  if (!opt.raw_dir.empty()) write_raw_layout(synthetic.corpus, opt.raw_dir);
  const auto summary = dgtqc::corpus_summary(synthetic.corpus);
  std::cout << "snapshot: " << out.string() << "\n"
            << "seed: " << opt.seed << "\n"
            << "trusted_labelers: " << summary.trusted_labelers << "\n"
            << "trusted_uis: " << summary.trusted_uis << "\n"
            << "workers: " << summary.workers << "\n"
            << "worker_hits: " << (summary.accepted_hits + summary.rejected_hits) << "\n";
  return 0;
}

void add_common_flags(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file (flags override it)");
  cmd->add_option("--corpus", opt.corpus_dir, "annotation directory (labeler/screenshot.xml)");
  cmd->add_option("--worker-log", opt.worker_log, "line-delimited JSON worker log");
  cmd->add_option("--verification", opt.verification, "verdict CSV (repeatable)");
  cmd->add_option("--completeness", opt.completeness, "completeness CSV (repeatable)");
  cmd->add_option("--snapshot", opt.snapshot, "corpus snapshot (.ndjson)");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--norm", opt.norm, "KS input normalization: raw|mean|proportion");
  cmd->add_option("--pmethod", opt.pmethod, "KS p-value method: asymptotic|exact");
  cmd->add_option("--include-zeros", opt.include_zeros,
                  "keep zero-count classes in distributions");
  cmd->add_option("--include-custom", opt.include_custom,
                  "append out-of-vocabulary classes");
  cmd->add_option("--min-hits", opt.min_hits, "inclusion rule: min attempted HITs");
  cmd->add_option("--min-elements", opt.min_elements, "inclusion rule: min labeled elements");
  cmd->add_option("--k", opt.k, "trusted-set size");
  cmd->add_option("--k-range", opt.k_range, "trusted-set size range A..B");
  cmd->add_option("--replicates", opt.replicates, "bootstrap replicates for GOF");
  cmd->add_option("--mc-replicates", opt.mc_replicates, "Monte-Carlo KS relabelings");
  cmd->add_option("--pl-mode", opt.pl_mode, "power-law mode: continuous|discrete");
  cmd->add_option("--seed", opt.seed, "root seed (also via DGTQC_SEED)");
  cmd->add_option("--format", opt.format, "report format: csv|json|both");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributional ground truth quality control for crowdsourced UI labeling"};
  app.require_subcommand(1);

  RunOptions opt;
  struct Command {
    CLI::App* cmd;
    int (*run)(const RunOptions&);
  };
  std::vector<Command> commands;

  const auto add = [&](const char* name, const char* help, int (*run)(const RunOptions&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common_flags(cmd, opt);
    commands.push_back({cmd, run});
    return cmd;
  };
  add("ingest", "parse raw inputs and write a corpus snapshot", cmd_ingest);
  add("verify-report", "trusted labelers' verification table", cmd_verify_report);
  add("profiles", "trusted and worker profile tables", cmd_profiles);
  add("dgt-score", "per-worker averaged KS p-values against the trusted set",
      cmd_dgt_score);
  CLI::App* sweep_cmd =
      add("sweep", "prediction models across trusted-set sizes", cmd_sweep);
  sweep_cmd->add_flag("--all-modes", opt.all_modes,
                      "emit a sweep per normalization/zero-handling mode");
  add("baselines", "factor table and baseline regressions", cmd_baselines);
  CLI::App* pl_cmd = add("powerlaw", "power-law fits with bootstrap GOF", cmd_powerlaw);
  pl_cmd->add_option("--data", opt.data_file, "plain numbers file (one value per token)");
  CLI::App* synth_cmd =
      add("synth", "generate a deterministic synthetic corpus", cmd_synth);
  synth_cmd->add_option("--synth-spec", opt.synth_spec_path, "synthetic spec JSON");
  synth_cmd->add_option("--raw-dir", opt.raw_dir,
                        "also write the raw annotation/log/CSV layout here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    for (const auto& command : commands) {
      if (command.cmd->parsed()) {
        apply_config_file(command.cmd, opt);
        return command.run(opt);
      }
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dgtqc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case dgtqc::ErrorKind::kParse:
      case dgtqc::ErrorKind::kField:
      case dgtqc::ErrorKind::kGeometry:
      case dgtqc::ErrorKind::kValue:
      case dgtqc::ErrorKind::kIndex:
      case dgtqc::ErrorKind::kReference:
      case dgtqc::ErrorKind::kConflict:
      case dgtqc::ErrorKind::kIo:
        return 2;  // bad inputs
      default:
        return 1;  // computation failed
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

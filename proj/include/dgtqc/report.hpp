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

// Report emitters. Every report embeds the effective configuration (as '#'
// comment lines in CSV, as a "config" object in JSON) so each number is
// reproducible from the report plus the inputs. Fixed precision throughout:
// p-values, R-squared, betas and precisions to 4 decimals, F to 1 decimal,
// work-volume and time factors to 2.

#ifndef DGTQC_REPORT_HPP_
#define DGTQC_REPORT_HPP_

#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dgtqc/csv.hpp"
#include "dgtqc/method.hpp"
#include "dgtqc/metrics.hpp"

namespace dgtqc {

inline std::string format_fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

inline double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

// Flat key/value echo of the effective run configuration.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string csv_header_comment(const ConfigEcho& config) {
  std::string out;
  for (const auto& [key, value] : config) {
    out += "# " + key + ": " + value + "\n";
  }
  return out;
}

inline nlohmann::json config_json(const ConfigEcho& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : config) j[key] = value;
  return j;
}

inline nlohmann::json regression_json(const RegressionResult& model) {
  nlohmann::json j;
  j["n"] = model.n;
  j["r_squared"] = round_to(model.r_squared, 4);
  j["f"] = std::isfinite(model.f_statistic) ? round_to(model.f_statistic, 1)
                                            : model.f_statistic;
  j["df"] = {model.df_numerator, model.df_denominator};
  j["p_value"] = round_to(model.p_value, 4);
  j["intercept"] = model.intercept;
  j["slopes"] = model.slopes;
  nlohmann::json betas = nlohmann::json::array();
  for (double b : model.standardized_betas) betas.push_back(round_to(b, 4));
  j["standardized_betas"] = betas;
  return j;
}

inline std::vector<std::string> regression_csv_fields(
    const std::optional<RegressionResult>& model) {
  if (!model) return {"", "", "", "", "", "", ""};
  return {format_fixed(model->r_squared, 4),
          std::isfinite(model->f_statistic) ? format_fixed(model->f_statistic, 1) : "inf",
          std::to_string(model->df_numerator),
          std::to_string(model->df_denominator),
          format_fixed(model->p_value, 4),
          format_fixed(model->intercept, 6),
          format_fixed(model->slopes.empty() ? 0.0 : model->slopes[0], 6)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Verification report (one row per trusted labeler, ordered by Q)

inline std::string verify_report_csv(std::span<const TrustedProfile> ordered,
                                     const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  out += "labeler_id,verified_uis,precision_t,precision_sd,sc,sc_sd,q\n";
  for (const auto& profile : ordered) {
    out += join_csv({profile.labeler_id, std::to_string(profile.verified_uis),
                     format_fixed(profile.precision_t.value_or(0.0), 4),
                     format_fixed(profile.precision_sd.value_or(0.0), 4),
                     format_fixed(profile.sc.value_or(0.0) * 100.0, 1),
                     format_fixed(profile.sc_sd.value_or(0.0) * 100.0, 1),
                     format_fixed(profile.q.value_or(0.0), 4)}) +
           "\n";
  }
  return out;
}

inline nlohmann::json verify_report_json(std::span<const TrustedProfile> ordered,
                                         const ConfigEcho& config) {
  nlohmann::json j;
  j["config"] = detail::config_json(config);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& profile : ordered) {
    rows.push_back({{"labeler_id", profile.labeler_id},
                    {"verified_uis", profile.verified_uis},
                    {"precision_t", round_to(profile.precision_t.value_or(0.0), 4)},
                    {"precision_sd", round_to(profile.precision_sd.value_or(0.0), 4)},
                    {"sc", round_to(profile.sc.value_or(0.0) * 100.0, 1)},
                    {"sc_sd", round_to(profile.sc_sd.value_or(0.0) * 100.0, 1)},
                    {"q", round_to(profile.q.value_or(0.0), 4)}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Profile reports

inline std::string profiles_trusted_csv(std::span<const TrustedProfile> profiles,
                                        const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  out += "labeler_id,n_uis,precision_t,sc,q,eui_t\n";
  for (const auto& profile : profiles) {
    out += join_csv({profile.labeler_id, std::to_string(profile.n_uis),
                     profile.precision_t ? format_fixed(*profile.precision_t, 4) : "",
                     profile.sc ? format_fixed(*profile.sc, 4) : "",
                     profile.q ? format_fixed(*profile.q, 4) : "",
                     format_fixed(profile.eui_t, 2)}) +
           "\n";
  }
  return out;
}

inline std::string profiles_workers_csv(std::span<const WorkerProfile> profiles,
                                        const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  out += "worker_id,attempted,accepted,precision_amt,eui_amt,tot_amt_s\n";
  for (const auto& profile : profiles) {
    out += join_csv({profile.worker_id, std::to_string(profile.attempted),
                     std::to_string(profile.accepted),
                     format_fixed(profile.precision_amt, 4),
                     format_fixed(profile.eui_amt, 2),
                     format_fixed(profile.tot_amt_s, 1)}) +
           "\n";
  }
  return out;
}

inline nlohmann::json profiles_json(std::span<const TrustedProfile> trusted,
                                    std::span<const WorkerProfile> workers,
                                    const ConfigEcho& config) {
  nlohmann::json j;
  j["config"] = detail::config_json(config);
  auto& trusted_rows = j["trusted"] = nlohmann::json::array();
  for (const auto& profile : trusted) {
    nlohmann::json row{{"labeler_id", profile.labeler_id},
                       {"n_uis", profile.n_uis},
                       {"verified_uis", profile.verified_uis},
                       {"eui_t", round_to(profile.eui_t, 2)}};
    if (profile.precision_t) row["precision_t"] = round_to(*profile.precision_t, 4);
    if (profile.sc) row["sc"] = round_to(*profile.sc, 4);
    if (profile.q) row["q"] = round_to(*profile.q, 4);
    trusted_rows.push_back(std::move(row));
  }
  auto& worker_rows = j["workers"] = nlohmann::json::array();
  for (const auto& profile : workers) {
    worker_rows.push_back({{"worker_id", profile.worker_id},
                           {"attempted", profile.attempted},
                           {"accepted", profile.accepted},
                           {"precision_amt", round_to(profile.precision_amt, 4)},
                           {"eui_amt", round_to(profile.eui_amt, 2)},
                           {"tot_amt_s", round_to(profile.tot_amt_s, 1)}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Per-worker score report

inline std::string scores_csv(std::span<const DgtScore> scores,
                              std::span<const double> precisions,
                              std::span<const std::string> trusted_ids,
                              const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  std::vector<std::string> header{"worker_id", "precision_amt"};
  for (const auto& id : trusted_ids) header.push_back("p_" + id);
  header.push_back("avg_p");
  out += join_csv(header) + "\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::vector<std::string> fields{scores[i].worker_id,
                                    format_fixed(precisions[i], 4)};
    for (const auto& [id, p] : scores[i].per_trusted_p) {
      fields.push_back(format_fixed(p, 4));
    }
    fields.push_back(format_fixed(scores[i].avg_p, 4));
    out += join_csv(fields) + "\n";
  }
  return out;
}

inline nlohmann::json scores_json(std::span<const DgtScore> scores,
                                  std::span<const double> precisions,
                                  const ConfigEcho& config) {
  nlohmann::json j;
  j["config"] = detail::config_json(config);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [id, p] : scores[i].per_trusted_p) per[id] = round_to(p, 4);
    rows.push_back({{"worker_id", scores[i].worker_id},
                    {"precision_amt", round_to(precisions[i], 4)},
                    {"per_trusted_p", per},
                    {"avg_p", round_to(scores[i].avg_p, 4)}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Sweep report

inline std::string sweep_csv(std::span<const SweepRow> rows, const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  out +=
      "trusted_size,trusted_ids,uis_removed,uis_removed_fraction,workers,"
      "accepted_hits,rejected_hits,precision_mean,precision_sd,"
      "r_squared,f,df1,df2,p_value,intercept,slope\n";
  for (const auto& row : rows) {
    std::string ids;
    for (const auto& id : row.trusted_ids) {
      if (!ids.empty()) ids += "|";
      ids += id;
    }
    std::vector<std::string> fields{std::to_string(row.trusted_size),
                                    ids,
                                    std::to_string(row.uis_removed),
                                    format_fixed(row.uis_removed_fraction, 4),
                                    std::to_string(row.workers_in_subset),
                                    std::to_string(row.accepted_hits),
                                    std::to_string(row.rejected_hits),
                                    format_fixed(row.precision_mean, 4),
                                    format_fixed(row.precision_sd, 4)};
    for (auto& f : detail::regression_csv_fields(row.model)) fields.push_back(std::move(f));
    out += join_csv(fields) + "\n";
  }
  return out;
}

inline nlohmann::json sweep_json(std::span<const SweepRow> rows, const ConfigEcho& config) {
  nlohmann::json j;
  j["config"] = detail::config_json(config);
  auto& out_rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r{{"trusted_size", row.trusted_size},
                     {"trusted_ids", row.trusted_ids},
                     {"uis_removed", row.uis_removed},
                     {"uis_removed_fraction", round_to(row.uis_removed_fraction, 4)},
                     {"workers", row.workers_in_subset},
                     {"accepted_hits", row.accepted_hits},
                     {"rejected_hits", row.rejected_hits},
                     {"precision_mean", round_to(row.precision_mean, 4)},
                     {"precision_sd", round_to(row.precision_sd, 4)}};
    if (row.model) r["model"] = detail::regression_json(*row.model);
    else r["model"] = nullptr;
    nlohmann::json scores = nlohmann::json::array();
    for (std::size_t i = 0; i < row.scores.size(); ++i) {
      nlohmann::json per = nlohmann::json::object();
      for (const auto& [id, p] : row.scores[i].per_trusted_p) per[id] = round_to(p, 4);
      scores.push_back({{"worker_id", row.scores[i].worker_id},
                        {"precision_amt", round_to(row.score_precisions[i], 4)},
                        {"per_trusted_p", per},
                        {"avg_p", round_to(row.scores[i].avg_p, 4)}});
    }
    r["scores"] = std::move(scores);
    out_rows.push_back(std::move(r));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Baseline report

inline std::string baselines_csv(const BaselineReport& report,
                                 std::span<const std::string> trusted_ids,
                                 const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  std::vector<std::string> header{"worker_id", "precision_amt"};
  for (const auto& id : trusted_ids) header.push_back("p_" + id);
  header.insert(header.end(), {"avg_p", "attempted", "tot_amt_s", "eui_amt", "pl_alpha",
                               "pl_xmin", "pl_n_tail", "pl_d", "gof_pl"});
  out += join_csv(header) + "\n";
  for (const auto& row : report.rows) {
    std::vector<std::string> fields{row.worker_id, format_fixed(row.precision_amt, 4)};
    for (const auto& [id, p] : row.per_trusted_p) fields.push_back(format_fixed(p, 4));
    fields.push_back(format_fixed(row.avg_p, 4));
    fields.push_back(std::to_string(row.attempted));
    fields.push_back(format_fixed(row.tot_s, 1));
    fields.push_back(format_fixed(row.eui, 2));
    if (row.pl_fit) {
      fields.push_back(format_fixed(row.pl_fit->alpha, 4));
      fields.push_back(format_fixed(row.pl_fit->xmin, 4));
      fields.push_back(std::to_string(row.pl_fit->n_tail));
      fields.push_back(format_fixed(row.pl_fit->d_statistic, 4));
    } else {
      fields.insert(fields.end(), {"", "", "", ""});
    }
    fields.push_back(row.gof_pl ? format_fixed(*row.gof_pl, 4) : "");
    out += join_csv(fields) + "\n";
  }
  return out;
}

inline std::string baselines_summary_csv(const BaselineReport& report,
                                         const ConfigEcho& config) {
  std::string out = detail::csv_header_comment(config);
  out += "factor,n,r_squared,f,df1,df2,p_value,beta_1,beta_2\n";
  const auto emit = [&out](const std::string& factor,
                           const std::optional<RegressionResult>& model) {
    std::vector<std::string> fields{factor};
    if (!model) {
      fields.insert(fields.end(), {"", "", "", "", "", "", "", ""});
    } else {
      fields.push_back(std::to_string(model->n));
      fields.push_back(format_fixed(model->r_squared, 4));
      fields.push_back(std::isfinite(model->f_statistic)
                           ? format_fixed(model->f_statistic, 1)
                           : "inf");
      fields.push_back(std::to_string(model->df_numerator));
      fields.push_back(std::to_string(model->df_denominator));
      fields.push_back(format_fixed(model->p_value, 4));
      fields.push_back(format_fixed(model->standardized_betas[0], 4));
      fields.push_back(model->standardized_betas.size() > 1
                           ? format_fixed(model->standardized_betas[1], 4)
                           : "");
    }
    out += join_csv(fields) + "\n";
  };
  emit("avg_p", report.model_avg_p);
  emit("attempted_hits", report.model_attempted);
  emit("tot_amt", report.model_tot);
  emit("eui_amt", report.model_eui);
  emit("gof_pl", report.model_gof_pl);
  emit("avg_p+eui_amt", report.model_two_factor);
  return out;
}

inline nlohmann::json baselines_json(const BaselineReport& report,
                                     const ConfigEcho& config) {
  nlohmann::json j;
  j["config"] = detail::config_json(config);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [id, p] : row.per_trusted_p) per[id] = round_to(p, 4);
    nlohmann::json r{{"worker_id", row.worker_id},
                     {"precision_amt", round_to(row.precision_amt, 4)},
                     {"per_trusted_p", per},
                     {"avg_p", round_to(row.avg_p, 4)},
                     {"attempted", row.attempted},
                     {"tot_amt_s", round_to(row.tot_s, 1)},
                     {"eui_amt", round_to(row.eui, 2)}};
    if (row.pl_fit) {
      r["power_law"] = {{"alpha", round_to(row.pl_fit->alpha, 4)},
                        {"xmin", round_to(row.pl_fit->xmin, 4)},
                        {"n_tail", row.pl_fit->n_tail},
                        {"d", round_to(row.pl_fit->d_statistic, 4)}};
    }
    if (row.gof_pl) r["gof_pl"] = round_to(*row.gof_pl, 4);
    rows.push_back(std::move(r));
  }
  auto& models = j["models"] = nlohmann::json::object();
  const auto set_model = [&models](const char* name,
                                   const std::optional<RegressionResult>& model) {
    models[name] = model ? detail::regression_json(*model) : nlohmann::json(nullptr);
  };
  set_model("avg_p", report.model_avg_p);
  set_model("attempted_hits", report.model_attempted);
  set_model("tot_amt", report.model_tot);
  set_model("eui_amt", report.model_eui);
  set_model("gof_pl", report.model_gof_pl);
  set_model("avg_p+eui_amt", report.model_two_factor);
  return j;
}

}  // namespace dgtqc

#endif  // DGTQC_REPORT_HPP_

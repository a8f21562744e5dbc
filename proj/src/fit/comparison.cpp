// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "fit/comparison.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace vidfield {

const ComparisonRow* ComparisonTable::find(Family f) const {
  for (const auto& r : rows)
    if (r.family == f) return &r;
  return nullptr;
}

std::vector<RepConfig> comparison_configs(const RepConfig& reference, const std::vector<Family>& families) {
  require(reference.family == Family::triplane, "comparison reference must be a triplane config");
  std::vector<RepConfig> out;
  for (Family f : families) out.push_back(match_param_budget(reference, f).config);
  return out;
}

namespace {

ComparisonRow run_one(const Video& video, const RepConfig& config, std::size_t reference_params,
                      const HoldoutPlan& plan, const FitConfig& cfg) {
  ComparisonRow row;
  row.family = config.family;
  row.config = config;
  try {
    row.params = param_count(config);
    row.budget_error = budget_error(row.params, reference_params);
    if (std::abs(row.budget_error) > kBudgetTolerance) {
      std::ostringstream os;
      os << "parameter count " << row.params << " is " << row.budget_error * 100
         << "% off the reference " << reference_params;
      row.status = "rejected";
      row.message = os.str();
      return row;
    }
    auto rep = make_representation(config);
    FitReport report = fit(*rep, video, plan, cfg);
    row.psnr = report.mean_eval_psnr;
    row.ssim = report.mean_eval_ssim;
  } catch (const std::exception& e) {
    row.status = "failed";
    row.message = e.what();
  }
  return row;
}

}  // namespace

ComparisonTable run_comparison(const Video& video, const RepConfig& reference, const std::vector<RepConfig>& configs,
                               const HoldoutPlan& plan, const FitConfig& cfg) {
  reference.validate();
  ComparisonTable table{reference, plan, cfg, {}};
  const std::size_t reference_params = param_count(reference);
  if (cfg.deterministic) {
    for (const auto& c : configs) table.rows.push_back(run_one(video, c, reference_params, plan, cfg));
    return table;
  }
  std::vector<std::future<ComparisonRow>> jobs;
  for (const auto& c : configs)
    jobs.push_back(std::async(std::launch::async, run_one, std::cref(video), std::cref(c), reference_params,
                              std::cref(plan), std::cref(cfg)));
  for (auto& j : jobs) table.rows.push_back(j.get());
  return table;
}

void to_json(nlohmann::json& j, const ComparisonTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json row = {{"family", to_string(r.family)},
                          {"params", r.params},
                          {"budget_error", r.budget_error},
                          {"ssim", r.ssim},
                          {"psnr", r.psnr},
                          {"status", r.status},
                          {"config", r.config}};
    if (!r.message.empty()) row["message"] = r.message;
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"schema_version", kReportSchemaVersion},
                     {"reference", t.reference},
                     {"reference_params", param_count(t.reference)},
                     {"holdout", t.plan},
                     {"fit", t.fit},
                     {"rows", rows}};
}

std::string comparison_csv(const ComparisonTable& t) {
  std::ostringstream os;
  os.precision(10);
  os << "family,params,budget_error,ssim,psnr,status\n";
  for (const auto& r : t.rows)
    os << to_string(r.family) << ',' << r.params << ',' << r.budget_error << ',' << r.ssim << ',' << r.psnr << ','
       << r.status << '\n';
  return os.str();
}

}  // namespace vidfield

#pragma once

#include <iosfwd>
#include <optional>

#include "flipcut/agent.hpp"
#include "flipcut/dataset.hpp"
#include "flipcut/heuristics.hpp"

namespace flipcut {

struct EvalProtocol {
  int n_trajectories = 50;   // parallel trajectories (or restarts) per instance
  int max_steps = -1;        // < 0 = 2|V| flips per trajectory; 0 = report initial cuts
  double time_budget_s = 0;  // alternative to max_steps
  double temperature = 0.0;  // greedy when 0; per-instance tau overrides when present
  std::uint64_t seed = 0;
  bool use_instance_tau = false;
  int oracle_fill_max_vertices = 26;  // auto-reference small instances
};

struct EvalRow {
  std::string id;
  int n_vertices = 0;
  Weight best_cut = 0;
  std::optional<Weight> reference_cut;
  std::optional<double> approx_ratio;
  long long n_actions = 0;
  double elapsed_s = 0.0;
  double temperature = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_best_cut = 0.0;
  std::optional<double> mean_ar;   // over rows with a reference
  std::optional<double> ci68_ar;   // standard error of the mean
};

/// Runs agent rollouts per instance under the protocol. Instances without a
/// reference cut get one from the exhaustive oracle when small enough;
/// otherwise the ratio column stays empty and the raw cut is reported.
EvalReport evaluate(const AgentParams& params, const Dataset& dataset,
                    const EvalProtocol& protocol);

/// Same report for the greedy / soft-greedy baselines ("mca", "mca-soft").
EvalReport evaluate_heuristic(const std::string& method, const Dataset& dataset,
                              const EvalProtocol& protocol);

/// One CSV row per instance:
/// id,n_vertices,best_cut,reference_cut,approx_ratio,n_actions,elapsed_s,temperature
void write_eval_csv(std::ostream& out, const EvalReport& report);

/// Recomputes the aggregate fields from the rows.
void finalize_report(EvalReport& report);

}  // namespace flipcut

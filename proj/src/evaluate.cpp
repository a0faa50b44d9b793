#include "flipcut/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "flipcut/common.hpp"
#include "flipcut/oracle.hpp"

namespace flipcut {

namespace {

std::optional<Weight> reference_for(const DatasetInstance& inst, int oracle_cap) {
  if (inst.reference_cut) return inst.reference_cut;
  if (inst.graph.n_vertices() <= oracle_cap) {
    const Weight opt = brute_force_max_cut(inst.graph, oracle_cap).best_cut;
    if (opt > 0) return opt;  // a non-positive optimum has no usable ratio
  }
  return std::nullopt;
}

EvalRow make_row(const DatasetInstance& inst, Weight best_cut, long long n_actions,
                 double elapsed_s, double tau, int oracle_cap) {
  EvalRow row;
  row.id = inst.id;
  row.n_vertices = inst.graph.n_vertices();
  row.best_cut = best_cut;
  row.n_actions = n_actions;
  row.elapsed_s = elapsed_s;
  row.temperature = tau;
  row.reference_cut = reference_for(inst, oracle_cap);
  if (row.reference_cut && *row.reference_cut > 0)
    row.approx_ratio = approximation_ratio(best_cut, *row.reference_cut);
  return row;
}

}  // namespace

void finalize_report(EvalReport& report) {
  if (report.rows.empty()) {
    report.mean_best_cut = 0.0;
    report.mean_ar.reset();
    report.ci68_ar.reset();
    return;
  }
  double cut_total = 0.0;
  double ar_total = 0.0;
  int ar_count = 0;
  for (const auto& r : report.rows) {
    cut_total += static_cast<double>(r.best_cut);
    if (r.approx_ratio) {
      ar_total += *r.approx_ratio;
      ++ar_count;
    }
  }
  report.mean_best_cut = cut_total / static_cast<double>(report.rows.size());
  if (ar_count > 0) {
    const double mean = ar_total / ar_count;
    report.mean_ar = mean;
    double var = 0.0;
    for (const auto& r : report.rows)
      if (r.approx_ratio) var += (*r.approx_ratio - mean) * (*r.approx_ratio - mean);
    report.ci68_ar = ar_count > 1 ? std::sqrt(var / (ar_count - 1)) / std::sqrt(ar_count) : 0.0;
  } else {
    report.mean_ar.reset();
    report.ci68_ar.reset();
  }
}

EvalReport evaluate(const AgentParams& params, const Dataset& dataset,
                    const EvalProtocol& protocol) {
  if (dataset.instances.empty()) throw std::invalid_argument("evaluate: empty dataset");
  EvalReport report;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const auto& inst = dataset.instances[i];
    PolicyConfig pc;
    pc.temperature = protocol.use_instance_tau && inst.tau ? *inst.tau : protocol.temperature;
    pc.epsilon = 0.0;
    pc.rng_seed = mix_seed(protocol.seed, i);
    if (protocol.time_budget_s > 0) {
      pc.time_budget_s = protocol.time_budget_s;
    } else {
      pc.max_steps = protocol.max_steps >= 0 ? protocol.max_steps : 2 * inst.graph.n_vertices();
      pc.obs_budget = std::max(1, pc.max_steps);
    }
    const RolloutResult r = rollout(inst.graph, params, pc, protocol.n_trajectories);
    report.rows.push_back(make_row(inst, r.best_cut, r.total_actions, r.elapsed_s, pc.temperature,
                                   protocol.oracle_fill_max_vertices));
  }
  finalize_report(report);
  return report;
}

EvalReport evaluate_heuristic(const std::string& method, const Dataset& dataset,
                              const EvalProtocol& protocol) {
  if (dataset.instances.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (method != "mca" && method != "mca-soft")
    throw std::invalid_argument("unknown heuristic \"" + method + "\" (use mca or mca-soft)");

  EvalReport report;
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const auto& inst = dataset.instances[i];
    const int n = inst.graph.n_vertices();
    const int steps = protocol.max_steps >= 0 ? protocol.max_steps : 2 * n;
    const double tau = protocol.use_instance_tau && inst.tau ? *inst.tau : protocol.temperature;
    const auto t0 = clock::now();
    HeuristicResult best;
    long long actions = 0;
    if (method == "mca") {
      for (int r = 0; r < protocol.n_trajectories; ++r) {
        const std::uint64_t rs = mix_seed(protocol.seed, i) ^ static_cast<std::uint64_t>(r);
        auto res = mca_run(inst.graph, random_labels(n, mix_seed(rs, 1)), steps);
        actions += res.steps_taken;
        if (r == 0 || res.best_cut > best.best_cut) best = std::move(res);
      }
    } else {
      SoftPolicyConfig cfg;
      cfg.temperature = tau;
      cfg.max_steps = steps;
      cfg.n_restarts = protocol.n_trajectories;
      cfg.rng_seed = mix_seed(protocol.seed, i);
      best = mca_soft_best_of_restarts(inst.graph, cfg);
      actions = static_cast<long long>(steps) * protocol.n_trajectories;
    }
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    report.rows.push_back(
        make_row(inst, best.best_cut, actions, elapsed, tau, protocol.oracle_fill_max_vertices));
  }
  finalize_report(report);
  return report;
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << "id,n_vertices,best_cut,reference_cut,approx_ratio,n_actions,elapsed_s,temperature\n";
  for (const auto& r : report.rows) {
    out << r.id << ',' << r.n_vertices << ',' << r.best_cut << ',';
    if (r.reference_cut) out << *r.reference_cut;
    out << ',';
    if (r.approx_ratio) out << *r.approx_ratio;
    out << ',' << r.n_actions << ',' << r.elapsed_s << ',' << r.temperature << '\n';
  }
}

}  // namespace flipcut

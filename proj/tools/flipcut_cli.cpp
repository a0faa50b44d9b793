// Command-line front end: dataset generation, single-instance solving,
// training, evaluation, temperature tuning, exhaustive oracle, and decode
// timing sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flipcut/agent.hpp"
#include "flipcut/common.hpp"
#include "flipcut/dataset.hpp"
#include "flipcut/evaluate.hpp"
#include "flipcut/generators.hpp"
#include "flipcut/gset.hpp"
#include "flipcut/heuristics.hpp"
#include "flipcut/oracle.hpp"
#include "flipcut/training.hpp"

namespace fs = std::filesystem;
using namespace flipcut;

namespace {

std::string labels_to_string(const Labels& labels) {
  std::string s;
  s.reserve(labels.size());
  for (auto z : labels) s.push_back(z ? '1' : '0');
  return s;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    grid.push_back(std::stod(item));
  }
  return grid;
}

Graph generate_one(const std::string& type, int n, double edge_prob, int attachment,
                   const WeightSpec& weights, std::uint64_t seed) {
  if (type == "er") return generate_er(n, edge_prob, weights, seed);
  if (type == "ba") return generate_ba(n, attachment, weights, seed);
  throw std::invalid_argument("unknown graph type \"" + type + "\" (use er or ba)");
}

int cmd_generate(const std::string& out_dir, const std::string& name, const std::string& split,
                 const std::string& type, int count, int n, double edge_prob, int attachment,
                 const std::string& weights_name, std::uint64_t seed, bool oracle_refs) {
  const WeightSpec weights = WeightSpec::parse(weights_name);
  Dataset ds;
  ds.name = name;
  ds.split = split;
  ds.generator = {{"type", type},
                  {"n", n},
                  {"count", count},
                  {"weights", weights.name()},
                  {"seed", seed}};
  if (type == "er") ds.generator["edge_prob"] = edge_prob;
  if (type == "ba") ds.generator["attachment"] = attachment;

  for (int i = 0; i < count; ++i) {
    DatasetInstance inst;
    std::ostringstream id;
    id << name << '-' << std::setw(3) << std::setfill('0') << i;
    inst.id = id.str();
    inst.graph = generate_one(type, n, edge_prob, attachment, weights, mix_seed(seed, i));
    if (oracle_refs && n <= 26) {
      // a non-positive optimum (possible with negative weights) has no
      // well-defined ratio; such instances report raw cuts instead
      const Weight opt = brute_force_max_cut(inst.graph).best_cut;
      if (opt > 0) inst.reference_cut = opt;
    }
    ds.instances.push_back(std::move(inst));
  }
  save_dataset(out_dir, ds);
  std::cout << "wrote " << count << " instances to " << out_dir << "\n";
  return 0;
}

int cmd_oracle(const std::string& instance, int max_vertices) {
  const Graph g = load_gset(instance);
  const OracleResult result = brute_force_max_cut(g, max_vertices);
  std::cout << result.best_cut << "\n";
  std::cout << "labels " << labels_to_string(result.best_labels) << "\n";
  std::cout << "optima " << result.n_optima << "\n";
  return 0;
}

int cmd_solve(const std::string& instance, const std::string& method, const std::string& checkpoint,
              int restarts, int steps, double time_budget, double tau, std::uint64_t seed) {
  const Graph g = load_gset(instance);
  const int budget = steps > 0 ? steps : 2 * g.n_vertices();

  Weight best_cut = 0;
  Labels best_labels;
  if (method == "mca") {
    const auto r = mca_best_of_restarts(g, restarts, budget, seed);
    best_cut = r.best_cut;
    best_labels = r.best_labels;
  } else if (method == "mca-soft") {
    SoftPolicyConfig cfg;
    cfg.temperature = tau;
    cfg.max_steps = budget;
    cfg.n_restarts = restarts;
    cfg.rng_seed = seed;
    const auto r = mca_soft_best_of_restarts(g, cfg);
    best_cut = r.best_cut;
    best_labels = r.best_labels;
  } else if (method == "agent") {
    if (checkpoint.empty()) throw std::invalid_argument("--checkpoint required for --method agent");
    const AgentParams params = AgentParams::load(checkpoint);
    PolicyConfig cfg;
    cfg.temperature = tau;
    cfg.rng_seed = seed;
    if (time_budget > 0)
      cfg.time_budget_s = time_budget;
    else
      cfg.max_steps = budget;
    const auto r = rollout(g, params, cfg, restarts);
    best_cut = r.best_cut;
    best_labels = r.best_labels;
  } else {
    throw std::invalid_argument("unknown method \"" + method + "\"");
  }
  std::cout << best_cut << "\n";
  std::cout << "labels " << labels_to_string(best_labels) << "\n";
  return 0;
}

Weight heuristic_reference(const Graph& g, std::uint64_t seed) {
  const int budget = 2 * g.n_vertices();
  Weight ref = mca_best_of_restarts(g, 100, budget, seed).best_cut;
  SoftPolicyConfig cfg;
  cfg.temperature = 0.1;
  cfg.max_steps = budget;
  cfg.n_restarts = 100;
  cfg.rng_seed = mix_seed(seed, 1);
  ref = std::max(ref, mca_soft_best_of_restarts(g, cfg).best_cut);
  return ref;
}

int cmd_train(const std::string& config_path, const std::string& graph_type, int n,
              double edge_prob, int attachment, const std::string& weights_name, int val_count,
              const std::string& out, const std::string& best_out, const std::string& log_path,
              long long n_steps_override, std::int64_t seed_override) {
  TrainConfig cfg = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
  if (n_steps_override >= 0) cfg.n_steps = n_steps_override;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

  const WeightSpec weights = WeightSpec::parse(weights_name);
  GraphSource source;
  source.sample = [=](std::mt19937_64& rng) {
    return generate_one(graph_type, n, edge_prob, attachment, weights, rng());
  };
  std::cout << "building " << val_count << " validation instances..." << std::endl;
  for (int i = 0; i < val_count; ++i) {
    Graph g =
        generate_one(graph_type, n, edge_prob, attachment, weights, mix_seed(cfg.seed, 0xda7a + i));
    source.validation_refs.push_back(
        n <= 26 ? brute_force_max_cut(g).best_cut : heuristic_reference(g, mix_seed(cfg.seed, i)));
    source.validation.push_back(std::move(g));
  }

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result = train(cfg, source, ArchConfig{}, log_path);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  result.final_params.save(out);
  std::cout << "final checkpoint: " << out << "\n";
  if (!best_out.empty()) {
    result.best_params.save(best_out);
    std::cout << "best-validation checkpoint: " << best_out << " (score " << result.best_val_score
              << ")\n";
  }
  std::cout << "trained " << cfg.n_steps << " steps in " << elapsed << " s\n";
  return 0;
}

int cmd_evaluate(const std::string& dataset_path, const std::string& method,
                 const std::string& checkpoint, int trajectories, int steps, double time_budget,
                 double tau, bool use_instance_tau, std::uint64_t seed, const std::string& csv_path,
                 const std::string& manifest_path) {
  const Dataset ds = load_dataset(dataset_path);
  EvalProtocol protocol;
  protocol.n_trajectories = trajectories;
  protocol.max_steps = steps;
  protocol.time_budget_s = time_budget;
  protocol.temperature = tau;
  protocol.seed = seed;
  protocol.use_instance_tau = use_instance_tau;

  EvalReport report;
  std::uint64_t checkpoint_hash = 0;
  if (method == "agent") {
    if (checkpoint.empty()) throw std::invalid_argument("--checkpoint required for --method agent");
    checkpoint_hash = nn::checkpoint_content_hash(checkpoint);
    report = evaluate(AgentParams::load(checkpoint), ds, protocol);
  } else {
    report = evaluate_heuristic(method, ds, protocol);
  }

  if (csv_path.empty() || csv_path == "-") {
    write_eval_csv(std::cout, report);
  } else {
    std::ofstream os(csv_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + csv_path);
    write_eval_csv(os, report);
  }
  if (report.mean_ar)
    std::cout << "mean_ar " << *report.mean_ar << " (se " << *report.ci68_ar << ")\n";
  std::cout << "mean_best_cut " << report.mean_best_cut << "\n";

  if (!manifest_path.empty()) {
    std::ostringstream proto;
    proto << method << ':' << trajectories << ':' << steps << ':' << time_budget << ':' << tau
          << ':' << use_instance_tau;
    nlohmann::json manifest{
        {"dataset", ds.name},
        {"method", method},
        {"seed", seed},
        {"protocol",
         {{"n_trajectories", trajectories},
          {"max_steps", steps},
          {"time_budget_s", time_budget},
          {"temperature", tau},
          {"use_instance_tau", use_instance_tau}}},
        {"config_hash", fnv1a(proto.str().data(), proto.str().size())},
    };
    if (method == "agent") {
      manifest["checkpoint"] = checkpoint;
      manifest["checkpoint_hash"] = checkpoint_hash;
    }
    std::ofstream os(manifest_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + manifest_path);
    os << manifest.dump(2) << '\n';
  }
  return 0;
}

int cmd_tune_temp(const std::string& dataset_path, const std::string& grid_csv, int restarts,
                  int steps, std::uint64_t seed, bool per_instance, bool update_manifest) {
  Dataset ds = load_dataset(dataset_path);
  const std::vector<double> grid = parse_grid(grid_csv);
  std::vector<Graph> graphs;
  for (const auto& inst : ds.instances) graphs.push_back(inst.graph);

  SoftPolicyConfig budget;
  budget.n_restarts = restarts;
  budget.rng_seed = seed;

  if (per_instance) {
    std::vector<double> taus;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      SoftPolicyConfig b = budget;
      b.max_steps = steps > 0 ? steps : 2 * graphs[i].n_vertices();
      const double tau = tune_temperature({graphs[i]}, grid, b);
      taus.push_back(tau);
      std::cout << ds.instances[i].id << ' ' << tau << "\n";
    }
    if (update_manifest) {
      for (std::size_t i = 0; i < taus.size(); ++i) ds.instances[i].tau = taus[i];
      fs::path path(dataset_path);
      save_dataset(fs::is_directory(path) ? path.string() : path.parent_path().string(), ds);
      std::cout << "manifest updated\n";
    }
  } else {
    SoftPolicyConfig b = budget;
    b.max_steps = steps > 0 ? steps : 2 * graphs.front().n_vertices();
    std::cout << tune_temperature(graphs, grid, b) << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& sizes_csv, double avg_degree, int steps,
              const std::string& checkpoint, std::uint64_t seed, const std::string& csv_path) {
  std::vector<int> sizes;
  for (double s : parse_grid(sizes_csv)) sizes.push_back(static_cast<int>(s));

  std::ostringstream csv;
  csv << "n_vertices,n_edges,steps,decode_s,decode_s_per_action\n";
  for (int n : sizes) {
    const Graph g =
        generate_er(n, std::min(1.0, avg_degree / n), {WeightSet::ZeroPlusMinusOne, true}, seed);
    const AgentParams params =
        checkpoint.empty() ? AgentParams::init(ArchConfig{}, seed) : AgentParams::load(checkpoint);
    PolicyConfig cfg;
    cfg.max_steps = steps;
    cfg.rng_seed = seed;
    const auto r = rollout(g, params, cfg, 1);
    csv << n << ',' << g.n_edges() << ',' << steps << ',' << r.decode_s << ','
        << r.decode_s / steps << '\n';
    std::cout << "n=" << n << " decode/action " << r.decode_s / steps << " s\n";
  }
  if (!csv_path.empty()) {
    std::ofstream os(csv_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + csv_path);
    os << csv.str();
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-Cut toolkit: incremental flip environment, greedy/soft baselines, "
               "recurrent Q-agent, benchmark harness"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset with a manifest");
  std::string gen_out, gen_name = "dataset", gen_split = "test", gen_type = "er",
              gen_weights = "0pm1";
  int gen_count = 100, gen_n = 40, gen_attachment = 4;
  double gen_p = 0.15;
  std::uint64_t gen_seed = 0;
  bool gen_oracle = false;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--name", gen_name, "Dataset name");
  gen->add_option("--split", gen_split, "train / validation / test");
  gen->add_option("--type", gen_type, "er or ba");
  gen->add_option("--count", gen_count, "Number of instances");
  gen->add_option("--n", gen_n, "Vertices per instance");
  gen->add_option("--edge-prob", gen_p, "ER edge probability");
  gen->add_option("--attachment", gen_attachment, "BA attachment count");
  gen->add_option("--weights", gen_weights, "Weight alphabet: 0pm1, pm1, 01, 1");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_flag("--oracle-refs", gen_oracle, "Fill exact reference cuts (|V| <= 26)");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance; prints best cut and labeling");
  std::string solve_instance, solve_method = "mca", solve_ckpt;
  int solve_restarts = 50, solve_steps = 0;
  double solve_tau = 0.0, solve_time = 0.0;
  std::uint64_t solve_seed = 0;
  solve->add_option("--instance", solve_instance, "Instance file")->required();
  solve->add_option("--method", solve_method, "mca, mca-soft, or agent");
  solve->add_option("--checkpoint", solve_ckpt, "Agent checkpoint");
  solve->add_option("--restarts", solve_restarts, "Restarts / parallel trajectories");
  solve->add_option("--steps", solve_steps, "Flips per trajectory (0 = 2|V|)");
  solve->add_option("--time-budget", solve_time, "Wall-clock budget in seconds (agent)");
  solve->add_option("--tau", solve_tau, "Sampling temperature");
  solve->add_option("--seed", solve_seed, "Seed");

  // train
  auto* tr = app.add_subcommand("train", "Train a checkpoint on a synthetic distribution");
  std::string tr_config, tr_type = "er", tr_weights = "0pm1", tr_out = "checkpoint.bin",
              tr_best_out, tr_log;
  int tr_n = 40, tr_attachment = 4, tr_val = 50;
  double tr_p = 0.15;
  long long tr_steps = -1;
  std::int64_t tr_seed = -1;
  tr->add_option("--config", tr_config, "key=value training config file");
  tr->add_option("--graph-type", tr_type, "er or ba");
  tr->add_option("--n", tr_n, "Training graph size");
  tr->add_option("--edge-prob", tr_p, "ER edge probability");
  tr->add_option("--attachment", tr_attachment, "BA attachment count");
  tr->add_option("--weights", tr_weights, "Weight alphabet");
  tr->add_option("--val-count", tr_val, "Held-out validation instances");
  tr->add_option("--out", tr_out, "Final checkpoint path");
  tr->add_option("--best-out", tr_best_out, "Best-validation checkpoint path");
  tr->add_option("--log", tr_log, "JSONL training log path");
  tr->add_option("--n-steps", tr_steps, "Override config n_steps");
  tr->add_option("--seed", tr_seed, "Override config seed");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint or heuristic on a dataset");
  std::string ev_dataset, ev_method = "agent", ev_ckpt, ev_csv, ev_manifest;
  int ev_traj = 50, ev_steps = -1;
  double ev_time = 0.0, ev_tau = 0.0;
  bool ev_instance_tau = false;
  std::uint64_t ev_seed = 0;
  ev->add_option("--dataset", ev_dataset, "Dataset manifest or directory")->required();
  ev->add_option("--method", ev_method, "agent, mca, or mca-soft");
  ev->add_option("--checkpoint", ev_ckpt, "Agent checkpoint");
  ev->add_option("--trajectories", ev_traj, "Trajectories / restarts per instance");
  ev->add_option("--steps", ev_steps, "Flips per trajectory (default 2|V|; 0 reports initial cuts)");
  ev->add_option("--time-budget", ev_time, "Seconds per instance instead of steps");
  ev->add_option("--tau", ev_tau, "Policy temperature");
  ev->add_flag("--use-instance-tau", ev_instance_tau, "Use per-instance tau from the manifest");
  ev->add_option("--seed", ev_seed, "Seed");
  ev->add_option("--csv", ev_csv, "Report CSV path (default stdout)");
  ev->add_option("--run-manifest", ev_manifest, "Reproducibility manifest JSON path");

  // tune-temp
  auto* tt = app.add_subcommand("tune-temp", "Grid-search the soft policy temperature");
  std::string tt_dataset, tt_grid = "0,0.001,0.003,0.01,0.03,0.1,0.3,1,3";
  int tt_restarts = 20, tt_steps = 0;
  std::uint64_t tt_seed = 0;
  bool tt_per_instance = false, tt_update = false;
  tt->add_option("--dataset", tt_dataset, "Dataset manifest or directory")->required();
  tt->add_option("--grid", tt_grid, "Comma-separated temperatures");
  tt->add_option("--restarts", tt_restarts, "Restarts per temperature");
  tt->add_option("--steps", tt_steps, "Flips per restart (0 = 2|V|)");
  tt->add_option("--seed", tt_seed, "Seed");
  tt->add_flag("--per-instance", tt_per_instance, "Tune each instance independently");
  tt->add_flag("--update-manifest", tt_update, "Write tuned taus back to the manifest");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exhaustive maximum cut for a small instance");
  std::string orc_instance;
  int orc_cap = 26;
  orc->add_option("--instance", orc_instance, "Instance file")->required();
  orc->add_option("--max-vertices", orc_cap, "Enumeration cap");

  // bench
  auto* bench = app.add_subcommand("bench", "Per-action decode timing across graph sizes");
  std::string bench_sizes = "100,1000,10000", bench_ckpt, bench_csv;
  double bench_degree = 8.0;
  int bench_steps = 200;
  std::uint64_t bench_seed = 0;
  bench->add_option("--sizes", bench_sizes, "Comma-separated vertex counts");
  bench->add_option("--avg-degree", bench_degree, "Average degree of the generated graphs");
  bench->add_option("--steps", bench_steps, "Actions to time per size");
  bench->add_option("--checkpoint", bench_ckpt, "Checkpoint (random init when omitted)");
  bench->add_option("--seed", bench_seed, "Seed");
  bench->add_option("--csv", bench_csv, "Timing CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_out, gen_name, gen_split, gen_type, gen_count, gen_n, gen_p,
                          gen_attachment, gen_weights, gen_seed, gen_oracle);
    if (solve->parsed())
      return cmd_solve(solve_instance, solve_method, solve_ckpt, solve_restarts, solve_steps,
                       solve_time, solve_tau, solve_seed);
    if (tr->parsed())
      return cmd_train(tr_config, tr_type, tr_n, tr_p, tr_attachment, tr_weights, tr_val, tr_out,
                       tr_best_out, tr_log, tr_steps, tr_seed);
    if (ev->parsed())
      return cmd_evaluate(ev_dataset, ev_method, ev_ckpt, ev_traj, ev_steps, ev_time, ev_tau,
                          ev_instance_tau, ev_seed, ev_csv, ev_manifest);
    if (tt->parsed())
      return cmd_tune_temp(tt_dataset, tt_grid, tt_restarts, tt_steps, tt_seed, tt_per_instance,
                           tt_update);
    if (orc->parsed()) return cmd_oracle(orc_instance, orc_cap);
    if (bench->parsed())
      return cmd_bench(bench_sizes, bench_degree, bench_steps, bench_ckpt, bench_seed, bench_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

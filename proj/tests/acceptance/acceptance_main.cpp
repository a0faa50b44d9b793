// Acceptance suite: runs every acceptance criterion end-to-end and prints
// one [PASS]/[FAIL] line per criterion. Criterion 5 trains a checkpoint from
// scratch at the published hyperparameters; later criteria reuse it from the
// work directory. Exit code = number of failed criteria.
//
// Usage: acceptance [--workdir DIR] [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flipcut/agent.hpp"
#include "flipcut/common.hpp"
#include "flipcut/dataset.hpp"
#include "flipcut/evaluate.hpp"
#include "flipcut/generators.hpp"
#include "flipcut/heuristics.hpp"
#include "flipcut/numeric.hpp"
#include "flipcut/oracle.hpp"
#include "flipcut/training.hpp"

using namespace flipcut;
using nn::Mat;
using nn::Tensor;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g_workdir = "acceptance_artifacts";

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

Mat randm(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

/// Central-difference gradient check over sampled coordinates, reporting the
/// worst |analytic - fd| / (|fd| + 1e-8). Two step sizes cover the
/// truncation- and roundoff-limited regimes.
double grad_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params,
                  int samples_per_tensor, std::uint64_t seed) {
  for (auto& p : params) p.zero_grad();
  Tensor loss = loss_fn();
  loss.backward();
  std::vector<Mat> analytic;
  for (auto& p : params) {
    analytic.push_back(p.grad());
    p.zero_grad();
  }
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Mat& value = params[pi].value();
    std::vector<Eigen::Index> coords;
    if (value.size() <= samples_per_tensor) {
      for (Eigen::Index i = 0; i < value.size(); ++i) coords.push_back(i);
    } else {
      for (int i = 0; i < samples_per_tensor; ++i)
        coords.push_back(static_cast<Eigen::Index>(rng() % value.size()));
    }
    for (const auto c : coords) {
      const double original = value(c);
      double err = std::numeric_limits<double>::infinity();
      for (const double h0 : {1e-5, 1e-6}) {
        const double h = h0 * std::max(1.0, std::abs(original));
        value(c) = original + h;
        const double up = loss_fn().value()(0, 0);
        value(c) = original - h;
        const double down = loss_fn().value()(0, 0);
        value(c) = original;
        const double fd = (up - down) / (2.0 * h);
        err = std::min(err, std::abs(analytic[pi](c) - fd) / (std::abs(fd) + 1e-8));
      }
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// criterion 1: incremental state equals full recomputation
// ---------------------------------------------------------------------------
Outcome criterion_1() {
  const double t0 = now_s();
  std::mt19937_64 rng(20260810);
  long long checked_flips = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 63);
    const double p = 0.05 + 0.85 * uniform_unit(rng);
    const Graph g = generate_er(n, p, {WeightSet::ZeroPlusMinusOne, false}, rng());
    CutState s = make_cut_state(g, random_labels(n, rng()));
    for (int k = 0; k < 4 * n; ++k) {
      apply_flip(s, g, static_cast<int>(rng() % n));
      ++checked_flips;
      if (s.cut_value != cut_value(g, s.labels))
        return {false, "cut value diverged from recomputation"};
      if (s.peeks != compute_peeks(g, s.labels))
        return {false, "peeks diverged from recomputation"};
    }
  }
  const double elapsed = now_s() - t0;
  std::ostringstream os;
  os << checked_flips << " flips on 1000 graphs exactly match recomputation, " << elapsed << " s";
  return {elapsed < 30.0, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 2: restarted greedy vs the exhaustive oracle
// ---------------------------------------------------------------------------
Outcome criterion_2() {
  const double t0 = now_s();
  std::mt19937_64 rng(42);
  int hits = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 13);  // 4..16
    const double p = 0.2 + 0.6 * uniform_unit(rng);
    const Graph g = generate_er(n, p, {WeightSet::ZeroPlusMinusOne, false}, rng());
    const Weight opt = brute_force_max_cut(g).best_cut;
    const auto r = mca_best_of_restarts(g, 50, 4 * n, rng());
    if (r.best_cut > opt) return {false, "heuristic exceeded the exhaustive optimum"};
    if (r.best_cut == opt) ++hits;
  }
  const double elapsed = now_s() - t0;
  std::ostringstream os;
  os << "greedy(50 restarts) matched the oracle on " << hits << "/200 instances, " << elapsed
     << " s";
  return {hits >= 170 && elapsed < 120.0, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 3: gradients vs central finite differences
// ---------------------------------------------------------------------------
Outcome criterion_3() {
  const double t0 = now_s();
  std::mt19937_64 rng(7);
  auto weigh = [](const Tensor& out, const Mat& w) {
    return nn::scale(nn::sum_all(nn::mul(out, Tensor::constant(w))),
                     1.0 / std::sqrt(static_cast<double>(w.size())));
  };

  double worst_op = 0.0;
  for (int config = 0; config < 20; ++config) {
    const int r = 2 + static_cast<int>(rng() % 5);
    const int c = 3 + static_cast<int>(rng() % 5);
    Tensor a = Tensor::parameter(randm(r, c, rng));
    Tensor b = Tensor::parameter(randm(r, c, rng));
    const Mat w = randm(r, c, rng);
    auto track = [&](double err) { worst_op = std::max(worst_op, err); };

    track(grad_check([&] { return weigh(nn::add(a, b), w); }, {a, b}, 8, config));
    track(grad_check([&] { return weigh(nn::mul(a, b), w); }, {a, b}, 8, config));
    track(grad_check([&] { return weigh(nn::tanh_op(a), w); }, {a}, 8, config));
    track(grad_check([&] { return weigh(nn::sigmoid(a), w); }, {a}, 8, config));
    // keep rectifier inputs away from the kink, where the derivative is
    // undefined and central differences cannot converge
    Mat away = randm(r, c, rng).unaryExpr([](double v) { return v >= 0 ? v + 0.05 : v - 0.05; });
    Tensor lr_in = Tensor::parameter(std::move(away));
    track(grad_check([&] { return weigh(nn::leaky_relu(lr_in), w); }, {lr_in}, 8, config));
    track(grad_check([&] { return weigh(nn::softmax_rows(a, 0.7), w); }, {a}, 8, config));
    track(grad_check([&] { return weigh(nn::log_softmax_rows(a, 0.7), w); }, {a}, 8, config));
    const Mat wcol = randm(r, 1, rng);
    track(grad_check([&] { return weigh(nn::logsumexp_rows(a), wcol); }, {a}, 8, config));

    Tensor lw = Tensor::parameter(randm(c, 4, rng));
    Tensor lx = Tensor::parameter(randm(r, 4, rng));
    Tensor lb = Tensor::parameter(randm(1, c, rng));
    track(grad_check([&] { return weigh(nn::linear(lx, lw, lb), w); }, {lx, lw, lb}, 8, config));

    Tensor gain = Tensor::parameter(randm(1, c, rng));
    Tensor beta = Tensor::parameter(randm(1, c, rng));
    track(grad_check([&] { return weigh(nn::layer_norm(a, gain, beta), w); }, {a, gain, beta}, 8,
                     config));

    nn::GruParams gp;
    const int h = 5, in = 4;
    gp.w_update = Tensor::parameter(randm(h, in, rng) * 0.5);
    gp.u_update = Tensor::parameter(randm(h, h, rng) * 0.5);
    gp.b_update = Tensor::parameter(randm(1, h, rng) * 0.5);
    gp.w_reset = Tensor::parameter(randm(h, in, rng) * 0.5);
    gp.u_reset = Tensor::parameter(randm(h, h, rng) * 0.5);
    gp.b_reset = Tensor::parameter(randm(1, h, rng) * 0.5);
    gp.w_cand = Tensor::parameter(randm(h, in, rng) * 0.5);
    gp.u_cand = Tensor::parameter(randm(h, h, rng) * 0.5);
    gp.b_cand = Tensor::parameter(randm(1, h, rng) * 0.5);
    Tensor gh = Tensor::parameter(randm(2, h, rng));
    Tensor gx = Tensor::parameter(randm(2, in, rng));
    const Mat wgru = randm(2, h, rng);
    track(grad_check(
        [&] { return weigh(nn::gru_cell(gp, gh, gx), wgru); },
        {gp.w_update, gp.u_update, gp.b_update, gp.w_reset, gp.u_reset, gp.b_reset, gp.w_cand,
         gp.u_cand, gp.b_cand, gh, gx},
        8, 100 + config));
  }
  if (worst_op >= 1e-5) {
    std::ostringstream os;
    os << "op gradient error " << worst_op << " >= 1e-5";
    return {false, os.str()};
  }

  // composed checks at the published architecture sizes
  AgentParams params = AgentParams::init(ArchConfig{}, 99);
  std::vector<Tensor> all;
  for (auto& e : params.entries()) all.push_back(e.tensor);
  const Graph g2 = Graph::from_edges(2, {{0, 1, 1}});
  CutState s = make_cut_state(g2, Labels{0, 0});
  const Observation obs = observe(s, g2, 4);
  std::mt19937_64 wrng(5);
  const Mat h0 = randm(1, params.arch.hidden_dim, wrng) * 0.3;
  const Mat wq = randm(2, 1, wrng);

  const double err_q = grad_check(
      [&] {
        Tensor x = encode_tensor(g2, params);
        Tensor q = q_from_vertex_embeddings(
            vertex_embeddings_tensor(x, Tensor::constant(obs.per_vertex), params),
            std::vector<int>(2, 0), Tensor::constant(h0), params);
        return nn::sum_all(nn::mul(q, Tensor::constant(wq)));
      },
      all, 4, 11);

  const Mat v_star = randm(1, params.arch.vertex_dim(), wrng) * 0.5;
  const Mat g_next = randm(1, 2, wrng) * 0.5;
  const Mat wh = randm(1, params.arch.hidden_dim, wrng);
  const double err_chain = grad_check(
      [&] {
        Tensor h = Tensor::constant(h0);
        for (int step = 0; step < 5; ++step)
          h = advance_hidden_batch(h, Tensor::constant(v_star), Tensor::constant(g_next), params);
        return nn::scale(nn::sum_all(nn::mul(h, Tensor::constant(wh))),
                         1.0 / params.arch.hidden_dim);
      },
      all, 4, 12);

  // full training loss on the 2-vertex graph with a 2-step window
  AgentParams target = AgentParams::init(ArchConfig{}, 100);
  auto graph2 = std::make_shared<const Graph>(g2);
  std::vector<TransitionSegment> segments;
  {
    std::mt19937_64 arng(3);
    CutState st = make_cut_state(*graph2, random_labels(2, arng()));
    DecoderState dec = make_decoder_state(params.arch);
    const Mat x = encode(*graph2, params);
    std::vector<EnvSnapshot> snaps{snapshot_of(st)};
    std::vector<int> acts;
    std::vector<Eigen::VectorXf> hiddens{dec.hidden.transpose().cast<float>()};
    const int episode = 6, k_bptt = 2;
    for (int t = 0; t < episode; ++t) {
      const Observation o = observe(st, *graph2, episode);
      const Eigen::VectorXd q = q_values(x, o, dec, params);
      PolicyConfig pc;
      pc.temperature = 0.1;
      const int action = select_action(q, pc, arng);
      const Eigen::RowVectorXd v = vertex_embeddings(x, o, params).row(action);
      const Weight prev_best = st.best_cut;
      apply_flip(st, *graph2, action);
      dec = advance_hidden(dec, v, observe_global(st, *graph2), params);
      snaps.push_back(snapshot_of(st));
      acts.push_back(action);
      hiddens.push_back(dec.hidden.transpose().cast<float>());
      const int window = std::min(t, k_bptt) + 1;
      TransitionSegment seg;
      seg.graph = graph2;
      seg.states.assign(snaps.end() - (window + 1), snaps.end());
      seg.actions.assign(acts.end() - window, acts.end());
      seg.initial_hidden = hiddens[hiddens.size() - 1 - window];
      seg.reward = reward(st, prev_best, 2);
      seg.done = (t == episode - 1);
      seg.episode_budget = episode;
      segments.push_back(std::move(seg));
    }
  }
  std::vector<const TransitionSegment*> batch;
  for (const auto& sgm : segments) batch.push_back(&sgm);
  const double err_loss = grad_check(
      [&] { return mdqn_loss(params, target, batch, MdqnConfig{}); }, all, 4, 13);

  const double elapsed = now_s() - t0;
  std::ostringstream os;
  os << "op err " << worst_op << ", Q-head err " << err_q << ", 5-step chain err " << err_chain
     << ", training-loss err " << err_loss << ", " << elapsed << " s";
  return {worst_op < 1e-5 && err_q < 1e-4 && err_chain < 1e-4 && err_loss < 1e-4 &&
              elapsed < 120.0,
          os.str()};
}

// ---------------------------------------------------------------------------
// criterion 4: M-DQN identities
// ---------------------------------------------------------------------------
Outcome criterion_4() {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist(0.0, 2.0);

  double worst_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 14);
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = dist(rng);
    const double tau = 0.01 + uniform_unit(rng);
    const Eigen::VectorXd pi = softmax_with_temperature(q, tau);
    const Eigen::VectorXd lp = log_softmax_with_temperature(q, tau);
    double explicit_sum = 0.0;
    for (int i = 0; i < n; ++i) explicit_sum += pi[i] * (q[i] - tau * lp[i]);
    worst_gap = std::max(worst_gap, std::abs(explicit_sum - tau * logsumexp(q / tau)));
  }
  if (worst_gap >= 1e-10) {
    std::ostringstream os;
    os << "soft expectation identity gap " << worst_gap;
    return {false, os.str()};
  }

  double worst_max_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd q(8);
    for (int i = 0; i < 8; ++i) q[i] = dist(rng);
    MdqnConfig cfg;
    cfg.alpha = 0.0;
    cfg.tau = 1e-6;
    const double r = dist(rng);
    const double target = mdqn_target(r, q, q, 0, false, cfg);
    worst_max_gap = std::max(worst_max_gap, std::abs(target - (r + cfg.gamma * q.maxCoeff())));
  }
  if (worst_max_gap >= 1e-4) {
    std::ostringstream os;
    os << "tau->0 hard-max gap " << worst_max_gap;
    return {false, os.str()};
  }

  // clipping active exactly when ln pi < l0
  int clipped = 0, unclipped = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = dist(rng) * 0.02;
    MdqnConfig cfg;  // tau 0.01, alpha 0.9, l0 -1, gamma 0.7
    const int action = static_cast<int>(rng() % n);
    const Eigen::VectorXd lp = log_softmax_with_temperature(q, cfg.tau);
    const double with_bonus = mdqn_target(0.0, q, q, action, true, cfg);
    const double bonus = with_bonus;  // reward 0, done: only the bonus remains
    if (lp[action] < cfg.l0) {
      ++clipped;
      if (std::abs(bonus - cfg.alpha * cfg.tau * cfg.l0) > 1e-12)
        return {false, "clip not applied for ln pi < l0"};
    } else {
      ++unclipped;
      if (std::abs(bonus - cfg.alpha * cfg.tau * lp[action]) > 1e-12)
        return {false, "clip applied although ln pi >= l0"};
    }
  }
  std::ostringstream os;
  os << "identity gap " << worst_gap << ", hard-max gap " << worst_max_gap << ", clip cases "
     << clipped << "/" << unclipped << " (clipped/unclipped)";
  return {clipped > 0 && unclipped > 0, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 5: desk-scale training reproduction
// ---------------------------------------------------------------------------

Dataset make_er_dataset(const std::string& name, int count, int n_lo, int n_hi, double p,
                        std::uint64_t seed, bool oracle_refs) {
  Dataset ds;
  ds.name = name;
  ds.split = "test";
  ds.generator = {{"type", "er"}, {"edge_prob", p}, {"weights", "0pm1"}, {"seed", seed}};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    DatasetInstance inst;
    std::ostringstream id;
    id << name << '-' << i;
    inst.id = id.str();
    const int n = n_lo + static_cast<int>(rng() % (n_hi - n_lo + 1));
    inst.graph = generate_er(n, p, {WeightSet::ZeroPlusMinusOne, false}, rng());
    if (oracle_refs) {
      const Weight opt = brute_force_max_cut(inst.graph).best_cut;
      if (opt > 0) inst.reference_cut = opt;
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

std::string checkpoint_path() { return (fs::path(g_workdir) / "er40_best.ckpt").string(); }

/// Trains the desk-scale ER40 checkpoint with the published hyperparameters
/// and stores the best-validation parameters. Reused by criterion 6.
AgentParams ensure_trained_checkpoint(std::string* note) {
  const std::string path = checkpoint_path();
  if (fs::exists(path)) {
    if (note) *note = "reusing " + path;
    return AgentParams::load(path);
  }
  TrainConfig cfg;  // published defaults
  cfg.seed = 1;
  GraphSource source;
  source.sample = [](std::mt19937_64& rng) {
    return generate_er(40, 0.15, {WeightSet::ZeroPlusMinusOne, false}, rng());
  };
  std::mt19937_64 vrng(777);
  for (int i = 0; i < 50; ++i) {
    Graph g = generate_er(40, 0.15, {WeightSet::ZeroPlusMinusOne, false}, vrng());
    Weight ref = mca_best_of_restarts(g, 100, 80, vrng()).best_cut;
    SoftPolicyConfig sp;
    sp.temperature = 0.1;
    sp.max_steps = 80;
    sp.n_restarts = 100;
    sp.rng_seed = vrng();
    ref = std::max(ref, mca_soft_best_of_restarts(g, sp).best_cut);
    source.validation.push_back(std::move(g));
    source.validation_refs.push_back(ref);
  }
  fs::create_directories(g_workdir);
  TrainResult result =
      train(cfg, source, ArchConfig{}, (fs::path(g_workdir) / "train_log.jsonl").string());
  result.best_params.save(path);
  result.final_params.save((fs::path(g_workdir) / "er40_final.ckpt").string());
  if (note)
    *note = "trained from scratch (best validation score " + std::to_string(result.best_val_score) +
            ")";
  return result.best_params;
}

Outcome criterion_5() {
  const double t0 = now_s();
  std::string note;
  const AgentParams params = ensure_trained_checkpoint(&note);

  // (a) exact-reference evaluation on small instances
  const Dataset oracle_set = make_er_dataset("er-small", 100, 10, 20, 0.15, 1234, true);
  EvalProtocol protocol;
  protocol.n_trajectories = 50;
  protocol.max_steps = 0;  // 2|V|
  protocol.temperature = 0.0;
  protocol.seed = 5;
  const EvalReport oracle_report = evaluate(params, oracle_set, protocol);
  const double oracle_ar = oracle_report.mean_ar.value_or(0.0);

  // (b) head-to-head with the tuned soft-greedy baseline on ER40
  const Dataset er40_test = make_er_dataset("er40-test", 100, 40, 40, 0.15, 4321, false);
  const Dataset er40_val = make_er_dataset("er40-val", 50, 40, 40, 0.15, 8765, false);
  std::vector<Graph> val_graphs;
  for (const auto& inst : er40_val.instances) val_graphs.push_back(inst.graph);
  SoftPolicyConfig tune_budget;
  tune_budget.max_steps = 80;
  tune_budget.n_restarts = 50;
  tune_budget.rng_seed = 99;
  const double tuned_tau = tune_temperature(
      val_graphs, {0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1, 3}, tune_budget);

  const EvalReport agent_report = evaluate(params, er40_test, protocol);
  EvalProtocol soft_protocol = protocol;
  soft_protocol.temperature = tuned_tau;
  const EvalReport soft_report = evaluate_heuristic("mca-soft", er40_test, soft_protocol);

  const double elapsed = now_s() - t0;
  std::ostringstream os;
  os << note << "; oracle-set mean AR " << oracle_ar << " (need >= 0.99); ER40 mean best cut: agent "
     << agent_report.mean_best_cut << " vs soft-greedy(tau=" << tuned_tau << ") "
     << soft_report.mean_best_cut << "; " << elapsed << " s";
  const bool pass = oracle_ar >= 0.99 &&
                    agent_report.mean_best_cut >= soft_report.mean_best_cut &&
                    elapsed < 4 * 3600.0;
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 6: declared non-reproductions + scaling substitutes
// ---------------------------------------------------------------------------
Outcome criterion_6() {
  std::printf(
      "       note: full-scale results (GSet at 180 s, the ~300x throughput figure, 500k-vertex\n"
      "       timing) need the original GPU setup and long training runs; they are NOT reproduced\n"
      "       here. The substitutes below check the scaling/encode-once/stochastic properties.\n");
  std::string note;
  const AgentParams params = ensure_trained_checkpoint(&note);

  // (a) per-action decode scaling, 1k -> 10k vertices, and density invariance
  auto decode_per_action = [&](int n, double avg_degree, int steps) {
    const Graph g =
        generate_er(n, std::min(1.0, avg_degree / n), {WeightSet::ZeroPlusMinusOne, true}, 3);
    PolicyConfig cfg;
    cfg.max_steps = steps;
    cfg.rng_seed = 11;
    // warm-up run stabilizes allocator and cache effects
    rollout(g, params, cfg, 1);
    const auto r = rollout(g, params, cfg, 1);
    return r.decode_s / steps;
  };
  const double t_1k = decode_per_action(1000, 8.0, 400);
  const double t_10k = decode_per_action(10000, 8.0, 150);
  const double scale_ratio = t_10k / t_1k;

  const double t_10k_dense = decode_per_action(10000, 16.0, 150);
  const double density_ratio = std::max(t_10k_dense, t_10k) / std::min(t_10k_dense, t_10k);

  // (b) encode-once instrumentation across budgets
  bool encode_once = true;
  const Graph g200 = generate_er(200, 0.05, {WeightSet::ZeroPlusMinusOne, false}, 5);
  for (int budget : {1, 50, 400}) {
    PolicyConfig cfg;
    cfg.max_steps = budget;
    cfg.rng_seed = 7;
    encode_once = encode_once && rollout(g200, params, cfg, 4).encode_calls == 1;
  }

  // (c) a non-zero temperature matches or beats the deterministic policy
  std::vector<Graph> instances;
  for (int i = 0; i < 10; ++i)
    instances.push_back(generate_er(200, 0.05, {WeightSet::ZeroPlusMinusOne, false}, 600 + i));
  auto mean_best = [&](double tau) {
    double total = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      PolicyConfig cfg;
      cfg.temperature = tau;
      cfg.max_steps = 4 * 200;
      cfg.rng_seed = mix_seed(13, i);
      total += static_cast<double>(rollout(instances[i], params, cfg, 20).best_cut);
    }
    return total / static_cast<double>(instances.size());
  };
  const double det = mean_best(0.0);
  double best_soft = -1e30, best_soft_tau = 0.0;
  for (const double tau : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
    const double m = mean_best(tau);
    if (m > best_soft) {
      best_soft = m;
      best_soft_tau = tau;
    }
  }

  std::ostringstream os;
  os << "decode/action " << t_1k << " s @1k vs " << t_10k << " s @10k (ratio " << scale_ratio
     << ", need <= 30); density ratio " << density_ratio << " (need <= 2); encode-once "
     << (encode_once ? "yes" : "NO") << "; mean best cut tau=0: " << det << " vs tau="
     << best_soft_tau << ": " << best_soft;
  return {scale_ratio <= 30.0 && density_ratio <= 2.0 && encode_once && best_soft >= det,
          os.str()};
}

// ---------------------------------------------------------------------------
// criterion 7: tuned soft-greedy matches or beats plain greedy at ER500
// ---------------------------------------------------------------------------
Outcome criterion_7() {
  const double t0 = now_s();
  // tuning set, disjoint from the test set by seed
  std::vector<Graph> tune_graphs;
  for (int i = 0; i < 20; ++i)
    tune_graphs.push_back(generate_er(500, 0.15, {WeightSet::ZeroPlusMinusOne, false}, 9000 + i));
  SoftPolicyConfig budget;
  budget.max_steps = 1000;
  budget.n_restarts = 10;
  budget.rng_seed = 3;
  const double tuned_tau =
      tune_temperature(tune_graphs, {0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1, 3}, budget);

  Dataset test;
  test.name = "er500";
  for (int i = 0; i < 100; ++i) {
    DatasetInstance inst;
    inst.id = "er500-" + std::to_string(i);
    inst.graph = generate_er(500, 0.15, {WeightSet::ZeroPlusMinusOne, false}, 7000 + i);
    test.instances.push_back(std::move(inst));
  }
  EvalProtocol protocol;
  protocol.n_trajectories = 50;
  protocol.max_steps = 1000;  // 2|V|
  protocol.seed = 21;
  const EvalReport mca_report = evaluate_heuristic("mca", test, protocol);
  EvalProtocol soft_protocol = protocol;
  soft_protocol.temperature = tuned_tau;
  const EvalReport soft_report = evaluate_heuristic("mca-soft", test, soft_protocol);

  const double elapsed = now_s() - t0;
  std::ostringstream os;
  os << "mean best cut: soft-greedy(tau=" << tuned_tau << ") " << soft_report.mean_best_cut
     << " vs greedy " << mca_report.mean_best_cut << ", " << elapsed << " s";
  return {soft_report.mean_best_cut >= mca_report.mean_best_cut && elapsed < 1800.0, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 8: bit-reproducibility of every seeded entry point
// ---------------------------------------------------------------------------
Outcome criterion_8() {
  // generators
  const Graph er1 = generate_er(64, 0.2, {WeightSet::ZeroPlusMinusOne, false}, 12);
  const Graph er2 = generate_er(64, 0.2, {WeightSet::ZeroPlusMinusOne, false}, 12);
  if (!(er1 == er2)) return {false, "er generator not reproducible"};
  const Graph ba1 = generate_ba(64, 4, {WeightSet::ZeroOne, true}, 12);
  const Graph ba2 = generate_ba(64, 4, {WeightSet::ZeroOne, true}, 12);
  if (!(ba1 == ba2)) return {false, "ba generator not reproducible"};

  // soft-greedy heuristic
  SoftPolicyConfig sp;
  sp.temperature = 0.1;
  sp.max_steps = 128;
  sp.n_restarts = 8;
  sp.rng_seed = 77;
  const auto h1 = mca_soft_best_of_restarts(er1, sp);
  const auto h2 = mca_soft_best_of_restarts(er1, sp);
  if (h1.best_cut != h2.best_cut || h1.best_labels != h2.best_labels)
    return {false, "soft-greedy run not reproducible"};

  // rollout
  const AgentParams params = AgentParams::init(ArchConfig{}, 4);
  PolicyConfig pc;
  pc.max_steps = 40;
  pc.temperature = 0.01;
  pc.rng_seed = 5;
  const auto r1 = rollout(er1, params, pc, 6);
  const auto r2 = rollout(er1, params, pc, 6);
  if (r1.best_cut != r2.best_cut || r1.best_labels != r2.best_labels)
    return {false, "rollout not reproducible"};

  // train_step from identical inputs
  ArchConfig tiny;
  tiny.embed_dim = 4;
  tiny.rounds = 2;
  tiny.hidden_dim = 8;
  tiny.hidden_proj_dim = 4;
  tiny.msg_dim = 6;
  tiny.value_hidden = 5;
  tiny.adv_hidden = 6;
  auto run_step = [&]() {
    AgentParams online = AgentParams::init(tiny, 10);
    AgentParams target = online.clone();
    auto graph = std::make_shared<const Graph>(generate_er(6, 0.5, {WeightSet::ZeroPlusMinusOne, false}, 23));
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.buffer_size = 128;
    ReplayBuffer buffer(cfg.buffer_size);
    std::mt19937_64 arng(3);
    // quick hand-rolled acting to fill the buffer
    CutState st = make_cut_state(*graph, random_labels(6, arng()));
    DecoderState dec = make_decoder_state(tiny);
    const Mat x = encode(*graph, online);
    std::vector<EnvSnapshot> snaps{snapshot_of(st)};
    std::vector<int> acts;
    std::vector<Eigen::VectorXf> hiddens{dec.hidden.transpose().cast<float>()};
    for (int t = 0; t < 12; ++t) {
      const Observation o = observe(st, *graph, 12);
      const Eigen::VectorXd q = q_values(x, o, dec, online);
      PolicyConfig sel;
      sel.temperature = 0.1;
      const int action = select_action(q, sel, arng);
      const Eigen::RowVectorXd v = vertex_embeddings(x, o, online).row(action);
      const Weight prev_best = st.best_cut;
      apply_flip(st, *graph, action);
      dec = advance_hidden(dec, v, observe_global(st, *graph), online);
      snaps.push_back(snapshot_of(st));
      acts.push_back(action);
      hiddens.push_back(dec.hidden.transpose().cast<float>());
      const int window = std::min(t, cfg.k_bptt) + 1;
      TransitionSegment seg;
      seg.graph = graph;
      seg.states.assign(snaps.end() - (window + 1), snaps.end());
      seg.actions.assign(acts.end() - window, acts.end());
      seg.initial_hidden = hiddens[hiddens.size() - 1 - window];
      seg.reward = reward(st, prev_best, 6);
      seg.done = (t == 11);
      seg.episode_budget = 12;
      buffer.push(std::move(seg));
    }
    nn::AdamOptimizer opt(cfg.learning_rate, cfg.beta1, cfg.beta2);
    std::mt19937_64 srng(55);
    const auto loss = train_step(online, target, buffer, cfg, opt, srng);
    return std::pair{loss.value(), online};
  };
  auto [l1, p1] = run_step();
  auto [l2, p2] = run_step();
  if (l1 != l2) return {false, "train_step loss not reproducible"};
  auto e1 = p1.entries();
  auto e2 = p2.entries();
  for (std::size_t i = 0; i < e1.size(); ++i)
    if (e1[i].tensor.value() != e2[i].tensor.value())
      return {false, "train_step parameters not reproducible"};

  return {true, "generate / rollout / train_step / soft-greedy all bit-reproducible"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workdir" && i + 1 < argc) {
      g_workdir = argv[++i];
    } else {
      selected.push_back(std::stoi(arg));
    }
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::pair<int, Outcome (*)()> criteria[] = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
      {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
  };
  const char* names[] = {
      "incremental cut/peek state equals full recomputation",
      "restarted greedy reaches the exhaustive optimum on >= 85% of small instances",
      "analytic gradients match central finite differences",
      "soft-value, hard-max limit, and clipping identities of the Q target",
      "desk-scale training: >= 0.99 oracle AR and >= tuned soft-greedy on ER40",
      "scaling substitutes: linear decode, density invariance, encode-once, useful stochasticity",
      "tuned soft-greedy >= greedy on ER500",
      "seeded entry points are bit-reproducible",
  };

  fs::create_directories(g_workdir);
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    bool wanted = false;
    for (int s : selected) wanted |= (s == id);
    if (!wanted) continue;
    std::printf("criterion %d: %s\n", id, names[id - 1]);
    std::fflush(stdout);
    Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s\n", outcome.pass ? "PASS" : "FAIL", id,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}

#include "flipcut/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "flipcut/common.hpp"
#include "flipcut/numeric.hpp"

namespace flipcut {

using nn::Mat;
using nn::Tensor;

double mdqn_target(double reward, const Eigen::VectorXd& next_q, const Eigen::VectorXd& current_q,
                   int action, bool done, const MdqnConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("mdqn_target: tau must be positive");
  if (action < 0 || action >= current_q.size())
    throw std::out_of_range("mdqn_target: action out of range");
  if (!next_q.allFinite() || !current_q.allFinite() || !std::isfinite(reward))
    throw std::invalid_argument("mdqn_target: inputs must be finite");

  double bonus = 0.0;
  if (cfg.alpha != 0.0) {
    const Eigen::VectorXd log_pi = log_softmax_with_temperature(current_q, cfg.tau);
    bonus = cfg.alpha * cfg.tau * std::max(log_pi[action], cfg.l0);
  }
  double soft_value = 0.0;
  if (!done && cfg.gamma != 0.0) soft_value = cfg.tau * logsumexp(next_q / cfg.tau);
  return reward + bonus + cfg.gamma * (done ? 0.0 : soft_value);
}

EnvSnapshot snapshot_of(const CutState& state) {
  return {state.labels, state.last_flip_step, state.step, state.cut_value, state.best_cut};
}

CutState restore_state(const Graph& graph, const EnvSnapshot& snap) {
  CutState state = make_cut_state(graph, snap.labels);
  state.last_flip_step = snap.last_flip_step;
  state.step = snap.step;
  state.best_cut = snap.best_cut;
  return state;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  storage_.resize(capacity);
}

void ReplayBuffer::push(TransitionSegment segment) {
  storage_[next_] = std::move(segment);
  next_ = (next_ + 1) % storage_.size();
  if (next_ == 0) full_ = true;
}

std::vector<const TransitionSegment*> ReplayBuffer::sample_batch(std::mt19937_64& rng,
                                                                 int count) const {
  const std::size_t n = size();
  if (n == 0) throw std::logic_error("sampling from an empty replay buffer");
  std::vector<const TransitionSegment*> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto idx = std::min(static_cast<std::size_t>(uniform_unit(rng) * n), n - 1);
    out.push_back(&storage_[idx]);
  }
  return out;
}

double TrainConfig::epsilon_at(long long step) const {
  if (t_eps <= 0 || step >= t_eps) return eps_final;
  return eps_init + (eps_final - eps_init) * static_cast<double>(step) / static_cast<double>(t_eps);
}

namespace {

template <typename T>
void assign_field(const std::string& value, T& field) {
  std::istringstream ss(value);
  ss >> field;
  if (ss.fail()) throw std::invalid_argument("bad config value: " + value);
}

}  // namespace

TrainConfig load_train_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  TrainConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError("expected key=value", line_no);
      continue;
    }
    auto trim = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      const auto end = s.find_last_not_of(" \t\r");
      return begin == std::string::npos ? std::string{} : s.substr(begin, end - begin + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n_steps") assign_field(value, cfg.n_steps);
    else if (key == "batch_size") assign_field(value, cfg.batch_size);
    else if (key == "f_upd") assign_field(value, cfg.f_upd);
    else if (key == "learning_rate") assign_field(value, cfg.learning_rate);
    else if (key == "beta1") assign_field(value, cfg.beta1);
    else if (key == "beta2") assign_field(value, cfg.beta2);
    else if (key == "tau_upd") assign_field(value, cfg.tau_upd);
    else if (key == "k_bptt") assign_field(value, cfg.k_bptt);
    else if (key == "buffer_size") assign_field(value, cfg.buffer_size);
    else if (key == "gamma") assign_field(value, cfg.gamma);
    else if (key == "eps_init") assign_field(value, cfg.eps_init);
    else if (key == "eps_final") assign_field(value, cfg.eps_final);
    else if (key == "t_eps") assign_field(value, cfg.t_eps);
    else if (key == "tau") assign_field(value, cfg.tau);
    else if (key == "alpha") assign_field(value, cfg.alpha);
    else if (key == "l0") assign_field(value, cfg.l0);
    else if (key == "graphs_per_batch") assign_field(value, cfg.graphs_per_batch);
    else if (key == "episode_length") assign_field(value, cfg.episode_length);
    else if (key == "seed") assign_field(value, cfg.seed);
    else if (key == "val_interval_updates") assign_field(value, cfg.val_interval_updates);
    else if (key == "val_trajectories") assign_field(value, cfg.val_trajectories);
    else throw ParseError("unknown config key: " + key, line_no);
  }
  return cfg;
}

void save_train_config(const std::string& path, const TrainConfig& cfg) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write config: " + path);
  os << "n_steps = " << cfg.n_steps << '\n'
     << "batch_size = " << cfg.batch_size << '\n'
     << "f_upd = " << cfg.f_upd << '\n'
     << "learning_rate = " << cfg.learning_rate << '\n'
     << "beta1 = " << cfg.beta1 << '\n'
     << "beta2 = " << cfg.beta2 << '\n'
     << "tau_upd = " << cfg.tau_upd << '\n'
     << "k_bptt = " << cfg.k_bptt << '\n'
     << "buffer_size = " << cfg.buffer_size << '\n'
     << "gamma = " << cfg.gamma << '\n'
     << "eps_init = " << cfg.eps_init << '\n'
     << "eps_final = " << cfg.eps_final << '\n'
     << "t_eps = " << cfg.t_eps << '\n'
     << "tau = " << cfg.tau << '\n'
     << "alpha = " << cfg.alpha << '\n'
     << "l0 = " << cfg.l0 << '\n'
     << "graphs_per_batch = " << cfg.graphs_per_batch << '\n'
     << "episode_length = " << cfg.episode_length << '\n'
     << "seed = " << cfg.seed << '\n'
     << "val_interval_updates = " << cfg.val_interval_updates << '\n'
     << "val_trajectories = " << cfg.val_trajectories << '\n';
}

// ---------------------------------------------------------------------------
// BPTT replay of segment batches
// ---------------------------------------------------------------------------

namespace {

/// Segments of equal window length replayed in lockstep; rows of the stacked
/// per-vertex matrices concatenate the segments' vertices.
struct GroupReplay {
  std::vector<const TransitionSegment*> segs;
  int window = 0;       // actions per segment
  int total_rows = 0;   // sum of vertex counts
  std::vector<int> env_of_row;
  std::vector<int> row_offset;             // per segment
  Mat h0;                                  // E x hidden
  std::vector<Mat> obs;                    // window + 1 stacked per-vertex observations
  std::vector<Mat> global_next;            // window entries, E x 2
  std::vector<std::vector<int>> act_rows;  // window entries: row_offset + action
};

GroupReplay build_group_replay(std::vector<const TransitionSegment*> segs, int hidden_dim) {
  GroupReplay g;
  g.segs = std::move(segs);
  g.window = static_cast<int>(g.segs.front()->actions.size());
  const int E = static_cast<int>(g.segs.size());

  g.row_offset.reserve(E);
  for (const auto* s : g.segs) {
    g.row_offset.push_back(g.total_rows);
    g.total_rows += s->graph->n_vertices();
  }
  g.env_of_row.resize(g.total_rows);
  for (int e = 0; e < E; ++e) {
    const int n = g.segs[e]->graph->n_vertices();
    std::fill_n(g.env_of_row.begin() + g.row_offset[e], n, e);
  }

  g.h0.resize(E, hidden_dim);
  for (int e = 0; e < E; ++e) {
    if (g.segs[e]->initial_hidden.size() != hidden_dim)
      throw std::invalid_argument("segment hidden width does not match architecture");
    g.h0.row(e) = g.segs[e]->initial_hidden.cast<double>().transpose();
  }

  std::vector<CutState> states;
  states.reserve(E);
  for (const auto* s : g.segs) states.push_back(restore_state(*s->graph, s->states.front()));

  g.obs.resize(g.window + 1);
  g.global_next.resize(g.window);
  g.act_rows.assign(g.window, std::vector<int>(E));
  for (int i = 0; i <= g.window; ++i) {
    Mat stacked(g.total_rows, 3);
    for (int e = 0; e < E; ++e) {
      const auto* s = g.segs[e];
      stacked.middleRows(g.row_offset[e], s->graph->n_vertices()) =
          observe(states[e], *s->graph, s->episode_budget).per_vertex;
    }
    g.obs[i] = std::move(stacked);
    if (i == g.window) break;
    Mat gn(E, 2);
    for (int e = 0; e < E; ++e) {
      const auto* s = g.segs[e];
      const int action = s->actions[i];
      g.act_rows[i][e] = g.row_offset[e] + action;
      apply_flip(states[e], *s->graph, action);
      gn.row(e) = observe_global(states[e], *s->graph).transpose();
    }
    g.global_next[i] = std::move(gn);
  }
  return g;
}

/// Per-graph embeddings, one encode per distinct graph per parameter set.
class EncodeCache {
public:
  EncodeCache(const AgentParams& params) : params_(params) {}

  const Tensor& get(const Graph* graph) {
    auto it = cache_.find(graph);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(graph, encode_tensor(*graph, params_)).first->second;
  }

private:
  const AgentParams& params_;
  std::map<const Graph*, Tensor> cache_;
};

Tensor stack_embeddings(EncodeCache& cache, const GroupReplay& g) {
  std::vector<Tensor> parts;
  parts.reserve(g.segs.size());
  for (const auto* s : g.segs) parts.push_back(cache.get(s->graph.get()));
  return nn::concat_rows(parts);
}

}  // namespace

Tensor mdqn_loss(const AgentParams& online, const AgentParams& target,
                 const std::vector<const TransitionSegment*>& batch, const MdqnConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("mdqn_loss: empty batch");

  std::map<int, std::vector<const TransitionSegment*>> by_window;
  for (const auto* s : batch) {
    if (s->actions.empty() || s->states.size() != s->actions.size() + 1)
      throw std::invalid_argument("mdqn_loss: malformed segment");
    by_window[static_cast<int>(s->actions.size())].push_back(s);
  }

  EncodeCache online_cache(online);
  Tensor total;
  for (auto& [window, segs] : by_window) {
    GroupReplay g = build_group_replay(std::move(segs), online.arch.hidden_dim);
    const int E = static_cast<int>(g.segs.size());

    // Target-side quantities, no tape.
    Eigen::VectorXd targets(E);
    {
      nn::NoGradGuard guard;
      EncodeCache target_cache(target);
      Tensor x = stack_embeddings(target_cache, g);
      Tensor h = Tensor::constant(g.h0);
      Tensor q_t;  // target Q at the final window state
      for (int i = 0; i < g.window; ++i) {
        Tensor v = vertex_embeddings_tensor(x, Tensor::constant(g.obs[i]), target);
        if (i == g.window - 1) q_t = q_from_vertex_embeddings(v, g.env_of_row, h, target);
        h = advance_hidden_batch(h, nn::gather_rows(v, g.act_rows[i]),
                                 Tensor::constant(g.global_next[i]), target);
      }
      Tensor v_next = vertex_embeddings_tensor(x, Tensor::constant(g.obs[g.window]), target);
      Tensor q_next = q_from_vertex_embeddings(v_next, g.env_of_row, h, target);

      for (int e = 0; e < E; ++e) {
        const auto* s = g.segs[e];
        const int n = s->graph->n_vertices();
        const Eigen::VectorXd cur = q_t.value().col(0).segment(g.row_offset[e], n);
        const Eigen::VectorXd nxt = q_next.value().col(0).segment(g.row_offset[e], n);
        targets[e] = mdqn_target(s->reward, nxt, cur, s->actions.back(), s->done, cfg);
      }
    }

    // Online replay with gradients through the whole window.
    Tensor x = stack_embeddings(online_cache, g);
    Tensor h = Tensor::constant(g.h0);
    Tensor q_sel;
    for (int i = 0; i < g.window; ++i) {
      Tensor v = vertex_embeddings_tensor(x, Tensor::constant(g.obs[i]), online);
      if (i == g.window - 1) {
        Tensor q = q_from_vertex_embeddings(v, g.env_of_row, h, online);
        q_sel = nn::gather_rows(q, g.act_rows[i]);
      } else {
        h = advance_hidden_batch(h, nn::gather_rows(v, g.act_rows[i]),
                                 Tensor::constant(g.global_next[i]), online);
      }
    }

    Tensor err = nn::sub(q_sel, Tensor::constant(targets));
    Tensor group_sum = nn::sum_all(nn::square(err));
    total = total.defined() ? nn::add(total, group_sum) : group_sum;
  }

  return nn::scale(total, 1.0 / static_cast<double>(batch.size()));
}

std::optional<double> train_step(AgentParams& online, const AgentParams& target,
                                 const ReplayBuffer& buffer, const TrainConfig& cfg,
                                 nn::AdamOptimizer& optimizer, std::mt19937_64& rng) {
  if (buffer.size() < static_cast<std::size_t>(cfg.batch_size)) return std::nullopt;
  const auto batch = buffer.sample_batch(rng, cfg.batch_size);
  Tensor loss = mdqn_loss(online, target, batch, cfg.mdqn());
  const double loss_value = loss.value()(0, 0);
  loss.backward();
  auto entries = online.entries();
  optimizer.step(entries);
  return loss_value;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

namespace {

double validate_greedy(const AgentParams& params, const GraphSource& source,
                       const TrainConfig& cfg) {
  const bool have_refs = source.validation_refs.size() == source.validation.size();
  double total = 0.0;
  for (std::size_t i = 0; i < source.validation.size(); ++i) {
    const Graph& g = source.validation[i];
    PolicyConfig pc;
    pc.temperature = 0.0;
    pc.epsilon = 0.0;
    pc.rng_seed = mix_seed(cfg.seed, 0x76616c00ull + i);
    pc.max_steps = cfg.episode_length > 0 ? cfg.episode_length : 2 * g.n_vertices();
    const auto r = rollout(g, params, pc, cfg.val_trajectories);
    total += have_refs && source.validation_refs[i] > 0
                 ? static_cast<double>(r.best_cut) / static_cast<double>(source.validation_refs[i])
                 : static_cast<double>(r.best_cut);
  }
  return total / static_cast<double>(source.validation.size());
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const GraphSource& source, const ArchConfig& arch,
                  const std::string& log_path) {
  AgentParams online = AgentParams::init(arch, cfg.seed);
  AgentParams target = online.clone();
  auto online_entries = online.entries();
  auto target_entries = target.entries();
  nn::AdamOptimizer optimizer(cfg.learning_rate, cfg.beta1, cfg.beta2);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_size));

  std::mt19937_64 act_rng(mix_seed(cfg.seed, 0xac7));
  std::mt19937_64 train_rng(mix_seed(cfg.seed, 0x5a3));

  TrainResult result{online, online.clone(), 0.0, {}};
  bool have_val_score = false;

  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path, std::ios::app);
    if (!log_file) throw std::runtime_error("cannot open training log: " + log_path);
  }
  auto emit = [&](const TrainLogRecord& rec) {
    result.log.push_back(rec);
    if (log_file) {
      nlohmann::json j{{"step", rec.step}, {"update", rec.update}, {"loss", rec.loss},
                       {"eps", rec.eps}};
      if (!std::isnan(rec.val_ar)) j["val_ar"] = rec.val_ar;
      log_file << j.dump() << '\n';
      log_file.flush();
    }
  };

  long long global_step = 0;
  long long updates = 0;

  while (global_step < cfg.n_steps) {
    // One batch of parallel episodes on freshly sampled graphs.
    const int B = cfg.graphs_per_batch;
    std::vector<std::shared_ptr<const Graph>> graphs;
    graphs.reserve(B);
    std::vector<int> episode_len(B);
    int max_len = 0;
    for (int b = 0; b < B; ++b) {
      graphs.push_back(std::make_shared<const Graph>(source.sample(act_rng)));
      episode_len[b] =
          cfg.episode_length > 0 ? cfg.episode_length : 2 * graphs[b]->n_vertices();
      max_len = std::max(max_len, episode_len[b]);
    }

    std::vector<Mat> embeddings(B);
    for (int b = 0; b < B; ++b) embeddings[b] = encode(*graphs[b], online);

    std::vector<CutState> states;
    states.reserve(B);
    for (int b = 0; b < B; ++b)
      states.push_back(
          make_cut_state(*graphs[b], random_labels(graphs[b]->n_vertices(), act_rng())));

    Mat hidden = Mat::Zero(B, arch.hidden_dim);
    std::vector<std::deque<EnvSnapshot>> snap_hist(B);
    std::vector<std::deque<std::int32_t>> act_hist(B);
    std::vector<std::deque<Eigen::VectorXf>> hid_hist(B);
    for (int b = 0; b < B; ++b) snap_hist[b].push_back(snapshot_of(states[b]));

    for (int t = 0; t < max_len && global_step < cfg.n_steps; ++t) {
      std::vector<int> active;
      for (int b = 0; b < B; ++b)
        if (t < episode_len[b]) active.push_back(b);
      if (active.empty()) break;
      const int E = static_cast<int>(active.size());

      for (int b : active) {
        hid_hist[b].push_back(hidden.row(b).transpose().cast<float>());
        if (static_cast<int>(hid_hist[b].size()) > cfg.k_bptt + 1) hid_hist[b].pop_front();
      }

      const double eps = cfg.epsilon_at(global_step);
      std::vector<int> chosen(E);
      std::vector<double> rewards(E);
      std::vector<char> dones(E);
      {
        // Batched forward for action selection; no tape.
        nn::NoGradGuard guard;
        int total_rows = 0;
        std::vector<int> row_offset(E);
        for (int e = 0; e < E; ++e) {
          row_offset[e] = total_rows;
          total_rows += graphs[active[e]]->n_vertices();
        }
        Mat x_stacked(total_rows, arch.embed_dim);
        Mat obs_stacked(total_rows, 3);
        std::vector<int> env_of_row(total_rows);
        Mat h_active(E, arch.hidden_dim);
        for (int e = 0; e < E; ++e) {
          const int b = active[e];
          const int n = graphs[b]->n_vertices();
          x_stacked.middleRows(row_offset[e], n) = embeddings[b];
          obs_stacked.middleRows(row_offset[e], n) =
              observe(states[b], *graphs[b], episode_len[b]).per_vertex;
          std::fill_n(env_of_row.begin() + row_offset[e], n, e);
          h_active.row(e) = hidden.row(b);
        }
        PolicyStep step = policy_step(Tensor::constant(std::move(x_stacked)),
                                      Tensor::constant(std::move(obs_stacked)), env_of_row,
                                      Tensor::constant(h_active), online);

        Mat v_star(E, online.arch.vertex_dim());
        Mat global_next(E, 2);
        for (int e = 0; e < E; ++e) {
          const int b = active[e];
          const int n = graphs[b]->n_vertices();
          PolicyConfig pc;
          pc.temperature = cfg.tau;
          pc.epsilon = eps;
          const Eigen::VectorXd q = step.q.value().col(0).segment(row_offset[e], n);
          const int action = select_action(q, pc, act_rng);
          chosen[e] = action;
          v_star.row(e) = step.v.value().row(row_offset[e] + action);
          const Weight prev_best = states[b].best_cut;
          apply_flip(states[b], *graphs[b], action);
          rewards[e] = reward(states[b], prev_best, n);
          dones[e] = (t == episode_len[b] - 1) ? 1 : 0;
          global_next.row(e) = observe_global(states[b], *graphs[b]).transpose();
        }

        Mat h_next = advance_hidden_batch(Tensor::constant(std::move(h_active)),
                                          Tensor::constant(std::move(v_star)),
                                          Tensor::constant(std::move(global_next)), online)
                         .value();
        for (int e = 0; e < E; ++e) hidden.row(active[e]) = h_next.row(e);
      }

      for (int e = 0; e < E; ++e) {
        const int b = active[e];
        snap_hist[b].push_back(snapshot_of(states[b]));
        if (static_cast<int>(snap_hist[b].size()) > cfg.k_bptt + 2) snap_hist[b].pop_front();
        act_hist[b].push_back(chosen[e]);
        if (static_cast<int>(act_hist[b].size()) > cfg.k_bptt + 1) act_hist[b].pop_front();

        const int window = std::min(t, cfg.k_bptt) + 1;
        TransitionSegment seg;
        seg.graph = graphs[b];
        seg.states.assign(snap_hist[b].end() - (window + 1), snap_hist[b].end());
        seg.actions.assign(act_hist[b].end() - window, act_hist[b].end());
        seg.initial_hidden = hid_hist[b][hid_hist[b].size() - window];
        seg.reward = rewards[e];
        seg.done = dones[e] != 0;
        seg.episode_budget = episode_len[b];
        buffer.push(std::move(seg));
      }

      ++global_step;
      if (global_step % cfg.f_upd == 0) {
        const auto loss = train_step(online, target, buffer, cfg, optimizer, train_rng);
        if (loss) {
          soft_update(target_entries, online_entries, cfg.tau_upd);
          ++updates;
          for (int b = 0; b < B; ++b) embeddings[b] = encode(*graphs[b], online);

          TrainLogRecord rec;
          rec.step = global_step;
          rec.update = updates;
          rec.loss = *loss;
          rec.eps = cfg.epsilon_at(global_step);
          if (cfg.val_interval_updates > 0 && updates % cfg.val_interval_updates == 0 &&
              !source.validation.empty()) {
            rec.val_ar = validate_greedy(online, source, cfg);
            if (!have_val_score || rec.val_ar > result.best_val_score) {
              result.best_val_score = rec.val_ar;
              result.best_params = online.clone();
              have_val_score = true;
            }
          }
          emit(rec);
        }
      }
    }
  }

  // Final validation so short runs still pick a best checkpoint.
  if (!source.validation.empty() && cfg.n_steps > 0 && cfg.val_interval_updates > 0) {
    const double final_score = validate_greedy(online, source, cfg);
    TrainLogRecord rec;
    rec.step = global_step;
    rec.update = updates;
    rec.loss = result.log.empty() ? 0.0 : result.log.back().loss;
    rec.eps = cfg.epsilon_at(global_step);
    rec.val_ar = final_score;
    if (!have_val_score || final_score >= result.best_val_score) {
      result.best_val_score = final_score;
      result.best_params = online.clone();
      have_val_score = true;
    }
    emit(rec);
  }

  result.final_params = online;
  return result;
}

}  // namespace flipcut

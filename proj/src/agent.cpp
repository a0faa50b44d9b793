#include "flipcut/agent.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>

#include "flipcut/common.hpp"
#include "flipcut/numeric.hpp"

namespace flipcut {

using nn::Mat;
using nn::Tensor;

namespace {

std::atomic<long long> g_encode_calls{0};

nn::GruParams init_gru(int hidden, int input, std::mt19937_64& rng) {
  nn::GruParams p;
  p.w_update = Tensor::parameter(nn::uniform_init(hidden, input, input, rng));
  p.u_update = Tensor::parameter(nn::uniform_init(hidden, hidden, hidden, rng));
  p.b_update = Tensor::parameter(nn::uniform_init(1, hidden, hidden, rng));
  p.w_reset = Tensor::parameter(nn::uniform_init(hidden, input, input, rng));
  p.u_reset = Tensor::parameter(nn::uniform_init(hidden, hidden, hidden, rng));
  p.b_reset = Tensor::parameter(nn::uniform_init(1, hidden, hidden, rng));
  p.w_cand = Tensor::parameter(nn::uniform_init(hidden, input, input, rng));
  p.u_cand = Tensor::parameter(nn::uniform_init(hidden, hidden, hidden, rng));
  p.b_cand = Tensor::parameter(nn::uniform_init(1, hidden, hidden, rng));
  return p;
}

void add_gru_entries(std::vector<nn::NamedTensor>& out, const std::string& prefix,
                     const nn::GruParams& p) {
  out.push_back({prefix + ".w_update", p.w_update});
  out.push_back({prefix + ".u_update", p.u_update});
  out.push_back({prefix + ".b_update", p.b_update});
  out.push_back({prefix + ".w_reset", p.w_reset});
  out.push_back({prefix + ".u_reset", p.u_reset});
  out.push_back({prefix + ".b_reset", p.b_reset});
  out.push_back({prefix + ".w_cand", p.w_cand});
  out.push_back({prefix + ".u_cand", p.u_cand});
  out.push_back({prefix + ".b_cand", p.b_cand});
}

std::map<std::string, std::int64_t> arch_meta(const ArchConfig& a) {
  return {{"embed_dim", a.embed_dim},     {"obs_dim", a.obs_dim},
          {"global_obs_dim", a.global_obs_dim}, {"rounds", a.rounds},
          {"hidden_dim", a.hidden_dim},   {"hidden_proj_dim", a.hidden_proj_dim},
          {"msg_dim", a.msg_dim},         {"value_hidden", a.value_hidden},
          {"adv_hidden", a.adv_hidden}};
}

ArchConfig arch_from_meta(const std::map<std::string, std::int64_t>& meta) {
  ArchConfig a;
  auto get = [&](const char* key, int& field) {
    auto it = meta.find(key);
    if (it == meta.end()) throw std::runtime_error(std::string("checkpoint missing meta key ") + key);
    field = static_cast<int>(it->second);
  };
  get("embed_dim", a.embed_dim);
  get("obs_dim", a.obs_dim);
  get("global_obs_dim", a.global_obs_dim);
  get("rounds", a.rounds);
  get("hidden_dim", a.hidden_dim);
  get("hidden_proj_dim", a.hidden_proj_dim);
  get("msg_dim", a.msg_dim);
  get("value_hidden", a.value_hidden);
  get("adv_hidden", a.adv_hidden);
  return a;
}

}  // namespace

AgentParams AgentParams::init(const ArchConfig& arch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AgentParams p;
  p.arch = arch;
  const int e = arch.embed_dim;

  p.enc_init = Tensor::parameter(nn::uniform_init(1, e, e, rng));
  p.enc_msg_weight = Tensor::parameter(nn::uniform_init(e, e, e, rng));
  p.enc_gru = init_gru(e, e, rng);
  p.enc_ln_gain = Tensor::parameter(Mat::Ones(1, e));
  p.enc_ln_bias = Tensor::parameter(Mat::Zero(1, e));
  p.enc_proj_weight = Tensor::parameter(nn::uniform_init(e, e, e, rng));

  p.obs_proj_weight = Tensor::parameter(nn::uniform_init(e, arch.obs_dim, arch.obs_dim, rng));
  p.hidden_proj_weight =
      Tensor::parameter(nn::uniform_init(arch.hidden_proj_dim, arch.hidden_dim, arch.hidden_dim, rng));
  p.msg_weight =
      Tensor::parameter(nn::uniform_init(arch.msg_dim, arch.msg_input_dim(), arch.msg_input_dim(), rng));
  p.dec_gru = init_gru(arch.hidden_dim, arch.msg_dim, rng);

  p.value_w1 =
      Tensor::parameter(nn::uniform_init(arch.value_hidden, arch.hidden_dim, arch.hidden_dim, rng));
  p.value_b1 = Tensor::parameter(nn::uniform_init(1, arch.value_hidden, arch.hidden_dim, rng));
  p.value_w2 = Tensor::parameter(nn::uniform_init(1, arch.value_hidden, arch.value_hidden, rng));
  p.value_b2 = Tensor::parameter(nn::uniform_init(1, 1, arch.value_hidden, rng));

  p.adv_w1 =
      Tensor::parameter(nn::uniform_init(arch.adv_hidden, arch.adv_input_dim(), arch.adv_input_dim(), rng));
  p.adv_b1 = Tensor::parameter(nn::uniform_init(1, arch.adv_hidden, arch.adv_input_dim(), rng));
  p.adv_ln_gain = Tensor::parameter(Mat::Ones(1, arch.adv_hidden));
  p.adv_ln_bias = Tensor::parameter(Mat::Zero(1, arch.adv_hidden));
  p.adv_w2 = Tensor::parameter(nn::uniform_init(1, arch.adv_hidden, arch.adv_hidden, rng));
  p.adv_b2 = Tensor::parameter(nn::uniform_init(1, 1, arch.adv_hidden, rng));
  return p;
}

std::vector<nn::NamedTensor> AgentParams::entries() {
  std::vector<nn::NamedTensor> out;
  out.push_back({"encoder.init", enc_init});
  out.push_back({"encoder.message.weight", enc_msg_weight});
  add_gru_entries(out, "encoder.gru", enc_gru);
  out.push_back({"encoder.layer_norm.gain", enc_ln_gain});
  out.push_back({"encoder.layer_norm.bias", enc_ln_bias});
  out.push_back({"encoder.project.weight", enc_proj_weight});
  out.push_back({"decoder.obs_proj.weight", obs_proj_weight});
  out.push_back({"decoder.hidden_proj.weight", hidden_proj_weight});
  out.push_back({"decoder.msg.weight", msg_weight});
  add_gru_entries(out, "decoder.gru", dec_gru);
  out.push_back({"q.value.w1", value_w1});
  out.push_back({"q.value.b1", value_b1});
  out.push_back({"q.value.w2", value_w2});
  out.push_back({"q.value.b2", value_b2});
  out.push_back({"q.advantage.w1", adv_w1});
  out.push_back({"q.advantage.b1", adv_b1});
  out.push_back({"q.advantage.layer_norm.gain", adv_ln_gain});
  out.push_back({"q.advantage.layer_norm.bias", adv_ln_bias});
  out.push_back({"q.advantage.w2", adv_w2});
  out.push_back({"q.advantage.b2", adv_b2});
  return out;
}

std::vector<nn::NamedTensor> AgentParams::entries() const {
  return const_cast<AgentParams*>(this)->entries();
}

AgentParams AgentParams::clone() const {
  AgentParams copy = AgentParams::init(arch, 0);
  auto src = entries();
  auto dst = copy.entries();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i].tensor.value() = src[i].tensor.value();
  return copy;
}

void AgentParams::save(const std::string& path) const {
  nn::save_checkpoint(path, entries(), arch_meta(arch));
}

AgentParams AgentParams::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::read_checkpoint(path);
  AgentParams p = AgentParams::init(arch_from_meta(ckpt.meta), 0);
  auto dst = p.entries();
  nn::apply_checkpoint(ckpt, dst);
  return p;
}

DecoderState make_decoder_state(const ArchConfig& arch) {
  DecoderState d;
  d.hidden = Eigen::RowVectorXd::Zero(arch.hidden_dim);
  d.step = 0;
  return d;
}

Tensor encode_tensor(const Graph& graph, const AgentParams& params) {
  g_encode_calls.fetch_add(1, std::memory_order_relaxed);
  const int n = graph.n_vertices();
  Tensor x = nn::gather_rows(params.enc_init, std::vector<int>(n, 0));
  for (int round = 0; round < params.arch.rounds; ++round) {
    Tensor messages = nn::graph_mean_gather(graph, nn::linear(x, params.enc_msg_weight));
    x = nn::layer_norm(nn::gru_cell(params.enc_gru, x, messages), params.enc_ln_gain,
                       params.enc_ln_bias);
  }
  return nn::linear(x, params.enc_proj_weight);
}

Eigen::MatrixXd encode(const Graph& graph, const AgentParams& params) {
  nn::NoGradGuard guard;
  return encode_tensor(graph, params).value();
}

long long encode_call_count() { return g_encode_calls.load(std::memory_order_relaxed); }

Tensor vertex_embeddings_tensor(const Tensor& x_stacked, const Tensor& obs_stacked,
                                const AgentParams& params) {
  if (x_stacked.rows() != obs_stacked.rows())
    throw std::invalid_argument("vertex_embeddings: stacked row counts disagree");
  return nn::concat_cols(x_stacked, nn::linear(obs_stacked, params.obs_proj_weight));
}

Tensor q_from_vertex_embeddings(const Tensor& v, const std::vector<int>& env_of_row,
                                const Tensor& hidden, const AgentParams& params) {
  if (v.rows() != static_cast<Eigen::Index>(env_of_row.size()))
    throw std::invalid_argument("q_from_vertex_embeddings: row mapping size mismatch");

  Tensor h_proj = nn::linear(hidden, params.hidden_proj_weight);
  Tensor adv_in = nn::concat_cols(v, nn::gather_rows(h_proj, env_of_row));
  Tensor adv_mid = nn::leaky_relu(
      nn::layer_norm(nn::linear(adv_in, params.adv_w1, params.adv_b1), params.adv_ln_gain,
                     params.adv_ln_bias));
  Tensor advantage = nn::linear(adv_mid, params.adv_w2, params.adv_b2);

  Tensor value_mid =
      nn::leaky_relu(nn::linear(nn::tanh_op(hidden), params.value_w1, params.value_b1));
  Tensor value = nn::linear(value_mid, params.value_w2, params.value_b2);

  return nn::add(advantage, nn::gather_rows(value, env_of_row));
}

PolicyStep policy_step(const Tensor& x_stacked, const Tensor& obs_stacked,
                       const std::vector<int>& env_of_row, const Tensor& hidden,
                       const AgentParams& params) {
  PolicyStep out;
  out.v = vertex_embeddings_tensor(x_stacked, obs_stacked, params);
  out.q = q_from_vertex_embeddings(out.v, env_of_row, hidden, params);
  return out;
}

Tensor advance_hidden_batch(const Tensor& hidden, const Tensor& v_star, const Tensor& global_next,
                            const AgentParams& params) {
  Tensor m = nn::leaky_relu(nn::linear(nn::concat_cols(v_star, global_next), params.msg_weight));
  return nn::gru_cell(params.dec_gru, hidden, m);
}

Eigen::VectorXd q_values(const Eigen::MatrixXd& embeddings, const Observation& obs,
                         const DecoderState& dec, const AgentParams& params) {
  nn::NoGradGuard guard;
  const int n = static_cast<int>(embeddings.rows());
  PolicyStep step = policy_step(Tensor::constant(embeddings), Tensor::constant(obs.per_vertex),
                                std::vector<int>(n, 0), Tensor::constant(dec.hidden), params);
  return step.q.value().col(0);
}

Eigen::MatrixXd vertex_embeddings(const Eigen::MatrixXd& embeddings, const Observation& obs,
                                  const AgentParams& params) {
  nn::NoGradGuard guard;
  Eigen::MatrixXd proj = obs.per_vertex * params.obs_proj_weight.value().transpose();
  Eigen::MatrixXd v(embeddings.rows(), embeddings.cols() + proj.cols());
  v << embeddings, proj;
  return v;
}

int select_action(const Eigen::VectorXd& q, const PolicyConfig& cfg, std::mt19937_64& rng) {
  if (!q.allFinite()) throw std::invalid_argument("select_action: q must be finite");
  const int n = static_cast<int>(q.size());
  if (cfg.epsilon > 0.0 && uniform_unit(rng) < cfg.epsilon)
    return std::min(static_cast<int>(uniform_unit(rng) * n), n - 1);
  if (cfg.temperature == 0.0) return argmax_lowest_index(q);
  return sample_index(softmax_with_temperature(q, cfg.temperature), rng);
}

DecoderState advance_hidden(const DecoderState& dec, const Eigen::RowVectorXd& v_star,
                            const Eigen::Vector2d& global_next, const AgentParams& params) {
  nn::NoGradGuard guard;
  Eigen::RowVectorXd g(2);
  g << global_next[0], global_next[1];
  Tensor next = advance_hidden_batch(Tensor::constant(dec.hidden), Tensor::constant(v_star),
                                     Tensor::constant(g), params);
  DecoderState out;
  out.hidden = next.value().row(0);
  out.step = dec.step + 1;
  return out;
}

RolloutResult rollout(const Graph& graph, const AgentParams& params, const PolicyConfig& cfg,
                      int n_trajectories) {
  if (cfg.max_steps > 0 && cfg.time_budget_s > 0.0)
    throw std::invalid_argument("rollout: set at most one of max_steps / time_budget_s");
  if (n_trajectories <= 0) throw std::invalid_argument("rollout: need at least one trajectory");

  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  nn::NoGradGuard guard;

  const int n = graph.n_vertices();
  const int budget = cfg.obs_budget > 0        ? cfg.obs_budget
                     : cfg.time_budget_s > 0.0 ? 4 * n
                                               : std::max(1, cfg.max_steps);

  RolloutResult result;
  const long long encode_before = encode_call_count();
  const Eigen::MatrixXd embeddings = encode(graph, params);
  result.encode_calls = static_cast<int>(encode_call_count() - encode_before);

  const int E = n_trajectories;
  std::vector<CutState> states;
  std::vector<std::mt19937_64> rngs;
  states.reserve(E);
  rngs.reserve(E);
  for (int e = 0; e < E; ++e) {
    rngs.emplace_back(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(e)));
    states.push_back(make_cut_state(graph, random_labels(n, rngs.back()())));
  }

  Mat hidden = Mat::Zero(E, params.arch.hidden_dim);
  std::vector<int> env_of_row(static_cast<std::size_t>(E) * n);
  for (int e = 0; e < E; ++e)
    for (int i = 0; i < n; ++i) env_of_row[static_cast<std::size_t>(e) * n + i] = e;

  Mat x_stacked(static_cast<Eigen::Index>(E) * n, embeddings.cols());
  for (int e = 0; e < E; ++e) x_stacked.middleRows(static_cast<Eigen::Index>(e) * n, n) = embeddings;
  const Tensor x_stacked_t = Tensor::constant(std::move(x_stacked));

  double decode_s = 0.0;
  int steps = 0;
  while (true) {
    if (cfg.time_budget_s > 0.0) {
      // clock checked every 64 steps to keep timer overhead off the fast path
      if ((steps & 63) == 0 &&
          std::chrono::duration<double>(clock::now() - t_start).count() >= cfg.time_budget_s)
        break;
    } else if (steps >= cfg.max_steps) {
      break;
    }

    Mat obs_stacked(static_cast<Eigen::Index>(E) * n, 3);
    for (int e = 0; e < E; ++e)
      obs_stacked.middleRows(static_cast<Eigen::Index>(e) * n, n) =
          observe(states[e], graph, budget).per_vertex;

    const auto t_decode0 = clock::now();
    PolicyStep step = policy_step(x_stacked_t, Tensor::constant(std::move(obs_stacked)), env_of_row,
                                  Tensor::constant(hidden), params);
    std::vector<int> actions(E);
    for (int e = 0; e < E; ++e) {
      const Eigen::VectorXd q = step.q.value().col(0).segment(static_cast<Eigen::Index>(e) * n, n);
      actions[e] = select_action(q, cfg, rngs[e]);
    }
    decode_s += std::chrono::duration<double>(clock::now() - t_decode0).count();

    Mat v_star(E, step.v.cols());
    Mat global_next(E, 2);
    for (int e = 0; e < E; ++e) {
      v_star.row(e) = step.v.value().row(static_cast<Eigen::Index>(e) * n + actions[e]);
      apply_flip(states[e], graph, actions[e]);
      global_next.row(e) = observe_global(states[e], graph).transpose();
    }

    const auto t_decode1 = clock::now();
    hidden = advance_hidden_batch(Tensor::constant(std::move(hidden)),
                                  Tensor::constant(std::move(v_star)),
                                  Tensor::constant(std::move(global_next)), params)
                 .value();
    decode_s += std::chrono::duration<double>(clock::now() - t_decode1).count();
    ++steps;
  }

  result.trajectories.reserve(E);
  bool first = true;
  for (int e = 0; e < E; ++e) {
    result.trajectories.push_back({states[e].best_cut, steps});
    result.total_actions += steps;
    if (first || states[e].best_cut > result.best_cut) {
      result.best_cut = states[e].best_cut;
      result.best_labels = states[e].best_labels;
      first = false;
    }
  }
  result.decode_s = decode_s;
  result.elapsed_s = std::chrono::duration<double>(clock::now() - t_start).count();
  return result;
}

std::vector<RolloutResult> rollout_batch(const std::vector<Graph>& graphs,
                                         const AgentParams& params, const PolicyConfig& cfg,
                                         int n_trajectories_per_graph) {
  std::vector<RolloutResult> out;
  out.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    PolicyConfig per = cfg;
    per.rng_seed = mix_seed(cfg.rng_seed, 0x726f6c6cull + i);
    out.push_back(rollout(graphs[i], params, per, n_trajectories_per_graph));
  }
  return out;
}

}  // namespace flipcut

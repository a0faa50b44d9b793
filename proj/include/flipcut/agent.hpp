#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "flipcut/cut_state.hpp"
#include "flipcut/graph.hpp"
#include "flipcut/nn/ops.hpp"
#include "flipcut/nn/params.hpp"

namespace flipcut {

/// Network dimensions. Defaults give the 16-dim encoder, 1024-dim recurrent
/// decoder, 32-dim per-vertex embeddings and the dueling heads over them.
struct ArchConfig {
  int embed_dim = 16;
  int obs_dim = 3;
  int global_obs_dim = 2;
  int rounds = 4;            // message-passing rounds
  int hidden_dim = 1024;     // decoder recurrent state
  int hidden_proj_dim = 32;  // projection of the hidden state fed to the advantage head
  int msg_dim = 64;          // decoder recurrent input
  int value_hidden = 128;
  int adv_hidden = 64;

  int vertex_dim() const { return 2 * embed_dim; }  // [x_i, obs projection]
  int adv_input_dim() const { return vertex_dim() + hidden_proj_dim; }
  int msg_input_dim() const { return vertex_dim() + global_obs_dim; }
};

/// All learnable weights. Tensors are shared handles: copies of this struct
/// alias the same parameters; use clone() for an independent set.
struct AgentParams {
  ArchConfig arch;

  // encoder: shared input feature, message map, recurrent cell, layer norm,
  // final projection
  nn::Tensor enc_init;
  nn::Tensor enc_msg_weight;
  nn::GruParams enc_gru;
  nn::Tensor enc_ln_gain, enc_ln_bias;
  nn::Tensor enc_proj_weight;

  // decoder
  nn::Tensor obs_proj_weight;    // embed x obs_dim
  nn::Tensor hidden_proj_weight; // hidden_proj x hidden
  nn::Tensor msg_weight;         // msg x (vertex_dim + global_obs)
  nn::GruParams dec_gru;

  // dueling heads
  nn::Tensor value_w1, value_b1, value_w2, value_b2;
  nn::Tensor adv_w1, adv_b1, adv_ln_gain, adv_ln_bias, adv_w2, adv_b2;

  static AgentParams init(const ArchConfig& arch, std::uint64_t seed);

  /// Stable insertion-ordered view of every tensor; shares the underlying
  /// nodes with this struct.
  std::vector<nn::NamedTensor> entries();
  std::vector<nn::NamedTensor> entries() const;

  AgentParams clone() const;

  void save(const std::string& path) const;
  static AgentParams load(const std::string& path);
};

struct DecoderState {
  Eigen::RowVectorXd hidden;  // zeros at episode start
  int step = 0;
};

DecoderState make_decoder_state(const ArchConfig& arch);

struct PolicyConfig {
  double temperature = 0.0;       // 0 = argmax with lowest-index tie-break
  double epsilon = 0.0;           // uniform-random branch probability
  std::uint64_t rng_seed = 0;
  int max_steps = 0;              // exactly one of max_steps / time_budget_s
  double time_budget_s = 0.0;
  int obs_budget = 0;             // steps-since-flip normalization; 0 = derive
};

/// One-shot graph embedding: `rounds` of weighted-mean message passing
/// through the recurrent cell + layer norm, then a linear projection.
/// Conditioned only on the weighted adjacency; every vertex starts from the
/// same learned feature.
nn::Tensor encode_tensor(const Graph& graph, const AgentParams& params);
Eigen::MatrixXd encode(const Graph& graph, const AgentParams& params);  // forward-only
long long encode_call_count();  // process-wide instrumentation

/// Q over all vertices for a single environment (forward-only convenience).
Eigen::VectorXd q_values(const Eigen::MatrixXd& embeddings, const Observation& obs,
                         const DecoderState& dec, const AgentParams& params);

/// Per-vertex embeddings v_i = [x_i, W_o o_i] (forward-only convenience).
Eigen::MatrixXd vertex_embeddings(const Eigen::MatrixXd& embeddings, const Observation& obs,
                                  const AgentParams& params);

int select_action(const Eigen::VectorXd& q, const PolicyConfig& cfg, std::mt19937_64& rng);

DecoderState advance_hidden(const DecoderState& dec, const Eigen::RowVectorXd& v_star,
                            const Eigen::Vector2d& global_next, const AgentParams& params);

// ---- batched core (tape-aware; shared by rollouts and training) ----

struct PolicyStep {
  nn::Tensor q;  // N x 1, rows grouped per environment
  nn::Tensor v;  // N x vertex_dim
};

/// x_stacked / obs_stacked hold the concatenated per-vertex rows of several
/// environments; env_of_row maps each row to its environment index matching
/// the rows of `hidden` (E x hidden_dim).
PolicyStep policy_step(const nn::Tensor& x_stacked, const nn::Tensor& obs_stacked,
                       const std::vector<int>& env_of_row, const nn::Tensor& hidden,
                       const AgentParams& params);

/// Dueling heads over precomputed per-vertex embeddings v.
nn::Tensor q_from_vertex_embeddings(const nn::Tensor& v, const std::vector<int>& env_of_row,
                                    const nn::Tensor& hidden, const AgentParams& params);

/// v_i = [x_i, W_o o_i] as a tape op.
nn::Tensor vertex_embeddings_tensor(const nn::Tensor& x_stacked, const nn::Tensor& obs_stacked,
                                    const AgentParams& params);

nn::Tensor advance_hidden_batch(const nn::Tensor& hidden, const nn::Tensor& v_star,
                                const nn::Tensor& global_next, const AgentParams& params);

// ---- rollouts ----

struct TrajectoryStats {
  Weight best_cut = 0;
  int n_actions = 0;
};

struct RolloutResult {
  Weight best_cut = 0;
  Labels best_labels;
  std::vector<TrajectoryStats> trajectories;
  int encode_calls = 0;
  long long total_actions = 0;
  double elapsed_s = 0.0;
  double decode_s = 0.0;  // q + action selection + hidden advance only
};

/// Encodes the graph once, then runs n_trajectories parallel episodes from
/// random labelings with zeroed hidden states, selecting actions per cfg
/// until the step or time budget runs out. Per-step work after encoding does
/// no further message passing.
RolloutResult rollout(const Graph& graph, const AgentParams& params, const PolicyConfig& cfg,
                      int n_trajectories);

std::vector<RolloutResult> rollout_batch(const std::vector<Graph>& graphs,
                                         const AgentParams& params, const PolicyConfig& cfg,
                                         int n_trajectories_per_graph);

}  // namespace flipcut

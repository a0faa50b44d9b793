#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flipcut/agent.hpp"

namespace flipcut {

struct MdqnConfig {
  double tau = 0.01;    // policy temperature
  double alpha = 0.9;   // log-policy bonus scale
  double l0 = -1.0;     // lower clip for the log-policy bonus
  double gamma = 0.7;
};

/// One-step regression target:
///   r + alpha * tau * max(log pi(a|s), l0)
///     + gamma * (1 - done) * tau * logsumexp(next_q / tau)
/// where pi = softmax(current_q / tau). The soft expectation
/// sum_a' pi(a') (Q(a') - tau log pi(a')) equals tau * logsumexp(Q / tau)
/// exactly, which is how it is computed here.
double mdqn_target(double reward, const Eigen::VectorXd& next_q, const Eigen::VectorXd& current_q,
                   int action, bool done, const MdqnConfig& cfg);

/// Compact environment state; peeks are recomputed on restore.
struct EnvSnapshot {
  Labels labels;
  std::vector<std::int32_t> last_flip_step;
  std::int32_t step = 0;
  Weight cut = 0;
  Weight best_cut = 0;
};

EnvSnapshot snapshot_of(const CutState& state);
CutState restore_state(const Graph& graph, const EnvSnapshot& snap);

/// A k-step trajectory window ending in one rewarded transition. Replaying
/// states[0] through `actions` reproduces every stored state and the reward;
/// initial_hidden restores the decoder where the window starts.
struct TransitionSegment {
  std::shared_ptr<const Graph> graph;
  std::vector<EnvSnapshot> states;    // s(t-k') ... s(t+1), length = actions + 1
  std::vector<std::int32_t> actions;  // a(t-k') ... a(t), length <= k_bptt + 1
  Eigen::VectorXf initial_hidden;     // h(t-k') as recorded during acting
  double reward = 0.0;                // r for the final transition
  bool done = false;
  int episode_budget = 0;             // observation normalization during replay
};

/// Fixed-capacity FIFO ring with uniform sampling.
class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(TransitionSegment segment);
  std::size_t size() const { return full_ ? storage_.size() : next_; }
  std::size_t capacity() const { return storage_.size(); }
  const TransitionSegment& at(std::size_t i) const { return storage_[i]; }

  /// Uniform with replacement.
  std::vector<const TransitionSegment*> sample_batch(std::mt19937_64& rng, int count) const;

private:
  std::vector<TransitionSegment> storage_;
  std::size_t next_ = 0;
  bool full_ = false;
};

struct TrainConfig {
  long long n_steps = 40000;  // total environment steps (shared step counter)
  int batch_size = 64;
  int f_upd = 8;  // environment steps between optimizer updates
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double tau_upd = 0.01;  // soft target blend
  int k_bptt = 5;
  long long buffer_size = 40000;
  double gamma = 0.7;
  double eps_init = 1.0;
  double eps_final = 0.05;
  long long t_eps = 5000;  // steps over which epsilon decays linearly
  double tau = 0.01;       // policy / target temperature
  double alpha = 0.9;      // log-policy bonus scale
  double l0 = -1.0;        // log-policy clip
  int graphs_per_batch = 32;
  int episode_length = 0;  // 0 = 2|V|
  std::uint64_t seed = 0;

  // validation cadence (harness plumbing, not part of the learning rule)
  int val_interval_updates = 250;
  int val_trajectories = 10;

  MdqnConfig mdqn() const { return {tau, alpha, l0, gamma}; }
  double epsilon_at(long long step) const;
};

/// Reads a flat key=value file; '#' starts a comment. Unknown keys throw.
TrainConfig load_train_config(const std::string& path);
void save_train_config(const std::string& path, const TrainConfig& cfg);

/// Mean squared error between the online Q at each segment's final
/// state/action (hidden state rebuilt by replaying the window) and the
/// M-DQN target computed from the target network (held constant).
nn::Tensor mdqn_loss(const AgentParams& online, const AgentParams& target,
                     const std::vector<const TransitionSegment*>& batch, const MdqnConfig& cfg);

/// One optimizer update from a uniformly sampled batch. Returns the loss, or
/// nullopt when the buffer holds fewer than batch_size segments.
std::optional<double> train_step(AgentParams& online, const AgentParams& target,
                                 const ReplayBuffer& buffer, const TrainConfig& cfg,
                                 nn::AdamOptimizer& optimizer, std::mt19937_64& rng);

struct GraphSource {
  std::function<Graph(std::mt19937_64&)> sample;
  std::vector<Graph> validation;         // held-out instances
  std::vector<Weight> validation_refs;   // parallel reference cuts; may be empty
};

struct TrainLogRecord {
  long long step = 0;
  long long update = 0;
  double loss = 0.0;
  double eps = 0.0;
  double val_ar = std::numeric_limits<double>::quiet_NaN();  // NaN = not measured
};

struct TrainResult {
  AgentParams final_params;
  AgentParams best_params;  // best validation score (final params when unmeasured)
  double best_val_score = 0.0;
  std::vector<TrainLogRecord> log;
};

/// Full training loop: batches of parallel episodes, epsilon/softmax action
/// selection, per-step segment insertion, an optimizer update every f_upd
/// steps followed by a soft target update, periodic greedy validation.
/// Writes an append-only JSONL log to log_path when non-empty.
TrainResult train(const TrainConfig& cfg, const GraphSource& source, const ArchConfig& arch = {},
                  const std::string& log_path = {});

}  // namespace flipcut

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

namespace flipcut::nn {

using Mat = Eigen::MatrixXd;

/// Value-semantic handle to a node of the reverse-mode tape. Ops record a
/// backward closure on their output node when gradients are enabled and at
/// least one input is on a gradient path; otherwise they just compute.
class Tensor {
public:
  struct Node {
    Mat value;
    Mat grad;               // allocated on first accumulation
    bool has_grad = false;  // grad holds accumulated data
    bool requires_grad = false;
    std::vector<Tensor> parents;      // keeps the upstream tape alive
    std::function<void(Node&)> backward_fn;  // nullptr on leaves/constants
  };

  Tensor() = default;

  static Tensor constant(Mat value);
  static Tensor parameter(Mat value);  // leaf with requires_grad = true

  bool defined() const { return node_ != nullptr; }
  const Mat& value() const { return node_->value; }
  Mat& value() { return node_->value; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }

  /// Accumulated gradient; zero matrix if backward never reached this node.
  Mat grad() const;
  void zero_grad();

  /// Reverse pass from a 1x1 scalar with seed gradient 1.
  void backward();

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

  // Tape internals; ops and the optimizer use these directly.
  std::shared_ptr<Node> node_;
};

/// Accumulates g into t's gradient (no-op for tensors off the grad path).
void accumulate_grad(Tensor& t, const Mat& g);

/// Thread-local gradient mode. Forward-only callers (acting, evaluation,
/// target-network sweeps) disable taping with a guard.
bool grad_enabled();

class NoGradGuard {
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
  bool previous_;
};

}  // namespace flipcut::nn

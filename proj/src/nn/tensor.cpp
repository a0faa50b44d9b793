#include "flipcut/nn/tensor.hpp"

#include <stdexcept>
#include <unordered_set>

namespace flipcut::nn {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor Tensor::constant(Mat value) {
  Tensor t;
  t.node_ = std::make_shared<Node>();
  t.node_->value = std::move(value);
  return t;
}

Tensor Tensor::parameter(Mat value) {
  Tensor t = constant(std::move(value));
  t.node_->requires_grad = true;
  return t;
}

Mat Tensor::grad() const {
  if (node_->has_grad) return node_->grad;
  return Mat::Zero(node_->value.rows(), node_->value.cols());
}

void Tensor::zero_grad() {
  node_->has_grad = false;
  if (node_->grad.size() > 0) node_->grad.setZero();
}

void accumulate_grad(Tensor& t, const Mat& g) {
  Tensor::Node& n = *t.node_;
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Tensor::backward() {
  if (!defined() || node_->value.size() != 1)
    throw std::invalid_argument("backward requires a defined 1x1 tensor");

  // Post-order DFS for a topological ordering of the reachable tape.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  struct Frame {
    Node* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      Node* p = f.node->parents[f.next_parent++].node_.get();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  node_->grad = Mat::Ones(1, 1);
  node_->has_grad = true;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->has_grad) n->backward_fn(*n);
  }
}

}  // namespace flipcut::nn

#include "flipcut/nn/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace flipcut::nn {

namespace {

#ifndef NDEBUG
void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw std::runtime_error(std::string("non-finite values in ") + what);
}
#define FC_CHECK_FINITE(m, what) check_finite(m, what)
#else
#define FC_CHECK_FINITE(m, what) (void)(what)
#endif

bool any_requires_grad(const std::vector<Tensor>& parents) {
  for (const auto& p : parents)
    if (p.requires_grad()) return true;
  return false;
}

/// Wires a new tape node. The backward closure and parent links are dropped
/// when gradients are disabled or no input is on a gradient path, so
/// forward-only sweeps carry no tape.
Tensor make_op(Mat value, std::vector<Tensor> parents, std::function<void(Tensor::Node&)> backward,
               const char* what) {
  FC_CHECK_FINITE(value, what);
  Tensor out = Tensor::constant(std::move(value));
  if (grad_enabled() && any_requires_grad(parents)) {
    out.node_->requires_grad = true;
    out.node_->parents = std::move(parents);
    out.node_->backward_fn = std::move(backward);
  }
  return out;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  return make_op(
      a.value() + b.value(), {a, b},
      [](Tensor::Node& self) {
        accumulate_grad(self.parents[0], self.grad);
        accumulate_grad(self.parents[1], self.grad);
      },
      "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  return make_op(
      a.value() - b.value(), {a, b},
      [](Tensor::Node& self) {
        accumulate_grad(self.parents[0], self.grad);
        accumulate_grad(self.parents[1], -self.grad);
      },
      "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  return make_op(
      a.value().cwiseProduct(b.value()), {a, b},
      [](Tensor::Node& self) {
        accumulate_grad(self.parents[0], self.grad.cwiseProduct(self.parents[1].value()));
        accumulate_grad(self.parents[1], self.grad.cwiseProduct(self.parents[0].value()));
      },
      "mul");
}

Tensor scale(const Tensor& a, double c) {
  return make_op(
      a.value() * c, {a},
      [c](Tensor::Node& self) { accumulate_grad(self.parents[0], self.grad * c); }, "scale");
}

Tensor square(const Tensor& a) {
  return make_op(
      a.value().cwiseProduct(a.value()), {a},
      [](Tensor::Node& self) {
        accumulate_grad(self.parents[0], 2.0 * self.grad.cwiseProduct(self.parents[0].value()));
      },
      "square");
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions disagree");
  return make_op(
      a.value() * b.value(), {a, b},
      [](Tensor::Node& self) {
        accumulate_grad(self.parents[0], self.grad * self.parents[1].value().transpose());
        accumulate_grad(self.parents[1], self.parents[0].value().transpose() * self.grad);
      },
      "matmul");
}

namespace {

void linear_backward(Tensor::Node& self) {
  accumulate_grad(self.parents[0], self.grad * self.parents[1].value());
  accumulate_grad(self.parents[1], self.grad.transpose() * self.parents[0].value());
  if (self.parents.size() > 2) accumulate_grad(self.parents[2], self.grad.colwise().sum());
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& w) {
  if (x.cols() != w.cols()) throw std::invalid_argument("linear: input width does not match weight");
  return make_op(x.value() * w.value().transpose(), {x, w}, linear_backward, "linear");
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
  if (x.cols() != w.cols()) throw std::invalid_argument("linear: input width does not match weight");
  if (bias.rows() != 1 || bias.cols() != w.rows())
    throw std::invalid_argument("linear: bias shape must be 1 x out");
  Mat out = x.value() * w.value().transpose();
  out.rowwise() += bias.value().row(0);
  return make_op(std::move(out), {x, w, bias}, linear_backward, "linear");
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("concat_cols: row counts differ");
  Mat out(a.rows(), a.cols() + b.cols());
  out << a.value(), b.value();
  const auto ca = a.cols();
  return make_op(
      std::move(out), {a, b},
      [ca](Tensor::Node& self) {
        accumulate_grad(self.parents[0], self.grad.leftCols(ca));
        accumulate_grad(self.parents[1], self.grad.rightCols(self.grad.cols() - ca));
      },
      "concat_cols");
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.front().cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("concat_rows: column counts differ");
    rows += p.rows();
  }
  Mat out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return make_op(
      std::move(out), parts,
      [](Tensor::Node& self) {
        Eigen::Index at = 0;
        for (auto& parent : self.parents) {
          accumulate_grad(parent, self.grad.middleRows(at, parent.rows()));
          at += parent.rows();
        }
      },
      "concat_rows");
}

Tensor gather_rows(const Tensor& x, std::vector<int> indices) {
  Mat out(static_cast<Eigen::Index>(indices.size()), x.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] < 0 || indices[r] >= x.rows())
      throw std::out_of_range("gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(r)) = x.value().row(indices[r]);
  }
  return make_op(
      std::move(out), {x},
      [idx = std::move(indices)](Tensor::Node& self) {
        Mat gx = Mat::Zero(self.parents[0].rows(), self.parents[0].cols());
        for (std::size_t r = 0; r < idx.size(); ++r)
          gx.row(idx[r]) += self.grad.row(static_cast<Eigen::Index>(r));
        accumulate_grad(self.parents[0], gx);
      },
      "gather_rows");
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
  if (x.cols() < 1) throw std::invalid_argument("layer_norm: needs at least one feature");
  if (gain.rows() != 1 || gain.cols() != x.cols() || bias.rows() != 1 || bias.cols() != x.cols())
    throw std::invalid_argument("layer_norm: gain/bias must be 1 x C");

  const Eigen::VectorXd mu = x.value().rowwise().mean();
  Mat centered = x.value().colwise() - mu;
  const Eigen::VectorXd var = centered.array().square().rowwise().mean();
  const Eigen::VectorXd inv_s = (var.array() + kLayerNormEps).sqrt().inverse();
  Mat xhat = centered.array().colwise() * inv_s.array();
  Mat out = xhat.array().rowwise() * gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);

  const bool track = grad_enabled() && (x.requires_grad() || gain.requires_grad() || bias.requires_grad());
  if (!track) return Tensor::constant(std::move(out));

  return make_op(
      std::move(out), {x, gain, bias},
      [xhat = std::move(xhat), inv_s](Tensor::Node& self) {
        const Mat& g = self.grad;
        accumulate_grad(self.parents[2], g.colwise().sum());
        accumulate_grad(self.parents[1], g.cwiseProduct(xhat).colwise().sum());

        const Eigen::RowVectorXd gamma = self.parents[1].value().row(0);
        Mat dxhat = g.array().rowwise() * gamma.array();
        const Eigen::VectorXd mean_dxhat = dxhat.rowwise().mean();
        const Eigen::VectorXd mean_dxhat_xhat = dxhat.cwiseProduct(xhat).rowwise().mean();
        Mat dx = dxhat;
        dx.colwise() -= mean_dxhat;
        dx -= (xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
        dx = (dx.array().colwise() * inv_s.array()).matrix();
        accumulate_grad(self.parents[0], dx);
      },
      "layer_norm");
}

Tensor tanh_op(const Tensor& x) {
  Mat y = x.value().array().tanh();
  return make_op(
      std::move(y), {x},
      [](Tensor::Node& self) {
        const Mat& y = self.value;
        accumulate_grad(self.parents[0],
                        self.grad.cwiseProduct((1.0 - y.array().square()).matrix()));
      },
      "tanh");
}

Tensor sigmoid(const Tensor& x) {
  Mat y = 1.0 / (1.0 + (-x.value().array()).exp());
  return make_op(
      std::move(y), {x},
      [](Tensor::Node& self) {
        const auto& y = self.value.array();
        accumulate_grad(self.parents[0], self.grad.cwiseProduct((y * (1.0 - y)).matrix()));
      },
      "sigmoid");
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Mat y = x.value().array().max(x.value().array() * slope);
  return make_op(
      std::move(y), {x},
      [slope](Tensor::Node& self) {
        const Mat& vx = self.parents[0].value();
        Mat dx = (vx.array() > 0.0).select(self.grad, self.grad * slope);
        accumulate_grad(self.parents[0], dx);
      },
      "leaky_relu");
}

Tensor gru_cell(const GruParams& p, const Tensor& hidden, const Tensor& input) {
  const Eigen::Index h_dim = p.u_update.rows();
  const Eigen::Index in_dim = p.w_update.cols();
  if (hidden.cols() != h_dim || input.cols() != in_dim || hidden.rows() != input.rows())
    throw std::invalid_argument("gru_cell: shape mismatch");

  const Mat& h = hidden.value();
  const Mat& x = input.value();
  Mat z_pre = x * p.w_update.value().transpose() + h * p.u_update.value().transpose();
  z_pre.rowwise() += p.b_update.value().row(0);
  Mat r_pre = x * p.w_reset.value().transpose() + h * p.u_reset.value().transpose();
  r_pre.rowwise() += p.b_reset.value().row(0);
  Mat z = 1.0 / (1.0 + (-z_pre.array()).exp());
  Mat r = 1.0 / (1.0 + (-r_pre.array()).exp());
  Mat h_un = h * p.u_cand.value().transpose();
  Mat n_pre = x * p.w_cand.value().transpose() + r.cwiseProduct(h_un);
  n_pre.rowwise() += p.b_cand.value().row(0);
  Mat n = n_pre.array().tanh();
  Mat out = (1.0 - z.array()) * n.array() + z.array() * h.array();

  // parents: hidden, input, then the nine parameters
  return make_op(
      std::move(out),
      {hidden, input, p.w_update, p.u_update, p.b_update, p.w_reset, p.u_reset, p.b_reset, p.w_cand,
       p.u_cand, p.b_cand},
      [z = std::move(z), r = std::move(r), n = std::move(n),
       h_un = std::move(h_un)](Tensor::Node& self) {
        const Mat& g = self.grad;
        const Mat& h = self.parents[0].value();
        const Mat& x = self.parents[1].value();
        const Mat& w_update = self.parents[2].value();
        const Mat& u_update = self.parents[3].value();
        const Mat& w_reset = self.parents[5].value();
        const Mat& u_reset = self.parents[6].value();
        const Mat& w_cand = self.parents[8].value();
        const Mat& u_cand = self.parents[9].value();

        Mat dz_pre = g.cwiseProduct(h - n).cwiseProduct(z).cwiseProduct((1.0 - z.array()).matrix());
        Mat dn_pre = g.cwiseProduct((1.0 - z.array()).matrix())
                         .cwiseProduct((1.0 - n.array().square()).matrix());
        Mat dr_pre =
            dn_pre.cwiseProduct(h_un).cwiseProduct(r).cwiseProduct((1.0 - r.array()).matrix());
        Mat dn_pre_r = dn_pre.cwiseProduct(r);

        Mat dx = dz_pre * w_update + dr_pre * w_reset + dn_pre * w_cand;
        Mat dh = g.cwiseProduct(z) + dz_pre * u_update + dr_pre * u_reset + dn_pre_r * u_cand;

        accumulate_grad(self.parents[0], dh);
        accumulate_grad(self.parents[1], dx);
        accumulate_grad(self.parents[2], dz_pre.transpose() * x);
        accumulate_grad(self.parents[3], dz_pre.transpose() * h);
        accumulate_grad(self.parents[4], dz_pre.colwise().sum());
        accumulate_grad(self.parents[5], dr_pre.transpose() * x);
        accumulate_grad(self.parents[6], dr_pre.transpose() * h);
        accumulate_grad(self.parents[7], dr_pre.colwise().sum());
        accumulate_grad(self.parents[8], dn_pre.transpose() * x);
        accumulate_grad(self.parents[9], dn_pre_r.transpose() * h);
        accumulate_grad(self.parents[10], dn_pre.colwise().sum());
      },
      "gru_cell");
}

Tensor softmax_rows(const Tensor& x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("softmax_rows: tau must be positive");
  Mat scaled = x.value() / tau;
  const Eigen::VectorXd row_max = scaled.rowwise().maxCoeff();
  Mat y = (scaled.colwise() - row_max).array().exp();
  const Eigen::VectorXd sums = y.rowwise().sum();
  y.array().colwise() /= sums.array();

  return make_op(
      std::move(y), {x},
      [tau](Tensor::Node& self) {
        const Mat& y = self.value;
        const Mat& g = self.grad;
        const Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
        Mat dx = y.cwiseProduct(g.colwise() - dot) / tau;
        accumulate_grad(self.parents[0], dx);
      },
      "softmax_rows");
}

Tensor log_softmax_rows(const Tensor& x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("log_softmax_rows: tau must be positive");
  Mat scaled = x.value() / tau;
  const Eigen::VectorXd row_max = scaled.rowwise().maxCoeff();
  Mat shifted = scaled.colwise() - row_max;
  const Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log();
  Mat out = shifted.colwise() - lse;

  return make_op(
      std::move(out), {x},
      [tau](Tensor::Node& self) {
        const Mat softmax = self.value.array().exp();
        const Eigen::VectorXd row_sums = self.grad.rowwise().sum();
        Mat dx = (self.grad - (softmax.array().colwise() * row_sums.array()).matrix()) / tau;
        accumulate_grad(self.parents[0], dx);
      },
      "log_softmax_rows");
}

Tensor logsumexp_rows(const Tensor& x) {
  const Eigen::VectorXd row_max = x.value().rowwise().maxCoeff();
  Mat shifted = x.value().colwise() - row_max;
  Mat softmax = shifted.array().exp();
  const Eigen::VectorXd sums = softmax.rowwise().sum();
  Mat out = (sums.array().log() + row_max.array()).matrix();
  softmax.array().colwise() /= sums.array();

  return make_op(
      std::move(out), {x},
      [softmax = std::move(softmax)](Tensor::Node& self) {
        accumulate_grad(self.parents[0],
                        (softmax.array().colwise() * self.grad.col(0).array()).matrix());
      },
      "logsumexp_rows");
}

Tensor sum_all(const Tensor& x) {
  Mat out(1, 1);
  out(0, 0) = x.value().sum();
  return make_op(
      std::move(out), {x},
      [](Tensor::Node& self) {
        accumulate_grad(self.parents[0], Mat::Constant(self.parents[0].rows(),
                                                       self.parents[0].cols(), self.grad(0, 0)));
      },
      "sum_all");
}

Tensor mean_all(const Tensor& x) {
  const double inv = 1.0 / static_cast<double>(x.value().size());
  Mat out(1, 1);
  out(0, 0) = x.value().sum() * inv;
  return make_op(
      std::move(out), {x},
      [inv](Tensor::Node& self) {
        accumulate_grad(self.parents[0],
                        Mat::Constant(self.parents[0].rows(), self.parents[0].cols(),
                                      self.grad(0, 0) * inv));
      },
      "mean_all");
}

Tensor graph_mean_gather(const Graph& graph, const Tensor& x) {
  if (x.rows() != graph.n_vertices())
    throw std::invalid_argument("graph_mean_gather: row count must equal vertex count");
  const int n = graph.n_vertices();
  Mat out = Mat::Zero(n, x.cols());
  for (int i = 0; i < n; ++i) {
    auto nb = graph.neighbors(i);
    auto ws = graph.weights(i);
    if (nb.empty()) continue;
    for (std::size_t k = 0; k < nb.size(); ++k)
      out.row(i) += static_cast<double>(ws[k]) * x.value().row(nb[k]);
    out.row(i) /= static_cast<double>(nb.size());
  }
  return make_op(
      std::move(out), {x},
      [&graph](Tensor::Node& self) {
        const int n = graph.n_vertices();
        Mat gx = Mat::Zero(n, self.parents[0].cols());
        for (int i = 0; i < n; ++i) {
          auto nb = graph.neighbors(i);
          auto ws = graph.weights(i);
          if (nb.empty()) continue;
          const double inv_deg = 1.0 / static_cast<double>(nb.size());
          for (std::size_t k = 0; k < nb.size(); ++k)
            gx.row(nb[k]) += static_cast<double>(ws[k]) * inv_deg * self.grad.row(i);
        }
        accumulate_grad(self.parents[0], gx);
      },
      "graph_mean_gather");
}

}  // namespace flipcut::nn

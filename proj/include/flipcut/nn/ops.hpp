#pragma once

#include <vector>

#include "flipcut/graph.hpp"
#include "flipcut/nn/tensor.hpp"

namespace flipcut::nn {

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kLeakySlope = 0.01;

// Elementwise; shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor square(const Tensor& a);

Tensor matmul(const Tensor& a, const Tensor& b);

// x (N x in) times w (out x in) transposed, plus optional bias (1 x out)
// broadcast over rows.
Tensor linear(const Tensor& x, const Tensor& w);
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias);

Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const std::vector<Tensor>& parts);

// out.row(r) = x.row(indices[r]); backward scatter-adds.
Tensor gather_rows(const Tensor& x, std::vector<int> indices);

// Row-wise normalization to zero mean / unit variance (eps inside the square
// root), then affine gain/bias (1 x C each).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias);

Tensor tanh_op(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope = kLeakySlope);

struct GruParams {
  Tensor w_update, u_update, b_update;
  Tensor w_reset, u_reset, b_reset;
  Tensor w_cand, u_cand, b_cand;
};

/// Standard gated recurrent cell.
///   z = sigmoid(x Wz' + h Uz' + bz)
///   r = sigmoid(x Wr' + h Ur' + br)
///   n = tanh(x Wn' + r .* (h Un') + bn)
///   h' = (1 - z) .* n + z .* h
Tensor gru_cell(const GruParams& p, const Tensor& hidden, const Tensor& input);

// Row-wise softmax(x / tau) and its log, max-subtracted. tau > 0.
Tensor softmax_rows(const Tensor& x, double tau);
Tensor log_softmax_rows(const Tensor& x, double tau);
// Row-wise log(sum(exp(x))) as an N x 1 column.
Tensor logsumexp_rows(const Tensor& x);

Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);

/// Weighted neighborhood mean: out.row(i) = (1/|N(i)|) sum_j w_ij x.row(j),
/// zero for isolated vertices. The graph must outlive the backward pass.
Tensor graph_mean_gather(const Graph& graph, const Tensor& x);

}  // namespace flipcut::nn

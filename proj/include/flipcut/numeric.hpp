#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace flipcut {

/// Max-subtracted softmax(logits / tau). Requires tau > 0 and finite logits;
/// probabilities renormalized to sum to 1 within 1e-12.
Eigen::VectorXd softmax_with_temperature(const Eigen::VectorXd& logits, double tau);

/// Log-probabilities of softmax(logits / tau), computed jointly via
/// logsumexp rather than log of the probabilities.
Eigen::VectorXd log_softmax_with_temperature(const Eigen::VectorXd& logits, double tau);

/// log(sum(exp(x))), max-subtracted.
double logsumexp(const Eigen::VectorXd& x);

/// Lowest index attaining the maximum.
int argmax_lowest_index(const Eigen::VectorXd& x);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Samples an index from a probability vector via its cumulative sum.
int sample_index(const Eigen::VectorXd& probabilities, std::mt19937_64& rng);

}  // namespace flipcut

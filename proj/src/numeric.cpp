#include "flipcut/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace flipcut {

Eigen::VectorXd softmax_with_temperature(const Eigen::VectorXd& logits, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
  if (!logits.allFinite()) throw std::invalid_argument("softmax logits must be finite");
  const Eigen::VectorXd scaled = logits / tau;
  const double m = scaled.maxCoeff();
  Eigen::VectorXd p = (scaled.array() - m).exp();
  p /= p.sum();
  return p;
}

Eigen::VectorXd log_softmax_with_temperature(const Eigen::VectorXd& logits, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
  if (!logits.allFinite()) throw std::invalid_argument("softmax logits must be finite");
  const Eigen::VectorXd scaled = logits / tau;
  return scaled.array() - logsumexp(scaled);
}

double logsumexp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

int argmax_lowest_index(const Eigen::VectorXd& x) {
  int best = 0;
  for (int i = 1; i < x.size(); ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

int sample_index(const Eigen::VectorXd& probabilities, std::mt19937_64& rng) {
  const double u = uniform_unit(rng);
  double acc = 0.0;
  const int n = static_cast<int>(probabilities.size());
  for (int i = 0; i < n; ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return n - 1;  // numerical tail
}

}  // namespace flipcut

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flipcut/nn/tensor.hpp"

namespace flipcut::nn {

struct ShapeEntry {
  std::string name;
  int rows = 0;
  int cols = 0;

  friend bool operator==(const ShapeEntry&, const ShapeEntry&) = default;
};
using ShapeManifest = std::vector<ShapeEntry>;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

ShapeManifest manifest_of(const std::vector<NamedTensor>& entries);

/// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
Mat uniform_init(int rows, int cols, int fan_in, std::mt19937_64& rng);

/// Checkpoints are a flat container of (name, shape, row-major float32
/// values) entries plus a format version and integer metadata (architecture
/// dimensions). Values are stored in 32-bit precision.
struct Checkpoint {
  std::uint32_t version = 1;
  std::map<std::string, std::int64_t> meta;
  std::vector<std::pair<std::string, Mat>> tensors;
};

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& entries,
                     const std::map<std::string, std::int64_t>& meta);
Checkpoint read_checkpoint(const std::string& path);

/// Copies checkpoint values into the given entries. Rejects any missing,
/// extra, or shape-mismatched name with std::invalid_argument.
void apply_checkpoint(const Checkpoint& ckpt, std::vector<NamedTensor>& entries);

/// Content hash of a checkpoint file (for run manifests).
std::uint64_t checkpoint_content_hash(const std::string& path);

/// Adam with bias correction. Moment buffers are positional, so the entry
/// list must keep a stable order across steps.
class AdamOptimizer {
public:
  AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);

  /// Applies one update from the accumulated gradients, then clears them.
  void step(std::vector<NamedTensor>& entries);

  long long steps_taken() const { return t_; }

private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<Mat> m_, v_;
};

/// target <- tau * online + (1 - tau) * target, elementwise.
/// Manifests must match exactly.
void soft_update(std::vector<NamedTensor>& target, const std::vector<NamedTensor>& online,
                 double tau);

}  // namespace flipcut::nn

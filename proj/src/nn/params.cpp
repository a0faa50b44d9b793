#include "flipcut/nn/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "flipcut/common.hpp"

namespace flipcut::nn {

namespace {
constexpr char kMagic[4] = {'F', 'C', 'P', 'T'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return v;
}

void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  const auto len = read_pod<std::uint32_t>(is);
  if (len > (1u << 20)) throw std::runtime_error("checkpoint name too long");
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("checkpoint truncated");
  return s;
}
}  // namespace

ShapeManifest manifest_of(const std::vector<NamedTensor>& entries) {
  ShapeManifest m;
  m.reserve(entries.size());
  for (const auto& e : entries)
    m.push_back({e.name, static_cast<int>(e.tensor.rows()), static_cast<int>(e.tensor.cols())});
  return m;
}

Mat uniform_init(int rows, int cols, int fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Mat m(rows, cols);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& entries,
                     const std::map<std::string, std::int64_t>& meta) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_pod<std::uint32_t>(os, 1u);  // format version
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    write_string(os, k);
    write_pod<std::int64_t>(os, v);
  }
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    write_string(os, e.name);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(e.tensor.rows()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(e.tensor.cols()));
    const Mat& m = e.tensor.value();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) write_pod<float>(os, static_cast<float>(m(r, c)));
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);

  Checkpoint ckpt;
  ckpt.version = read_pod<std::uint32_t>(is);
  if (ckpt.version != 1)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(ckpt.version));
  const auto meta_count = read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    std::string k = read_string(is);
    ckpt.meta[k] = read_pod<std::int64_t>(is);
  }
  const auto tensor_count = read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < tensor_count; ++i) {
    std::string name = read_string(is);
    const auto rows = read_pod<std::uint32_t>(is);
    const auto cols = read_pod<std::uint32_t>(is);
    Mat m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = static_cast<double>(read_pod<float>(is));
    ckpt.tensors.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

void apply_checkpoint(const Checkpoint& ckpt, std::vector<NamedTensor>& entries) {
  if (ckpt.tensors.size() != entries.size())
    throw std::invalid_argument("checkpoint entry count mismatch: expected " +
                                std::to_string(entries.size()) + ", got " +
                                std::to_string(ckpt.tensors.size()));
  std::map<std::string, const Mat*> by_name;
  for (const auto& [name, m] : ckpt.tensors) {
    if (!by_name.emplace(name, &m).second)
      throw std::invalid_argument("duplicate checkpoint entry: " + name);
  }
  for (auto& e : entries) {
    auto it = by_name.find(e.name);
    if (it == by_name.end()) throw std::invalid_argument("checkpoint missing entry: " + e.name);
    const Mat& m = *it->second;
    if (m.rows() != e.tensor.rows() || m.cols() != e.tensor.cols())
      throw std::invalid_argument("checkpoint shape mismatch for " + e.name);
    e.tensor.value() = m;
  }
}

std::uint64_t checkpoint_content_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (is) {
    is.read(buf, sizeof(buf));
    h = fnv1a(buf, static_cast<std::size_t>(is.gcount()), h);
  }
  return h;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

void AdamOptimizer::step(std::vector<NamedTensor>& entries) {
  if (m_.empty()) {
    m_.reserve(entries.size());
    v_.reserve(entries.size());
    for (const auto& e : entries) {
      m_.push_back(Mat::Zero(e.tensor.rows(), e.tensor.cols()));
      v_.push_back(Mat::Zero(e.tensor.rows(), e.tensor.cols()));
    }
  }
  if (m_.size() != entries.size())
    throw std::invalid_argument("optimizer was initialized with a different entry count");

  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor& t = entries[i].tensor;
    const Mat g = t.grad();
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    const Mat m_hat = m_[i] / bc1;
    const Mat v_hat = v_[i] / bc2;
    t.value().array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + eps_);
    t.zero_grad();
  }
}

void soft_update(std::vector<NamedTensor>& target, const std::vector<NamedTensor>& online,
                 double tau) {
  if (manifest_of(target) != manifest_of(online))
    throw std::invalid_argument("soft_update: parameter manifests differ");
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i].tensor.value() =
        tau * online[i].tensor.value() + (1.0 - tau) * target[i].tensor.value();
  }
}

}  // namespace flipcut::nn

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flipcut {

/// Thrown by text-format readers; carries the 1-based offending line.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + std::move(message)),
        line_(line) {}

  int line() const { return line_; }

private:
  int line_;
};

/// splitmix64 finalizer; used to derive independent per-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// FNV-1a over raw bytes; content ids for run manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace flipcut

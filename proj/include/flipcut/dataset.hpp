#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flipcut/graph.hpp"

namespace flipcut {

struct DatasetInstance {
  std::string id;
  Graph graph;
  std::optional<Weight> reference_cut;  // > 0 when present
  std::optional<double> tau;            // per-instance tuned temperature
  std::string file;                     // instance file, relative to the manifest
};

struct Dataset {
  std::string name;
  std::string split;  // train / validation / test
  nlohmann::json generator;  // parameters and seeds the instances came from
  std::vector<DatasetInstance> instances;
};

/// Writes one instance file per graph plus manifest.json into `dir`.
void save_dataset(const std::string& dir, const Dataset& dataset);

/// Loads a dataset from its manifest.json (or the directory holding one).
Dataset load_dataset(const std::string& manifest_path);

/// Validates id uniqueness and reference positivity; throws on violation.
void check_dataset(const Dataset& dataset);

}  // namespace flipcut

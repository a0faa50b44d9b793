#include "flipcut/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "flipcut/gset.hpp"

namespace flipcut {

namespace fs = std::filesystem;

void check_dataset(const Dataset& dataset) {
  std::unordered_set<std::string> ids;
  for (const auto& inst : dataset.instances) {
    if (!ids.insert(inst.id).second)
      throw std::invalid_argument("duplicate instance id: " + inst.id);
    if (inst.reference_cut && *inst.reference_cut <= 0)
      throw std::invalid_argument("non-positive reference cut for " + inst.id);
  }
}

void save_dataset(const std::string& dir, const Dataset& dataset) {
  check_dataset(dataset);
  fs::create_directories(dir);

  nlohmann::json manifest;
  manifest["name"] = dataset.name;
  manifest["split"] = dataset.split;
  manifest["generator"] = dataset.generator;
  auto& list = manifest["instances"] = nlohmann::json::array();
  for (const auto& inst : dataset.instances) {
    const std::string file = inst.file.empty() ? inst.id + ".txt" : inst.file;
    save_gset((fs::path(dir) / file).string(), inst.graph);
    nlohmann::json j{{"id", inst.id}, {"file", file}, {"n_vertices", inst.graph.n_vertices()}};
    if (inst.reference_cut) j["reference_cut"] = *inst.reference_cut;
    if (inst.tau) j["tau"] = *inst.tau;
    list.push_back(std::move(j));
  }

  std::ofstream os(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write dataset manifest in " + dir);
  os << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::string& manifest_path) {
  fs::path path(manifest_path);
  if (fs::is_directory(path)) path /= "manifest.json";
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open dataset manifest: " + path.string());
  nlohmann::json manifest = nlohmann::json::parse(is);

  Dataset ds;
  ds.name = manifest.value("name", "");
  ds.split = manifest.value("split", "");
  ds.generator = manifest.value("generator", nlohmann::json::object());
  const fs::path base = path.parent_path();
  for (const auto& j : manifest.at("instances")) {
    DatasetInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.file = j.at("file").get<std::string>();
    inst.graph = load_gset((base / inst.file).string());
    if (j.contains("reference_cut")) inst.reference_cut = j["reference_cut"].get<Weight>();
    if (j.contains("tau")) inst.tau = j["tau"].get<double>();
    ds.instances.push_back(std::move(inst));
  }
  check_dataset(ds);
  return ds;
}

}  // namespace flipcut

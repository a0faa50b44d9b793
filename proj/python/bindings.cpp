// Python bindings for the core operations: graphs, the incremental cut
// environment, exhaustive oracle, greedy/soft heuristics, generators, the
// GSet format, and the trained agent (encode / rollout / train).

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "flipcut/agent.hpp"
#include "flipcut/cut_state.hpp"
#include "flipcut/evaluate.hpp"
#include "flipcut/generators.hpp"
#include "flipcut/graph.hpp"
#include "flipcut/gset.hpp"
#include "flipcut/heuristics.hpp"
#include "flipcut/oracle.hpp"
#include "flipcut/training.hpp"

namespace py = pybind11;
using namespace flipcut;

namespace {

Graph graph_from_edges(int n, const std::vector<std::tuple<int, int, Weight>>& edges) {
  std::vector<WeightedEdge> list;
  list.reserve(edges.size());
  for (const auto& [u, v, w] : edges) list.push_back({u, v, w});
  return Graph::from_edges(n, list);
}

std::vector<std::tuple<int, int, Weight>> graph_edges(const Graph& g) {
  std::vector<std::tuple<int, int, Weight>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.w);
  return out;
}

}  // namespace

PYBIND11_MODULE(_flipcut, m) {
  m.doc() = "Max-Cut toolkit: incremental flip environment, exhaustive oracle, "
            "greedy/soft heuristics, and a GNN-encode-once recurrent Q-agent";

  py::class_<Graph>(m, "Graph")
      .def(py::init(&graph_from_edges), py::arg("n_vertices"), py::arg("edges"))
      .def_property_readonly("n_vertices", &Graph::n_vertices)
      .def_property_readonly("n_edges", &Graph::n_edges)
      .def_property_readonly("total_abs_weight", &Graph::total_abs_weight)
      .def("degree", &Graph::degree, py::arg("vertex"))
      .def("edges", &graph_edges)
      .def("content_hash", &Graph::content_hash)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "Graph(n_vertices=" + std::to_string(g.n_vertices()) +
               ", n_edges=" + std::to_string(g.n_edges()) + ")";
      });

  m.def("cut_value", &cut_value, py::arg("graph"), py::arg("labels"));
  m.def("compute_peeks", &compute_peeks, py::arg("graph"), py::arg("labels"));
  m.def("random_labels", &random_labels, py::arg("n_vertices"), py::arg("seed"));

  py::class_<CutState>(m, "CutState")
      .def_readonly("labels", &CutState::labels)
      .def_readonly("cut_value", &CutState::cut_value)
      .def_readonly("peeks", &CutState::peeks)
      .def_readonly("last_flip_step", &CutState::last_flip_step)
      .def_readonly("step", &CutState::step)
      .def_readonly("best_cut", &CutState::best_cut)
      .def_readonly("best_labels", &CutState::best_labels);
  m.def("make_cut_state", &make_cut_state, py::arg("graph"), py::arg("labels"));
  m.def("apply_flip", &apply_flip, py::arg("state"), py::arg("graph"), py::arg("vertex"));
  m.def(
      "observe",
      [](const CutState& s, const Graph& g, int budget) {
        const Observation obs = observe(s, g, budget);
        return py::make_tuple(obs.per_vertex, obs.global);
      },
      py::arg("state"), py::arg("graph"), py::arg("episode_budget"),
      "Returns (per_vertex, global) observation arrays");
  m.def("reward", &reward, py::arg("state_after_flip"), py::arg("prev_best"),
        py::arg("n_vertices"));

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("best_cut", &OracleResult::best_cut)
      .def_readonly("best_labels", &OracleResult::best_labels)
      .def_readonly("n_optima", &OracleResult::n_optima);
  m.def("brute_force_max_cut", &brute_force_max_cut, py::arg("graph"),
        py::arg("max_vertices") = 26);
  m.def("approximation_ratio", &approximation_ratio, py::arg("found_cut"),
        py::arg("reference_cut"));

  py::class_<HeuristicResult>(m, "HeuristicResult")
      .def_readonly("best_cut", &HeuristicResult::best_cut)
      .def_readonly("best_labels", &HeuristicResult::best_labels)
      .def_readonly("steps_taken", &HeuristicResult::steps_taken);
  py::class_<SoftPolicyConfig>(m, "SoftPolicyConfig")
      .def(py::init<>())
      .def_readwrite("temperature", &SoftPolicyConfig::temperature)
      .def_readwrite("max_steps", &SoftPolicyConfig::max_steps)
      .def_readwrite("n_restarts", &SoftPolicyConfig::n_restarts)
      .def_readwrite("rng_seed", &SoftPolicyConfig::rng_seed);
  m.def("mca_run", &mca_run, py::arg("graph"), py::arg("initial_labels"), py::arg("max_steps"));
  m.def("mca_soft_run", &mca_soft_run, py::arg("graph"), py::arg("initial_labels"),
        py::arg("config"));
  m.def("mca_best_of_restarts", &mca_best_of_restarts, py::arg("graph"), py::arg("n_restarts"),
        py::arg("max_steps"), py::arg("seed"));
  m.def("mca_soft_best_of_restarts", &mca_soft_best_of_restarts, py::arg("graph"),
        py::arg("config"));
  m.def("tune_temperature", &tune_temperature, py::arg("graphs"), py::arg("grid"),
        py::arg("budget"));

  m.def(
      "generate_er",
      [](int n, double p, const std::string& weights, std::uint64_t seed) {
        return generate_er(n, p, WeightSpec::parse(weights), seed);
      },
      py::arg("n"), py::arg("edge_prob"), py::arg("weights") = "0pm1", py::arg("seed") = 0);
  m.def(
      "generate_ba",
      [](int n, int attachment, const std::string& weights, std::uint64_t seed) {
        return generate_ba(n, attachment, WeightSpec::parse(weights), seed);
      },
      py::arg("n"), py::arg("attachment"), py::arg("weights") = "0pm1", py::arg("seed") = 0);

  m.def("parse_gset", &parse_gset_string, py::arg("text"));
  m.def("load_gset", &load_gset, py::arg("path"));
  m.def(
      "to_gset",
      [](const Graph& g) {
        std::ostringstream os;
        write_gset(os, g);
        return os.str();
      },
      py::arg("graph"));
  m.def("save_gset", &save_gset, py::arg("path"), py::arg("graph"));

  py::class_<ArchConfig>(m, "ArchConfig")
      .def(py::init<>())
      .def_readwrite("embed_dim", &ArchConfig::embed_dim)
      .def_readwrite("rounds", &ArchConfig::rounds)
      .def_readwrite("hidden_dim", &ArchConfig::hidden_dim)
      .def_readwrite("hidden_proj_dim", &ArchConfig::hidden_proj_dim)
      .def_readwrite("msg_dim", &ArchConfig::msg_dim)
      .def_readwrite("value_hidden", &ArchConfig::value_hidden)
      .def_readwrite("adv_hidden", &ArchConfig::adv_hidden);

  py::class_<AgentParams>(m, "AgentParams")
      .def_static("init", &AgentParams::init, py::arg("arch") = ArchConfig{}, py::arg("seed") = 0)
      .def_static("load", &AgentParams::load, py::arg("path"))
      .def("save", &AgentParams::save, py::arg("path"))
      .def_property_readonly("arch", [](const AgentParams& p) { return p.arch; });

  m.def("encode", &encode, py::arg("graph"), py::arg("params"),
        "One-shot per-vertex embeddings (n x embed_dim)");

  py::class_<PolicyConfig>(m, "PolicyConfig")
      .def(py::init<>())
      .def_readwrite("temperature", &PolicyConfig::temperature)
      .def_readwrite("epsilon", &PolicyConfig::epsilon)
      .def_readwrite("rng_seed", &PolicyConfig::rng_seed)
      .def_readwrite("max_steps", &PolicyConfig::max_steps)
      .def_readwrite("time_budget_s", &PolicyConfig::time_budget_s)
      .def_readwrite("obs_budget", &PolicyConfig::obs_budget);

  py::class_<TrajectoryStats>(m, "TrajectoryStats")
      .def_readonly("best_cut", &TrajectoryStats::best_cut)
      .def_readonly("n_actions", &TrajectoryStats::n_actions);
  py::class_<RolloutResult>(m, "RolloutResult")
      .def_readonly("best_cut", &RolloutResult::best_cut)
      .def_readonly("best_labels", &RolloutResult::best_labels)
      .def_readonly("trajectories", &RolloutResult::trajectories)
      .def_readonly("encode_calls", &RolloutResult::encode_calls)
      .def_readonly("total_actions", &RolloutResult::total_actions)
      .def_readonly("elapsed_s", &RolloutResult::elapsed_s)
      .def_readonly("decode_s", &RolloutResult::decode_s);
  m.def("rollout", &rollout, py::arg("graph"), py::arg("params"), py::arg("config"),
        py::arg("n_trajectories"), py::call_guard<py::gil_scoped_release>());

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("n_steps", &TrainConfig::n_steps)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("f_upd", &TrainConfig::f_upd)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("tau_upd", &TrainConfig::tau_upd)
      .def_readwrite("k_bptt", &TrainConfig::k_bptt)
      .def_readwrite("buffer_size", &TrainConfig::buffer_size)
      .def_readwrite("gamma", &TrainConfig::gamma)
      .def_readwrite("eps_init", &TrainConfig::eps_init)
      .def_readwrite("eps_final", &TrainConfig::eps_final)
      .def_readwrite("t_eps", &TrainConfig::t_eps)
      .def_readwrite("tau", &TrainConfig::tau)
      .def_readwrite("alpha", &TrainConfig::alpha)
      .def_readwrite("l0", &TrainConfig::l0)
      .def_readwrite("graphs_per_batch", &TrainConfig::graphs_per_batch)
      .def_readwrite("episode_length", &TrainConfig::episode_length)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("val_interval_updates", &TrainConfig::val_interval_updates)
      .def_readwrite("val_trajectories", &TrainConfig::val_trajectories);

  m.def(
      "train",
      [](const TrainConfig& cfg, const std::function<Graph(std::uint64_t)>& sampler,
         const std::vector<Graph>& validation, const std::vector<Weight>& validation_refs,
         const ArchConfig& arch, const std::string& log_path) {
        GraphSource source;
        source.sample = [&sampler](std::mt19937_64& rng) { return sampler(rng()); };
        source.validation = validation;
        source.validation_refs = validation_refs;
        TrainResult result = train(cfg, source, arch, log_path);
        return py::make_tuple(result.final_params, result.best_params, result.best_val_score);
      },
      py::arg("config"), py::arg("sampler"), py::arg("validation") = std::vector<Graph>{},
      py::arg("validation_refs") = std::vector<Weight>{}, py::arg("arch") = ArchConfig{},
      py::arg("log_path") = std::string{},
      "Runs the training loop; sampler maps a seed to a Graph. Returns "
      "(final_params, best_params, best_val_score)");
}

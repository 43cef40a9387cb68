#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparseloc/errors.hpp"
#include "sparseloc/indep_sets.hpp"
#include "sparseloc/influence.hpp"
#include "sparseloc/localization.hpp"
#include "sparseloc/measure.hpp"
#include "sparseloc/sparse.hpp"

namespace sparseloc {

using json = nlohmann::json;

/// Measure files carry either a full-cube measure or a fixed-size-support
/// slice measure:
///   {"kind":"cube","n":3,"atoms":[{"state":"101","p":0.5}, ...]}
///   {"kind":"slice","n":4,"k":2,"atoms":[{"state":[0,2],"p":0.25}, ...]}
/// Bitstring position j is coordinate j; '1' means +1.
struct LoadedMeasure {
  std::string kind;
  std::optional<CubeMeasure> cube;
  std::optional<SliceMeasure> slice;

  CubeMeasure as_cube() const { return cube ? *cube : slice_to_cube(*slice); }
};

inline State parse_bitstring_state(const std::string& s, int n) {
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("measure state \"" + s + "\": expected " + std::to_string(n) +
                                " characters");
  State x = 0;
  for (int j = 0; j < n; ++j) {
    const char c = s[static_cast<std::size_t>(j)];
    if (c == '1')
      x |= State{1} << j;
    else if (c != '0')
      throw std::invalid_argument("measure state \"" + s + "\": only '0'/'1' allowed");
  }
  return x;
}

inline std::string format_bitstring_state(State x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int j = 0; j < n; ++j)
    if ((x >> j) & 1u) s[static_cast<std::size_t>(j)] = '1';
  return s;
}

inline State parse_index_list_state(const json& arr, int n) {
  if (!arr.is_array()) throw std::invalid_argument("slice state must be an index list");
  State x = 0;
  int prev = -1;
  for (const auto& entry : arr) {
    const int v = entry.get<int>();
    if (v < 0 || v >= n)
      throw std::invalid_argument("slice state index " + std::to_string(v) + " out of range");
    if (v <= prev) throw std::invalid_argument("slice state indices must be strictly increasing");
    prev = v;
    x |= State{1} << v;
  }
  return x;
}

inline LoadedMeasure parse_measure(const json& spec) {
  LoadedMeasure out;
  out.kind = spec.at("kind").get<std::string>();
  const int n = spec.at("n").get<int>();
  if (n < 1 || n > kMaxCoordinates)
    throw std::invalid_argument("measure: n out of range");
  const auto& atoms = spec.at("atoms");
  if (!atoms.is_array() || atoms.empty())
    throw std::invalid_argument("measure: atoms must be a nonempty array");

  if (out.kind == "cube") {
    std::vector<double> weights(std::size_t{1} << n, 0.0);
    for (const auto& atom : atoms) {
      const State x = parse_bitstring_state(atom.at("state").get<std::string>(), n);
      weights[x] += atom.at("p").get<double>();
    }
    out.cube = CubeMeasure(n, weights);
  } else if (out.kind == "slice") {
    const int k = spec.at("k").get<int>();
    std::map<State, double> weights;
    for (const auto& atom : atoms)
      weights[parse_index_list_state(atom.at("state"), n)] += atom.at("p").get<double>();
    out.slice = SliceMeasure::from_weights(n, k, weights);
  } else {
    throw std::invalid_argument("measure: unknown kind \"" + out.kind + "\"");
  }
  return out;
}

inline LoadedMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path);
  json spec;
  in >> spec;
  return parse_measure(spec);
}

inline json measure_to_json(const CubeMeasure& nu) {
  json atoms = json::array();
  for (State x = 0; x < (State{1} << nu.n()); ++x)
    if (nu[x] > 0.0)
      atoms.push_back({{"state", format_bitstring_state(x, nu.n())}, {"p", nu[x]}});
  return {{"kind", "cube"}, {"n", nu.n()}, {"atoms", atoms}};
}

inline json measure_to_json(const SliceMeasure& nu) {
  json atoms = json::array();
  for (const auto& [x, p] : nu.atoms()) {
    json idx = json::array();
    for (int v = 0; v < nu.n(); ++v)
      if ((x >> v) & 1u) idx.push_back(v);
    atoms.push_back({{"state", idx}, {"p", p}});
  }
  return {{"kind", "slice"}, {"n", nu.n()}, {"k", nu.k()}, {"atoms", atoms}};
}

inline SearchConfig parse_search_config(const json& spec) {
  SearchConfig cfg;
  cfg.max_support_exact = spec.value("max_support_exact", cfg.max_support_exact);
  cfg.multistarts = spec.value("multistarts", cfg.multistarts);
  cfg.seed = spec.value("seed", cfg.seed);
  return cfg;
}

inline ConservationConfig parse_conservation_config(const json& spec) {
  ConservationConfig cfg;
  cfg.k = spec.at("k").get<int>();
  cfg.ell = spec.at("ell").get<int>();
  cfg.d = spec.value("d", cfg.d);
  cfg.gamma = spec.value("gamma", cfg.gamma);
  cfg.delta = spec.value("delta", cfg.delta);
  if (spec.contains("f")) {
    const auto& fs = spec.at("f");
    cfg.f.kind = fs.value("kind", cfg.f.kind);
    cfg.f.scale = fs.value("scale", cfg.f.scale);
    cfg.f.vertex = fs.value("vertex", cfg.f.vertex);
    cfg.f.seed = fs.value("seed", cfg.f.seed);
  }
  cfg.mode = spec.value("mode", cfg.mode);
  cfg.samples = spec.value("samples", cfg.samples);
  cfg.seed = spec.value("seed", cfg.seed);
  return cfg;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json spec;
  in >> spec;
  return spec;
}

inline json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline void to_json(json& j, const MatrixNorms& n) {
  j = {{"op", n.op}, {"one_to_one", n.one_to_one}, {"inf_to_inf", n.inf_to_inf}};
}

inline void to_json(json& j, const AlphaReport& r) {
  j = {{"alpha", r.alpha},
       {"worst_pin", [&] {
          json pins = json::array();
          for (int i = 0; i < r.worst_pin.size(); ++i) pins.push_back(r.worst_pin[i]);
          return pins;
        }()},
       {"mode", r.mode},
       {"pins_tested", r.pins_tested}};
}

inline void to_json(json& j, const LipschitzReport& r) {
  j = {{"max_ratio", r.max_ratio}, {"ok", r.ok}, {"samples", r.samples}};
}

inline void to_json(json& j, const StabilityReport& r) {
  j = {{"max_ratio", r.max_ratio},
       {"bound", r.bound},
       {"ok", r.ok},
       {"used", r.used},
       {"skipped", r.skipped}};
}

inline void to_json(json& j, const EntropicIndependenceReport& r) {
  j = {{"c_used", r.c_used},   {"max_ratio", r.max_ratio}, {"alpha", r.alpha},
       {"b", r.b},             {"ok", r.ok},               {"chain_ok", r.chain_ok},
       {"used", r.used},       {"skipped", r.skipped}};
}

inline void to_json(json& j, const MartingaleCheck& r) {
  j = {{"mc_mean", r.mc_mean}, {"target", r.target}, {"z_scores", r.z_scores},
       {"trials", r.trials}};
}

inline void to_json(json& j, const ResidualUniformityReport& r) {
  j = {{"ok", r.ok}, {"max_gap", r.max_gap}, {"states_checked", r.states_checked}};
}

inline void to_json(json& j, const DecompositionReport& r) {
  j = {{"lhs", r.lhs},
       {"rhs", r.rhs},
       {"gap", r.gap},
       {"worst_state", r.worst_state},
       {"states_checked", r.states_checked}};
}

inline void to_json(json& j, const ConservationReport& r) {
  j = {{"ratio", r.ratio},
       {"per_step_c", r.per_step_c},
       {"product_bound", r.product_bound},
       {"mode", r.mode},
       {"standard_error", r.standard_error},
       {"initial_entropy", r.initial_entropy},
       {"step_entropy", r.step_entropy},
       {"precondition_violated", r.precondition_violated}};
}

inline void to_json(json& j, const DvSparseBound& r) {
  j = {{"value", r.value}, {"v", r.v.coeffs()}, {"exact", r.exact}};
}

}  // namespace sparseloc

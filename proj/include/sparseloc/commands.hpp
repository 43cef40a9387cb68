#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "sparseloc/graph_gen.hpp"
#include "sparseloc/indep_sets.hpp"
#include "sparseloc/json_io.hpp"
#include "sparseloc/localization.hpp"
#include "sparseloc/oracles.hpp"

namespace sparseloc {

/// Bad invocation (unknown command, unreadable file, malformed config);
/// mapped to exit code 2, as opposed to a failed assertion (exit 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunReport {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  json results;
  std::int64_t wall_time_ms = 0;
  bool ok = true;
};

inline json run_report_to_json(const RunReport& r) {
  return {{"command", r.command},
          {"config_hash", r.config_hash},
          {"seed", r.seed},
          {"results", r.results},
          {"wall_time_ms", r.wall_time_ms}};
}

/// Flag values; empty/default means "take it from the config file".
struct CliOptions {
  bool seed_set = false;
  std::uint64_t seed = 0;
  std::string mode;
  std::string csv_path;
  int threads = 1;
};

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

}  // namespace detail

inline json load_json_or_usage(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open file: " + path);
  try {
    json spec;
    in >> spec;
    return spec;
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct NamedMeasure {
  std::string name;
  CubeMeasure measure;
};

/// Deterministic suite for the verification commands: product measures,
/// uniform independent-set pushforwards, and seeded random tilts of the
/// uniform cube.
inline std::vector<NamedMeasure> make_test_measures(int count, std::uint64_t seed) {
  std::vector<NamedMeasure> out;
  auto add = [&](std::string name, CubeMeasure m) {
    if (static_cast<int>(out.size()) < count)
      out.push_back({std::move(name), std::move(m)});
  };
  add("product_n4", product_measure({0.2, -0.5, 0.0, 0.7}));
  add("product_n6", product_measure({0.3, -0.3, 0.3, -0.3, 0.3, -0.3}));
  add("uniform_n3", CubeMeasure::uniform(3));
  add("c4_pairs", slice_to_cube(uniform_ik(cycle_graph(4), 2)));
  add("p5_pairs", slice_to_cube(uniform_ik(path_graph(5), 2)));
  add("c6_triples", slice_to_cube(uniform_ik(cycle_graph(6), 3)));
  add("grid23_pairs", slice_to_cube(uniform_ik(grid_graph(2, 3), 2)));
  add("p8_triples", slice_to_cube(uniform_ik(path_graph(8), 3)));
  Rng rng(derive_seed(seed, "test_measures", 0));
  for (int i = 0; static_cast<int>(out.size()) < count; ++i) {
    const int n = 4 + i % 3;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = 1.5 * (2.0 * rng.next_double() - 1.0);
    add("tilted_uniform_n" + std::to_string(n) + "_" + std::to_string(i),
        tilt(CubeMeasure::uniform(n), TiltVector(v)));
  }
  return out;
}

namespace detail {

inline json verify_kyfan(const json& cfg, std::uint64_t seed) {
  const int samples = cfg.value("samples", 1000);
  const int n_max = cfg.value("n_max", 64);
  Rng rng(derive_seed(seed, "verify_kyfan", 0));
  static constexpr double kScales[] = {0.1, 1.0, 10.0};
  bool ok = true;
  double worst_lower = 0.0, worst_upper = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int n = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_max)));
    const int m = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& e : x) e = rng.next_normal() * kScales[s % 3];
    const double full = kyfan_norm_sq(x, n);
    const double val = kyfan_norm_sq(x, m);
    // Cross-multiplied form of (m/n) full <= val: products of a double by an
    // integer <= 64 are exact in long double, so no rounding slack is needed.
    const long double lhs = static_cast<long double>(m) * full;
    const long double rhs = static_cast<long double>(n) * val;
    if (!(lhs <= rhs && val <= full)) ok = false;
    worst_lower = std::max(worst_lower, static_cast<double>((lhs - rhs) / n));
    worst_upper = std::max(worst_upper, val - full);
  }
  return {{"samples", samples},
          {"worst_lower_excess", worst_lower},
          {"worst_upper_excess", worst_upper},
          {"ok", ok}};
}

inline json verify_conjugate(const json& cfg, std::uint64_t seed) {
  const int samples = cfg.value("samples", 200);
  const int n_max = cfg.value("n_max", 12);
  const double tol = cfg.value("tol", 1e-9);
  Rng rng(derive_seed(seed, "verify_conjugate", 0));
  static constexpr double kEps[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  static constexpr double kC[] = {0.1, 0.3, 0.5, 0.8, 1.0};
  bool ok = true;
  double max_gap = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int n = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_max)));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& e : x) e = rng.next_normal() * (s % 2 ? 3.0 : 0.5);
    const double eps = kEps[s % 5];
    const SparseFamily fam(n, kC[(s / 5) % 5]);
    const double val = sparse_conjugate(x, eps, fam);
    const double oracle = oracles::sparse_conjugate_enum(x, eps, fam);
    max_gap = std::max(max_gap, std::fabs(val - oracle));
    if (std::fabs(val - oracle) > tol) ok = false;
    if (val + 1e-9 < fam.c / (2.0 * eps) * kyfan_norm_sq(x, n)) ok = false;
  }
  return {{"samples", samples}, {"max_gap", max_gap}, {"ok", ok}};
}

inline json verify_lipschitz(const json& cfg, std::uint64_t seed) {
  const int measures = cfg.value("measures", 10);
  const int samples = cfg.value("samples", 100);
  const double c = cfg.value("c", 0.5);
  bool ok = true;
  json per = json::array();
  int idx = 0;
  for (const auto& [name, nu] : make_test_measures(measures, seed)) {
    const SparseFamily fam(nu.n(), c);
    const double alpha = measure_restricted_alpha(nu, fam).alpha;
    const auto rep =
        lipschitz_check(nu, fam, alpha, samples, derive_seed(seed, "verify_lipschitz", idx++));
    ok = ok && rep.ok;
    per.push_back({{"measure", name},
                   {"alpha", alpha},
                   {"bound", 4.0 * alpha},
                   {"max_ratio", rep.max_ratio},
                   {"ok", rep.ok}});
  }
  return {{"measures", per}, {"ok", ok}};
}

inline json verify_stability(const json& cfg, std::uint64_t seed) {
  const int measures = cfg.value("measures", 10);
  const int family = cfg.value("family", 200);
  const double c = cfg.value("c", 0.5);
  bool ok = true;
  json per = json::array();
  int idx = 0;
  for (const auto& [name, nu] : make_test_measures(measures, seed)) {
    const SparseFamily fam(nu.n(), c);
    const double alpha = measure_restricted_alpha(nu, fam).alpha;
    const auto mu_family = make_mu_family(nu, family, derive_seed(seed, "verify_stability", idx++));
    const auto rep = quadratic_stability_check(nu, fam, alpha, mu_family);
    ok = ok && rep.ok;
    per.push_back({{"measure", name},
                   {"alpha", alpha},
                   {"bound", rep.bound},
                   {"max_ratio", rep.max_ratio},
                   {"used", rep.used},
                   {"ok", rep.ok}});
  }
  return {{"measures", per}, {"ok", ok}};
}

inline json verify_entropic(const json& cfg, std::uint64_t seed) {
  const int n_max = cfg.value("n_max", 6);
  const int max_degree = cfg.value("max_degree", 3);
  const int family = cfg.value("family", 200);
  const double c = cfg.value("c", 0.5);
  bool ok = true;
  int instances = 0, skipped = 0;
  double worst_fraction = 0.0;  // max_ratio / c_used, worst case
  std::uint64_t task = 0;
  for (const auto& g : connected_graphs_up_to_iso_all_sizes(n_max, max_degree)) {
    for (int k = 1; k <= g.n(); ++k) {
      const auto sets = enumerate_ik(g, k);
      if (sets.size() < 2) continue;
      const auto nu = uniform_ik(g, k);
      const SparseFamily fam(g.n(), c);
      const auto mu_family =
          make_slice_mu_family(nu, family, derive_seed(seed, "verify_entropic", task++));
      const auto rep = entropic_independence_check(nu, fam, mu_family);
      ok = ok && rep.ok;
      if (rep.used == 0) ++skipped;
      if (rep.c_used > 0.0)
        worst_fraction = std::max(worst_fraction, rep.max_ratio / rep.c_used);
      ++instances;
    }
  }
  return {{"instances", instances},
          {"degenerate", skipped},
          {"worst_ratio_fraction", worst_fraction},
          {"ok", ok}};
}

inline json verify_residual(const json& cfg, std::uint64_t /*seed*/) {
  const int n_max = cfg.value("n_max", 5);
  const double tol = cfg.value("tol", 1e-10);
  bool ok = true;
  int instances = 0;
  double max_gap = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    for (const auto& g : connected_graphs_up_to_iso(n, n)) {
      for (int k = 1; k <= g.n(); ++k) {
        if (enumerate_ik(g, k).empty()) break;
        for (int t = 0; t <= k; ++t) {
          const auto rep = residual_uniformity_check(g, k, t, 2'000'000, tol);
          ok = ok && rep.ok;
          max_gap = std::max(max_gap, rep.max_gap);
          ++instances;
        }
      }
    }
  }
  return {{"instances", instances}, {"max_gap", max_gap}, {"ok", ok}};
}

inline json verify_decomposition(const json& cfg, std::uint64_t seed) {
  const int samples = cfg.value("samples", 50);
  const double tol = cfg.value("tol", 1e-10);
  Rng rng(derive_seed(seed, "verify_decomposition", 0));
  static constexpr double kScales[] = {0.5, 1.0, 2.0};
  bool ok = true;
  double max_gap = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int n = 4 + static_cast<int>(rng.next_below(4));
    const int extra = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const auto g = random_connected_graph(n, extra, rng);
    int k_max = 0;
    while (k_max < g.n() && !enumerate_ik(g, k_max + 1).empty()) ++k_max;
    if (k_max < 1) continue;
    const int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k_max)));
    const int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
    FSpec fspec;
    fspec.scale = kScales[s % 3];
    fspec.seed = derive_seed(seed, "verify_decomposition_f", static_cast<std::uint64_t>(s));
    const auto rep = one_step_decomposition_check(g, k, t, make_f(fspec, g.n()));
    max_gap = std::max(max_gap, rep.gap);
    if (rep.gap > tol) ok = false;
  }
  return {{"samples", samples}, {"max_gap", max_gap}, {"ok", ok}};
}

inline json verify_dv(const json& cfg, std::uint64_t seed) {
  const int samples = cfg.value("samples", 100);
  Rng rng(derive_seed(seed, "verify_dv", 0));
  bool ok = true;
  double min_gap = 0.0, max_opt_gap = 0.0, max_sparse_excess = 0.0;
  const SearchConfig search = parse_search_config(cfg.value("search", json::object()));
  for (int s = 0; s < samples; ++s) {
    const int n = 2 + static_cast<int>(rng.next_below(5));
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> wn(size), wm(size);
    for (std::size_t i = 0; i < size; ++i) {
      wn[i] = std::exp(rng.next_normal());
      wm[i] = std::exp(rng.next_normal());
    }
    const auto nu = CubeMeasure::from_weights(n, wn);
    const auto mu = CubeMeasure::from_weights(n, wm);
    std::vector<double> phi(size);
    for (double& e : phi) e = rng.next_normal() * 2.0;
    const double gap = dv_gap(mu, nu, [&](State x) { return phi[x]; });
    min_gap = std::min(min_gap, gap);
    if (gap < -1e-10) ok = false;
    const double opt_gap = dv_gap(mu, nu, [&](State x) { return std::log(mu[x] / nu[x]); });
    max_opt_gap = std::max(max_opt_gap, std::fabs(opt_gap));
    if (std::fabs(opt_gap) > 1e-10) ok = false;
    if (s % 5 == 0) {
      const SparseFamily fam(n, s % 10 ? 0.5 : 1.0);
      const double kl = divergences(mu, nu).kl;
      const double bound = dv_sparse_bound(mu, nu, fam, search).value;
      max_sparse_excess = std::max(max_sparse_excess, bound - kl);
      if (bound > kl + 1e-9 || bound < -1e-12) ok = false;
    }
  }
  return {{"samples", samples},
          {"min_gap", min_gap},
          {"max_optimizer_gap", max_opt_gap},
          {"max_sparse_excess", max_sparse_excess},
          {"ok", ok}};
}

}  // namespace detail

inline RunReport cmd_influence(const std::string& measure_path) {
  detail::Stopwatch sw;
  const json spec = load_json_or_usage(measure_path);
  RunReport rep;
  rep.command = "influence";
  rep.config_hash = fnv1a_hex(spec.dump());
  LoadedMeasure loaded;
  try {
    loaded = parse_measure(spec);
  } catch (const json::exception& e) {
    throw UsageError(measure_path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(measure_path + ": " + e.what());
  }
  const CubeMeasure nu = loaded.as_cube();
  const auto summary = influence_summary(nu);
  const auto sim = similarity_check(summary);
  rep.results["n"] = nu.n();
  rep.results["kind"] = loaded.kind;
  rep.results["active"] = summary.active;
  rep.results["psi"] = matrix_to_json(summary.psi);
  rep.results["psi_norms"] = json(matrix_norms(summary.psi));
  rep.results["cor_norms"] = json(matrix_norms(summary.cor));
  rep.results["cov_norms"] = json(matrix_norms(summary.cov));
  rep.results["similarity_gap"] = sim.similarity_gap;
  rep.results["trace_gap"] = sim.trace_gap;
  rep.results["norm_product_bound"] = sim.norm_product_bound;
  rep.results["norm_bound_ok"] = sim.op_psi <= sim.norm_product_bound + 1e-9;
  rep.results["ok"] = sim.ok;
  rep.ok = sim.ok;
  rep.wall_time_ms = sw.ms();
  return rep;
}

inline RunReport cmd_verify(const std::string& check, json cfg, const CliOptions& opt) {
  if (opt.seed_set) cfg["seed"] = opt.seed;
  detail::Stopwatch sw;
  RunReport rep;
  rep.command = "verify " + check;
  rep.config_hash = fnv1a_hex(cfg.dump());
  rep.seed = cfg.value("seed", std::uint64_t{0});
  using Check = json (*)(const json&, std::uint64_t);
  static const std::vector<std::pair<std::string, Check>> table = {
      {"kyfan", detail::verify_kyfan},           {"conjugate", detail::verify_conjugate},
      {"lipschitz", detail::verify_lipschitz},   {"stability", detail::verify_stability},
      {"entropic", detail::verify_entropic},     {"residual", detail::verify_residual},
      {"decomposition", detail::verify_decomposition}, {"dv", detail::verify_dv},
  };
  for (const auto& [name, fn] : table) {
    if (name == check) {
      rep.results = fn(cfg, rep.seed);
      rep.ok = rep.results.value("ok", false);
      rep.wall_time_ms = sw.ms();
      return rep;
    }
  }
  std::string known;
  for (const auto& [name, _] : table) known += (known.empty() ? "" : ", ") + name;
  throw UsageError("unknown check \"" + check + "\" (known: " + known + ")");
}

inline RunReport cmd_conserve(const std::string& graph_path, json cfg, const CliOptions& opt) {
  if (opt.seed_set) cfg["seed"] = opt.seed;
  if (!opt.mode.empty()) cfg["mode"] = opt.mode;
  detail::Stopwatch sw;
  RunReport rep;
  rep.command = "conserve";
  rep.config_hash = fnv1a_hex(cfg.dump());
  rep.seed = cfg.value("seed", std::uint64_t{0});
  Graph g(1);
  try {
    g = load_graph(graph_path);
  } catch (const std::exception& e) {
    throw UsageError(graph_path + ": " + e.what());
  }
  ConservationConfig ccfg;
  try {
    ccfg = parse_conservation_config(cfg);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const auto report = entropy_conservation_experiment(g, ccfg);
  rep.results = json(report);
  rep.results["graph"] = {{"n", g.n()}, {"edges", g.num_edges()}};
  rep.ok = report.ratio > 0.0 && report.ratio <= 1.0 + 1e-9;
  rep.results["ok"] = rep.ok;
  if (!opt.csv_path.empty()) {
    std::ofstream csv(opt.csv_path);
    if (!csv) throw UsageError("cannot write CSV file: " + opt.csv_path);
    csv << "t,entropy\n";
    for (std::size_t t = 0; t < report.step_entropy.size(); ++t)
      csv << t << "," << report.step_entropy[t] << "\n";
  }
  rep.wall_time_ms = sw.ms();
  return rep;
}

}  // namespace sparseloc

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sparseloc/divergence.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/graph.hpp"
#include "sparseloc/matrix.hpp"
#include "sparseloc/measure.hpp"
#include "sparseloc/rng.hpp"

namespace sparseloc {

/// Independent sets of size k inside the allowed vertex mask, as bitmasks in
/// lexicographic order of their sorted vertex lists. Branch and bound: extend
/// by increasing vertex index, prune when the remaining pool is too small.
inline std::vector<std::uint32_t> enumerate_ik(const Graph& g, int k,
                                               std::uint32_t allowed = ~std::uint32_t{0}) {
  allowed &= g.all_vertices_mask();
  if (k < 0 || k > g.n()) throw std::invalid_argument("enumerate_ik: k out of range");
  std::vector<std::uint32_t> out;
  std::vector<int> chosen;
  auto rec = [&](auto&& self, int from, std::uint32_t current, std::uint32_t pool,
                 int need) -> void {
    if (need == 0) {
      out.push_back(current);
      return;
    }
    for (int v = from; v < g.n(); ++v) {
      if (!((pool >> v) & 1u)) continue;
      const std::uint32_t above = pool >> v;
      if (std::popcount(above) < need) return;
      self(self, v + 1, current | (std::uint32_t{1} << v),
           pool & ~(std::uint32_t{1} << v) & ~g.neighbors(v), need - 1);
    }
  };
  rec(rec, 0, 0, allowed, k);
  return out;
}

inline SliceMeasure uniform_ik(const Graph& g, int k) {
  const auto sets = enumerate_ik(g, k);
  if (sets.empty())
    throw EmptySlice("uniform_ik: no independent sets of size " + std::to_string(k));
  return SliceMeasure::uniform_over(g.n(), k, sets);
}

/// Critical density constant for degree-Delta graphs:
///   (Delta-1)^(Delta-1) / ((Delta-2)^Delta + (Delta+1)(Delta-1)^(Delta-1)).
inline double alpha_c(int delta) {
  if (delta < 3) throw std::invalid_argument("alpha_c: requires Delta >= 3");
  const long double a = std::pow(static_cast<long double>(delta - 1), delta - 1);
  const long double b = std::pow(static_cast<long double>(delta - 2), delta);
  return static_cast<double>(a / (b + (delta + 1) * a));
}

/// Exact reduced fraction for alpha_c; throws on 64-bit overflow.
inline std::pair<std::uint64_t, std::uint64_t> alpha_c_rational(int delta) {
  if (delta < 3) throw std::invalid_argument("alpha_c_rational: requires Delta >= 3");
  auto checked_mul = [](std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
      throw std::overflow_error("alpha_c_rational: 64-bit overflow");
    return r;
  };
  auto checked_pow = [&](std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
  };
  const std::uint64_t num = checked_pow(static_cast<std::uint64_t>(delta - 1), delta - 1);
  std::uint64_t den = checked_pow(static_cast<std::uint64_t>(delta - 2), delta);
  std::uint64_t r;
  if (__builtin_add_overflow(den, checked_mul(static_cast<std::uint64_t>(delta + 1), num), &r))
    throw std::overflow_error("alpha_c_rational: 64-bit overflow");
  den = r;
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

/// State of the vertex-pinning chain: after t pins the surviving vertices are
/// those outside the pinned set and its neighborhood.
struct ChainState {
  int t = 0;
  std::vector<int> pinned;
  std::uint32_t residual_mask = 0;
  int remaining_k = 0;

  std::uint32_t pinned_mask() const {
    std::uint32_t m = 0;
    for (int v : pinned) m |= std::uint32_t{1} << v;
    return m;
  }
};

inline ChainState initial_chain_state(const Graph& g, int k) {
  if (k < 0 || k > g.n()) throw std::invalid_argument("initial_chain_state: k out of range");
  ChainState s;
  s.residual_mask = g.all_vertices_mask();
  s.remaining_k = k;
  return s;
}

/// Pins the next vertex of the target set and removes it plus its neighbors
/// from the residual graph.
inline ChainState chain_step(const Graph& g, const ChainState& s, std::uint32_t target,
                             int next_vertex) {
  if (s.remaining_k <= 0) throw std::out_of_range("chain_step: ordering exhausted");
  if (!g.is_independent(target)) throw std::invalid_argument("chain_step: target not independent");
  const std::uint32_t bit = std::uint32_t{1} << next_vertex;
  if (!(target & bit)) throw std::invalid_argument("chain_step: vertex not in target set");
  if (s.pinned_mask() & bit) throw std::invalid_argument("chain_step: vertex already pinned");
  if ((s.pinned_mask() & target) != s.pinned_mask())
    throw std::invalid_argument("chain_step: target does not extend the pinned set");
  ChainState out = s;
  out.t = s.t + 1;
  out.pinned.push_back(next_vertex);
  out.residual_mask = s.residual_mask & ~bit & ~g.neighbors(next_vertex);
  out.remaining_k = s.remaining_k - 1;
  return out;
}

struct ChainTrace {
  std::uint32_t target = 0;
  std::vector<int> order;
  std::vector<ChainState> states;  // states[t] after t pins, t = 0..T
};

inline ChainTrace run_chain(const Graph& g, int k, std::uint32_t target,
                            const std::vector<int>& order, int steps) {
  ChainTrace trace;
  trace.target = target;
  trace.order = order;
  trace.states.push_back(initial_chain_state(g, k));
  for (int t = 0; t < steps; ++t)
    trace.states.push_back(
        chain_step(g, trace.states.back(), target, order[static_cast<std::size_t>(t)]));
  return trace;
}

struct ResidualUniformityReport {
  bool ok = true;
  double max_gap = 0.0;
  int states_checked = 0;
};

/// Enumerates every (target set, ordered t-prefix) pair, accumulates the
/// conditional law of the remaining vertices given the pinned set, and
/// compares it with the uniform distribution on the residual independent
/// sets. Exact; throws BudgetExceeded above the pair budget.
inline ResidualUniformityReport residual_uniformity_check(const Graph& g, int k, int t,
                                                          std::uint64_t max_pairs = 2'000'000,
                                                          double tol = 1e-10) {
  if (t < 0 || t > k) throw std::invalid_argument("residual_uniformity_check: t out of range");
  const auto sets = enumerate_ik(g, k);
  if (sets.empty()) throw EmptySlice("residual_uniformity_check: empty slice");
  std::uint64_t perms = 1;
  for (int j = 0; j < t; ++j) perms *= static_cast<std::uint64_t>(k - j);
  if (sets.size() * perms > max_pairs)
    throw BudgetExceeded("residual_uniformity_check: too many (set, prefix) pairs");

  // joint[S][J] accumulates P[prefix set = S, remainder = J].
  std::map<std::uint32_t, std::map<std::uint32_t, double>> joint;
  const double pair_weight = 1.0 / (static_cast<double>(sets.size()) * static_cast<double>(perms));
  std::vector<int> members;
  for (std::uint32_t target : sets) {
    members.clear();
    for (int v = 0; v < g.n(); ++v)
      if ((target >> v) & 1u) members.push_back(v);
    // All ordered prefixes of length t from the k members.
    std::vector<int> prefix;
    auto rec = [&](auto&& self, std::uint32_t used) -> void {
      if (static_cast<int>(prefix.size()) == t) {
        std::uint32_t s_mask = 0;
        for (int v : prefix) s_mask |= std::uint32_t{1} << v;
        joint[s_mask][target & ~s_mask] += pair_weight;
        return;
      }
      for (std::size_t j = 0; j < members.size(); ++j) {
        if ((used >> j) & 1u) continue;
        prefix.push_back(members[j]);
        self(self, used | (std::uint32_t{1} << j));
        prefix.pop_back();
      }
    };
    rec(rec, 0);
  }

  ResidualUniformityReport rep;
  for (const auto& [s_mask, remainders] : joint) {
    const std::uint32_t residual =
        g.all_vertices_mask() & ~s_mask & ~g.neighborhood(s_mask);
    const auto fiber = enumerate_ik(g, k - t, residual);
    double total = 0.0;
    for (const auto& [_, p] : remainders) total += p;
    const double uniform = 1.0 / static_cast<double>(fiber.size());
    if (remainders.size() != fiber.size()) {
      rep.ok = false;
      rep.max_gap = 1.0;
    }
    for (std::uint32_t j : fiber) {
      const auto it = remainders.find(j);
      const double p = it == remainders.end() ? 0.0 : it->second / total;
      rep.max_gap = std::max(rep.max_gap, std::fabs(p - uniform));
    }
    ++rep.states_checked;
  }
  rep.ok = rep.ok && rep.max_gap <= tol;
  return rep;
}

struct DensityWindowReport {
  bool preconditions_ok = true;
  bool window_ok = true;
  bool residual_size_ok = true;  // n_t >= n - (Delta+1) t along the trace
  int first_violation_t = -1;
};

/// Checks d*gamma*n_t <= k - t <= (1-delta)*alpha_c(Delta)*n_t at every step
/// of the trace up to k - ell, plus the vertex-count lower bound. Precondition
/// failures are reported, not thrown.
inline DensityWindowReport density_window_check(const Graph& g, int k, int ell, double d,
                                                double gamma, double delta,
                                                const ChainTrace& trace) {
  DensityWindowReport rep;
  const int n = g.n();
  const int deg = std::max(3, g.max_degree());
  const double ac = alpha_c(deg);
  if (!(ell >= d * k) || !(gamma * n <= k) || !(k <= (1.0 - delta) * ac * n))
    rep.preconditions_ok = false;
  const int limit = std::min<int>(static_cast<int>(trace.states.size()) - 1, k - ell);
  for (int t = 0; t <= limit; ++t) {
    const int n_t = std::popcount(trace.states[static_cast<std::size_t>(t)].residual_mask);
    if (n_t < n - (deg + 1) * t) rep.residual_size_ok = false;
    const bool lower = d * gamma * n_t <= k - t + 1e-12;
    const bool upper = k - t <= (1.0 - delta) * ac * n_t + 1e-12;
    if (!(lower && upper)) {
      rep.window_ok = false;
      if (rep.first_violation_t < 0) rep.first_violation_t = t;
    }
  }
  return rep;
}

namespace detail {

/// Everything the decomposition and conservation checks need about one chain
/// state: the fiber of completions, f restricted to it, its entropy, and the
/// base and f-tilted single-vertex marginals.
struct FiberData {
  std::vector<std::uint32_t> fiber;  // remainders J with S + J independent of size k
  double mean_f = 0.0;               // E_{nu_t}[f(S + .)]
  double ent_f = 0.0;                // Ent_{nu_t}[f(S + .)]
  std::vector<double> q;             // base vertex marginal over [n]
  std::vector<double> p;             // f-tilt vertex marginal over [n]
  double kl_pq = 0.0;
};

inline FiberData fiber_data(const Graph& g, std::uint32_t pinned_mask, std::uint32_t residual,
                            int r, const std::function<double(std::uint32_t)>& f) {
  FiberData d;
  d.fiber = enumerate_ik(g, r, residual);
  const std::size_t n = static_cast<std::size_t>(g.n());
  d.q.assign(n, 0.0);
  d.p.assign(n, 0.0);
  if (d.fiber.empty() || r == 0) {
    if (!d.fiber.empty()) d.mean_f = f(pinned_mask);
    return d;
  }
  const double w = 1.0 / static_cast<double>(d.fiber.size());
  long double ef = 0.0L, eflogf = 0.0L;
  for (std::uint32_t j : d.fiber) {
    const double fv = f(pinned_mask | j);
    if (!(fv >= 0.0)) throw std::invalid_argument("fiber_data: f must be nonnegative");
    ef += w * fv;
    eflogf += w * xlogx(fv);
    for (std::uint32_t rest = j; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      d.q[static_cast<std::size_t>(v)] += w;
      d.p[static_cast<std::size_t>(v)] += w * fv;
    }
  }
  d.mean_f = static_cast<double>(ef);
  d.ent_f = ef > 0.0L ? static_cast<double>(eflogf - ef * std::log(ef)) : 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    d.q[v] /= r;
    d.p[v] = d.mean_f > 0.0 ? d.p[v] / (r * d.mean_f) : 0.0;
  }
  if (d.mean_f > 0.0) {
    long double kl = 0.0L;
    for (std::size_t v = 0; v < n; ++v) {
      if (d.p[v] == 0.0) continue;
      kl += static_cast<long double>(d.p[v]) * std::log(static_cast<long double>(d.p[v]) / d.q[v]);
    }
    d.kl_pq = static_cast<double>(kl);
  }
  return d;
}

}  // namespace detail

struct DecompositionReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  std::uint32_t worst_state = 0;  // pinned mask attaining the largest gap
  int states_checked = 0;
};

/// Verifies, at every reachable pinned set of size t, the one-step identity
///   E_{i ~ q_t}[ Ent_{nu_{t+1}}[f] ] = Ent_{nu_t}[f] - E_{nu_t}[f] KL(p_t || q_t),
/// where q_t is the base single-vertex marginal and p_t its f-tilted version.
/// Reports the worst absolute gap.
inline DecompositionReport one_step_decomposition_check(
    const Graph& g, int k, int t, const std::function<double(std::uint32_t)>& f) {
  if (t < 0 || t >= k) throw std::invalid_argument("one_step_decomposition_check: need 0 <= t < k");
  const auto pin_sets = enumerate_ik(g, t);
  DecompositionReport rep;
  for (std::uint32_t s_mask : pin_sets) {
    const std::uint32_t residual =
        g.all_vertices_mask() & ~s_mask & ~g.neighborhood(s_mask);
    const auto data = detail::fiber_data(g, s_mask, residual, k - t, f);
    if (data.fiber.empty()) continue;  // not reachable by the chain
    if (!(data.mean_f > 0.0))
      throw std::invalid_argument("one_step_decomposition_check: f vanishes on a fiber");
    long double lhs = 0.0L;
    for (int v = 0; v < g.n(); ++v) {
      const double qv = data.q[static_cast<std::size_t>(v)];
      if (qv == 0.0) continue;
      const std::uint32_t bit = std::uint32_t{1} << v;
      const std::uint32_t next_residual = residual & ~bit & ~g.neighbors(v);
      const auto next = detail::fiber_data(g, s_mask | bit, next_residual, k - t - 1, f);
      lhs += static_cast<long double>(qv) * next.ent_f;
    }
    const double rhs = data.ent_f - data.mean_f * data.kl_pq;
    const double gap = std::fabs(static_cast<double>(lhs) - rhs);
    if (gap >= rep.gap) {
      rep.gap = gap;
      rep.lhs = static_cast<double>(lhs);
      rep.rhs = rhs;
      rep.worst_state = s_mask;
    }
    ++rep.states_checked;
  }
  if (rep.states_checked == 0)
    throw EmptySlice("one_step_decomposition_check: no reachable states");
  return rep;
}

/// Positive test functions on k-subsets for the conservation experiments.
struct FSpec {
  std::string kind = "exp_linear";  // "exp_linear" | "one_plus_indicator"
  double scale = 1.0;
  int vertex = 0;           // for one_plus_indicator
  std::uint64_t seed = 0;   // for the Gaussian weights of exp_linear
};

inline std::function<double(std::uint32_t)> make_f(const FSpec& spec, int n) {
  if (spec.kind == "exp_linear") {
    Rng rng(derive_seed(spec.seed, "f_weights", 0));
    auto w = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
    for (double& x : *w) x = rng.next_normal() * spec.scale;
    return [w](std::uint32_t set) {
      double dot = 0.0;
      for (std::uint32_t rest = set; rest;) {
        const int v = std::countr_zero(rest);
        rest &= rest - 1;
        dot += (*w)[static_cast<std::size_t>(v)];
      }
      return std::exp(dot);
    };
  }
  if (spec.kind == "one_plus_indicator") {
    const std::uint32_t bit = std::uint32_t{1} << spec.vertex;
    return [bit](std::uint32_t set) { return set & bit ? 2.0 : 1.0; };
  }
  throw std::invalid_argument("make_f: unknown kind \"" + spec.kind + "\"");
}

struct ConservationConfig {
  int k = 2;
  int ell = 1;
  double d = 0.5;
  double gamma = 0.1;
  double delta = 0.1;
  FSpec f;
  std::string mode = "exact";  // "exact" | "mc"
  int samples = 10'000;
  std::uint64_t seed = 0;
};

struct ConservationReport {
  double ratio = 0.0;  // E[Ent_{nu_T}[f]] / Ent_{nu_0}[f]
  std::vector<double> per_step_c;  // worst (k-t) KL(p||q) E[f] / Ent over states
  double product_bound = 0.0;      // prod (1 - C_t/(k-t)), clipped at 1e-9
  std::string mode;
  double standard_error = 0.0;  // of the ratio, mc mode only
  double initial_entropy = 0.0;
  std::vector<double> step_entropy;  // E[Ent_{nu_t}[f]], t = 0..T
  bool precondition_violated = false;
};

inline ConservationReport entropy_conservation_experiment(const Graph& g,
                                                          const ConservationConfig& cfg) {
  if (cfg.ell < 1 || cfg.ell > cfg.k)
    throw std::invalid_argument("entropy_conservation_experiment: need 1 <= ell <= k");
  const int k = cfg.k;
  const int T = k - cfg.ell;
  const auto f = make_f(cfg.f, g.n());
  const auto sets = enumerate_ik(g, k);
  if (sets.empty()) throw EmptySlice("entropy_conservation_experiment: empty slice");

  ConservationReport rep;
  rep.mode = cfg.mode;
  {
    const int n = g.n();
    const int deg = std::max(3, g.max_degree());
    rep.precondition_violated = !(cfg.ell >= cfg.d * k && cfg.gamma * n <= k &&
                                  k <= (1.0 - cfg.delta) * alpha_c(deg) * n);
  }

  // Per-state data cache; the pinned mask determines the residual graph.
  std::map<std::uint32_t, detail::FiberData> cache;
  auto state_data = [&](std::uint32_t s_mask) -> const detail::FiberData& {
    auto it = cache.find(s_mask);
    if (it == cache.end()) {
      const std::uint32_t residual =
          g.all_vertices_mask() & ~s_mask & ~g.neighborhood(s_mask);
      it = cache
               .emplace(s_mask, detail::fiber_data(g, s_mask, residual,
                                                   k - std::popcount(s_mask), f))
               .first;
    }
    return it->second;
  };

  const auto& root = state_data(0);
  if (!(root.ent_f > 0.0))
    throw std::invalid_argument("entropy_conservation_experiment: zero initial entropy");
  rep.initial_entropy = root.ent_f;
  rep.per_step_c.assign(static_cast<std::size_t>(T), 0.0);

  if (cfg.mode == "exact") {
    std::uint64_t prefixes = 1;
    for (int j = 0; j < T; ++j) prefixes *= static_cast<std::uint64_t>(k - j);
    if (sets.size() * prefixes > 1'000'000)
      throw BudgetExceeded("entropy_conservation_experiment: instance too large for exact mode");
    std::map<std::uint32_t, double> dist{{0u, 1.0}};
    for (int t = 0; t <= T; ++t) {
      long double ent = 0.0L;
      std::map<std::uint32_t, double> next;
      for (const auto& [s_mask, prob] : dist) {
        const auto& data = state_data(s_mask);
        ent += static_cast<long double>(prob) * data.ent_f;
        if (t == T) continue;
        if (data.ent_f > 0.0) {
          const double c_t = (k - t) * data.kl_pq * data.mean_f / data.ent_f;
          rep.per_step_c[static_cast<std::size_t>(t)] =
              std::max(rep.per_step_c[static_cast<std::size_t>(t)], c_t);
        }
        for (int v = 0; v < g.n(); ++v) {
          const double qv = data.q[static_cast<std::size_t>(v)];
          if (qv > 0.0) next[s_mask | (std::uint32_t{1} << v)] += prob * qv;
        }
      }
      rep.step_entropy.push_back(static_cast<double>(ent));
      if (t < T) dist = std::move(next);
    }
    rep.ratio = rep.step_entropy.back() / rep.initial_entropy;
  } else if (cfg.mode == "mc") {
    if (cfg.samples < 1)
      throw std::invalid_argument("entropy_conservation_experiment: samples must be positive");
    std::vector<long double> step_sum(static_cast<std::size_t>(T) + 1, 0.0L);
    long double final_sq = 0.0L;
    Rng rng(derive_seed(cfg.seed, "conservation_mc", 0));
    std::vector<int> order;
    for (int s = 0; s < cfg.samples; ++s) {
      const std::uint32_t target = sets[rng.next_below(sets.size())];
      order.clear();
      for (int v = 0; v < g.n(); ++v)
        if ((target >> v) & 1u) order.push_back(v);
      rng.shuffle(order);
      std::uint32_t s_mask = 0;
      for (int t = 0; t <= T; ++t) {
        const auto& data = state_data(s_mask);
        step_sum[static_cast<std::size_t>(t)] += data.ent_f;
        if (t == T) {
          final_sq += static_cast<long double>(data.ent_f) * data.ent_f;
          break;
        }
        if (data.ent_f > 0.0) {
          const double c_t = (k - t) * data.kl_pq * data.mean_f / data.ent_f;
          rep.per_step_c[static_cast<std::size_t>(t)] =
              std::max(rep.per_step_c[static_cast<std::size_t>(t)], c_t);
        }
        s_mask |= std::uint32_t{1} << order[static_cast<std::size_t>(t)];
      }
    }
    for (int t = 0; t <= T; ++t)
      rep.step_entropy.push_back(
          static_cast<double>(step_sum[static_cast<std::size_t>(t)] / cfg.samples));
    rep.ratio = rep.step_entropy.back() / rep.initial_entropy;
    const long double avg = step_sum[static_cast<std::size_t>(T)] / cfg.samples;
    const long double var = std::max(0.0L, final_sq / cfg.samples - avg * avg);
    rep.standard_error = static_cast<double>(std::sqrt(var / cfg.samples)) / rep.initial_entropy;
  } else {
    throw std::invalid_argument("entropy_conservation_experiment: unknown mode \"" + cfg.mode +
                                "\"");
  }

  long double product = 1.0L;
  for (int t = 0; t < T; ++t)
    product *= 1.0L - rep.per_step_c[static_cast<std::size_t>(t)] / (k - t);
  rep.product_bound = std::max(static_cast<double>(product), 1e-9);
  return rep;
}

/// One down-up move: drop a uniform element of I, then re-add a uniform
/// vertex keeping the set independent at size k (the dropped vertex always
/// qualifies, so the walk never stalls).
inline std::uint32_t down_up_step(const Graph& g, int k, std::uint32_t set, Rng& rng) {
  if (std::popcount(set) != k || !g.is_independent(set))
    throw std::invalid_argument("down_up_step: set not an independent k-set");
  std::vector<int> members;
  for (int v = 0; v < g.n(); ++v)
    if ((set >> v) & 1u) members.push_back(v);
  const int drop = members[rng.next_below(members.size())];
  const std::uint32_t rest = set & ~(std::uint32_t{1} << drop);
  const std::uint32_t blocked = rest | g.neighborhood(rest);
  std::vector<int> additions;
  for (int v = 0; v < g.n(); ++v)
    if (!((blocked >> v) & 1u)) additions.push_back(v);
  return rest | (std::uint32_t{1} << additions[rng.next_below(additions.size())]);
}

/// Full transition matrix of the down-up walk, rows/columns indexed by
/// enumerate_ik order.
inline Matrix down_up_kernel(const Graph& g, int k) {
  const auto sets = enumerate_ik(g, k);
  if (sets.empty()) throw EmptySlice("down_up_kernel: empty slice");
  std::map<std::uint32_t, int> index;
  for (std::size_t i = 0; i < sets.size(); ++i) index[sets[i]] = static_cast<int>(i);
  const int size = static_cast<int>(sets.size());
  Matrix kernel(size, size);
  for (int i = 0; i < size; ++i) {
    const std::uint32_t set = sets[static_cast<std::size_t>(i)];
    for (int drop = 0; drop < g.n(); ++drop) {
      if (!((set >> drop) & 1u)) continue;
      const std::uint32_t rest = set & ~(std::uint32_t{1} << drop);
      const std::uint32_t blocked = rest | g.neighborhood(rest);
      std::vector<int> additions;
      for (int v = 0; v < g.n(); ++v)
        if (!((blocked >> v) & 1u)) additions.push_back(v);
      const double w = 1.0 / (static_cast<double>(k) * static_cast<double>(additions.size()));
      for (int v : additions)
        kernel(i, index.at(rest | (std::uint32_t{1} << v))) += w;
    }
  }
  return kernel;
}

}  // namespace sparseloc

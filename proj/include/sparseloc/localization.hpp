#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sparseloc/divergence.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/influence.hpp"
#include "sparseloc/measure.hpp"
#include "sparseloc/rng.hpp"
#include "sparseloc/sparse.hpp"

namespace sparseloc {

struct AlphaOptions {
  std::uint64_t enumeration_budget = 2'000'000;
  bool allow_sampling = false;
  int samples = 20'000;
  std::uint64_t seed = 0;
};

/// Maximum of |Psi(R_u nu)|_op over feasible sparse pins. Exact mode is a
/// true maximum over the family; sampled mode reports the maximum over a
/// seeded sample.
struct AlphaReport {
  double alpha = 0.0;
  PinVector worst_pin;
  std::string mode;
  std::uint64_t pins_tested = 0;
};

inline AlphaReport measure_restricted_alpha(const CubeMeasure& nu, const SparseFamily& fam,
                                            const AlphaOptions& opt = {}) {
  AlphaReport rep;
  rep.worst_pin = PinVector::none(nu.n());
  auto consider = [&](const PinVector& u) {
    const auto s = influence_summary(pin(nu, u));
    const double op = operator_norm(s.psi);
    ++rep.pins_tested;
    if (op > rep.alpha) {
      rep.alpha = op;
      rep.worst_pin = u;
    }
  };
  const std::uint64_t total = sparse_pin_count(fam.n, fam.m);
  if (total <= opt.enumeration_budget) {
    rep.mode = "exact";
    for (const auto& u : enumerate_sparse_pins(nu, fam, opt.enumeration_budget)) consider(u);
    return rep;
  }
  if (!opt.allow_sampling)
    throw BudgetExceeded("measure_restricted_alpha: " + std::to_string(total) +
                         " pins exceed the enumeration budget; enable sampling");
  rep.mode = "sampled";
  Rng rng(derive_seed(opt.seed, "restricted_alpha", 0));
  for (int i = 0; i < opt.samples; ++i) consider(sample_sparse_pin(nu, fam, rng));
  return rep;
}

struct LocalizationEvent {
  double time;
  int coordinate;
  int sign;
};

/// One sampled path of the continuous-time pinning process driven by v.
/// mu_t = pin(tilt(nu, (1-t)v), u(t)) can be replayed from the events.
struct LocalizationTrace {
  TiltVector v;
  std::vector<LocalizationEvent> events;
  PinVector final_pin;
  std::vector<std::vector<double>> mean_path;  // m(mu_t) just after each event
  std::uint64_t proposals = 0;
  double min_accept = 1.0;  // range of acceptance probabilities seen
  double max_accept = 0.0;
};

/// Simulates the jump process by per-coordinate thinning: coordinate i
/// proposes at rate 2|v_i| and accepts with probability
/// (1 + s_i m_i(pi_{t,u})) / 2, where pi_{t,u} = pin(tilt(nu, (1-t)v), u).
/// Accepted jumps pin the coordinate to s_i = sign(v_i) for good.
inline LocalizationTrace simulate_martingale(const CubeMeasure& nu, const TiltVector& v,
                                             std::uint64_t seed, bool record_mean_path = false) {
  if (v.size() != nu.n()) throw std::invalid_argument("simulate_martingale: dimension mismatch");
  LocalizationTrace trace;
  trace.v = v;
  trace.final_pin = PinVector::none(nu.n());

  const auto coords = v.support();
  Rng rng(derive_seed(seed, "martingale_path", 0));
  std::vector<double> next_time(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j)
    next_time[j] = rng.next_exponential(2.0 * std::fabs(v[coords[j]]));

  State support_mask = 0, plus_mask = 0;
  while (true) {
    int best = -1;
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < coords.size(); ++j) {
      if ((support_mask >> coords[j]) & 1u) continue;
      if (next_time[j] < t) {
        t = next_time[j];
        best = static_cast<int>(j);
      }
    }
    if (best < 0 || t >= 1.0) break;
    const int i = coords[static_cast<std::size_t>(best)];
    const int s = v[i] > 0.0 ? 1 : -1;
    ++trace.proposals;
    const double m_i = pinned_tilted_mean_coord(nu, v, 1.0 - t, support_mask, plus_mask, i);
    const double accept = 0.5 * (1.0 + s * m_i);
    if (accept < -1e-12 || accept > 1.0 + 1e-12)
      throw std::logic_error("simulate_martingale: acceptance probability out of range");
    trace.min_accept = std::min(trace.min_accept, accept);
    trace.max_accept = std::max(trace.max_accept, accept);
    if (rng.next_double() < accept) {
      support_mask |= State{1} << i;
      if (s > 0) plus_mask |= State{1} << i;
      trace.final_pin.set(i, s);
      trace.events.push_back({t, i, s});
      if (record_mean_path) {
        PinVector u = trace.final_pin;
        std::vector<double> scaled(v.coeffs());
        for (double& x : scaled) x *= 1.0 - t;
        trace.mean_path.push_back(mean(pin(tilt(nu, TiltVector(scaled)), u)));
      }
    }
    next_time[static_cast<std::size_t>(best)] =
        t + rng.next_exponential(2.0 * std::fabs(v[i]));
  }
  return trace;
}

struct MartingaleCheck {
  std::vector<double> mc_mean;
  std::vector<double> target;  // m(tilt(nu, v))
  std::vector<double> z_scores;
  std::uint64_t trials = 0;
};

/// Monte Carlo check that E[m(nu_1)] = m(T_v nu): averages the mean of the
/// final pinned measure over independent traces and reports per-coordinate
/// z-scores against the exact target.
inline MartingaleCheck martingale_mean_check(const CubeMeasure& nu, const TiltVector& v,
                                             std::uint64_t trials, std::uint64_t seed,
                                             int threads = 1) {
  if (trials == 0) throw std::invalid_argument("martingale_mean_check: trials must be positive");
  const int n = nu.n();
  MartingaleCheck out;
  out.trials = trials;
  out.target = tilted_mean(nu, v);

  const std::size_t chunk = 2048;
  const std::size_t n_chunks = (trials + chunk - 1) / chunk;
  std::vector<std::vector<long double>> sums(n_chunks), sqs(n_chunks);
  parallel_chunks(static_cast<std::size_t>(trials), chunk, threads,
                  [&](std::size_t ci, std::size_t begin, std::size_t end) {
                    std::vector<long double> sum(static_cast<std::size_t>(n), 0.0L);
                    std::vector<long double> sq(static_cast<std::size_t>(n), 0.0L);
                    // Final pins only set coordinates of supp(v) to sign(v_i),
                    // so the final measure is keyed by the jumped mask.
                    std::map<State, std::vector<double>> cache;
                    for (std::size_t trial = begin; trial < end; ++trial) {
                      const auto trace = simulate_martingale(
                          nu, v, derive_seed(seed, "martingale_trial", trial));
                      const State key = trace.final_pin.support_mask();
                      auto it = cache.find(key);
                      if (it == cache.end())
                        it = cache.emplace(key, mean(pin(nu, trace.final_pin))).first;
                      const auto& m = it->second;
                      for (int i = 0; i < n; ++i) {
                        sum[static_cast<std::size_t>(i)] += m[static_cast<std::size_t>(i)];
                        sq[static_cast<std::size_t>(i)] +=
                            static_cast<long double>(m[static_cast<std::size_t>(i)]) *
                            m[static_cast<std::size_t>(i)];
                      }
                    }
                    sums[ci] = std::move(sum);
                    sqs[ci] = std::move(sq);
                  });
  std::vector<long double> sum(static_cast<std::size_t>(n), 0.0L);
  std::vector<long double> sq(static_cast<std::size_t>(n), 0.0L);
  for (std::size_t ci = 0; ci < n_chunks; ++ci)
    for (int i = 0; i < n; ++i) {
      sum[static_cast<std::size_t>(i)] += sums[ci][static_cast<std::size_t>(i)];
      sq[static_cast<std::size_t>(i)] += sqs[ci][static_cast<std::size_t>(i)];
    }

  out.mc_mean.resize(static_cast<std::size_t>(n));
  out.z_scores.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const long double avg = sum[static_cast<std::size_t>(i)] / trials;
    const long double var =
        std::max(0.0L, sq[static_cast<std::size_t>(i)] / trials - avg * avg);
    const double se = static_cast<double>(std::sqrt(var / trials));
    const double diff =
        std::fabs(static_cast<double>(avg) - out.target[static_cast<std::size_t>(i)]);
    out.mc_mean[static_cast<std::size_t>(i)] = static_cast<double>(avg);
    out.z_scores[static_cast<std::size_t>(i)] =
        se > 0.0 ? diff / se
                 : (diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity());
  }
  return out;
}

namespace detail {

inline double norm2(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(s));
}

inline double norm2_sq_diff(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - b[i];
    s += d * d;
  }
  return static_cast<double>(s);
}

}  // namespace detail

struct LipschitzReport {
  double max_ratio = 0.0;  // |m(T_v nu) - m(nu)|_2 / |v|_2
  bool ok = true;
  int samples = 0;
};

/// Samples sparse fields v (support size 1..m, Gaussian entries across a
/// range of scales) and checks |m(T_v nu) - m(nu)|_2 <= 4 alpha |v|_2 + 1e-9.
inline LipschitzReport lipschitz_check(const CubeMeasure& nu, const SparseFamily& fam,
                                       double alpha, int samples, std::uint64_t seed) {
  static constexpr double kScales[] = {1e-4, 0.1, 0.5, 1.0, 2.0, 5.0};
  const auto base_mean = mean(nu);
  LipschitzReport rep;
  Rng rng(derive_seed(seed, "lipschitz", 0));
  for (int s = 0; s < samples; ++s) {
    const int size = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fam.m)));
    std::vector<double> v(static_cast<std::size_t>(fam.n), 0.0);
    double norm_sq = 0.0;
    for (int i : rng.sample_without_replacement(fam.n, size)) {
      const double g = rng.next_normal() * kScales[s % 6];
      v[static_cast<std::size_t>(i)] = g;
      norm_sq += g * g;
    }
    if (norm_sq == 0.0) continue;
    const double vnorm = std::sqrt(norm_sq);
    const double dist =
        std::sqrt(detail::norm2_sq_diff(tilted_mean(nu, TiltVector(v)), base_mean));
    rep.max_ratio = std::max(rep.max_ratio, dist / vnorm);
    if (dist > 4.0 * alpha * vnorm + 1e-9) rep.ok = false;
    ++rep.samples;
  }
  return rep;
}

/// Test family for the stability checks: Gaussian tilts across scales, point
/// masses on support atoms, and random positive f-tilts. All members are
/// absolutely continuous with respect to nu.
inline std::vector<CubeMeasure> make_mu_family(const CubeMeasure& nu, int count,
                                               std::uint64_t seed) {
  std::vector<CubeMeasure> fam;
  fam.reserve(static_cast<std::size_t>(count));
  std::vector<State> support;
  for (State x = 0; x < nu.num_states(); ++x)
    if (nu[x] > 0.0) support.push_back(x);

  const int n_points = std::min<int>(count / 4, static_cast<int>(support.size()));
  const std::size_t stride = support.size() / std::max(1, n_points);
  for (int j = 0; j < n_points; ++j)
    fam.push_back(CubeMeasure::point_mass(nu.n(), support[j * std::max<std::size_t>(1, stride)]));

  static constexpr double kScales[] = {0.1, 0.5, 1.0, 2.0, 5.0};
  Rng rng(derive_seed(seed, "mu_family", 0));
  std::size_t scale_idx = 0;
  while (static_cast<int>(fam.size()) < count) {
    if (fam.size() % 2 == 0 || support.size() < 2) {
      std::vector<double> v(static_cast<std::size_t>(nu.n()));
      const double scale = kScales[scale_idx++ % 5];
      for (double& x : v) x = rng.next_normal() * scale;
      fam.push_back(tilt(nu, TiltVector(v)));
    } else {
      std::vector<double> f(nu.num_states(), 0.0);
      for (State x : support) f[x] = std::exp(rng.next_normal());
      fam.push_back(f_tilt_entropy(nu, [&](State x) { return f[x]; }).tilted);
    }
  }
  return fam;
}

struct StabilityReport {
  double max_ratio = 0.0;  // |m(mu) - m(nu)|_2^2 / KL(mu || nu)
  double bound = 0.0;      // 8 alpha / c
  bool ok = true;
  int used = 0;
  int skipped = 0;
};

/// Checks |m(mu) - m(nu)|_2^2 <= (8 alpha / c) KL(mu || nu) over a family of
/// absolutely continuous mu; members with KL = 0 are skipped.
inline StabilityReport quadratic_stability_check(const CubeMeasure& nu, const SparseFamily& fam,
                                                 double alpha,
                                                 const std::vector<CubeMeasure>& mu_family) {
  StabilityReport rep;
  rep.bound = 8.0 * alpha / fam.c;
  const auto base_mean = mean(nu);
  for (const auto& mu : mu_family) {
    const double kl = divergences(mu, nu).kl;
    if (kl <= 1e-15) {
      ++rep.skipped;
      continue;
    }
    const double ratio = detail::norm2_sq_diff(mean(mu), base_mean) / kl;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > rep.bound + 1e-6) rep.ok = false;
    ++rep.used;
  }
  return rep;
}

/// Slice-measure analogue of make_mu_family: tilts, atom point masses, and
/// f-tilts on the same slice.
inline std::vector<SliceMeasure> make_slice_mu_family(const SliceMeasure& nu, int count,
                                                      std::uint64_t seed) {
  std::vector<SliceMeasure> fam;
  fam.reserve(static_cast<std::size_t>(count));
  std::vector<State> atoms;
  for (const auto& [s, p] : nu.atoms())
    if (p > 0.0) atoms.push_back(s);

  const int n_points = std::min<int>(count / 4, static_cast<int>(atoms.size()));
  const std::size_t stride = atoms.size() / std::max(1, n_points);
  for (int j = 0; j < n_points; ++j)
    fam.push_back(
        SliceMeasure::point_mass(nu.n(), nu.k(), atoms[j * std::max<std::size_t>(1, stride)]));

  static constexpr double kScales[] = {0.1, 0.5, 1.0, 2.0, 5.0};
  Rng rng(derive_seed(seed, "slice_mu_family", 0));
  std::size_t scale_idx = 0;
  while (static_cast<int>(fam.size()) < count) {
    if (fam.size() % 2 == 0 || atoms.size() < 2) {
      std::vector<double> v(static_cast<std::size_t>(nu.n()));
      const double scale = kScales[scale_idx++ % 5];
      for (double& x : v) x = rng.next_normal() * scale;
      fam.push_back(tilt_slice(nu, TiltVector(v)));
    } else {
      std::map<State, double> w;
      for (State s : atoms) w[s] = nu.prob(s) * std::exp(rng.next_normal());
      fam.push_back(SliceMeasure::from_weights(nu.n(), nu.k(), std::move(w)));
    }
  }
  return fam;
}

struct EntropicIndependenceReport {
  double c_used = 0.0;  // 2 alpha / (b c)
  double max_ratio = 0.0;  // k KL(q_mu || q_nu) / KL(mu || nu)
  double alpha = 0.0;
  double b = 0.0;  // smallest positive inclusion probability under nu
  bool ok = true;
  bool chain_ok = true;  // the chi^2 proof-chain inequalities
  int used = 0;
  int skipped = 0;
};

/// Checks k KL(q_mu || q_nu) <= C KL(mu || nu) with C = 2 alpha / (b c),
/// where alpha is the restricted-pin influence bound of the pushforward and
/// b the smallest positive inclusion probability. Also verifies the chain
///   KL(q_mu||q_nu) <= chi2(q_mu||q_nu) <= sum dP_i^2/(b k) = |dm|^2/(4 b k)
///   <= (8 alpha / c) KL / (4 b k)
/// step by step for every family member with positive KL.
inline EntropicIndependenceReport entropic_independence_check(
    const SliceMeasure& nu, const SparseFamily& fam, const std::vector<SliceMeasure>& mu_family,
    const AlphaOptions& alpha_opt = {}) {
  EntropicIndependenceReport rep;
  const CubeMeasure nu_cube = slice_to_cube(nu);
  rep.alpha = measure_restricted_alpha(nu_cube, fam, alpha_opt).alpha;

  const auto incl_nu = inclusion_probs(nu);
  rep.b = 1.0;
  for (double p : incl_nu)
    if (p > 0.0) rep.b = std::min(rep.b, p);
  rep.c_used = 2.0 * rep.alpha / (rep.b * fam.c);

  const auto q_nu = slice_marginals(nu);
  const int k = nu.k();
  for (const auto& mu : mu_family) {
    const double kl = divergences(mu, nu).kl;
    if (kl <= 1e-15) {
      ++rep.skipped;
      continue;
    }
    const auto q_mu = slice_marginals(mu);
    const auto q_div = divergences(q_mu, q_nu);
    const auto incl_mu = inclusion_probs(mu);
    long double sum_dp_sq = 0.0L;
    for (std::size_t i = 0; i < incl_mu.size(); ++i) {
      const long double d = static_cast<long double>(incl_mu[i]) - incl_nu[i];
      sum_dp_sq += d * d;
    }
    const double mean_sq_diff =
        detail::norm2_sq_diff(mean(slice_to_cube(mu)), mean(nu_cube));

    if (q_div.kl > q_div.chi2 + 1e-12) rep.chain_ok = false;
    if (q_div.chi2 > static_cast<double>(sum_dp_sq) / (rep.b * k) + 1e-12) rep.chain_ok = false;
    if (std::fabs(mean_sq_diff - 4.0 * static_cast<double>(sum_dp_sq)) > 1e-10)
      rep.chain_ok = false;
    if (mean_sq_diff > (8.0 * rep.alpha / fam.c) * kl + 1e-6) rep.chain_ok = false;

    const double ratio = k * q_div.kl / kl;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > rep.c_used + 1e-6) rep.ok = false;
    ++rep.used;
  }
  rep.ok = rep.ok && rep.chain_ok;
  return rep;
}

}  // namespace sparseloc

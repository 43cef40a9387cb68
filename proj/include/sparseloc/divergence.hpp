#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sparseloc/errors.hpp"
#include "sparseloc/measure.hpp"

namespace sparseloc {

struct Divergences {
  double kl;
  double chi2;
};

namespace detail {

inline long double xlogx(long double x) { return x > 0.0L ? x * std::log(x) : 0.0L; }

}  // namespace detail

/// KL(mu || nu) and chi^2(mu || nu) in one pass, with the 0 log 0 = 0
/// convention. Throws AbsoluteContinuityViolation when mu puts mass outside
/// supp(nu).
inline Divergences divergences(const CubeMeasure& mu, const CubeMeasure& nu) {
  if (mu.n() != nu.n()) throw std::invalid_argument("divergences: dimension mismatch");
  long double kl = 0.0L, chi2 = 0.0L;
  for (State x = 0; x < mu.num_states(); ++x) {
    const double p = mu[x], q = nu[x];
    if (p == 0.0) continue;
    if (q == 0.0)
      throw AbsoluteContinuityViolation("divergences: mu not absolutely continuous w.r.t. nu");
    kl += static_cast<long double>(p) * std::log(static_cast<long double>(p) / q);
    chi2 += static_cast<long double>(p) * p / q;
  }
  return {static_cast<double>(kl), static_cast<double>(chi2 - 1.0L)};
}

inline Divergences divergences(const SliceMeasure& mu, const SliceMeasure& nu) {
  if (mu.n() != nu.n() || mu.k() != nu.k())
    throw std::invalid_argument("divergences: shape mismatch");
  long double kl = 0.0L, chi2 = 0.0L;
  for (const auto& [s, p] : mu.atoms()) {
    if (p == 0.0) continue;
    const double q = nu.prob(s);
    if (q == 0.0)
      throw AbsoluteContinuityViolation("divergences: mu not absolutely continuous w.r.t. nu");
    kl += static_cast<long double>(p) * std::log(static_cast<long double>(p) / q);
    chi2 += static_cast<long double>(p) * p / q;
  }
  return {static_cast<double>(kl), static_cast<double>(chi2 - 1.0L)};
}

/// Same divergences for plain probability vectors (e.g. one-site marginals).
inline Divergences divergences(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("divergences: length mismatch");
  long double kl = 0.0L, chi2 = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0)
      throw AbsoluteContinuityViolation("divergences: support mismatch in vectors");
    kl += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / q[i]);
    chi2 += static_cast<long double>(p[i]) * p[i] / q[i];
  }
  return {static_cast<double>(kl), static_cast<double>(chi2 - 1.0L)};
}

/// Ent_pi[f] together with the f-tilt (density f / E_pi[f]) and the gap in
/// the identity KL(tilted || pi) = Ent_pi[f] / E_pi[f].
template <typename M>
struct FTiltResult {
  double ent;
  M tilted;
  double kl_identity_gap;
};

inline FTiltResult<CubeMeasure> f_tilt_entropy(const CubeMeasure& pi,
                                               const std::function<double(State)>& f) {
  long double ef = 0.0L, eflogf = 0.0L;
  std::vector<double> w(pi.num_states(), 0.0);
  for (State x = 0; x < pi.num_states(); ++x) {
    const double p = pi[x];
    if (p == 0.0) continue;
    const double fx = f(x);
    if (!(fx >= 0.0)) throw std::invalid_argument("f_tilt_entropy: f must be nonnegative");
    w[x] = p * fx;
    ef += static_cast<long double>(p) * fx;
    eflogf += static_cast<long double>(p) * detail::xlogx(fx);
  }
  if (!(ef > 0.0L)) throw std::invalid_argument("f_tilt_entropy: f has zero mean");
  const double ent = static_cast<double>(eflogf - ef * std::log(ef));
  CubeMeasure tilted = CubeMeasure::from_weights(pi.n(), std::move(w));
  long double kl = 0.0L;
  for (State x = 0; x < pi.num_states(); ++x) {
    const double t = tilted[x];
    if (t == 0.0) continue;
    kl += static_cast<long double>(t) * std::log(static_cast<long double>(t) / pi[x]);
  }
  const double gap = std::fabs(static_cast<double>(kl) - ent / static_cast<double>(ef));
  return {ent, std::move(tilted), gap};
}

inline FTiltResult<SliceMeasure> f_tilt_entropy(const SliceMeasure& pi,
                                                const std::function<double(State)>& f) {
  long double ef = 0.0L, eflogf = 0.0L;
  std::map<State, double> w;
  for (const auto& [s, p] : pi.atoms()) {
    if (p == 0.0) continue;
    const double fs = f(s);
    if (!(fs >= 0.0)) throw std::invalid_argument("f_tilt_entropy: f must be nonnegative");
    if (fs > 0.0) w[s] = p * fs;
    ef += static_cast<long double>(p) * fs;
    eflogf += static_cast<long double>(p) * detail::xlogx(fs);
  }
  if (!(ef > 0.0L)) throw std::invalid_argument("f_tilt_entropy: f has zero mean");
  const double ent = static_cast<double>(eflogf - ef * std::log(ef));
  SliceMeasure tilted = SliceMeasure::from_weights(pi.n(), pi.k(), std::move(w));
  long double kl = 0.0L;
  for (const auto& [s, t] : tilted.atoms()) {
    if (t == 0.0) continue;
    kl += static_cast<long double>(t) * std::log(static_cast<long double>(t) / pi.prob(s));
  }
  const double gap = std::fabs(static_cast<double>(kl) - ent / static_cast<double>(ef));
  return {ent, std::move(tilted), gap};
}

/// Plain Ent_pi[f] = E[f log f] - E[f] log E[f], when the tilted measure is
/// not needed. Returns 0 for f vanishing pi-a.s.
inline double entropy_functional(const SliceMeasure& pi, const std::function<double(State)>& f) {
  long double ef = 0.0L, eflogf = 0.0L;
  for (const auto& [s, p] : pi.atoms()) {
    if (p == 0.0) continue;
    const double fs = f(s);
    if (!(fs >= 0.0)) throw std::invalid_argument("entropy_functional: f must be nonnegative");
    ef += static_cast<long double>(p) * fs;
    eflogf += static_cast<long double>(p) * detail::xlogx(fs);
  }
  if (ef == 0.0L) return 0.0;
  return static_cast<double>(eflogf - ef * std::log(ef));
}

/// Log-Laplace transform of nu at v, its centered version, and its gradient:
///   f(v) = log E_nu[e^<v,X>],  h(v) = f(v) - <m(nu), v>,  grad_f = m(T_v nu).
struct LogLaplace {
  double f;
  double h;
  std::vector<double> grad_f;
};

inline LogLaplace log_laplace(const CubeMeasure& nu, const TiltVector& v) {
  if (v.size() != nu.n()) throw std::invalid_argument("log_laplace: dimension mismatch");
  const int n = nu.n();
  const auto coords = v.support();
  double shift = 0.0;
  if (!coords.empty()) {
    shift = -std::numeric_limits<double>::infinity();
    for (State x = 0; x < nu.num_states(); ++x) {
      if (nu[x] == 0.0) continue;
      shift = std::max(shift, detail::dot_spins(v.coeffs(), coords, x));
    }
  }
  long double total = 0.0L;
  std::vector<long double> acc(static_cast<std::size_t>(n), 0.0L);
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    const double w =
        coords.empty() ? nu[x]
                       : nu[x] * std::exp(detail::dot_spins(v.coeffs(), coords, x) - shift);
    total += w;
    for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += w * spin(x, i);
  }
  LogLaplace out;
  out.f = static_cast<double>(shift + std::log(total));
  out.grad_f.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.grad_f[static_cast<std::size_t>(i)] = static_cast<double>(acc[static_cast<std::size_t>(i)] / total);
  const auto m = mean(nu);
  long double lin = 0.0L;
  for (int i = 0; i < n; ++i)
    lin += static_cast<long double>(m[static_cast<std::size_t>(i)]) * v[i];
  out.h = static_cast<double>(out.f - static_cast<double>(lin));
  return out;
}

/// Donsker-Varadhan gap for an arbitrary test function phi:
///   KL(mu || nu) - (E_mu[phi] - log E_nu[e^phi]).
/// Nonnegative up to rounding; zero when phi = log(dmu/dnu) + constant.
inline double dv_gap(const CubeMeasure& mu, const CubeMeasure& nu,
                     const std::function<double(State)>& phi) {
  const double kl = divergences(mu, nu).kl;
  long double e_mu = 0.0L;
  double shift = -std::numeric_limits<double>::infinity();
  for (State x = 0; x < nu.num_states(); ++x)
    if (nu[x] > 0.0) shift = std::max(shift, phi(x));
  long double lse = 0.0L;
  for (State x = 0; x < nu.num_states(); ++x) {
    if (mu[x] > 0.0) e_mu += static_cast<long double>(mu[x]) * phi(x);
    if (nu[x] > 0.0) lse += static_cast<long double>(nu[x]) * std::exp(phi(x) - shift);
  }
  const double dv_value = static_cast<double>(e_mu - (shift + std::log(lse)));
  return kl - dv_value;
}

}  // namespace sparseloc

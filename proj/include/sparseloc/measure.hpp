#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sparseloc/errors.hpp"

namespace sparseloc {

// States of {-1,+1}^n are indexed by n-bit words: bit i set <=> x_i = +1.
using State = std::uint32_t;

inline constexpr int kMaxCoordinates = 24;
inline constexpr double kMassGate = 1e-9;

inline double spin(State x, int i) { return (x >> i) & 1u ? 1.0 : -1.0; }

/// Dense probability measure on {-1,+1}^n, n <= 24.
///
/// The constructor accepts probability vectors whose mass is within 1e-9 of 1
/// and renormalizes; anything further off is treated as a caller bug.
class CubeMeasure {
 public:
  CubeMeasure(int n, std::vector<double> probs) : n_(n), p_(std::move(probs)) {
    validate_shape();
    long double mass = 0.0L;
    for (double v : p_) {
      if (!(v >= 0.0)) throw std::invalid_argument("CubeMeasure: negative or NaN probability");
      mass += v;
    }
    if (std::fabs(static_cast<double>(mass) - 1.0) > kMassGate)
      throw std::invalid_argument("CubeMeasure: mass " + std::to_string(static_cast<double>(mass)) +
                                  " not within 1e-9 of 1");
    renormalize(mass);
  }

  /// Normalizes an arbitrary nonnegative weight vector (used by tilt/pin etc.).
  static CubeMeasure from_weights(int n, std::vector<double> weights) {
    CubeMeasure m(Unchecked{}, n, std::move(weights));
    long double mass = 0.0L;
    for (double v : m.p_) {
      if (!(v >= 0.0)) throw std::invalid_argument("CubeMeasure: negative weight");
      mass += v;
    }
    m.renormalize(mass);
    return m;
  }

  static CubeMeasure uniform(int n) {
    if (n < 1 || n > kMaxCoordinates) throw std::invalid_argument("CubeMeasure: n out of range");
    const std::size_t size = std::size_t{1} << n;
    return from_weights(n, std::vector<double>(size, 1.0));
  }

  static CubeMeasure point_mass(int n, State x) {
    if (n < 1 || n > kMaxCoordinates) throw std::invalid_argument("CubeMeasure: n out of range");
    std::vector<double> w(std::size_t{1} << n, 0.0);
    w[x] = 1.0;
    return from_weights(n, std::move(w));
  }

  int n() const { return n_; }
  std::size_t num_states() const { return p_.size(); }
  double operator[](State x) const { return p_[x]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  struct Unchecked {};
  CubeMeasure(Unchecked, int n, std::vector<double> probs) : n_(n), p_(std::move(probs)) {
    validate_shape();
  }

  void validate_shape() const {
    if (n_ < 1 || n_ > kMaxCoordinates)
      throw std::invalid_argument("CubeMeasure: n must be in [1, 24], got " + std::to_string(n_));
    if (p_.size() != (std::size_t{1} << n_))
      throw std::invalid_argument("CubeMeasure: probability vector has wrong length");
  }

  void renormalize(long double mass) {
    if (!(mass > 0.0L)) throw std::invalid_argument("CubeMeasure: empty support");
    const double inv = static_cast<double>(1.0L / mass);
    for (double& v : p_) v *= inv;
  }

  int n_;
  std::vector<double> p_;
};

/// Probability measure on k-element subsets of [n], keyed by subset bitmask.
class SliceMeasure {
 public:
  SliceMeasure(int n, int k, std::map<State, double> probs)
      : n_(n), k_(k), p_(std::move(probs)) {
    validate_shape();
    long double mass = 0.0L;
    for (const auto& [_, v] : p_) {
      if (!(v >= 0.0)) throw std::invalid_argument("SliceMeasure: negative or NaN probability");
      mass += v;
    }
    if (std::fabs(static_cast<double>(mass) - 1.0) > kMassGate)
      throw std::invalid_argument("SliceMeasure: mass not within 1e-9 of 1");
    renormalize(mass);
  }

  static SliceMeasure from_weights(int n, int k, std::map<State, double> weights) {
    SliceMeasure m(Unchecked{}, n, k, std::move(weights));
    long double mass = 0.0L;
    for (const auto& [_, v] : m.p_) {
      if (!(v >= 0.0)) throw std::invalid_argument("SliceMeasure: negative weight");
      mass += v;
    }
    m.renormalize(mass);
    return m;
  }

  static SliceMeasure point_mass(int n, int k, State subset) {
    return from_weights(n, k, {{subset, 1.0}});
  }

  static SliceMeasure uniform_over(int n, int k, const std::vector<State>& subsets) {
    std::map<State, double> w;
    for (State s : subsets) w[s] = 1.0;
    if (w.size() != subsets.size())
      throw std::invalid_argument("SliceMeasure: duplicate subsets");
    return from_weights(n, k, std::move(w));
  }

  int n() const { return n_; }
  int k() const { return k_; }
  const std::map<State, double>& atoms() const { return p_; }
  double prob(State subset) const {
    auto it = p_.find(subset);
    return it == p_.end() ? 0.0 : it->second;
  }

 private:
  struct Unchecked {};
  SliceMeasure(Unchecked, int n, int k, std::map<State, double> probs)
      : n_(n), k_(k), p_(std::move(probs)) {
    validate_shape();
  }

  void validate_shape() const {
    if (n_ < 1 || n_ > kMaxCoordinates)
      throw std::invalid_argument("SliceMeasure: n must be in [1, 24]");
    if (k_ < 0 || k_ > n_) throw std::invalid_argument("SliceMeasure: k must be in [0, n]");
    for (const auto& [s, _] : p_) {
      if (s >= (State{1} << n_))
        throw std::invalid_argument("SliceMeasure: subset out of range");
      if (std::popcount(s) != k_)
        throw std::invalid_argument("SliceMeasure: subset has wrong cardinality");
    }
  }

  void renormalize(long double mass) {
    if (!(mass > 0.0L)) throw std::invalid_argument("SliceMeasure: empty support");
    const double inv = static_cast<double>(1.0L / mass);
    for (auto& [_, v] : p_) v *= inv;
  }

  int n_;
  int k_;
  std::map<State, double> p_;
};

/// External field v in R^n.
class TiltVector {
 public:
  TiltVector() = default;
  explicit TiltVector(std::vector<double> v) : v_(std::move(v)) {
    for (double x : v_)
      if (!std::isfinite(x)) throw std::invalid_argument("TiltVector: non-finite entry");
  }
  static TiltVector zeros(int n) { return TiltVector(std::vector<double>(static_cast<std::size_t>(n), 0.0)); }

  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& coeffs() const { return v_; }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < size(); ++i)
      if (v_[static_cast<std::size_t>(i)] != 0.0) s.push_back(i);
    return s;
  }
  double norm_l1() const {
    double a = 0.0;
    for (double x : v_) a += std::fabs(x);
    return a;
  }
  double norm_l2() const {
    double a = 0.0;
    for (double x : v_) a += x * x;
    return std::sqrt(a);
  }

 private:
  std::vector<double> v_;
};

inline TiltVector operator+(const TiltVector& a, const TiltVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("TiltVector: size mismatch");
  std::vector<double> c(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i) c[static_cast<std::size_t>(i)] = a[i] + b[i];
  return TiltVector(std::move(c));
}

inline TiltVector operator-(const TiltVector& a) {
  std::vector<double> c(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i) c[static_cast<std::size_t>(i)] = -a[i];
  return TiltVector(std::move(c));
}

/// Pinning pattern u in {-1,0,+1}^n; zero entries are free coordinates.
class PinVector {
 public:
  PinVector() = default;
  explicit PinVector(std::vector<int> entries) {
    u_.reserve(entries.size());
    for (int e : entries) {
      if (e < -1 || e > 1) throw std::invalid_argument("PinVector: entry not in {-1,0,1}");
      u_.push_back(static_cast<std::int8_t>(e));
    }
  }
  static PinVector none(int n) { return PinVector(std::vector<int>(static_cast<std::size_t>(n), 0)); }

  int size() const { return static_cast<int>(u_.size()); }
  int operator[](int i) const { return u_[static_cast<std::size_t>(i)]; }
  void set(int i, int s) {
    if (s < -1 || s > 1) throw std::invalid_argument("PinVector: entry not in {-1,0,1}");
    u_[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(s);
  }

  State support_mask() const {
    State m = 0;
    for (int i = 0; i < size(); ++i)
      if (u_[static_cast<std::size_t>(i)] != 0) m |= State{1} << i;
    return m;
  }
  /// Bits of coordinates pinned to +1.
  State plus_mask() const {
    State m = 0;
    for (int i = 0; i < size(); ++i)
      if (u_[static_cast<std::size_t>(i)] > 0) m |= State{1} << i;
    return m;
  }
  int support_size() const { return std::popcount(support_mask()); }
  bool is_none() const { return support_mask() == 0; }

  friend bool operator==(const PinVector& a, const PinVector& b) { return a.u_ == b.u_; }

 private:
  std::vector<std::int8_t> u_;
};

namespace detail {

/// <v, x> restricted to the given coordinate list.
inline double dot_spins(const std::vector<double>& v, const std::vector<int>& coords, State x) {
  double s = 0.0;
  for (int i : coords) s += v[static_cast<std::size_t>(i)] * spin(x, i);
  return s;
}

/// Iterates all states whose pinned bits match (fixed = plus bits on
/// support_mask), i.e. the subcube of free coordinates.
template <typename Fn>
void for_each_pinned_state(int n, State support_mask, State plus_mask, Fn&& fn) {
  const State all = (n == 32) ? ~State{0} : ((State{1} << n) - 1);
  const State free_mask = all & ~support_mask;
  const State fixed = plus_mask & support_mask;
  State sub = free_mask;
  while (true) {
    fn(fixed | sub);
    if (sub == 0) break;
    sub = (sub - 1) & free_mask;
  }
}

}  // namespace detail

/// Independent coordinates with the given means: P[x] = prod (1 + m_i x_i)/2.
inline CubeMeasure product_measure(const std::vector<double>& means) {
  const int n = static_cast<int>(means.size());
  if (n < 1 || n > kMaxCoordinates)
    throw std::invalid_argument("product_measure: dimension out of range");
  for (double m : means)
    if (!(m > -1.0 && m < 1.0))
      throw std::invalid_argument("product_measure: means must lie in (-1, 1)");
  std::vector<double> w(std::size_t{1} << n);
  for (State x = 0; x < w.size(); ++x) {
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      p *= 0.5 * (1.0 + means[static_cast<std::size_t>(i)] * spin(x, i));
    w[x] = p;
  }
  return CubeMeasure::from_weights(n, std::move(w));
}

/// m(nu) = E_nu[X].
inline std::vector<double> mean(const CubeMeasure& nu) {
  const int n = nu.n();
  std::vector<long double> acc(static_cast<std::size_t>(n), 0.0L);
  for (State x = 0; x < nu.num_states(); ++x) {
    const double p = nu[x];
    if (p == 0.0) continue;
    for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += p * spin(x, i);
  }
  std::vector<double> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = static_cast<double>(acc[static_cast<std::size_t>(i)]);
  return m;
}

/// Density proportional to exp(<v, x>) against nu; log-sum-exp shifted by the
/// maximum of <v, x> over the support.
inline CubeMeasure tilt(const CubeMeasure& nu, const TiltVector& v) {
  if (v.size() != nu.n()) throw std::invalid_argument("tilt: dimension mismatch");
  const auto coords = v.support();
  if (coords.empty()) return nu;
  double shift = -std::numeric_limits<double>::infinity();
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    shift = std::max(shift, detail::dot_spins(v.coeffs(), coords, x));
  }
  std::vector<double> w(nu.num_states(), 0.0);
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    w[x] = nu[x] * std::exp(detail::dot_spins(v.coeffs(), coords, x) - shift);
  }
  return CubeMeasure::from_weights(nu.n(), std::move(w));
}

/// nu-probability of the pinning event {x_i = u_i on support(u)}.
inline double pin_mass(const CubeMeasure& nu, const PinVector& u) {
  if (u.size() != nu.n()) throw std::invalid_argument("pin: dimension mismatch");
  long double mass = 0.0L;
  detail::for_each_pinned_state(nu.n(), u.support_mask(), u.plus_mask(),
                                [&](State x) { mass += nu[x]; });
  return static_cast<double>(mass);
}

/// Conditional measure R_u nu. Throws InfeasiblePin on a zero-probability event.
inline CubeMeasure pin(const CubeMeasure& nu, const PinVector& u) {
  if (u.size() != nu.n()) throw std::invalid_argument("pin: dimension mismatch");
  if (u.is_none()) return nu;
  std::vector<double> w(nu.num_states(), 0.0);
  long double mass = 0.0L;
  detail::for_each_pinned_state(nu.n(), u.support_mask(), u.plus_mask(), [&](State x) {
    w[x] = nu[x];
    mass += nu[x];
  });
  if (!(mass > 0.0L)) throw InfeasiblePin("pin: conditioning event has zero probability");
  return CubeMeasure::from_weights(nu.n(), std::move(w));
}

/// m(T_v nu) without materializing the tilted measure.
inline std::vector<double> tilted_mean(const CubeMeasure& nu, const TiltVector& v) {
  if (v.size() != nu.n()) throw std::invalid_argument("tilted_mean: dimension mismatch");
  const auto coords = v.support();
  if (coords.empty()) return mean(nu);
  const int n = nu.n();
  double shift = -std::numeric_limits<double>::infinity();
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    shift = std::max(shift, detail::dot_spins(v.coeffs(), coords, x));
  }
  std::vector<long double> acc(static_cast<std::size_t>(n), 0.0L);
  long double total = 0.0L;
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    const double w = nu[x] * std::exp(detail::dot_spins(v.coeffs(), coords, x) - shift);
    total += w;
    for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += w * spin(x, i);
  }
  std::vector<double> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    m[static_cast<std::size_t>(i)] = static_cast<double>(acc[static_cast<std::size_t>(i)] / total);
  return m;
}

/// m_i(R_u T_{scale * v} nu) for a single coordinate, iterating only the free
/// subcube. Throws InfeasiblePin when the pinned event has no mass.
inline double pinned_tilted_mean_coord(const CubeMeasure& nu, const TiltVector& v, double scale,
                                       State support_mask, State plus_mask, int coord) {
  const auto coords = v.support();
  double shift = -std::numeric_limits<double>::infinity();
  detail::for_each_pinned_state(nu.n(), support_mask, plus_mask, [&](State x) {
    if (nu[x] == 0.0) return;
    shift = std::max(shift, scale * detail::dot_spins(v.coeffs(), coords, x));
  });
  if (!std::isfinite(shift)) throw InfeasiblePin("pinned_tilted_mean_coord: empty event");
  long double num = 0.0L, den = 0.0L;
  detail::for_each_pinned_state(nu.n(), support_mask, plus_mask, [&](State x) {
    if (nu[x] == 0.0) return;
    const double w =
        nu[x] * std::exp(scale * detail::dot_spins(v.coeffs(), coords, x) - shift);
    den += w;
    num += w * spin(x, coord);
  });
  return static_cast<double>(num / den);
}

/// Pushforward under S -> 2*1_S - 1; the subset bitmask is the cube state.
inline CubeMeasure slice_to_cube(const SliceMeasure& mu) {
  std::vector<double> w(std::size_t{1} << mu.n(), 0.0);
  for (const auto& [s, p] : mu.atoms()) w[s] += p;
  return CubeMeasure::from_weights(mu.n(), std::move(w));
}

/// P_{S~mu}[i in S] for each i.
inline std::vector<double> inclusion_probs(const SliceMeasure& mu) {
  std::vector<long double> acc(static_cast<std::size_t>(mu.n()), 0.0L);
  for (const auto& [s, p] : mu.atoms())
    for (int i = 0; i < mu.n(); ++i)
      if ((s >> i) & 1u) acc[static_cast<std::size_t>(i)] += p;
  std::vector<double> out(static_cast<std::size_t>(mu.n()));
  for (int i = 0; i < mu.n(); ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(acc[static_cast<std::size_t>(i)]);
  return out;
}

/// Normalized one-site marginals q_mu(i) = P[i in S] / k. Requires k >= 1.
inline std::vector<double> slice_marginals(const SliceMeasure& mu) {
  if (mu.k() < 1) throw std::invalid_argument("slice_marginals: k must be >= 1");
  auto q = inclusion_probs(mu);
  for (double& x : q) x /= mu.k();
  return q;
}

/// Tilt of a slice measure by the field v acting on the +-1 pushforward
/// coordinates; commutes with slice_to_cube.
inline SliceMeasure tilt_slice(const SliceMeasure& mu, const TiltVector& v) {
  if (v.size() != mu.n()) throw std::invalid_argument("tilt_slice: dimension mismatch");
  const auto coords = v.support();
  if (coords.empty()) return mu;
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& [s, p] : mu.atoms()) {
    if (p == 0.0) continue;
    shift = std::max(shift, detail::dot_spins(v.coeffs(), coords, s));
  }
  std::map<State, double> w;
  for (const auto& [s, p] : mu.atoms()) {
    if (p == 0.0) continue;
    w[s] = p * std::exp(detail::dot_spins(v.coeffs(), coords, s) - shift);
  }
  return SliceMeasure::from_weights(mu.n(), mu.k(), std::move(w));
}

}  // namespace sparseloc

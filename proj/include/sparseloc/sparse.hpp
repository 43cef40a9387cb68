#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sparseloc/divergence.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/measure.hpp"
#include "sparseloc/rng.hpp"

namespace sparseloc {

/// Vectors on n coordinates with at most m = ceil(c * n) nonzero entries;
/// closed under sign flips and support restriction.
struct SparseFamily {
  int n;
  double c;
  int m;

  SparseFamily(int n_, double c_) : n(n_), c(c_) {
    if (n < 1 || n > kMaxCoordinates) throw std::invalid_argument("SparseFamily: n out of range");
    if (!(c > 0.0) || c > 1.0) throw std::invalid_argument("SparseFamily: c must be in (0, 1]");
    m = static_cast<int>(std::ceil(c * n - 1e-12));
    m = std::max(1, std::min(m, n));
  }
};

/// Membership of a sign pattern in the family's sign closure: support size at
/// most m.
inline bool sign_closure_member(const PinVector& s, const SparseFamily& fam) {
  if (s.size() != fam.n) throw std::invalid_argument("sign_closure_member: dimension mismatch");
  return s.support_size() <= fam.m;
}

/// Membership of a sign pattern in the sign downward-closure of an explicit
/// vector list: some v in the list must satisfy s_i in {0, sign(v_i)} for
/// every coordinate.
inline bool sign_closure_member(const PinVector& s, const std::vector<std::vector<double>>& vecs) {
  for (const auto& v : vecs) {
    if (static_cast<int>(v.size()) != s.size())
      throw std::invalid_argument("sign_closure_member: dimension mismatch");
    bool ok = true;
    for (int i = 0; i < s.size() && ok; ++i) {
      if (s[i] == 0) continue;
      const double sign = v[static_cast<std::size_t>(i)] > 0.0   ? 1.0
                          : v[static_cast<std::size_t>(i)] < 0.0 ? -1.0
                                                                 : 0.0;
      ok = static_cast<double>(s[i]) == sign;
    }
    if (ok) return true;
  }
  return false;
}

/// Family membership for a real vector: at most m nonzero entries.
inline bool sparse_member(const SparseFamily& fam, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != fam.n)
    throw std::invalid_argument("sparse_member: dimension mismatch");
  int nz = 0;
  for (double x : v)
    if (x != 0.0) ++nz;
  return nz <= fam.m;
}

/// Squared Ky Fan vector norm: sum of the m largest squared coordinates.
inline double kyfan_norm_sq(const std::vector<double>& x, int m) {
  if (m < 1 || m > static_cast<int>(x.size()))
    throw std::invalid_argument("kyfan_norm_sq: m out of range");
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
  std::sort(sq.begin(), sq.end(), std::greater<>());
  long double acc = 0.0L;
  for (int i = 0; i < m; ++i) acc += sq[static_cast<std::size_t>(i)];
  return static_cast<double>(acc);
}

/// Convex conjugate of v -> (eps/2) |v|_2^2 over the sparse family:
///   sup_{|supp(v)| <= m} <x, v> - (eps/2) |v|^2 = |x|_{2,(m)}^2 / (2 eps).
inline double sparse_conjugate(const std::vector<double>& x, double eps,
                               const SparseFamily& fam) {
  if (!(eps > 0.0)) throw std::invalid_argument("sparse_conjugate: eps must be positive");
  if (static_cast<int>(x.size()) != fam.n)
    throw std::invalid_argument("sparse_conjugate: dimension mismatch");
  return kyfan_norm_sq(x, fam.m) / (2.0 * eps);
}

/// Number of sign patterns with support size at most m (the empty pin counts).
inline std::uint64_t sparse_pin_count(int n, int m) {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, j)
  std::uint64_t pow2 = 1;
  for (int j = 0; j <= m; ++j) {
    total += binom * pow2;
    binom = binom * static_cast<std::uint64_t>(n - j) / static_cast<std::uint64_t>(j + 1);
    pow2 *= 2;
  }
  return total;
}

namespace detail {

template <typename Fn>
void for_each_combination(int n, int size, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(size));
  std::iota(idx.begin(), idx.end(), 0);
  if (size == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    int i = size - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// All sign patterns with support size <= m, ordered by support size, then
/// lexicographic support, then sign bits.
template <typename Fn>
void for_each_sparse_pattern(const SparseFamily& fam, Fn&& fn) {
  for (int size = 0; size <= fam.m; ++size) {
    for_each_combination(fam.n, size, [&](const std::vector<int>& supp) {
      for (std::uint32_t signs = 0; signs < (1u << size); ++signs) {
        PinVector u = PinVector::none(fam.n);
        for (int b = 0; b < size; ++b)
          u.set(supp[static_cast<std::size_t>(b)], (signs >> b) & 1u ? 1 : -1);
        fn(u);
      }
    });
  }
}

}  // namespace detail

/// The feasible sparse pins of nu: sign patterns with support size <= m whose
/// conditioning event has positive nu-probability, each exactly once. Throws
/// BudgetExceeded when the pattern family is larger than the budget (use the
/// sampling mode instead).
inline std::vector<PinVector> enumerate_sparse_pins(const CubeMeasure& nu,
                                                    const SparseFamily& fam,
                                                    std::uint64_t budget = 20'000'000) {
  if (nu.n() != fam.n) throw std::invalid_argument("enumerate_sparse_pins: dimension mismatch");
  const std::uint64_t total = sparse_pin_count(fam.n, fam.m);
  if (total > budget)
    throw BudgetExceeded("enumerate_sparse_pins: family has " + std::to_string(total) +
                         " patterns, above the budget of " + std::to_string(budget) +
                         "; use sampling mode");
  std::vector<PinVector> out;
  detail::for_each_sparse_pattern(fam, [&](const PinVector& u) {
    if (pin_mass(nu, u) > 0.0) out.push_back(u);
  });
  return out;
}

/// One feasible sparse pin by rejection: support size uniform on {0..m},
/// support uniform, signs uniform, resampled until the event is feasible.
inline PinVector sample_sparse_pin(const CubeMeasure& nu, const SparseFamily& fam, Rng& rng) {
  if (nu.n() != fam.n) throw std::invalid_argument("sample_sparse_pin: dimension mismatch");
  while (true) {
    const int size = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fam.m) + 1));
    PinVector u = PinVector::none(fam.n);
    for (int i : rng.sample_without_replacement(fam.n, size))
      u.set(i, rng.next_below(2) ? 1 : -1);
    if (pin_mass(nu, u) > 0.0) return u;
  }
}

struct SearchConfig {
  int max_support_exact = 3;
  int multistarts = 64;
  std::uint64_t seed = 0;
};

struct DvSparseBound {
  double value;
  TiltVector v;
  bool exact;  // the whole family was covered by support enumeration
};

namespace detail {

inline void tilted_coord_moments(const CubeMeasure& nu, const std::vector<double>& v,
                                 const std::vector<int>& coords, int i, double& mean_i,
                                 double& var_i) {
  double shift = -std::numeric_limits<double>::infinity();
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    shift = std::max(shift, dot_spins(v, coords, x));
  }
  long double den = 0.0L, num = 0.0L;
  for (State x = 0; x < nu.num_states(); ++x) {
    if (nu[x] == 0.0) continue;
    const double w = nu[x] * std::exp(dot_spins(v, coords, x) - shift);
    den += w;
    num += w * spin(x, i);
  }
  mean_i = static_cast<double>(num / den);
  var_i = std::max(0.0, 1.0 - mean_i * mean_i);
}

/// Coordinate-wise Newton ascent of v -> <target, v> - log E_nu[e^<v,x>] on a
/// fixed support. Concave; each coordinate slice has derivative
/// target_i - m_i(T_v nu) and second derivative -Var_{T_v nu}(x_i).
inline double maximize_on_support(const std::vector<double>& target, const CubeMeasure& nu,
                                  const std::vector<int>& supp, std::vector<double>& v) {
  constexpr double kGradTol = 1e-9;
  constexpr double kStepCap = 4.0;
  constexpr double kCoordCap = 40.0;
  for (int cycle = 0; cycle < 100; ++cycle) {
    double max_grad = 0.0;
    for (int i : supp) {
      double mi, vi;
      tilted_coord_moments(nu, v, supp, i, mi, vi);
      const double grad = target[static_cast<std::size_t>(i)] - mi;
      double& vc = v[static_cast<std::size_t>(i)];
      const bool at_cap = (vc >= kCoordCap && grad > 0.0) || (vc <= -kCoordCap && grad < 0.0);
      if (!at_cap) max_grad = std::max(max_grad, std::fabs(grad));
      double step;
      if (vi < 1e-14)
        step = grad > 1e-12 ? kStepCap : (grad < -1e-12 ? -kStepCap : 0.0);
      else
        step = std::clamp(grad / vi, -kStepCap, kStepCap);
      vc = std::clamp(vc + step, -kCoordCap, kCoordCap);
    }
    if (max_grad <= kGradTol) break;
  }
  long double lin = 0.0L;
  for (int i : supp)
    lin += static_cast<long double>(target[static_cast<std::size_t>(i)]) *
           v[static_cast<std::size_t>(i)];
  return static_cast<double>(lin) - log_laplace(nu, TiltVector(v)).f;
}

}  // namespace detail

/// Best Donsker-Varadhan lower bound on KL(mu || nu) over linear test
/// functions with coefficient vectors in the sparse family. Supports of size
/// min(m, max_support_exact) are enumerated exhaustively; when m is larger,
/// a greedy support plus seeded random supports of size m are searched too.
/// The result is a valid lower bound either way.
inline DvSparseBound dv_sparse_bound(const CubeMeasure& mu, const CubeMeasure& nu,
                                     const SparseFamily& fam, const SearchConfig& cfg = {}) {
  if (mu.n() != nu.n() || mu.n() != fam.n)
    throw std::invalid_argument("dv_sparse_bound: dimension mismatch");
  const int n = fam.n;
  const auto target = mean(mu);
  const auto nu_mean = mean(nu);

  double best = 0.0;
  std::vector<double> best_v(static_cast<std::size_t>(n), 0.0);

  auto try_support = [&](const std::vector<int>& supp) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    const double val = detail::maximize_on_support(target, nu, supp, v);
    if (val > best) {
      best = val;
      best_v = v;
    }
  };

  const bool exact = fam.m <= cfg.max_support_exact;
  const int base_size = std::min(fam.m, cfg.max_support_exact);
  detail::for_each_combination(n, base_size,
                               [&](const std::vector<int>& supp) { try_support(supp); });
  if (!exact) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::fabs(target[static_cast<std::size_t>(a)] - nu_mean[static_cast<std::size_t>(a)]) >
             std::fabs(target[static_cast<std::size_t>(b)] - nu_mean[static_cast<std::size_t>(b)]);
    });
    std::vector<int> greedy(order.begin(), order.begin() + fam.m);
    std::sort(greedy.begin(), greedy.end());
    try_support(greedy);
    Rng rng(derive_seed(cfg.seed, "dv_sparse_bound", 0));
    for (int s = 0; s < cfg.multistarts; ++s) {
      auto supp = rng.sample_without_replacement(n, fam.m);
      std::sort(supp.begin(), supp.end());
      try_support(supp);
    }
  }
  return {best, TiltVector(best_v), exact};
}

}  // namespace sparseloc

#pragma once

#include <cmath>
#include <vector>

#include "sparseloc/matrix.hpp"
#include "sparseloc/measure.hpp"

namespace sparseloc {

inline constexpr double kVarianceFloor = 1e-12;

/// Covariance, correlation, and influence matrices of a cube measure,
/// restricted to the active coordinates (variance above 1e-12).
struct InfluenceSummary {
  std::vector<int> active;
  std::vector<double> var;  // variances of the active coordinates
  Matrix cov;               // Cov_ij = E[x_i x_j] - m_i m_j
  Matrix cor;               // D^{-1/2} Cov D^{-1/2}
  Matrix psi;               // Cov D^{-1}
};

inline InfluenceSummary influence_summary(const CubeMeasure& nu) {
  const int n = nu.n();
  const auto m = mean(nu);
  std::vector<std::vector<long double>> second(
      static_cast<std::size_t>(n), std::vector<long double>(static_cast<std::size_t>(n), 0.0L));
  for (State x = 0; x < nu.num_states(); ++x) {
    const double p = nu[x];
    if (p == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      const double si = spin(x, i);
      for (int j = i; j < n; ++j)
        second[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += p * si * spin(x, j);
    }
  }

  InfluenceSummary out;
  for (int i = 0; i < n; ++i) {
    const double var = static_cast<double>(second[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]) -
                       m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
    if (var > kVarianceFloor) {
      out.active.push_back(i);
      out.var.push_back(var);
    }
  }
  const int a = static_cast<int>(out.active.size());
  out.cov = Matrix(a, a);
  out.cor = Matrix(a, a);
  out.psi = Matrix(a, a);
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < a; ++c) {
      const int i = out.active[static_cast<std::size_t>(r)];
      const int j = out.active[static_cast<std::size_t>(c)];
      const auto& row = second[static_cast<std::size_t>(std::min(i, j))];
      const double eij = static_cast<double>(row[static_cast<std::size_t>(std::max(i, j))]);
      const double cov = eij - m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)];
      out.cov(r, c) = cov;
      out.cor(r, c) = cov / std::sqrt(out.var[static_cast<std::size_t>(r)] *
                                      out.var[static_cast<std::size_t>(c)]);
      out.psi(r, c) = cov / out.var[static_cast<std::size_t>(c)];
    }
  return out;
}

/// Influence entries computed directly from conditional probabilities:
///   Psi_ij = P[x_i = +1 | x_j = +1] - P[x_i = +1 | x_j = -1],
/// over the same active set as influence_summary. Agrees with Cov D^{-1}.
inline Matrix psi_conditional_form(const CubeMeasure& nu) {
  const auto base = influence_summary(nu);
  const int a = static_cast<int>(base.active.size());
  const int n = nu.n();
  std::vector<long double> p_plus(static_cast<std::size_t>(n), 0.0L);
  std::vector<std::vector<long double>> joint(
      static_cast<std::size_t>(n), std::vector<long double>(static_cast<std::size_t>(n), 0.0L));
  for (State x = 0; x < nu.num_states(); ++x) {
    const double p = nu[x];
    if (p == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      if (!((x >> i) & 1u)) continue;
      p_plus[static_cast<std::size_t>(i)] += p;
      for (int j = 0; j < n; ++j)
        if ((x >> j) & 1u) joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += p;
    }
  }
  Matrix psi(a, a);
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < a; ++c) {
      const int i = base.active[static_cast<std::size_t>(r)];
      const int j = base.active[static_cast<std::size_t>(c)];
      const long double pj = p_plus[static_cast<std::size_t>(j)];
      const long double both = joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const long double only_i = p_plus[static_cast<std::size_t>(i)] - both;
      psi(r, c) = static_cast<double>(both / pj - only_i / (1.0L - pj));
    }
  return psi;
}

struct SimilarityReport {
  double similarity_gap;  // max |Psi - D^{1/2} Cor D^{-1/2}|
  double trace_gap;       // max_p |tr Psi^p - tr Cor^p|, p = 1..5
  double op_psi;
  double norm_product_bound;  // sqrt(|Psi|_{1->1} |Psi|_{inf->inf})
  bool ok;
};

/// Checks that Psi is diagonally similar to the symmetric Cor (entrywise and
/// through traces of powers, so the spectra agree) and that the operator norm
/// respects the interpolation bound between the 1->1 and inf->inf norms.
inline SimilarityReport similarity_check(const InfluenceSummary& s, double tol = 1e-8) {
  const int a = static_cast<int>(s.active.size());
  Matrix conj(a, a);
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < a; ++c)
      conj(r, c) = std::sqrt(s.var[static_cast<std::size_t>(r)] /
                             s.var[static_cast<std::size_t>(c)]) *
                   s.cor(r, c);
  SimilarityReport rep{};
  rep.similarity_gap = (s.psi - conj).max_abs();
  rep.trace_gap = 0.0;
  for (int p = 1; p <= 5; ++p)
    rep.trace_gap = std::max(rep.trace_gap,
                             std::fabs(trace_power(s.psi, p) - trace_power(s.cor, p)));
  const auto norms = matrix_norms(s.psi);
  rep.op_psi = norms.op;
  rep.norm_product_bound = std::sqrt(norms.one_to_one * norms.inf_to_inf);
  rep.ok = rep.similarity_gap <= tol && rep.trace_gap <= tol &&
           rep.op_psi <= rep.norm_product_bound + tol;
  return rep;
}

struct ComparabilityReport {
  bool ok;
  double sigma;  // sqrt of the variance floor
  double op_psi;
  double op_cor;
  double min_var;
};

/// Under a variance floor sigma_sq on active coordinates, the operator norms
/// of Psi and Cor differ by at most a factor 1/sigma in either direction
/// (diagonal similarity with conditioning bounded by sqrt(max var / min var)).
/// Throws VarianceFloorViolated when an active coordinate sits below the
/// floor.
inline ComparabilityReport comparability_check(const CubeMeasure& nu, double sigma_sq,
                                               double tol = 1e-9) {
  if (!(sigma_sq > 0.0))
    throw std::invalid_argument("comparability_check: variance floor must be positive");
  const auto s = influence_summary(nu);
  ComparabilityReport rep{};
  rep.sigma = std::sqrt(sigma_sq);
  rep.min_var = 1.0;
  for (std::size_t i = 0; i < s.var.size(); ++i) {
    rep.min_var = std::min(rep.min_var, s.var[i]);
    if (s.var[i] < sigma_sq - 1e-12)
      throw VarianceFloorViolated("comparability_check: active coordinate " +
                                  std::to_string(s.active[i]) + " has variance " +
                                  std::to_string(s.var[i]) + " below the floor");
  }
  rep.op_psi = operator_norm(s.psi);
  rep.op_cor = operator_norm(s.cor);
  rep.ok = rep.op_psi <= rep.op_cor / rep.sigma + tol &&
           rep.op_cor <= rep.op_psi / rep.sigma + tol;
  return rep;
}

}  // namespace sparseloc

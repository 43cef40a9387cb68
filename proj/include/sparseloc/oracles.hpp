#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "sparseloc/graph.hpp"
#include "sparseloc/indep_sets.hpp"
#include "sparseloc/sparse.hpp"

namespace sparseloc::oracles {

/// Reference value for sparse_conjugate: brute force over every support of
/// size <= m, maximizing sum_{i in S} x_i^2 / (2 eps) directly. No sorting.
inline double sparse_conjugate_enum(const std::vector<double>& x, double eps,
                                    const SparseFamily& fam) {
  const int n = static_cast<int>(x.size());
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    if (std::popcount(mask) > fam.m) continue;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1u) sum += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    best = std::max(best, sum / (2.0 * eps));
  }
  return best;
}

/// Final-to-initial entropy ratio of the pinning chain computed straight from
/// the definition: enumerate every (independent k-set, full ordering) pair,
/// average the fiber entropy after T pins. Factorial cost; tiny cases only.
inline double conservation_ratio_bruteforce(const Graph& g, int k, int T,
                                            const std::function<double(std::uint32_t)>& f) {
  const auto sets = enumerate_ik(g, k);
  if (sets.empty()) throw EmptySlice("conservation_ratio_bruteforce: empty slice");
  const auto ent_given_pins = [&](std::uint32_t pinned) {
    const std::uint32_t residual =
        g.all_vertices_mask() & ~pinned & ~g.neighborhood(pinned);
    const auto data =
        detail::fiber_data(g, pinned, residual, k - std::popcount(pinned), f);
    return data.ent_f;
  };
  const double ent0 = ent_given_pins(0);

  long double total = 0.0L;
  std::uint64_t count = 0;
  std::vector<int> members;
  for (std::uint32_t target : sets) {
    members.clear();
    for (int v = 0; v < g.n(); ++v)
      if ((target >> v) & 1u) members.push_back(v);
    std::vector<int> prefix;
    auto rec = [&](auto&& self, std::uint32_t used) -> void {
      if (static_cast<int>(prefix.size()) == T) {
        std::uint32_t pinned = 0;
        for (int v : prefix) pinned |= std::uint32_t{1} << v;
        total += ent_given_pins(pinned);
        ++count;
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
  return static_cast<double>(total / count) / ent0;
}

}  // namespace sparseloc::oracles

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "sparseloc/divergence.hpp"
#include "sparseloc/oracles.hpp"
#include "sparseloc/rng.hpp"
#include "sparseloc/sparse.hpp"

using namespace sparseloc;
using Catch::Approx;

TEST_CASE("support cap is the ceiling of c times n") {
  REQUIRE(SparseFamily(2, 0.5).m == 1);
  REQUIRE(SparseFamily(4, 0.5).m == 2);
  REQUIRE(SparseFamily(5, 0.5).m == 3);
  REQUIRE(SparseFamily(8, 1.0).m == 8);
  REQUIRE(SparseFamily(3, 0.01).m == 1);
  REQUIRE_THROWS_AS(SparseFamily(3, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(SparseFamily(3, 1.5), std::invalid_argument);
}

TEST_CASE("sign closure membership counts only nonzero entries") {
  const SparseFamily fam(4, 0.5);
  PinVector u = PinVector::none(4);
  u.set(0, 1);
  u.set(2, -1);
  REQUIRE(sign_closure_member(u, fam));
  u.set(3, 1);
  REQUIRE_FALSE(sign_closure_member(u, fam));
}

TEST_CASE("ky fan norm sums the m largest squares") {
  const std::vector<double> x = {3.0, -2.0, 1.0};
  REQUIRE(kyfan_norm_sq(x, 1) == Approx(9.0));
  REQUIRE(kyfan_norm_sq(x, 2) == Approx(13.0));
  REQUIRE(kyfan_norm_sq(x, 3) == Approx(14.0));
  REQUIRE_THROWS_AS(kyfan_norm_sq(x, 0), std::invalid_argument);
}

TEST_CASE("ky fan norm is monotone in m and sandwiched by the l2 norm") {
  Rng rng(59);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(16));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& e : x) e = rng.next_normal() * 3.0;
    const double full = kyfan_norm_sq(x, n);
    double prev = 0.0;
    for (int m = 1; m <= n; ++m) {
      const double cur = kyfan_norm_sq(x, m);
      REQUIRE(cur >= prev);
      REQUIRE(static_cast<long double>(full) * m <= static_cast<long double>(cur) * n);
      REQUIRE(cur <= full);
      prev = cur;
    }
  }
}

TEST_CASE("sparse conjugate closed form on a hand example") {
  // n=2, c=0.5 -> m=1; best single coordinate of (3,4) is 16/(2*1)
  REQUIRE(sparse_conjugate({3.0, 4.0}, 1.0, SparseFamily(2, 0.5)) == Approx(8.0));
}

TEST_CASE("sparse conjugate agrees with the per-support oracle") {
  Rng rng(61);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(10));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& e : x) e = rng.next_normal() * 2.0;
    const double eps = 0.25 * (1 + rng.next_below(16));
    const SparseFamily fam(n, 0.05 + 0.95 * rng.next_double());
    REQUIRE(sparse_conjugate(x, eps, fam) ==
            Approx(oracles::sparse_conjugate_enum(x, eps, fam)).margin(1e-9));
  }
}

TEST_CASE("pin pattern count over supports up to m") {
  REQUIRE(sparse_pin_count(2, 1) == 5);    // empty + 2 coords * 2 signs
  REQUIRE(sparse_pin_count(2, 2) == 9);
  REQUIRE(sparse_pin_count(4, 2) == 1 + 8 + 24);
}

TEST_CASE("pin enumeration returns exactly the feasible patterns, no duplicates") {
  const SparseFamily fam(2, 0.5);
  const auto uniform_pins = enumerate_sparse_pins(CubeMeasure::uniform(2), fam);
  REQUIRE(uniform_pins.size() == 5);

  // point mass at (+,+): any -1 pin is infeasible
  const auto pm_pins = enumerate_sparse_pins(CubeMeasure::point_mass(2, 0b11), fam);
  REQUIRE(pm_pins.size() == 3);  // empty, x0=+1, x1=+1
  std::set<std::pair<State, State>> seen;
  for (const auto& u : pm_pins) {
    REQUIRE(u.support_size() <= fam.m);
    REQUIRE(seen.insert({u.support_mask(), u.plus_mask()}).second);
    REQUIRE(pin_mass(CubeMeasure::point_mass(2, 0b11), u) > 0.0);
  }
}

TEST_CASE("pin enumeration rejects budgets it cannot honor") {
  REQUIRE_THROWS_AS(enumerate_sparse_pins(CubeMeasure::uniform(4), SparseFamily(4, 1.0), 10),
                    BudgetExceeded);
}

TEST_CASE("sampled pins are feasible members of the family") {
  Rng rng(67);
  const auto nu = CubeMeasure::point_mass(3, 0b101);
  const SparseFamily fam(3, 0.7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto u = sample_sparse_pin(nu, fam, rng);
    REQUIRE(u.support_size() <= fam.m);
    REQUIRE(pin_mass(nu, u) > 0.0);
  }
}

TEST_CASE("sparse lower bound never exceeds the divergence it certifies") {
  Rng rng(71);
  SearchConfig cfg;
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(5));
    std::vector<double> wm(std::size_t{1} << n), wn(std::size_t{1} << n);
    for (std::size_t i = 0; i < wm.size(); ++i) {
      wm[i] = std::exp(rng.next_normal());
      wn[i] = std::exp(rng.next_normal());
    }
    const auto mu = CubeMeasure::from_weights(n, wm);
    const auto nu = CubeMeasure::from_weights(n, wn);
    const double kl = divergences(mu, nu).kl;
    const auto bound = dv_sparse_bound(mu, nu, SparseFamily(n, 0.5), cfg);
    REQUIRE(bound.value >= -1e-12);
    REQUIRE(bound.value <= kl + 1e-9);
  }
}

TEST_CASE("single-coordinate case saturates the divergence") {
  // on one coordinate every test function is affine, so the restricted
  // supremum reaches KL itself
  const auto mu = product_measure({0.3});
  const auto nu = product_measure({-0.2});
  const double kl = divergences(mu, nu).kl;
  const auto bound = dv_sparse_bound(mu, nu, SparseFamily(1, 1.0), SearchConfig{});
  REQUIRE(bound.exact);
  REQUIRE(bound.value == Approx(kl).margin(1e-8));
}

TEST_CASE("independent coordinates with full support saturate the divergence") {
  const auto mu = product_measure({0.4, -0.1});
  const auto nu = product_measure({-0.3, 0.5});
  const double kl = divergences(mu, nu).kl;
  const auto bound = dv_sparse_bound(mu, nu, SparseFamily(2, 1.0), SearchConfig{});
  REQUIRE(bound.value == Approx(kl).margin(1e-7));
}

TEST_CASE("widening the family never lowers the bound") {
  Rng rng(73);
  SearchConfig cfg;
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 3;
    std::vector<double> wm(8), wn(8);
    for (std::size_t i = 0; i < 8; ++i) {
      wm[i] = std::exp(rng.next_normal());
      wn[i] = std::exp(rng.next_normal());
    }
    const auto mu = CubeMeasure::from_weights(n, wm);
    const auto nu = CubeMeasure::from_weights(n, wn);
    double prev = -1.0;
    for (double c : {0.3, 0.7, 1.0}) {
      const double val = dv_sparse_bound(mu, nu, SparseFamily(n, c), cfg).value;
      REQUIRE(val >= prev - 1e-9);
      prev = val;
    }
  }
}

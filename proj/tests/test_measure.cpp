#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sparseloc/measure.hpp"
#include "sparseloc/rng.hpp"

using namespace sparseloc;
using Catch::Approx;

TEST_CASE("cube measure renormalizes tiny mass drift and rejects large drift") {
  std::vector<double> w = {0.25, 0.25, 0.25, 0.25 + 5e-10};
  const CubeMeasure nu(2, w);
  double total = 0.0;
  for (State x = 0; x < 4; ++x) total += nu[x];
  REQUIRE(total == Approx(1.0).margin(1e-15));

  w[3] = 0.25 + 1e-6;
  REQUIRE_THROWS_AS(CubeMeasure(2, w), std::invalid_argument);
}

TEST_CASE("from_weights normalizes arbitrary positive weights") {
  const auto nu = CubeMeasure::from_weights(2, {1.0, 2.0, 3.0, 4.0});
  REQUIRE(nu[0] == Approx(0.1));
  REQUIRE(nu[3] == Approx(0.4));
}

TEST_CASE("product measure has the requested means") {
  const std::vector<double> m = {0.2, -0.5, 0.0, 0.7};
  const auto nu = product_measure(m);
  const auto got = mean(nu);
  for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(got[i] == Approx(m[i]).margin(1e-12));
}

TEST_CASE("tilting a fair coin moves the mean to tanh") {
  const auto nu = CubeMeasure::uniform(1);
  const auto tilted = tilt(nu, TiltVector({1.0}));
  REQUIRE(mean(tilted)[0] == Approx(std::tanh(1.0)).margin(1e-14));
  REQUIRE(tilted_mean(nu, TiltVector({1.0}))[0] == Approx(std::tanh(1.0)).margin(1e-14));
}

TEST_CASE("tilts compose additively") {
  Rng rng(5);
  const int n = 4;
  std::vector<double> wa(1 << n), u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
  for (double& x : wa) x = std::exp(rng.next_normal());
  for (double& x : u) x = rng.next_normal();
  for (double& x : v) x = rng.next_normal();
  const auto nu = CubeMeasure::from_weights(n, wa);
  const auto once = tilt(nu, TiltVector(u) + TiltVector(v));
  const auto twice = tilt(tilt(nu, TiltVector(u)), TiltVector(v));
  for (State x = 0; x < (State{1} << n); ++x)
    REQUIRE(once[x] == Approx(twice[x]).margin(1e-12));
}

TEST_CASE("pinning conditions on the event and rejects impossible pins") {
  const auto nu = CubeMeasure::point_mass(2, 0b11);
  PinVector u = PinVector::none(2);
  u.set(0, 1);
  const auto pinned = pin(nu, u);
  REQUIRE(pinned[0b11] == Approx(1.0));
  u.set(0, -1);
  REQUIRE_THROWS_AS(pin(nu, u), InfeasiblePin);
}

TEST_CASE("pin and tilt commute") {
  Rng rng(6);
  const int n = 4;
  std::vector<double> w(1 << n), v(static_cast<std::size_t>(n));
  for (double& x : w) x = std::exp(rng.next_normal());
  for (double& x : v) x = rng.next_normal();
  const auto nu = CubeMeasure::from_weights(n, w);
  PinVector u = PinVector::none(n);
  u.set(1, 1);
  u.set(3, -1);
  const auto a = pin(tilt(nu, TiltVector(v)), u);
  const auto b = tilt(pin(nu, u), TiltVector(v));
  for (State x = 0; x < (State{1} << n); ++x) REQUIRE(a[x] == Approx(b[x]).margin(1e-12));
}

TEST_CASE("pin_mass matches the summed event probability") {
  const auto nu = CubeMeasure::uniform(3);
  PinVector u = PinVector::none(3);
  u.set(0, 1);
  REQUIRE(pin_mass(nu, u) == Approx(0.5).margin(1e-15));
  u.set(2, -1);
  REQUIRE(pin_mass(nu, u) == Approx(0.25).margin(1e-15));
}

TEST_CASE("slice atoms must have the declared support size") {
  std::map<State, double> w{{0b011, 0.5}, {0b101, 0.5}};
  const auto nu = SliceMeasure::from_weights(3, 2, w);
  REQUIRE(nu.prob(0b011) == Approx(0.5));
  w[0b111] = 0.1;
  REQUIRE_THROWS_AS(SliceMeasure::from_weights(3, 2, w), std::invalid_argument);
}

TEST_CASE("slice pushforward places subsets at signed states") {
  const auto nu = SliceMeasure::from_weights(3, 1, {{0b001, 0.25}, {0b100, 0.75}});
  const auto cube = slice_to_cube(nu);
  REQUIRE(cube[0b001] == Approx(0.25));
  REQUIRE(cube[0b100] == Approx(0.75));
  REQUIRE(cube[0b010] == 0.0);
}

TEST_CASE("cube mean of a pushforward matches inclusion probabilities") {
  const auto nu =
      SliceMeasure::from_weights(4, 2, {{0b0011, 0.2}, {0b0101, 0.3}, {0b1100, 0.5}});
  const auto m = mean(slice_to_cube(nu));
  const auto incl = inclusion_probs(nu);
  for (int i = 0; i < 4; ++i)
    REQUIRE(m[static_cast<std::size_t>(i)] ==
            Approx(2.0 * incl[static_cast<std::size_t>(i)] - 1.0).margin(1e-10));
}

TEST_CASE("slice marginals divide inclusion probabilities by k") {
  const auto nu = SliceMeasure::from_weights(4, 2, {{0b0011, 0.4}, {0b1010, 0.6}});
  const auto q = slice_marginals(nu);
  const auto incl = inclusion_probs(nu);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    REQUIRE(q[static_cast<std::size_t>(i)] ==
            Approx(incl[static_cast<std::size_t>(i)] / 2.0).margin(1e-15));
    total += q[static_cast<std::size_t>(i)];
  }
  REQUIRE(total == Approx(1.0).margin(1e-12));
}

TEST_CASE("tilting a slice reweights by the field on the support") {
  const auto nu = SliceMeasure::uniform_over(3, 1, {0b001, 0b010, 0b100});
  const auto tilted = tilt_slice(nu, TiltVector({1.0, 0.0, 0.0}));
  // weights exp(<v, 2*1_S - 1>) over the three singletons
  const double a = std::exp(1.0), b = std::exp(-1.0);
  const double z = a + 2.0 * b;
  REQUIRE(tilted.prob(0b001) == Approx(a / z).margin(1e-12));
  REQUIRE(tilted.prob(0b010) == Approx(b / z).margin(1e-12));
}

TEST_CASE("pinned tilted coordinate mean agrees with the assembled measure") {
  Rng rng(8);
  const int n = 5;
  std::vector<double> w(1 << n), v(static_cast<std::size_t>(n));
  for (double& x : w) x = std::exp(rng.next_normal());
  for (double& x : v) x = rng.next_normal();
  const auto nu = CubeMeasure::from_weights(n, w);
  PinVector u = PinVector::none(n);
  u.set(2, 1);
  const double direct =
      pinned_tilted_mean_coord(nu, TiltVector(v), 0.7, u.support_mask(), u.plus_mask(), 4);
  std::vector<double> scaled(v);
  for (double& x : scaled) x *= 0.7;
  const auto assembled = mean(pin(tilt(nu, TiltVector(scaled)), u));
  REQUIRE(direct == Approx(assembled[4]).margin(1e-12));
}

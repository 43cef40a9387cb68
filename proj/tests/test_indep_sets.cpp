#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sparseloc/graph_gen.hpp"
#include "sparseloc/indep_sets.hpp"
#include "sparseloc/oracles.hpp"

using namespace sparseloc;
using Catch::Approx;

TEST_CASE("independent pair enumeration on a path") {
  const auto sets = enumerate_ik(path_graph(5), 2);
  REQUIRE(sets.size() == 6);  // 10 pairs minus 4 edges
  REQUIRE(sets.front() == 0b00101u);  // {0,2} first in lexicographic order
  for (auto s : sets) REQUIRE(path_graph(5).is_independent(s));
}

TEST_CASE("the empty set is the unique size-zero solution") {
  REQUIRE(enumerate_ik(complete_graph(4), 0) == std::vector<std::uint32_t>{0});
}

TEST_CASE("restricting the allowed vertices restricts the enumeration") {
  const auto sets = enumerate_ik(path_graph(5), 2, 0b00111u);
  REQUIRE(sets == std::vector<std::uint32_t>{0b00101u});
}

TEST_CASE("uniform slice refuses empty instances") {
  REQUIRE_THROWS_AS(uniform_ik(complete_graph(3), 2), EmptySlice);
  const auto nu = uniform_ik(cycle_graph(4), 2);
  REQUIRE(nu.prob(0b0101) == Approx(0.5));
  REQUIRE(nu.prob(0b1010) == Approx(0.5));
}

TEST_CASE("critical density constants in exact arithmetic") {
  REQUIRE(alpha_c_rational(3) == std::pair<std::uint64_t, std::uint64_t>{4, 17});
  REQUIRE(alpha_c_rational(4) == std::pair<std::uint64_t, std::uint64_t>{27, 151});
  REQUIRE(alpha_c(3) == Approx(4.0 / 17.0).margin(1e-15));
  for (int d = 3; d <= 50; ++d) {
    const double scaled = (d + 1) * alpha_c(d);
    REQUIRE(scaled > 0.5);
    REQUIRE(scaled < 1.0);
  }
  REQUIRE_THROWS_AS(alpha_c(2), std::invalid_argument);
  REQUIRE_THROWS_AS(alpha_c_rational(60), std::overflow_error);
}

TEST_CASE("pinning a vertex removes it and its neighbors from the residual") {
  const auto g = path_graph(5);
  auto state = initial_chain_state(g, 2);
  REQUIRE(state.residual_mask == 0b11111u);
  state = chain_step(g, state, 0b00101u, 0);
  REQUIRE(state.t == 1);
  REQUIRE(state.pinned == std::vector<int>{0});
  REQUIRE(state.residual_mask == 0b11100u);  // drops 0 and its neighbor 1
  REQUIRE(state.remaining_k == 1);
  state = chain_step(g, state, 0b00101u, 2);
  REQUIRE(state.residual_mask == 0b10000u);
  REQUIRE_THROWS_AS(chain_step(g, state, 0b00101u, 4), std::out_of_range);
}

TEST_CASE("chain steps validate the target set") {
  const auto g = path_graph(5);
  const auto state = initial_chain_state(g, 2);
  REQUIRE_THROWS_AS(chain_step(g, state, 0b00011u, 0), std::invalid_argument);  // not independent
  REQUIRE_THROWS_AS(chain_step(g, state, 0b00101u, 1), std::invalid_argument);  // not a member
}

TEST_CASE("run_chain records one state per pin") {
  const auto trace = run_chain(path_graph(5), 2, 0b01001u, {3, 0}, 2);
  REQUIRE(trace.states.size() == 3);
  REQUIRE(trace.states[2].remaining_k == 0);
  REQUIRE(trace.states[2].pinned == std::vector<int>{3, 0});
}

TEST_CASE("conditioning on a pinned prefix leaves the residual slice uniform") {
  for (const auto& g : {path_graph(5), cycle_graph(6), grid_graph(2, 3)}) {
    for (int k = 1; k <= 3; ++k) {
      if (enumerate_ik(g, k).empty()) continue;
      for (int t = 0; t <= k; ++t) {
        const auto rep = residual_uniformity_check(g, k, t);
        REQUIRE(rep.ok);
        REQUIRE(rep.max_gap <= 1e-10);
      }
    }
  }
}

TEST_CASE("residual uniformity enforces its pair budget") {
  REQUIRE_THROWS_AS(residual_uniformity_check(path_graph(8), 3, 2, 10), BudgetExceeded);
}

TEST_CASE("density window flags a slice that is too dense") {
  const auto g = path_graph(5);
  const auto trace = run_chain(g, 2, 0b00101u, {0, 2}, 1);
  const auto rep = density_window_check(g, 2, 1, 0.5, 0.1, 0.1, trace);
  REQUIRE_FALSE(rep.window_ok);  // k = 2 exceeds (1-delta) alpha_c(3) n
  REQUIRE(rep.first_violation_t == 0);
  REQUIRE(rep.residual_size_ok);
}

TEST_CASE("density window accepts a sparse long path") {
  const auto g = path_graph(10);
  const auto trace = run_chain(g, 2, 0b0000000101u, {0, 2}, 1);
  const auto rep = density_window_check(g, 2, 1, 0.5, 0.2, 0.1, trace);
  REQUIRE(rep.preconditions_ok);
  REQUIRE(rep.window_ok);
  REQUIRE(rep.residual_size_ok);
}

TEST_CASE("one-step decomposition identity holds exactly") {
  for (const auto& g : {path_graph(5), cycle_graph(6), grid_graph(2, 4)}) {
    FSpec fs;
    fs.seed = 123;
    const auto f = make_f(fs, g.n());
    for (int k = 2; k <= 3; ++k) {
      if (enumerate_ik(g, k).empty()) continue;
      for (int t = 0; t < k; ++t) {
        const auto rep = one_step_decomposition_check(g, k, t, f);
        REQUIRE(rep.gap <= 1e-10);
        REQUIRE(rep.states_checked > 0);
      }
    }
  }
}

TEST_CASE("indicator weights work in the decomposition too") {
  FSpec fs;
  fs.kind = "one_plus_indicator";
  fs.vertex = 2;
  const auto rep = one_step_decomposition_check(path_graph(6), 2, 0, make_f(fs, 6));
  REQUIRE(rep.gap <= 1e-12);
}

TEST_CASE("exp_linear weights are deterministic in the seed") {
  FSpec fs;
  fs.seed = 7;
  const auto f1 = make_f(fs, 5);
  const auto f2 = make_f(fs, 5);
  for (std::uint32_t s : {0b00101u, 0b10010u, 0b00000u}) REQUIRE(f1(s) == f2(s));
  REQUIRE(make_f(fs, 5)(0b00000u) == Approx(1.0));
}

TEST_CASE("trivial chains conserve all the entropy") {
  ConservationConfig cfg;
  cfg.k = 2;
  cfg.ell = 2;  // T = 0
  cfg.f.seed = 5;
  const auto rep = entropy_conservation_experiment(path_graph(5), cfg);
  REQUIRE(rep.ratio == Approx(1.0).margin(1e-12));
  REQUIRE(rep.per_step_c.empty());
  REQUIRE(rep.product_bound == Approx(1.0));
  REQUIRE(rep.step_entropy.size() == 1);
}

TEST_CASE("exact conservation ratio matches the brute-force definition") {
  ConservationConfig cfg;
  cfg.k = 2;
  cfg.ell = 1;
  cfg.f.seed = 9;
  const auto rep = entropy_conservation_experiment(path_graph(5), cfg);
  const double oracle =
      oracles::conservation_ratio_bruteforce(path_graph(5), 2, 1, make_f(cfg.f, 5));
  REQUIRE(rep.mode == "exact");
  REQUIRE(rep.ratio == Approx(oracle).margin(1e-12));
  REQUIRE(rep.ratio > 0.0);
  REQUIRE(rep.ratio <= 1.0 + 1e-9);
  REQUIRE(rep.step_entropy.size() == 2);
  REQUIRE(rep.initial_entropy > 0.0);
}

TEST_CASE("monte carlo conservation agrees with the exact chain") {
  ConservationConfig exact_cfg;
  exact_cfg.k = 3;
  exact_cfg.ell = 1;
  exact_cfg.f.seed = 11;
  const auto g = path_graph(7);
  const auto exact = entropy_conservation_experiment(g, exact_cfg);
  auto mc_cfg = exact_cfg;
  mc_cfg.mode = "mc";
  mc_cfg.samples = 20000;
  mc_cfg.seed = 1;
  const auto mc = entropy_conservation_experiment(g, mc_cfg);
  REQUIRE(mc.standard_error > 0.0);
  REQUIRE(std::fabs(mc.ratio - exact.ratio) <= 3.0 * mc.standard_error + 1e-9);
}

TEST_CASE("exact mode keeps the ratio above the measured product bound") {
  ConservationConfig cfg;
  cfg.k = 3;
  cfg.ell = 1;
  cfg.f.seed = 13;
  cfg.f.scale = 0.5;
  const auto rep = entropy_conservation_experiment(cycle_graph(8), cfg);
  bool factors_positive = true;
  for (std::size_t t = 0; t < rep.per_step_c.size(); ++t)
    if (rep.per_step_c[t] >= static_cast<double>(cfg.k - static_cast<int>(t)))
      factors_positive = false;
  REQUIRE(factors_positive);
  REQUIRE(rep.ratio >= rep.product_bound - 1e-12);
}

TEST_CASE("constant weights abort the conservation experiment") {
  // on K1 the slice has a single set, so any f is constant and entropy is zero
  ConservationConfig cfg;
  cfg.k = 1;
  cfg.ell = 1;
  cfg.f.kind = "one_plus_indicator";
  cfg.f.vertex = 0;
  REQUIRE_THROWS_AS(entropy_conservation_experiment(path_graph(1), cfg), std::invalid_argument);
}

TEST_CASE("precondition flag reports dense instances without refusing them") {
  ConservationConfig cfg;
  cfg.k = 2;
  cfg.ell = 1;
  cfg.f.seed = 17;
  const auto rep = entropy_conservation_experiment(path_graph(5), cfg);
  REQUIRE(rep.precondition_violated);  // k = 2 sits above the density window
}

TEST_CASE("down-up step preserves size and independence") {
  const auto g = cycle_graph(6);
  Rng rng(83);
  std::uint32_t set = 0b010101u;
  for (int step = 0; step < 500; ++step) {
    set = down_up_step(g, 3, set, rng);
    REQUIRE(std::popcount(set) == 3);
    REQUIRE(g.is_independent(set));
  }
}

TEST_CASE("down-up kernel is doubly stochastic and fixes the uniform law") {
  for (const auto& g : {path_graph(6), cycle_graph(7), complete_bipartite(3, 3)}) {
    for (int k = 1; k <= 3; ++k) {
      const auto sets = enumerate_ik(g, k);
      if (sets.empty()) continue;
      const auto kernel = down_up_kernel(g, k);
      const int size = kernel.rows();
      for (int i = 0; i < size; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < size; ++j) {
          row += kernel(i, j);
          col += kernel(j, i);
          REQUIRE(kernel(i, j) >= 0.0);
        }
        REQUIRE(row == Approx(1.0).margin(1e-12));
        REQUIRE(col == Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("the antipodal two-atom walk cannot move") {
  const auto kernel = down_up_kernel(cycle_graph(4), 2);
  REQUIRE(kernel.rows() == 2);
  REQUIRE((kernel - Matrix::identity(2)).max_abs() <= 1e-15);
}

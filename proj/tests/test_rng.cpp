#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "sparseloc/rng.hpp"

using namespace sparseloc;

TEST_CASE("identical seeds replay the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("derive_seed separates components and tasks") {
  const auto root = derive_seed(7, "alpha", 0);
  REQUIRE(derive_seed(7, "alpha", 0) == root);
  REQUIRE(derive_seed(7, "alpha", 1) != root);
  REQUIRE(derive_seed(7, "beta", 0) != root);
  REQUIRE(derive_seed(8, "alpha", 0) != root);
}

TEST_CASE("next_double lands in [0,1)") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("next_below respects the bound and hits every residue") {
  Rng rng(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.next_below(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 7);
}

TEST_CASE("shuffle yields a permutation") {
  Rng rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) REQUIRE(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("sample_without_replacement draws distinct in-range values") {
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    auto s = rng.sample_without_replacement(20, 6);
    REQUIRE(s.size() == 6);
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i) REQUIRE(s[i - 1] < s[i]);
    for (int x : s) {
      REQUIRE(x >= 0);
      REQUIRE(x < 20);
    }
  }
}

TEST_CASE("normal draws have sane first moments") {
  Rng rng(13);
  long double sum = 0.0L, sq = 0.0L;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sq += z * z;
  }
  REQUIRE(std::fabs(static_cast<double>(sum / trials)) < 0.02);
  REQUIRE(std::fabs(static_cast<double>(sq / trials) - 1.0) < 0.03);
}

TEST_CASE("parallel_chunks covers the range once, independent of thread count") {
  const std::size_t count = 10007, chunk = 64;
  auto collect = [&](int threads) {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_chunk(
        (count + chunk - 1) / chunk);
    parallel_chunks(count, chunk, threads,
                    [&](std::size_t idx, std::size_t begin, std::size_t end) {
                      per_chunk[idx].push_back({begin, end});
                    });
    return per_chunk;
  };
  const auto serial = collect(1);
  const auto threaded = collect(4);
  REQUIRE(serial == threaded);
  std::size_t covered = 0;
  for (const auto& c : serial) {
    REQUIRE(c.size() == 1);
    covered += c[0].second - c[0].first;
  }
  REQUIRE(covered == count);
}

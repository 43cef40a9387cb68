#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <thread>
#include <vector>

namespace sparseloc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// xoshiro256** with explicit double/normal transforms, so that streams are
/// byte-reproducible across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = detail::splitmix64(sm);
    has_spare_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in {0, ..., n-1}; n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Exponential with the given rate (> 0).
  double next_exponential(double rate) {
    double u = next_double();
    while (u <= 0.0) u = next_double();
    return -std::log(u) / rate;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct values from {0, ..., n-1}, in selection order.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(next_below(static_cast<std::uint64_t>(n - i)));
      out.push_back(pool[j]);
      std::swap(pool[j], pool[static_cast<std::size_t>(n - i - 1)]);
    }
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_;
};

/// Child seed for (component, task), independent of thread schedule.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                                 std::uint64_t task = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(root >> (8 * i)));
  for (char ch : component) mix_byte(static_cast<unsigned char>(ch));
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(task >> (8 * i)));
  return detail::splitmix64(h);
}

/// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, count).
/// The chunk decomposition depends only on chunk_size, so reductions indexed
/// by chunk are identical for every thread count.
template <typename Fn>
void parallel_chunks(std::size_t count, std::size_t chunk_size, int threads,
                     Fn&& fn) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (count + chunk_size - 1) / chunk_size;
  const auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(count, begin + chunk_size);
    fn(c, begin, end);
  };
  if (threads <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  const int n_workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), n_chunks));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t c = static_cast<std::size_t>(w); c < n_chunks;
           c += static_cast<std::size_t>(n_workers)) {
        run_chunk(c);
      }
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace sparseloc

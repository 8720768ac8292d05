#pragma once

// Deterministic random rationals and chunked parallel loops. Each chunk owns
// its own generator seeded from (seed, chunk index), so results do not depend
// on how many threads run the chunks.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "stabcert/rational.hpp"

namespace stabcert {

using Rng = std::mt19937_64;

inline constexpr std::size_t kSampleChunk = 4096;

inline Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return Rng(seq);
}

/// Uniform integer in [lo, hi] from raw generator output.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng() % span);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// p/q with |p| <= num_max and 1 <= q <= den_max.
inline Rational random_rational(Rng& rng, std::int64_t num_max = 1000, std::int64_t den_max = 1000) {
  const auto p = uniform_int(rng, -num_max, num_max);
  const auto q = uniform_int(rng, 1, den_max);
  return Rational(p, q);
}

/// Rational in [0, 1] with denominator <= den_max.
inline Rational random_unit_rational(Rng& rng, std::int64_t den_max = 1000) {
  const auto q = uniform_int(rng, 1, den_max);
  return Rational(uniform_int(rng, 0, q), q);
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs fn(chunk, begin, end) over [0, total) in fixed-size chunks and returns
/// the per-chunk results in chunk order.
template <class R>
std::vector<R> parallel_chunks(std::size_t total, unsigned threads,
                               const std::function<R(std::size_t, std::size_t, std::size_t)>& fn,
                               std::size_t chunk_size = kSampleChunk) {
  const std::size_t chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<R> out(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++)
      out[c] = fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace stabcert

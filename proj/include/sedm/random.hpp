#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace sedm {

/// Identifier recorded in store headers for the generator family below.
inline constexpr const char* kGeneratorId = "mt19937_64+splitmix64-substreams";

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for substream `stream` of `master_seed`. Depends only on the pair, so
/// work can be distributed over threads in any order.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream);

/// Engine for substream `stream`. std::mt19937_64 output is fixed by the
/// standard; the helpers below avoid the implementation-defined std
/// distributions so results are identical across toolchains.
std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream);

/// Uniform variate in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& engine);

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(std::mt19937_64& engine, std::size_t n);

/// Standard normal variate (Box-Muller, one draw per call).
double standard_normal(std::mt19937_64& engine);

/// Fisher-Yates shuffle driven by uniform_index.
template <class T>
void shuffle(std::span<T> items, std::mt19937_64& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(engine, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace sedm

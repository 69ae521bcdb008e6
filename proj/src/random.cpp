#include "sedm/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sedm {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream) {
  return mix64(mix64(master_seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  return std::mt19937_64(substream_seed(master_seed, stream));
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& engine, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t range = n;
  // Rejection sampling on the top of the 64-bit range keeps it unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double standard_normal(std::mt19937_64& engine) {
  double u1;
  do {
    u1 = uniform01(engine);
  } while (u1 <= 0.0);
  double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sedm

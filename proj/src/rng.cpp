#include "crat/rng.hpp"

#include <cmath>

namespace crat {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix64(seed + kGamma)), counter_(0) {}

Rng::Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

std::uint64_t Rng::next_u64() {
  counter_ += kGamma;
  return mix64(key_ ^ counter_);
}

double Rng::next_double() {
  // (k + 0.5) / 2^53 for k in [0, 2^53): strictly inside (0,1).
  const std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::next_gaussian() {
  const double u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

double Rng::next_gumbel() {
  return -std::log(-std::log(next_double()));
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  // Rejection sampling on the top bits keeps the draw unbiased.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

Rng Rng::split(std::uint64_t label) const {
  return Rng(mix64(key_ ^ mix64(label + kGamma)), 0);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace crat

#pragma once

#include <cstdint>
#include <vector>

namespace crat {

// Counter-based splittable PRNG (splitmix64 core). The output stream is a
// pure function of (key, counter), so identical seeds give identical streams
// on every platform, and split() derives an independent substream from a
// label without touching the parent's counter.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1 exactly.
  double next_double();

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double next_gaussian();

  // Gumbel(0,1): -log(-log(u)).
  double next_gumbel();

  // Uniform integer in [0, n). Requires n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Substream keyed by (this stream's key, label). Independent of how many
  // values the parent has produced.
  Rng split(std::uint64_t label) const;

  // Fisher-Yates over indices 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  Rng(std::uint64_t key, std::uint64_t counter);
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace crat

#pragma once

#include <cstdint>
#include <span>

#include "rpca/linop.hpp"

namespace rpca {

/// Counter-based standard normal stream. Entry `index` depends only on (seed, index), so
/// any slice of the stream can be generated independently and reproducibly.
///
/// Uniforms come from a SplitMix64 finalizer over (key, counter); pairs of entries
/// (2p, 2p+1) share one Box-Muller draw.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed);

  double operator()(std::uint64_t index) const;
  void fill(std::span<double> out, std::uint64_t offset = 0) const;

 private:
  double uniform(std::uint64_t counter) const;
  std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// rows x cols matrix whose row-major entry e is stream(e).
Matrix gaussian_block(Index rows, Index cols, std::uint64_t seed);

}  // namespace rpca

#include "rpca/random.hpp"

#include <cmath>
#include <numbers>

namespace rpca {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

NormalStream::NormalStream(std::uint64_t seed) : key_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

// Open interval (0, 1): 53 random bits, offset by half an ulp.
double NormalStream::uniform(std::uint64_t counter) const {
  const std::uint64_t bits = splitmix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::operator()(std::uint64_t index) const {
  const std::uint64_t pair = index >> 1;
  const double radius = std::sqrt(-2.0 * std::log(uniform(2 * pair)));
  const double angle = 2.0 * std::numbers::pi * uniform(2 * pair + 1);
  return radius * ((index & 1) ? std::sin(angle) : std::cos(angle));
}

void NormalStream::fill(std::span<double> out, std::uint64_t offset) const {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (*this)(offset + j);
}

Matrix gaussian_block(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ContractViolation("gaussian_block: dimensions must be positive");
  const NormalStream stream(seed);
  Matrix G(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      G(r, c) = stream(static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(cols) + static_cast<std::uint64_t>(c));
    }
  }
  return G;
}

}  // namespace rpca

#include "iflow/random.hpp"

#include <vector>

namespace iflow {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~0ULL - (~0ULL % bound);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

namespace {

double pairwise(std::span<const double> partials) {
  if (partials.empty()) return 0.0;
  if (partials.size() == 1) return partials[0];
  const std::size_t half = partials.size() / 2;
  return pairwise(partials.first(half)) + pairwise(partials.subspan(half));
}

}  // namespace

double deterministic_sum(std::span<const double> terms) {
  std::vector<double> partials;
  partials.reserve(terms.size() / kSumBlock + 1);
  for (std::size_t begin = 0; begin < terms.size(); begin += kSumBlock) {
    const std::size_t end = std::min(terms.size(), begin + kSumBlock);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += terms[i];
    partials.push_back(acc);
  }
  return pairwise(partials);
}

}  // namespace iflow

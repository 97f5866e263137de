#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace iflow {

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for stream `index` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Platform-stable generator. std::mt19937_64 is fully specified by the
/// standard; the floating-point and bounded draws are done here rather than
/// through <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Sum with a fixed reduction order: consecutive blocks of
/// `kSumBlock` terms are summed left to right, then block partials are
/// combined by a balanced pairwise tree. The result depends only on the input.
inline constexpr std::size_t kSumBlock = 1024;
double deterministic_sum(std::span<const double> terms);

}  // namespace iflow

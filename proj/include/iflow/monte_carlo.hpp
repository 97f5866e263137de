#pragma once

#include "iflow/info_functionals.hpp"
#include "iflow/system_spec.hpp"
#include "iflow/trajectory.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace iflow {

using TrajectoryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sampled closed-loop trajectories, one row per trajectory in layout order
/// (x_0, x_1, y_1, e_1, ..., x_n, y_n, e_n).
struct SampleBatch {
  Alphabets alphabets;
  int horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t spec_digest = 0;
  TrajectoryMatrix trajectories;

  std::size_t count() const { return static_cast<std::size_t>(trajectories.rows()); }
};

/// Trajectories are drawn in blocks of kSampleBlock; block b uses an
/// mt19937_64 seeded with derive_seed(seed, b), and each symbol is drawn by
/// inverse CDF over its kernel row with one 53-bit uniform.
inline constexpr std::size_t kSampleBlock = 4096;

/// Ancestral sampling in per-step order x_i -> y_i -> e_i. Throws ConfigError for count 0.
SampleBatch sample(const SystemSpec& spec, std::uint64_t count, std::uint64_t seed);

/// Relative frequencies over the full trajectory space (kind = empirical).
TrajectoryDistribution empirical_distribution(const SampleBatch& batch, std::uint64_t guard = kDefaultGuard);

/// Plug-in estimate: generalized_di on the empirical distribution. Biased
/// upward for finite samples; no correction is applied.
double estimate(const SampleBatch& batch, const InfoQuery& query);

/// FNV-1a over the trajectory symbols, row-major.
std::uint64_t batch_digest(const SampleBatch& batch);

/// Header row "x0,x1,y1,e1,...", then one row per trajectory.
void write_batch_csv(std::ostream& out, const SampleBatch& batch);

struct ConvergenceRow {
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double exact = 0.0;
  double abs_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;                            // count-major, then seed
  std::vector<std::pair<std::uint64_t, double>> max_error;     // per count, in input order
};

/// Throws GuardExceeded when the exact joint is not computable.
ConvergenceStudy convergence_study(const SystemSpec& spec, const InfoQuery& query, std::span<const std::uint64_t> counts,
                                   std::span<const std::uint64_t> seeds, std::uint64_t guard = kDefaultGuard);

/// Number of adjacent pairs with errors[k + 1] > errors[k].
int adjacent_inversions(std::span<const double> errors);

}  // namespace iflow

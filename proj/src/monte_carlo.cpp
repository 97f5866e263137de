#include "iflow/monte_carlo.hpp"

#include "iflow/error.hpp"
#include "iflow/mixed_radix.hpp"
#include "iflow/random.hpp"
#include "iflow/spec_io.hpp"

#include <cmath>
#include <ostream>

namespace iflow {

namespace {

template <typename Row>
int draw(const Row& row, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  int last = 0;
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    if (row[c] <= 0.0) continue;
    cum += row[c];
    last = static_cast<int>(c);
    if (u < cum) return last;
  }
  return last;
}

}  // namespace

SampleBatch sample(const SystemSpec& spec, std::uint64_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("sample: count must be positive");
  const SystemSpec full = expand(spec);
  const auto& a = full.alphabets;
  const auto& enc = std::get<StochasticKernel>(full.encoder);
  const auto& fwd = std::get<StochasticKernel>(full.forward_channel);
  const auto& fb = std::get<StochasticKernel>(full.feedback_channel);

  SampleBatch batch;
  batch.alphabets = a;
  batch.horizon = full.horizon;
  batch.seed = seed;
  batch.spec_digest = spec_digest(full);
  batch.trajectories.resize(static_cast<Eigen::Index>(count), 3 * full.horizon + 1);

  const auto ux = static_cast<std::uint64_t>(a.x);
  const auto uy = static_cast<std::uint64_t>(a.y);
  const auto ue = static_cast<std::uint64_t>(a.e);
  for (std::uint64_t block = 0; block * kSampleBlock < count; ++block) {
    Rng rng(derive_seed(seed, block));
    const std::uint64_t end = std::min<std::uint64_t>(count, (block + 1) * kSampleBlock);
    for (std::uint64_t s = block * kSampleBlock; s < end; ++s) {
      auto row = batch.trajectories.row(static_cast<Eigen::Index>(s));
      const int m = draw(full.message_prior, rng);
      row[0] = static_cast<std::uint8_t>(m);
      std::uint64_t enc_hist = static_cast<std::uint64_t>(m);
      std::uint64_t fwd_prefix = 0;
      std::uint64_t fb_prefix = 0;
      for (int i = 1; i <= full.horizon; ++i) {
        const int x = draw(enc.at_time(i).row(static_cast<Eigen::Index>(enc_hist)), rng);
        const std::uint64_t fwd_hist = fwd_prefix * ux + static_cast<std::uint64_t>(x);
        const int y = draw(fwd.at_time(i).row(static_cast<Eigen::Index>(fwd_hist)), rng);
        const std::uint64_t fb_hist = fb_prefix * uy + static_cast<std::uint64_t>(y);
        const int e = draw(fb.at_time(i).row(static_cast<Eigen::Index>(fb_hist)), rng);
        row[3 * i - 2] = static_cast<std::uint8_t>(x);
        row[3 * i - 1] = static_cast<std::uint8_t>(y);
        row[3 * i] = static_cast<std::uint8_t>(e);
        enc_hist = (enc_hist * ux + static_cast<std::uint64_t>(x)) * ue + static_cast<std::uint64_t>(e);
        fwd_prefix = fwd_hist * uy + static_cast<std::uint64_t>(y);
        fb_prefix = fb_hist * ue + static_cast<std::uint64_t>(e);
      }
    }
  }
  return batch;
}

TrajectoryDistribution empirical_distribution(const SampleBatch& batch, std::uint64_t guard) {
  if (batch.count() == 0) throw ConfigError("empirical distribution of an empty batch");
  check_guard(batch.alphabets, batch.horizon, guard);
  TrajectoryDistribution dist;
  dist.horizon = batch.horizon;
  dist.coordinates = trajectory_layout(batch.horizon);
  dist.radices = trajectory_radices(batch.alphabets, batch.horizon);
  dist.kind = DistributionKind::empirical;
  std::vector<std::uint64_t> counts(radix_product(dist.radices), 0);
  std::vector<int> digits(dist.radices.size());
  for (Eigen::Index r = 0; r < batch.trajectories.rows(); ++r) {
    for (std::size_t c = 0; c < digits.size(); ++c) digits[c] = batch.trajectories(r, static_cast<Eigen::Index>(c));
    ++counts[encode_mixed_radix(digits, dist.radices)];
  }
  const auto total = static_cast<double>(batch.count());
  dist.probabilities.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    dist.probabilities[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / total;
  return dist;
}

double estimate(const SampleBatch& batch, const InfoQuery& query) {
  return generalized_di(empirical_distribution(batch), query).bits;
}

std::uint64_t batch_digest(const SampleBatch& batch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index r = 0; r < batch.trajectories.rows(); ++r) {
    for (Eigen::Index c = 0; c < batch.trajectories.cols(); ++c) {
      h ^= batch.trajectories(r, c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_batch_csv(std::ostream& out, const SampleBatch& batch) {
  const auto layout = trajectory_layout(batch.horizon);
  for (std::size_t c = 0; c < layout.size(); ++c) out << (c ? "," : "") << coordinate_name(layout[c]);
  out << '\n';
  for (Eigen::Index r = 0; r < batch.trajectories.rows(); ++r) {
    for (Eigen::Index c = 0; c < batch.trajectories.cols(); ++c)
      out << (c ? "," : "") << static_cast<int>(batch.trajectories(r, c));
    out << '\n';
  }
}

ConvergenceStudy convergence_study(const SystemSpec& spec, const InfoQuery& query, std::span<const std::uint64_t> counts,
                                   std::span<const std::uint64_t> seeds, std::uint64_t guard) {
  const double exact = generalized_di(build_joint(spec, guard), query).bits;
  ConvergenceStudy study;
  for (auto count : counts) {
    double worst = 0.0;
    for (auto seed : seeds) {
      const double est = generalized_di(empirical_distribution(sample(spec, count, seed), guard), query).bits;
      const double err = std::abs(est - exact);
      study.rows.push_back({count, seed, est, exact, err});
      worst = std::max(worst, err);
    }
    study.max_error.emplace_back(count, worst);
  }
  return study;
}

int adjacent_inversions(std::span<const double> errors) {
  int inversions = 0;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k + 1] > errors[k]) ++inversions;
  }
  return inversions;
}

}  // namespace iflow

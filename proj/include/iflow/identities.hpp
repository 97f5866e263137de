#pragma once

#include "iflow/info_functionals.hpp"
#include "iflow/system_spec.hpp"
#include "iflow/trajectory.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iflow {

enum class IdentityId { lemma1, lemma2, theorem1, theorem2, theorem3, massey_conservation, massey_inequality };

inline constexpr std::array<IdentityId, 7> kAllIdentities{
    IdentityId::lemma1,   IdentityId::lemma2,           IdentityId::theorem1,          IdentityId::theorem2,
    IdentityId::theorem3, IdentityId::massey_conservation, IdentityId::massey_inequality};

std::string_view to_string(IdentityId id);

enum class Relation { equality, inequality };
enum class Verdict { holds, violated, out_of_scope };

std::string_view to_string(Verdict v);

inline constexpr double kDefaultTolerance = 1e-9;

struct Component {
  std::string label;
  double bits = 0.0;
  std::vector<double> terms;
};

/// lhs, rhs components and residual = lhs - sum(rhs). For inequalities the
/// relation is lhs >= sum(rhs).
struct IdentityReport {
  IdentityId id = IdentityId::lemma1;
  Relation relation = Relation::equality;
  std::string statement;
  Component lhs;
  std::vector<Component> rhs;
  double residual = 0.0;
  bool requires_deterministic_encoder = false;
  Verdict verdict = Verdict::holds;
  /// theorem2 only: I(y^n; x_0 | e^{n-1}), which must equal the residual.
  std::optional<double> gap_bits;
  /// Additional reported values that do not enter the verdict.
  std::vector<Component> extras;

  /// How far the relation is from holding: |residual| for equalities, the
  /// shortfall below zero for inequalities, and for theorem2 the worst of
  /// |residual - gap|, -gap and -residual. Zero means exact.
  double defect() const;
};

/// Scope rule: lemma1, theorem1 and theorem2 need a deterministic encoder;
/// for stochastic encoders they are evaluated but marked out_of_scope.
bool requires_deterministic_encoder(IdentityId id);

IdentityReport verify(const Catalog& catalog, bool deterministic_encoder, IdentityId id,
                      double tolerance = kDefaultTolerance);
IdentityReport verify(const TrajectoryDistribution& dist, const SystemSpec& spec, IdentityId id,
                      double tolerance = kDefaultTolerance);

std::vector<IdentityReport> verify_all(const Catalog& catalog, bool deterministic_encoder,
                                       double tolerance = kDefaultTolerance);
std::vector<IdentityReport> verify_all(const TrajectoryDistribution& dist, const SystemSpec& spec,
                                       double tolerance = kDefaultTolerance);

/// True when no in-scope report is violated.
bool all_in_scope_hold(const std::vector<IdentityReport>& reports);

/// Whether the (expanded) spec's encoder is deterministic.
bool encoder_is_deterministic(const SystemSpec& spec);

nlohmann::ordered_json report_to_json(const IdentityReport& report);

struct DimsRange {
  int alphabet_min = 2;
  int alphabet_max = 3;
  int horizon_min = 1;
  int horizon_max = 4;
};

struct FuzzConfig {
  std::uint64_t master_seed = 42;
  std::uint64_t trials = 200;
  DimsRange dims;
  EncoderMode encoder = EncoderMode::deterministic;
  double tolerance = kDefaultTolerance;
  unsigned jobs = 1;
  std::uint64_t guard = kDefaultGuard;
};

struct FuzzViolation {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  Dims dims;
  IdentityId id = IdentityId::lemma1;
  double residual = 0.0;
  std::optional<double> gap_bits;
};

struct IdentityStats {
  IdentityId id = IdentityId::lemma1;
  std::uint64_t in_scope = 0;
  std::uint64_t out_of_scope = 0;
  std::uint64_t violations = 0;
  double max_abs_residual = 0.0;  // in-scope trials
  double max_defect = 0.0;        // in-scope trials
  double max_abs_residual_out_of_scope = 0.0;
};

struct FuzzSummary {
  FuzzConfig config;
  std::vector<IdentityStats> identities;
  std::vector<FuzzViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Seed of trial `index`; the trial's dims and spec are derived from it alone.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

/// Dims drawn uniformly from the range: each alphabet size, then the horizon.
Dims draw_dims(std::uint64_t seed, const DimsRange& range);

/// Throws ConfigError for zero trials, an empty or invalid range, or a range
/// whose largest system exceeds the guard. The summary does not depend on `jobs`.
FuzzSummary fuzz(const FuzzConfig& config);

nlohmann::ordered_json summary_to_json(const FuzzSummary& summary);

}  // namespace iflow

#include "iflow/identities.hpp"

#include "iflow/error.hpp"
#include "iflow/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace iflow {

std::string_view to_string(IdentityId id) {
  switch (id) {
    case IdentityId::lemma1:
      return "lemma1";
    case IdentityId::lemma2:
      return "lemma2";
    case IdentityId::theorem1:
      return "theorem1";
    case IdentityId::theorem2:
      return "theorem2";
    case IdentityId::theorem3:
      return "theorem3";
    case IdentityId::massey_conservation:
      return "massey_conservation";
    case IdentityId::massey_inequality:
      return "massey_inequality";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::violated:
      return "violated";
    case Verdict::out_of_scope:
      return "out_of_scope";
  }
  return "?";
}

double IdentityReport::defect() const {
  if (id == IdentityId::theorem2) {
    const double gap = gap_bits.value_or(0.0);
    return std::max({std::abs(residual - gap), -gap, -residual, 0.0});
  }
  if (relation == Relation::inequality) return std::max(0.0, -residual);
  return std::abs(residual);
}

bool requires_deterministic_encoder(IdentityId id) {
  return id == IdentityId::lemma1 || id == IdentityId::theorem1 || id == IdentityId::theorem2;
}

namespace {

Component component(const Catalog& catalog, std::string_view label) {
  const auto& e = catalog.at(label);
  return {e.label, e.value.bits, e.value.terms};
}

struct Shape {
  Relation relation;
  std::string_view lhs;
  std::vector<std::string_view> rhs;
  const char* statement;
};

Shape shape_of(IdentityId id) {
  namespace L = labels;
  switch (id) {
    case IdentityId::lemma1:
      return {Relation::equality, L::mi_message_feedback, {L::di_input_feedback}, "MI[M;E] = DI[X->E]"};
    case IdentityId::lemma2:
      return {Relation::equality,
              L::di_output_feedback,
              {L::mi_message_feedback, L::di_output_feedback_given_message},
              "DI[Y->E] = MI[M;E] + DI[Y->E | M]"};
    case IdentityId::theorem1:
      return {Relation::equality,
              L::di_output_feedback,
              {L::di_input_feedback, L::di_output_feedback_given_message},
              "DI[Y->E] = DI[X->E] + DI[Y->E | M]"};
    case IdentityId::theorem2:
      return {Relation::inequality,
              L::di_input_output,
              {L::di_input_feedback_short, L::ddi_feedback_output},
              "DI[X->Y] >= DI[X->E]@n-1 + DDI[E->Y], with equality gap CMI[Y;M | E-]"};
    case IdentityId::theorem3:
      return {Relation::equality,
              L::ddi_feedback_input,
              {L::ddi_output_input, L::ccdi_feedback_input},
              "DDI[E->X] = DDI[Y->X] + CCDI[E->X || Y-]"};
    case IdentityId::massey_conservation:
      return {Relation::equality,
              L::mi_input_output,
              {L::di_input_output, L::ddi_output_input},
              "MI[X;Y] = DI[X->Y] + DDI[Y->X]"};
    case IdentityId::massey_inequality:
      return {Relation::inequality, L::mi_input_output, {L::di_input_output}, "MI[X;Y] >= DI[X->Y]"};
  }
  return {};
}

}  // namespace

IdentityReport verify(const Catalog& catalog, bool deterministic_encoder, IdentityId id, double tolerance) {
  const Shape shape = shape_of(id);
  IdentityReport r;
  r.id = id;
  r.relation = shape.relation;
  r.statement = shape.statement;
  r.lhs = component(catalog, shape.lhs);
  std::vector<double> parts;
  for (auto label : shape.rhs) {
    r.rhs.push_back(component(catalog, label));
    parts.push_back(r.rhs.back().bits);
  }
  r.residual = r.lhs.bits - deterministic_sum(parts);
  r.requires_deterministic_encoder = requires_deterministic_encoder(id);

  if (id == IdentityId::theorem2) r.gap_bits = catalog.value(labels::cmi_output_message_given_feedback);
  if (id == IdentityId::theorem3) {
    const auto alt = component(catalog, labels::ccdi_feedback_input_undelayed);
    const double alt_residual = r.lhs.bits - (r.rhs[0].bits + alt.bits);
    r.extras.push_back(alt);
    r.extras.push_back({"residual with " + alt.label, alt_residual, {}});
  }

  const bool holds = r.defect() <= tolerance;
  if (r.requires_deterministic_encoder && !deterministic_encoder) {
    r.verdict = Verdict::out_of_scope;
  } else {
    r.verdict = holds ? Verdict::holds : Verdict::violated;
  }
  return r;
}

bool encoder_is_deterministic(const SystemSpec& spec) { return expand(spec).encoder_deterministic; }

IdentityReport verify(const TrajectoryDistribution& dist, const SystemSpec& spec, IdentityId id, double tolerance) {
  return verify(named_quantities(dist), encoder_is_deterministic(spec), id, tolerance);
}

std::vector<IdentityReport> verify_all(const Catalog& catalog, bool deterministic_encoder, double tolerance) {
  std::vector<IdentityReport> out;
  for (auto id : kAllIdentities) out.push_back(verify(catalog, deterministic_encoder, id, tolerance));
  return out;
}

std::vector<IdentityReport> verify_all(const TrajectoryDistribution& dist, const SystemSpec& spec, double tolerance) {
  return verify_all(named_quantities(dist), encoder_is_deterministic(spec), tolerance);
}

bool all_in_scope_hold(const std::vector<IdentityReport>& reports) {
  return std::none_of(reports.begin(), reports.end(), [](const IdentityReport& r) { return r.verdict == Verdict::violated; });
}

namespace {

nlohmann::ordered_json component_json(const Component& c) {
  nlohmann::ordered_json j;
  j["label"] = c.label;
  j["value_bits"] = c.bits;
  if (!c.terms.empty()) j["per_step_terms"] = c.terms;
  return j;
}

nlohmann::ordered_json dims_json(const Dims& d) {
  return {{"m", d.alphabets.m}, {"x", d.alphabets.x}, {"y", d.alphabets.y}, {"e", d.alphabets.e}, {"horizon", d.horizon}};
}

}  // namespace

nlohmann::ordered_json report_to_json(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["identity"] = to_string(r.id);
  j["relation"] = r.relation == Relation::equality ? "equality" : "inequality";
  j["statement"] = r.statement;
  j["lhs"] = component_json(r.lhs);
  auto rhs = nlohmann::ordered_json::array();
  for (const auto& c : r.rhs) rhs.push_back(component_json(c));
  j["rhs"] = std::move(rhs);
  j["residual_bits"] = r.residual;
  if (r.gap_bits) j["gap_bits"] = *r.gap_bits;
  j["requires_deterministic_encoder"] = r.requires_deterministic_encoder;
  j["verdict"] = to_string(r.verdict);
  if (!r.extras.empty()) {
    auto extras = nlohmann::ordered_json::array();
    for (const auto& c : r.extras) extras.push_back(component_json(c));
    j["extras"] = std::move(extras);
  }
  return j;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) { return derive_seed(master_seed, index); }

Dims draw_dims(std::uint64_t seed, const DimsRange& range) {
  Rng rng(derive_seed(seed, 0x64696d73));  // separate stream from the spec generator
  auto size = [&] {
    return range.alphabet_min +
           static_cast<int>(rng.below(static_cast<std::uint64_t>(range.alphabet_max - range.alphabet_min + 1)));
  };
  Dims d;
  d.alphabets.m = size();
  d.alphabets.x = size();
  d.alphabets.y = size();
  d.alphabets.e = size();
  d.horizon =
      range.horizon_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(range.horizon_max - range.horizon_min + 1)));
  return d;
}

namespace {

struct TrialResult {
  std::uint64_t seed = 0;
  Dims dims;
  std::vector<IdentityReport> reports;
};

TrialResult run_trial(const FuzzConfig& config, std::uint64_t index) {
  TrialResult t;
  t.seed = trial_seed(config.master_seed, index);
  t.dims = draw_dims(t.seed, config.dims);
  const SystemSpec spec = generate_random(t.seed, t.dims, config.encoder, config.guard);
  const TrajectoryDistribution dist = build_joint(spec, config.guard);
  JointAnalyzer analyzer(dist);
  t.reports = verify_all(named_quantities(analyzer), spec.encoder_deterministic, config.tolerance);
  return t;
}

void check_config(const FuzzConfig& c) {
  if (c.trials == 0) throw ConfigError("fuzz: trial count must be positive");
  const auto& d = c.dims;
  if (d.alphabet_min < 1 || d.alphabet_max < d.alphabet_min) throw ConfigError("fuzz: invalid alphabet size range");
  if (d.horizon_min < 1 || d.horizon_max < d.horizon_min) throw ConfigError("fuzz: invalid horizon range");
  if (!(c.tolerance > 0.0)) throw ConfigError("fuzz: tolerance must be positive");
  const Alphabets largest{d.alphabet_max, d.alphabet_max, d.alphabet_max, d.alphabet_max};
  const auto required = trajectory_entries(largest, d.horizon_max);
  if (required > c.guard)
    throw ConfigError("fuzz: largest system in range needs " + std::to_string(required) +
                      " trajectory entries, guard is " + std::to_string(c.guard));
}

}  // namespace

FuzzSummary fuzz(const FuzzConfig& config) {
  check_config(config);
  std::vector<TrialResult> results(config.trials);
  const unsigned workers = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(config.trials)));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < config.trials; ++i) results[i] = run_trial(config, i);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = next++; i < config.trials; i = next++) results[i] = run_trial(config, i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = config.trials;
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  FuzzSummary summary;
  summary.config = config;
  for (auto id : kAllIdentities) summary.identities.push_back({id});
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    const auto& t = results[i];
    for (std::size_t k = 0; k < kAllIdentities.size(); ++k) {
      const auto& r = t.reports[k];
      auto& s = summary.identities[k];
      if (r.verdict == Verdict::out_of_scope) {
        ++s.out_of_scope;
        s.max_abs_residual_out_of_scope = std::max(s.max_abs_residual_out_of_scope, std::abs(r.residual));
        continue;
      }
      ++s.in_scope;
      s.max_abs_residual = std::max(s.max_abs_residual, std::abs(r.residual));
      s.max_defect = std::max(s.max_defect, r.defect());
      if (r.verdict == Verdict::violated) {
        ++s.violations;
        summary.violations.push_back({i, t.seed, t.dims, r.id, r.residual, r.gap_bits});
      }
    }
  }
  return summary;
}

nlohmann::ordered_json summary_to_json(const FuzzSummary& s) {
  nlohmann::ordered_json j;
  const auto& c = s.config;
  j["config"] = {{"master_seed", c.master_seed},
                 {"trials", c.trials},
                 {"alphabet_min", c.dims.alphabet_min},
                 {"alphabet_max", c.dims.alphabet_max},
                 {"horizon_min", c.dims.horizon_min},
                 {"horizon_max", c.dims.horizon_max},
                 {"encoder", c.encoder == EncoderMode::deterministic ? "det" : "stoch"},
                 {"tolerance", c.tolerance}};
  auto ids = nlohmann::ordered_json::array();
  for (const auto& st : s.identities) {
    ids.push_back({{"identity", to_string(st.id)},
                   {"in_scope", st.in_scope},
                   {"out_of_scope", st.out_of_scope},
                   {"violations", st.violations},
                   {"max_abs_residual_bits", st.max_abs_residual},
                   {"max_defect_bits", st.max_defect},
                   {"max_abs_residual_out_of_scope_bits", st.max_abs_residual_out_of_scope}});
  }
  j["identities"] = std::move(ids);
  auto v = nlohmann::ordered_json::array();
  for (const auto& x : s.violations) {
    nlohmann::ordered_json item{{"trial", x.trial},
                                {"seed", x.seed},
                                {"dims", dims_json(x.dims)},
                                {"identity", to_string(x.id)},
                                {"residual_bits", x.residual}};
    if (x.gap_bits) item["gap_bits"] = *x.gap_bits;
    v.push_back(std::move(item));
  }
  j["violations"] = std::move(v);
  j["passed"] = s.passed();
  return j;
}

}  // namespace iflow

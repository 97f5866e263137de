// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "iflow/commands.hpp"
#include "iflow/identities.hpp"
#include "iflow/monte_carlo.hpp"
#include "oracle.hpp"
#include "systems.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace iflow;
using namespace iflow::testing;
namespace lb = iflow::labels;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s;%s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str());
  std::fflush(stdout);
}

const IdentityStats& stats(const FuzzSummary& s, IdentityId id) {
  for (const auto& st : s.identities)
    if (st.id == id) return st;
  throw std::out_of_range("identity");
}

void deterministic_fuzz(Outcome& o) {
  FuzzConfig c;  // seed 42, 200 trials, sizes 2..3, n 1..4
  const auto s = fuzz(c);
  double worst = 0.0;
  for (auto id : kAllIdentities) {
    const auto& st = stats(s, id);
    o.require(st.in_scope == c.trials, std::string(to_string(id)) + " not in scope for every trial");
    o.require(st.max_defect <= 1e-9, std::string(to_string(id)) + " defect above 1e-9");
    worst = std::max(worst, st.max_defect);
  }
  o.detail << " trials " << c.trials << ", violations " << s.violations.size() << ", max defect " << worst;
}

void stochastic_fuzz(Outcome& o) {
  FuzzConfig c;
  c.encoder = EncoderMode::stochastic;
  const auto s = fuzz(c);
  double worst = 0.0;
  for (auto id : kAllIdentities) {
    const auto& st = stats(s, id);
    if (requires_deterministic_encoder(id)) {
      o.require(st.out_of_scope == c.trials, std::string(to_string(id)) + " should be out of scope");
      o.detail << " " << to_string(id) << " out of scope, max |residual| " << st.max_abs_residual_out_of_scope << ";";
    } else {
      o.require(st.in_scope == c.trials && st.max_defect <= 1e-9, std::string(to_string(id)) + " defect above 1e-9");
      worst = std::max(worst, st.max_defect);
    }
  }
  o.detail << " universal identities max defect " << worst;
}

void golden_values(Outcome& o) {
  const SystemSpec spec = bsc01_system();
  const auto dist = build_joint(spec);
  const Catalog c = named_quantities(dist);
  const auto joint = oracle::enumerate(oracle::from_tables(spec));
  o.require(joint.atoms.size() <= 128, "oracle enumerates the 2*2^2*2^2*2^2 trajectory space");

  struct Golden {
    std::string_view label;
    double expected;
    double oracle_value;
  };
  const Golden goldens[] = {
      {lb::mi_message_feedback, 0.742086, oracle::cmi(joint, oracle::seq('m', 0), oracle::seq('e', 2))},
      {lb::di_output_feedback_given_message, 0.937991, oracle::directed(joint, 'y', 'e', 0, {{'m', 0}})},
      {lb::di_output_feedback, 1.680078, oracle::directed(joint, 'y', 'e')},
  };
  for (const auto& g : goldens) {
    const double v = c.value(g.label);
    o.require(std::abs(g.oracle_value - g.expected) <= 1e-5, std::string(g.label) + " oracle off the reference value");
    o.require(std::abs(v - g.oracle_value) <= 1e-12, std::string(g.label) + " engine disagrees with oracle");
    o.require(std::abs(v - g.expected) <= 1e-5, std::string(g.label) + " off the reference value");
    o.detail << " " << g.label << " = " << v << " (oracle " << g.oracle_value << ");";
  }
  const auto t1 = verify(c, encoder_is_deterministic(spec), IdentityId::theorem1);
  o.require(std::abs(t1.residual) <= 1e-9, "theorem1 residual");
  o.detail << " theorem1 residual " << t1.residual;
}

void closed_forms(Outcome& o) {
  {
    const SystemSpec spec = nl_system();
    const Catalog c = named_quantities(build_joint(spec));
    for (auto label : {lb::mi_message_feedback, lb::di_input_feedback, lb::di_output_feedback}) {
      o.require(std::abs(c.value(label) - 1.0) <= 1e-12, "NL " + std::string(label) + " != 1");
    }
    double worst = 0.0;
    for (const auto& r : verify_all(c, true)) worst = std::max(worst, std::abs(r.residual));
    o.require(worst <= 1e-12, "NL residuals not 0");
    o.detail << " NL I(x0;e^2) = " << c.value(lb::mi_message_feedback) << ", max |residual| " << worst << ";";
  }
  {
    const Catalog c = named_quantities(build_joint(const_system()));
    double worst = 0.0;
    for (const auto& e : c.entries) worst = std::max(worst, std::abs(e.value.bits));
    o.require(worst <= 1e-12, "CONST quantity not 0");
    o.detail << " CONST max |quantity| " << worst;
  }
}

void no_feedback(Outcome& o) {
  const DimsRange range{2, 3, 1, 4};
  double worst_gap = 0.0;
  double worst_excess = -1.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto seed = trial_seed(5, k);
    const auto dims = draw_dims(seed, range);
    const auto open = without_encoder_feedback(generate_random(seed, dims, EncoderMode::stochastic));
    const auto open_dist = build_joint(open);
    JointAnalyzer a(open_dist);
    const double di = generalized_di(a, InfoQuery::directed(Stream::X, Stream::Y)).bits;
    const double mi = generalized_di(a, InfoQuery::mutual(Stream::X, Stream::Y)).bits;
    worst_gap = std::max(worst_gap, std::abs(di - mi));

    const auto closed = generate_random(trial_seed(6, k), draw_dims(trial_seed(6, k), range),
                                        k % 2 ? EncoderMode::stochastic : EncoderMode::deterministic);
    const auto closed_dist = build_joint(closed);
    JointAnalyzer b(closed_dist);
    const double di_fb = generalized_di(b, InfoQuery::directed(Stream::X, Stream::Y)).bits;
    const double mi_fb = generalized_di(b, InfoQuery::mutual(Stream::X, Stream::Y)).bits;
    worst_excess = std::max(worst_excess, di_fb - mi_fb);
  }
  o.require(worst_gap <= 1e-9, "no-feedback |DI - MI| above 1e-9");
  o.require(worst_excess <= 1e-9, "feedback DI exceeds MI");
  o.detail << " no-feedback max |DI - MI| " << worst_gap << "; feedback max (DI - MI) " << worst_excess;
}

void monte_carlo(Outcome& o) {
  const std::vector<std::uint64_t> counts{1000, 10000, 100000};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto study = convergence_study(bsc01_system(), InfoQuery::mutual(Stream::M, Stream::E), counts, seeds);
  for (auto seed : seeds) {
    std::vector<double> errors;
    for (const auto& row : study.rows)
      if (row.seed == seed) errors.push_back(row.abs_error);
    o.require(errors.back() <= 0.02, "seed " + std::to_string(seed) + " error above 0.02 at 1e5");
    o.require(adjacent_inversions(errors) <= 1, "seed " + std::to_string(seed) + " has more than one inversion");
    o.detail << " seed " << seed << " errors";
    for (double e : errors) o.detail << " " << e;
    o.detail << ";";
  }
  std::vector<double> maxima;
  for (const auto& [count, err] : study.max_error) maxima.push_back(err);
  o.require(adjacent_inversions(maxima) <= 1, "max error across seeds has more than one inversion");
}

void sweep(Outcome& o) {
  cli::RunConfig c;
  c.command = cli::Command::sweep;
  c.spec_path = data_path("bsc01.json");
  c.sweep = cli::SweepParameter{"forward_channel.eps", 0.0, 0.5, 51};
  c.format = cli::OutputFormat::json;
  const auto r = cli::run(c);
  o.require(r.exit_code == cli::kExitOk, "sweep exit code " + std::to_string(r.exit_code) + " " + r.diagnostic);
  const auto doc = nlohmann::json::parse(r.report);
  const auto& rows = doc["rows"];
  o.require(rows.size() == 51, "row count");
  const std::string mi(lb::mi_message_feedback);

  const auto& first = rows.front()["quantities"];
  for (auto label : {lb::mi_message_feedback, lb::di_input_feedback, lb::di_output_feedback})
    o.require(std::abs(first[std::string(label)].get<double>() - 1.0) <= 1e-9, "eps=0 " + std::string(label));
  double worst_first = 0.0;
  for (const auto& [id, res] : rows.front()["residuals"].items()) worst_first = std::max(worst_first, std::abs(res.get<double>()));
  o.require(worst_first <= 1e-9, "eps=0 residuals");

  const auto& last = rows.back()["quantities"];
  for (auto label : {lb::mi_message_feedback, lb::di_input_feedback, lb::di_input_output})
    o.require(std::abs(last[std::string(label)].get<double>()) <= 1e-9, "eps=0.5 " + std::string(label));

  double worst_t1 = 0.0;
  double worst_rise = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    worst_t1 = std::max(worst_t1, std::abs(rows[k]["residuals"]["theorem1"].get<double>()));
    if (k > 0)
      worst_rise = std::max(worst_rise, rows[k]["quantities"][mi].get<double>() - rows[k - 1]["quantities"][mi].get<double>());
  }
  o.require(worst_t1 <= 1e-9, "theorem1 residual");
  o.require(worst_rise <= 1e-9, "I(x0;e^2) increases along the sweep");
  o.detail << " rows " << rows.size() << ", I(x0;e^2) " << first[mi].get<double>() << " -> " << last[mi].get<double>()
           << ", max theorem1 |residual| " << worst_t1 << ", max rise " << worst_rise;
}

void determinism(Outcome& o) {
  std::vector<cli::RunConfig> configs;
  cli::RunConfig f;
  f.command = cli::Command::fuzz;
  f.trials = 50;
  configs.push_back(f);
  f.encoder = EncoderMode::stochastic;
  f.jobs = 4;
  configs.push_back(f);
  cli::RunConfig s;
  s.command = cli::Command::simulate;
  s.spec_path = data_path("bsc01.json");
  s.samples = 20000;
  s.seed = 11;
  configs.push_back(s);
  s.format = cli::OutputFormat::csv;
  configs.push_back(s);
  cli::RunConfig w;
  w.command = cli::Command::sweep;
  w.spec_path = data_path("bsc01.json");
  w.sweep = cli::SweepParameter{"forward_channel.eps", 0.0, 0.5, 51};
  configs.push_back(w);

  const char* names[] = {"fuzz det", "fuzz stoch jobs=4", "simulate json", "simulate csv", "sweep"};
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const auto a = cli::run(configs[k]);
    const auto b = cli::run(configs[k]);
    o.require(a.exit_code == cli::kExitOk, std::string(names[k]) + " exit code");
    o.require(!a.report.empty() && a.report == b.report && a.summary == b.summary, std::string(names[k]) + " differs");
    o.detail << " " << names[k] << " " << a.report.size() << " bytes identical;";
  }
  // a different job count must not change the fuzz report
  auto j1 = configs[1];
  j1.jobs = 1;
  o.require(cli::run(j1).report == cli::run(configs[1]).report, "fuzz report depends on jobs");
}

}  // namespace

int main() {
  report(1, "identity fuzz, deterministic encoders", deterministic_fuzz);
  report(2, "identity fuzz, stochastic encoders", stochastic_fuzz);
  report(3, "golden values on the bsc(0.1) loop", golden_values);
  report(4, "closed forms for the noiseless and constant loops", closed_forms);
  report(5, "directed vs mutual information with and without feedback", no_feedback);
  report(6, "Monte Carlo convergence", monte_carlo);
  report(7, "bsc eps sweep", sweep);
  report(8, "byte-identical reruns", determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

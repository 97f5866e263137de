#include "iflow/commands.hpp"
#include "systems.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

using namespace iflow;
using namespace iflow::cli;
using namespace iflow::testing;

namespace {

RunConfig config(Command cmd, const std::string& spec = "") {
  RunConfig c;
  c.command = cmd;
  if (!spec.empty()) c.spec_path = data_path(spec);
  return c;
}

}  // namespace

TEST_CASE("compute") {
  const auto r = run(config(Command::compute, "bsc01.json"));
  REQUIRE(r.exit_code == kExitOk);
  const auto doc = nlohmann::json::parse(r.report);
  CHECK(doc["catalog_version"] == 1);
  bool found = false;
  for (const auto& q : doc["quantities"]) {
    if (q["label"] == "DI[Y->E]") {
      found = true;
      CHECK(q["value_bits"].get<double>() == doctest::Approx(1.680078).epsilon(1e-5));
    }
  }
  CHECK(found);

  SUBCASE("table form gives the same values as the shorthand") {
    const auto table = nlohmann::json::parse(run(config(Command::compute, "bsc01_table.json")).report);
    CHECK(table["dims"]["horizon"] == 1);
    for (const auto& q : table["quantities"]) {
      if (q["label"] == "DI[X->Y]") CHECK(q["value_bits"].get<double>() == doctest::Approx(1.0 - binary_entropy(0.1)));
    }
  }

  SUBCASE("csv") {
    auto c = config(Command::compute, "nl.json");
    c.format = OutputFormat::csv;
    const auto out = run(c);
    CHECK(out.report.rfind("label,value_bits,per_step_terms,formula\n", 0) == 0);
  }

  SUBCASE("dump joint") {
    auto c = config(Command::compute, "nl.json");
    c.dump_joint = "test_commands_joint.csv";
    REQUIRE(run(c).exit_code == kExitOk);
    std::ifstream f(*c.dump_joint);
    std::string header;
    std::getline(f, header);
    CHECK(header == "x0,x1,y1,e1,x2,y2,e2,probability");
    std::remove(c.dump_joint->c_str());
  }
}

TEST_CASE("input errors exit with 2") {
  const auto malformed = run(config(Command::compute, "malformed.json"));
  CHECK(malformed.exit_code == kExitInputError);
  CHECK(malformed.diagnostic.find("row") != std::string::npos);
  CHECK(malformed.diagnostic.find("malformed.json") != std::string::npos);

  const auto acausal = run(config(Command::verify, "acausal_feedback.json"));
  CHECK(acausal.exit_code == kExitInputError);
  CHECK(acausal.diagnostic.find("feedback_channel") != std::string::npos);

  const auto big = run(config(Command::compute, "oversized.json"));
  CHECK(big.exit_code == kExitInputError);
  CHECK(big.diagnostic.find("needs 4294967296 entries") != std::string::npos);

  CHECK(run(config(Command::compute, "missing.json")).exit_code == kExitInputError);
  CHECK(run(config(Command::compute)).exit_code == kExitInputError);

  auto tol = config(Command::verify, "nl.json");
  tol.tolerance = 0;
  CHECK(run(tol).exit_code == kExitInputError);

  auto sw = config(Command::sweep, "bsc01.json");
  sw.sweep = SweepParameter{"forward_channel.eps", 0.0, 0.7, 5};
  CHECK(run(sw).exit_code == kExitInputError);
  sw.sweep = SweepParameter{"feedback_channel.eps", 0.0, 0.5, 5};
  CHECK(run(sw).exit_code == kExitInputError);
  sw.sweep = SweepParameter{"forward_channel.eps", 0.0, 0.5, 1};
  CHECK(run(sw).exit_code == kExitInputError);

  auto sim = config(Command::simulate, "nl.json");
  sim.samples = 0;
  CHECK(run(sim).exit_code == kExitInputError);

  auto fz = config(Command::fuzz);
  fz.trials = 0;
  CHECK(run(fz).exit_code == kExitInputError);
}

TEST_CASE("verify") {
  auto c = config(Command::verify, "bsc01.json");
  c.proof_trace = true;
  const auto r = run(c);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.summary.find("theorem2: holds") != std::string::npos);
  CHECK(r.summary.find("lhs-rhs") != std::string::npos);
  const auto doc = nlohmann::json::parse(r.report);
  CHECK(doc["reports"].size() == 7);
  CHECK(doc["all_in_scope_hold"] == true);

  c.format = OutputFormat::csv;
  CHECK(run(c).report.rfind("identity,verdict,", 0) == 0);
}

TEST_CASE("fuzz command") {
  auto c = config(Command::fuzz);
  c.trials = 10;
  c.max_n = 2;
  c.alphabet_max = 2;
  const auto r = run(c);
  CHECK(r.exit_code == kExitOk);
  const auto doc = nlohmann::json::parse(r.report);
  CHECK(doc["passed"] == true);
  CHECK(doc["config"]["trials"] == 10);
  CHECK(run(c).report == r.report);

  c.encoder = EncoderMode::stochastic;
  const auto s = run(c);
  CHECK(s.exit_code == kExitOk);  // out-of-scope identities do not fail the run
  CHECK(s.summary.find("out of scope 10") != std::string::npos);
}

TEST_CASE("simulate command") {
  auto c = config(Command::simulate, "nl.json");
  c.samples = 100;
  c.seed = 5;
  const auto r = run(c);
  REQUIRE(r.exit_code == kExitOk);
  const auto doc = nlohmann::json::parse(r.report);
  for (const auto& q : doc["quantities"]) {
    CHECK(q["abs_error_bits"].get<double>() ==
          doctest::Approx(std::abs(q["estimate_bits"].get<double>() - q["exact_bits"].get<double>())));
  }
  c.format = OutputFormat::csv;
  const auto csv = run(c);
  CHECK(csv.report.rfind("x0,x1,y1,e1,x2,y2,e2\n", 0) == 0);
  CHECK(run(c).report == csv.report);
}

TEST_CASE("sweep command") {
  auto c = config(Command::sweep, "bsc01.json");
  c.sweep = SweepParameter{"forward_channel.eps", 0.0, 0.5, 6};
  const auto r = run(c);
  CHECK(r.exit_code == kExitOk);
  CHECK(std::count(r.report.begin(), r.report.end(), '\n') == 7);
  CHECK(r.report.rfind("forward_channel.eps,", 0) == 0);
  c.format = OutputFormat::json;
  const auto doc = nlohmann::json::parse(run(c).report);
  REQUIRE(doc["rows"].size() == 6);
  CHECK(doc["rows"][5]["value"] == 0.5);
  CHECK(doc["rows"][5]["quantities"]["DI[X->Y]"].get<double>() == doctest::Approx(0.0));
  CHECK(doc["rows"][0]["quantities"]["DI[X->Y]"].get<double>() == doctest::Approx(1.0));
}

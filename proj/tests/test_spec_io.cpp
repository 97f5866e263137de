#include "iflow/error.hpp"
#include "iflow/spec_io.hpp"
#include "systems.hpp"

#include <doctest.h>

#include <string>

using namespace iflow;
using namespace iflow::testing;

namespace {

std::string message_of(const nlohmann::json& doc) {
  try {
    spec_from_json(doc);
  } catch (const SpecError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("loads the shorthand test systems") {
  const SystemSpec nl = load_spec(data_path("nl.json"));
  CHECK(nl.alphabets == Alphabets{2, 2, 2, 2});
  CHECK(nl.horizon == 2);
  CHECK(std::holds_alternative<shorthand::Repetition>(nl.encoder));
  CHECK(std::holds_alternative<shorthand::Identity>(nl.feedback_channel));

  const SystemSpec bsc = load_spec(data_path("bsc01.json"));
  REQUIRE(std::holds_alternative<shorthand::Bsc>(bsc.forward_channel));
  CHECK(std::get<shorthand::Bsc>(bsc.forward_channel).eps == 0.1);

  const SystemSpec table = load_spec(data_path("bsc01_table.json"));
  REQUIRE(std::holds_alternative<StochasticKernel>(table.forward_channel));
  CHECK(std::get<StochasticKernel>(table.forward_channel).steps[0](1, 1) == 0.9);
}

TEST_CASE("error messages name the field") {
  auto doc = nlohmann::json::parse(R"({"alphabets":{"m":2,"x":2,"y":2,"e":2},"horizon":1,"message_prior":[0.5,0.5],
    "encoder":{"type":"repetition"},"forward_channel":{"type":"bsc"},"feedback_channel":{"type":"identity"}})");
  CHECK(message_of(doc).find("forward_channel.eps") != std::string::npos);

  doc["forward_channel"] = {{"type", "wobble"}};
  CHECK(message_of(doc).find("forward_channel.type") != std::string::npos);

  doc["forward_channel"] = {{"type", "table"}, {"steps", {{{0.5, 0.5}, {0.5}}}}};
  CHECK(message_of(doc).find("forward_channel step 1 row 1") != std::string::npos);

  doc.erase("horizon");
  CHECK(message_of(doc).find("horizon") != std::string::npos);

  CHECK_THROWS_WITH_AS(load_spec(data_path("does_not_exist.json")), doctest::Contains("does_not_exist.json"), SpecError);
}

TEST_CASE("serialization round trip preserves the expanded system") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SystemSpec s = generate_random(seed, {{2, 3, 2, 2}, 2}, EncoderMode::stochastic);
    const SystemSpec back = spec_from_json(nlohmann::json::parse(spec_to_json(s).dump()));
    CHECK(spec_digest(back) == spec_digest(s));
  }
  const SystemSpec bsc = bsc01_system();
  const SystemSpec back = spec_from_json(nlohmann::json::parse(spec_to_json(bsc).dump()));
  CHECK(std::holds_alternative<shorthand::Bsc>(back.forward_channel));
  CHECK(spec_digest(back) == spec_digest(bsc));
}

TEST_CASE("shorthand and table forms share a digest") {
  CHECK(spec_digest(bsc01_system()) == spec_digest(expand(bsc01_system())));
  CHECK(spec_digest(bsc01_system()) != spec_digest(bsc01_system(0.2)));
}

TEST_CASE("set_kernel_parameter") {
  SystemSpec s = bsc01_system();
  set_kernel_parameter(s, "forward_channel.eps", 0.25);
  CHECK(std::get<shorthand::Bsc>(s.forward_channel).eps == 0.25);
  CHECK_THROWS_AS(set_kernel_parameter(s, "feedback_channel.eps", 0.1), SpecError);
  CHECK_THROWS_AS(set_kernel_parameter(s, "forward_channel.delta", 0.1), SpecError);
  CHECK_THROWS_AS(set_kernel_parameter(s, "plant.eps", 0.1), SpecError);
  SystemSpec t = expand(s);
  CHECK_THROWS_AS(set_kernel_parameter(t, "forward_channel.eps", 0.1), SpecError);
}

#include "iflow/spec_io.hpp"

#include "iflow/error.hpp"

#include <fstream>
#include <sstream>

namespace iflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw SpecError(field + ": " + what); }

const json& require(const json& obj, const char* key, const std::string& field) {
  if (!obj.is_object()) fail(field, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(field + "." + key, "missing");
  return *it;
}

int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

ProbabilityTable<double> as_table(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = 0;
  if (rows > 0) {
    if (!v[0].is_array()) fail(field + " row 0", "expected an array");
    cols = static_cast<Eigen::Index>(v[0].size());
  }
  ProbabilityTable<double> t(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = v[static_cast<std::size_t>(r)];
    const std::string rf = field + " row " + std::to_string(r);
    if (!row.is_array()) fail(rf, "expected an array");
    if (static_cast<Eigen::Index>(row.size()) != cols)
      fail(rf, "has " + std::to_string(row.size()) + " entries, row 0 has " + std::to_string(cols));
    for (Eigen::Index c = 0; c < cols; ++c) t(r, c) = as_double(row[static_cast<std::size_t>(c)], rf);
  }
  return t;
}

KernelDef kernel_from_json(const json& v, const std::string& field) {
  const auto& type_v = require(v, "type", field);
  if (!type_v.is_string()) fail(field + ".type", "expected a string");
  const auto type = type_v.get<std::string>();
  if (type == "table") {
    const auto& steps = require(v, "steps", field);
    if (!steps.is_array()) fail(field + ".steps", "expected an array of step tables");
    StochasticKernel k;
    for (std::size_t i = 0; i < steps.size(); ++i)
      k.steps.push_back(as_table(steps[i], field + " step " + std::to_string(i + 1)));
    return k;
  }
  if (type == "bsc") return shorthand::Bsc{as_double(require(v, "eps", field), field + ".eps")};
  if (type == "identity") return shorthand::Identity{};
  if (type == "constant") return shorthand::Constant{as_int(require(v, "value", field), field + ".value")};
  if (type == "memoryless") return shorthand::Memoryless{as_table(require(v, "rows", field), field + ".rows")};
  if (type == "repetition") return shorthand::Repetition{};
  fail(field + ".type", "unknown kernel type '" + type + "'");
}

template <typename Json, typename Table>
Json table_to_json(const Table& t) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

nlohmann::ordered_json kernel_to_json(const KernelDef& def) {
  using oj = nlohmann::ordered_json;
  return std::visit(Overloaded{
                        [](const StochasticKernel& k) {
                          oj steps = oj::array();
                          for (const auto& t : k.steps) steps.push_back(table_to_json<oj>(t));
                          return oj{{"type", "table"}, {"steps", std::move(steps)}};
                        },
                        [](const shorthand::Bsc& s) { return oj{{"type", "bsc"}, {"eps", s.eps}}; },
                        [](const shorthand::Identity&) { return oj{{"type", "identity"}}; },
                        [](const shorthand::Constant& s) { return oj{{"type", "constant"}, {"value", s.value}}; },
                        [](const shorthand::Memoryless& s) {
                          return oj{{"type", "memoryless"}, {"rows", table_to_json<oj>(s.rows)}};
                        },
                        [](const shorthand::Repetition&) { return oj{{"type", "repetition"}}; },
                    },
                    def);
}

}  // namespace

SystemSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) fail("spec", "expected a JSON object");
  SystemSpec spec;
  const auto& a = require(doc, "alphabets", "spec");
  spec.alphabets.m = as_int(require(a, "m", "alphabets"), "alphabets.m");
  spec.alphabets.x = as_int(require(a, "x", "alphabets"), "alphabets.x");
  spec.alphabets.y = as_int(require(a, "y", "alphabets"), "alphabets.y");
  spec.alphabets.e = as_int(require(a, "e", "alphabets"), "alphabets.e");
  spec.horizon = as_int(require(doc, "horizon", "spec"), "horizon");

  const auto& prior = require(doc, "message_prior", "spec");
  if (!prior.is_array()) fail("message_prior", "expected an array");
  spec.message_prior.resize(static_cast<Eigen::Index>(prior.size()));
  for (std::size_t i = 0; i < prior.size(); ++i)
    spec.message_prior[static_cast<Eigen::Index>(i)] = as_double(prior[i], "message_prior[" + std::to_string(i) + "]");

  const auto& enc = require(doc, "encoder", "spec");
  spec.encoder = kernel_from_json(enc, "encoder");
  if (const auto it = enc.find("deterministic"); it != enc.end()) {
    if (!it->is_boolean()) fail("encoder.deterministic", "expected a boolean");
    spec.encoder_deterministic = it->get<bool>();
  }
  spec.forward_channel = kernel_from_json(require(doc, "forward_channel", "spec"), "forward_channel");
  spec.feedback_channel = kernel_from_json(require(doc, "feedback_channel", "spec"), "feedback_channel");
  return spec;
}

SystemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path.string() + ": cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  try {
    return spec_from_json(doc);
  } catch (const SpecError& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json spec_to_json(const SystemSpec& spec) {
  nlohmann::ordered_json doc;
  doc["alphabets"] = {{"m", spec.alphabets.m}, {"x", spec.alphabets.x}, {"y", spec.alphabets.y}, {"e", spec.alphabets.e}};
  doc["horizon"] = spec.horizon;
  auto prior = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < spec.message_prior.size(); ++i) prior.push_back(spec.message_prior[i]);
  doc["message_prior"] = std::move(prior);
  doc["encoder"] = kernel_to_json(spec.encoder);
  if (spec.encoder_deterministic) doc["encoder"]["deterministic"] = true;
  doc["forward_channel"] = kernel_to_json(spec.forward_channel);
  doc["feedback_channel"] = kernel_to_json(spec.feedback_channel);
  return doc;
}

void set_kernel_parameter(SystemSpec& spec, std::string_view path, double value) {
  const auto dot = path.find('.');
  if (dot == std::string_view::npos) throw SpecError(std::string(path) + ": expected <kernel>.<field>");
  const auto kernel = path.substr(0, dot);
  const auto field = path.substr(dot + 1);
  KernelDef* def = nullptr;
  for (auto role : {KernelRole::encoder, KernelRole::forward_channel, KernelRole::feedback_channel}) {
    if (kernel == to_string(role)) def = &spec.kernel(role);
  }
  if (def == nullptr) throw SpecError(std::string(path) + ": unknown kernel '" + std::string(kernel) + "'");
  auto* bsc = std::get_if<shorthand::Bsc>(def);
  if (bsc == nullptr || field != "eps")
    throw SpecError(std::string(path) + ": only parametric shorthands are sweepable (bsc eps)");
  bsc->eps = value;
}

std::uint64_t spec_digest(const SystemSpec& spec) {
  const std::string bytes = spec_to_json(expand(spec)).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace iflow

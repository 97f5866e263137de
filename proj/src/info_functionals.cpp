#include "iflow/info_functionals.hpp"

#include "iflow/error.hpp"
#include "iflow/random.hpp"

#include <sstream>
#include <stdexcept>

namespace iflow {

InfoQuery InfoQuery::directed(Stream src, Stream dst, int lag) {
  InfoQuery q;
  q.form = InfoForm::directed_information;
  q.source = {src, lag};
  q.target = dst;
  return q;
}

InfoQuery InfoQuery::mutual(Stream src, Stream dst, Selector given) {
  InfoQuery q;
  q.form = InfoForm::mutual_information;
  q.source = {src, 0};
  q.target = dst;
  q.static_condition = std::move(given);
  return q;
}

namespace {

void check_query(const InfoQuery& q, int n) {
  auto bad = [](const std::string& what) { throw QueryError("info query: " + what); };
  if (q.target == Stream::M) bad("the message cannot be a target stream");
  if (q.form != InfoForm::entropy) {
    if (q.source.lag < 0 || q.source.lag > 1) bad("source lag must be 0 or 1");
    if (q.source.stream == q.target) bad("source and target streams must differ");
  }
  if (q.form == InfoForm::mutual_information && !q.causal_conditions.empty())
    bad("mutual information takes static conditions only");
  for (const auto& c : q.causal_conditions) {
    if (c.lag < 0 || c.lag > 1) bad("causal condition lag must be 0 or 1");
    if (c.stream == q.target || (q.form != InfoForm::entropy && c.stream == q.source.stream))
      bad("causal condition streams must differ from source and target");
  }
  if (q.horizon && (*q.horizon < 0 || *q.horizon > n)) bad("horizon override outside 0..n");
  for (const auto& c : q.static_condition) {
    if (c.time > n) bad("static condition refers past the horizon");
  }
}

Selector conditioning_set(const InfoQuery& q, int i) {
  Selector c = Selector::prefix(q.target, i - 1);
  for (const auto& cond : q.causal_conditions) c |= Selector::prefix(cond.stream, i - cond.lag);
  c |= q.static_condition;
  return c;
}

std::string power(Stream s, int lag, const char* index) {
  if (s == Stream::M) return "M0";
  std::string out(1, stream_letter(s));
  out += "^{";
  out += index;
  if (lag > 0) out += "-" + std::to_string(lag);
  return out + "}";
}

}  // namespace

InfoValue generalized_di(JointAnalyzer& analyzer, const InfoQuery& query) {
  const int n = analyzer.distribution().horizon;
  check_query(query, n);
  const int k = query.horizon.value_or(n);
  InfoValue result;
  result.terms.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    const Selector target = Selector::single(query.target, i);
    const Selector given = conditioning_set(query, i);
    double term = 0.0;
    switch (query.form) {
      case InfoForm::directed_information:
        term = analyzer.cmi(Selector::prefix(query.source.stream, i - query.source.lag), target, given);
        break;
      case InfoForm::mutual_information:
        term = analyzer.cmi(Selector::prefix(query.source.stream, k - query.source.lag), target, given);
        break;
      case InfoForm::entropy: {
        if (target.intersects(given)) throw QueryError("info query: target overlaps its conditioning set");
        const double h = analyzer.entropy(target | given) - analyzer.entropy(given);
        if (h <= -kNegativeSlack) throw ConsistencyError("conditional entropy below zero");
        term = h < 0.0 ? 0.0 : h;
        break;
      }
    }
    result.terms.push_back(term);
  }
  result.bits = deterministic_sum(result.terms);
  return result;
}

InfoValue generalized_di(const TrajectoryDistribution& dist, const InfoQuery& query) {
  JointAnalyzer analyzer(dist);
  return generalized_di(analyzer, query);
}

std::string formula(const InfoQuery& q, int horizon) {
  const int k = q.horizon.value_or(horizon);
  std::ostringstream os;
  os << "sum_{i=1}^{" << k << "} ";
  const char tgt = stream_letter(q.target);
  std::vector<std::string> given{std::string(1, tgt) + "^{i-1}"};
  for (const auto& c : q.causal_conditions) given.push_back(power(c.stream, c.lag, "i"));
  if (!q.static_condition.empty()) given.push_back(q.static_condition.to_string());
  std::ostringstream cond;
  for (std::size_t j = 0; j < given.size(); ++j) cond << (j ? ", " : "") << given[j];

  switch (q.form) {
    case InfoForm::directed_information:
      os << "I(" << power(q.source.stream, q.source.lag, "i") << "; " << tgt << "_i | " << cond.str() << ")";
      break;
    case InfoForm::mutual_information: {
      std::string src = q.source.stream == Stream::M ? "M0" : power(q.source.stream, q.source.lag, std::to_string(k).c_str());
      os << "I(" << src << "; " << tgt << "_i | " << cond.str() << ")";
      break;
    }
    case InfoForm::entropy:
      os << "H(" << tgt << "_i | " << cond.str() << ")";
      break;
  }
  return os.str();
}

const CatalogEntry& Catalog::at(std::string_view label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e;
  }
  throw std::out_of_range("catalog has no quantity labeled " + std::string(label));
}

std::vector<std::pair<std::string, InfoQuery>> catalog_queries(int n) {
  using S = Stream;
  std::vector<std::pair<std::string, InfoQuery>> q;
  auto add = [&q](std::string_view label, InfoQuery query) { q.emplace_back(std::string(label), std::move(query)); };
  add(labels::mi_message_feedback, InfoQuery::mutual(S::M, S::E));
  add(labels::di_input_feedback, InfoQuery::directed(S::X, S::E));
  add(labels::di_output_feedback, InfoQuery::directed(S::Y, S::E));
  add(labels::di_output_feedback_given_message, InfoQuery::directed(S::Y, S::E).given(Selector::message()));
  add(labels::di_input_output, InfoQuery::directed(S::X, S::Y));
  add(labels::di_input_feedback_short, InfoQuery::directed(S::X, S::E).up_to(n - 1));
  add(labels::ddi_feedback_output, InfoQuery::directed(S::E, S::Y, 1));
  add(labels::cmi_output_message_given_feedback, InfoQuery::mutual(S::M, S::Y, Selector::prefix(S::E, n - 1)));
  add(labels::ddi_feedback_input, InfoQuery::directed(S::E, S::X, 1));
  add(labels::ddi_output_input, InfoQuery::directed(S::Y, S::X, 1));
  add(labels::ccdi_feedback_input, InfoQuery::directed(S::E, S::X, 1).causally_given(S::Y, 1));
  add(labels::ccdi_feedback_input_undelayed, InfoQuery::directed(S::E, S::X, 0).causally_given(S::Y, 1));
  add(labels::mi_input_output, InfoQuery::mutual(S::X, S::Y));
  return q;
}

Catalog named_quantities(JointAnalyzer& analyzer) {
  const int n = analyzer.distribution().horizon;
  Catalog catalog;
  for (auto& [label, query] : catalog_queries(n)) {
    CatalogEntry entry{label, formula(query, n), query, generalized_di(analyzer, query), {}};
    if (label == labels::ccdi_feedback_input_undelayed)
      entry.note = "undelayed variant: the source set of term i also contains e_i; compare with " +
                   std::string(labels::ccdi_feedback_input) + ", which the theorem3 check uses";
    if (label == labels::di_output_feedback_given_message)
      entry.note = "x_0 exists at time 0, so causal and full conditioning on the message coincide";
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

Catalog named_quantities(const TrajectoryDistribution& dist) {
  JointAnalyzer analyzer(dist);
  return named_quantities(analyzer);
}

nlohmann::ordered_json catalog_to_json(const Catalog& catalog) {
  nlohmann::ordered_json doc;
  doc["catalog_version"] = kCatalogVersion;
  auto list = nlohmann::ordered_json::array();
  for (const auto& e : catalog.entries) {
    nlohmann::ordered_json item;
    item["label"] = e.label;
    item["formula"] = e.formula;
    item["value_bits"] = e.value.bits;
    item["per_step_terms"] = e.value.terms;
    if (!e.note.empty()) item["note"] = e.note;
    list.push_back(std::move(item));
  }
  doc["quantities"] = std::move(list);
  return doc;
}

}  // namespace iflow

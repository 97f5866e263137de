#pragma once

#include "iflow/trajectory.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iflow {

enum class InfoForm { entropy, mutual_information, directed_information };

/// A stream taken up to time i - lag in term i (lag 0: s^i, lag 1: s^{i-1}).
struct LaggedStream {
  Stream stream = Stream::X;
  int lag = 0;
};

/// One member of the directed-information family. Term i (i = 1..k) is
///   directed_information:  I(src^{i-lag}; dst_i | dst^{i-1}, cond^{i-lag_c}..., static)
///   mutual_information:    I(src^{k-lag}; dst_i | dst^{i-1}, static)   (sums to I(src; dst^k | static))
///   entropy:               H(dst_i | dst^{i-1}, cond^{i-lag_c}..., static)
/// where k is `horizon` when set, else the distribution's horizon. An empty
/// source set (e.g. x^0) makes the term exactly 0.
struct InfoQuery {
  InfoForm form = InfoForm::directed_information;
  LaggedStream source;
  Stream target = Stream::Y;
  std::vector<LaggedStream> causal_conditions;
  Selector static_condition;
  std::optional<int> horizon;

  /// I(src^n -> dst^n), optionally delayed by one step.
  static InfoQuery directed(Stream src, Stream dst, int lag = 0);
  static InfoQuery mutual(Stream src, Stream dst, Selector given = {});

  InfoQuery& given(Selector s) {
    static_condition |= s;
    return *this;
  }
  InfoQuery& causally_given(Stream s, int lag) {
    causal_conditions.push_back({s, lag});
    return *this;
  }
  InfoQuery& up_to(int k) {
    horizon = k;
    return *this;
  }
};

struct InfoValue {
  double bits = 0.0;
  std::vector<double> terms;
};

/// Throws QueryError when the query does not fit the distribution (unknown
/// streams, lags outside {0, 1}, horizon beyond n, overlapping arguments).
InfoValue generalized_di(JointAnalyzer& analyzer, const InfoQuery& query);
InfoValue generalized_di(const TrajectoryDistribution& dist, const InfoQuery& query);

/// Human- and machine-readable sum, e.g. "sum_{i=1}^{2} I(X^{i}; E_i | E^{i-1})".
std::string formula(const InfoQuery& query, int horizon);

/// Stable catalog labels. Bump kCatalogVersion whenever a label or its meaning changes.
inline constexpr int kCatalogVersion = 1;

namespace labels {
inline constexpr std::string_view mi_message_feedback = "MI[M;E]";        // I(x_0; e^n)
inline constexpr std::string_view di_input_feedback = "DI[X->E]";         // I(x^n -> e^n)
inline constexpr std::string_view di_output_feedback = "DI[Y->E]";        // I(y^n -> e^n)
inline constexpr std::string_view di_output_feedback_given_message = "DI[Y->E | M]";
inline constexpr std::string_view di_input_output = "DI[X->Y]";           // I(x^n -> y^n)
inline constexpr std::string_view di_input_feedback_short = "DI[X->E]@n-1";  // I(x^{n-1} -> e^{n-1})
inline constexpr std::string_view ddi_feedback_output = "DDI[E->Y]";      // I(e^{n-1} -> y^n)
inline constexpr std::string_view cmi_output_message_given_feedback = "CMI[Y;M | E-]";  // I(y^n; x_0 | e^{n-1})
inline constexpr std::string_view ddi_feedback_input = "DDI[E->X]";       // I(e^{n-1} -> x^n)
inline constexpr std::string_view ddi_output_input = "DDI[Y->X]";         // I(y^{n-1} -> x^n)
inline constexpr std::string_view ccdi_feedback_input = "CCDI[E->X || Y-]";  // I(e^{n-1} -> x^n || y^{n-1})
inline constexpr std::string_view ccdi_feedback_input_undelayed = "CCDI[E+->X || Y-]";  // I(e^n -> x^n || y^{n-1})
inline constexpr std::string_view mi_input_output = "MI[X;Y]";            // I(x^n; y^n)
}  // namespace labels

struct CatalogEntry {
  std::string label;
  std::string formula;
  InfoQuery query;
  InfoValue value;
  std::string note;
};

class Catalog {
 public:
  std::vector<CatalogEntry> entries;

  /// Throws std::out_of_range for an unknown label.
  const CatalogEntry& at(std::string_view label) const;
  double value(std::string_view label) const { return at(label).value.bits; }
};

/// Every quantity used by the identity suite, in a fixed order.
std::vector<std::pair<std::string, InfoQuery>> catalog_queries(int horizon);

Catalog named_quantities(JointAnalyzer& analyzer);
Catalog named_quantities(const TrajectoryDistribution& dist);

/// {"catalog_version": 1, "quantities": [{label, formula, value_bits, per_step_terms[, note]}...]}
nlohmann::ordered_json catalog_to_json(const Catalog& catalog);

}  // namespace iflow

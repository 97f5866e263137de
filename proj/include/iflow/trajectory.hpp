#pragma once

#include "iflow/system_spec.hpp"

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iflow {

/// Message, channel input, channel output, feedback output.
enum class Stream : std::uint8_t { M, X, Y, E };

char stream_letter(Stream s);  // 'M', 'X', 'Y', 'E'

/// One random variable of the trajectory. M lives at time 0, the others at 1..n.
struct Coordinate {
  Stream stream = Stream::M;
  int time = 0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// Position in the trajectory layout (x_0, x_1, y_1, e_1, ..., x_n, y_n, e_n).
int layout_position(Coordinate c);

/// Lower-case column name: "x0", "x1", "y1", "e1", ...
std::string coordinate_name(Coordinate c);

std::vector<Coordinate> trajectory_layout(int horizon);

/// A set of coordinates, kept sorted in layout order.
class Selector {
 public:
  Selector() = default;
  Selector(std::initializer_list<Coordinate> coords);

  static Selector message() { return Selector{{Stream::M, 0}}; }

  /// s^t: every coordinate of `s` at time <= t. For M this is {x_0} for any t >= 0.
  static Selector prefix(Stream s, int t);

  /// s_from, ..., s_to (empty if from > to).
  static Selector range(Stream s, int from, int to);

  static Selector single(Stream s, int t) { return Selector{{s, t}}; }

  void insert(Coordinate c);
  Selector& operator|=(const Selector& other);
  friend Selector operator|(Selector lhs, const Selector& rhs) { return lhs |= rhs; }

  bool contains(Coordinate c) const;
  bool intersects(const Selector& other) const;
  bool empty() const { return coords_.empty(); }
  std::size_t size() const { return coords_.size(); }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  /// e.g. "{M0, X1..2, E1}"
  std::string to_string() const;

  friend bool operator==(const Selector&, const Selector&) = default;

 private:
  std::vector<Coordinate> coords_;
};

enum class DistributionKind { exact, empirical };

/// Dense joint law over an ordered list of coordinates. Entry index is the
/// mixed-radix code of the symbols in coordinate order, first most significant.
/// For a full joint the coordinates are exactly trajectory_layout(horizon).
struct TrajectoryDistribution {
  int horizon = 0;
  std::vector<Coordinate> coordinates;
  std::vector<int> radices;
  Eigen::VectorXd probabilities;
  DistributionKind kind = DistributionKind::exact;

  std::optional<std::size_t> position_of(Coordinate c) const;
  double total_mass() const;
  std::size_t entries() const { return static_cast<std::size_t>(probabilities.size()); }
};

/// Radices of the full trajectory layout for the given alphabets.
std::vector<int> trajectory_radices(const Alphabets& alphabets, int horizon);

/// Exact joint p(x_0) prod_i p(x_i|...) p(y_i|...) p(e_i|...). Expands the spec
/// first. Throws GuardExceeded when the table would have more than `guard` entries.
TrajectoryDistribution build_joint(const SystemSpec& spec, std::uint64_t guard = kDefaultGuard);

/// Sums out everything not in `keep`. Throws QueryError for an empty or unknown selector.
TrajectoryDistribution marginal(const TrajectoryDistribution& dist, const Selector& keep);

/// Shannon entropy in bits of the marginal on `a` (non-empty).
double entropy(const TrajectoryDistribution& dist, const Selector& a);

/// I(A;B|C) in bits; C may be empty. Throws QueryError if the selectors overlap.
double cmi(const TrajectoryDistribution& dist, const Selector& a, const Selector& b, const Selector& c = {});

/// Values in (-kNegativeSlack, 0) are reported as 0; anything lower throws ConsistencyError.
inline constexpr double kNegativeSlack = 1e-9;

/// Repeated entropy / CMI evaluation over one distribution. Holds a compact
/// list of the positive-mass atoms and memoizes marginal entropies by
/// coordinate set. The referenced distribution must outlive the analyzer.
/// Not thread-safe; use one analyzer per thread.
class JointAnalyzer {
 public:
  explicit JointAnalyzer(const TrajectoryDistribution& dist);
  JointAnalyzer(TrajectoryDistribution&&) = delete;

  const TrajectoryDistribution& distribution() const { return *dist_; }

  /// Entropy of the marginal on `a`; 0 for an empty selector.
  double entropy(const Selector& a);

  double cmi(const Selector& a, const Selector& b, const Selector& c = {});

  std::size_t atom_count() const { return mass_.size(); }

 private:
  std::vector<std::size_t> positions(const Selector& s) const;

  const TrajectoryDistribution* dist_;
  std::vector<double> mass_;
  // one column per coordinate, one row per atom
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> symbols_;
  std::map<std::vector<std::size_t>, double> memo_;
};

/// CSV with one row per positive-mass entry: coordinate columns, then "probability".
void write_joint_csv(std::ostream& out, const TrajectoryDistribution& dist);

}  // namespace iflow

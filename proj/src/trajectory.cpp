#include "iflow/trajectory.hpp"

#include "iflow/error.hpp"
#include "iflow/mixed_radix.hpp"
#include "iflow/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace iflow {

char stream_letter(Stream s) {
  switch (s) {
    case Stream::M:
      return 'M';
    case Stream::X:
      return 'X';
    case Stream::Y:
      return 'Y';
    case Stream::E:
      return 'E';
  }
  return '?';
}

int layout_position(Coordinate c) {
  if (c.stream == Stream::M) return 0;
  const int offset = c.stream == Stream::X ? 0 : c.stream == Stream::Y ? 1 : 2;
  return 1 + 3 * (c.time - 1) + offset;
}

std::string coordinate_name(Coordinate c) {
  const char letter = c.stream == Stream::M ? 'x' : static_cast<char>(stream_letter(c.stream) - 'A' + 'a');
  return std::string(1, letter) + std::to_string(c.time);
}

std::vector<Coordinate> trajectory_layout(int horizon) {
  std::vector<Coordinate> layout{{Stream::M, 0}};
  for (int t = 1; t <= horizon; ++t) {
    layout.push_back({Stream::X, t});
    layout.push_back({Stream::Y, t});
    layout.push_back({Stream::E, t});
  }
  return layout;
}

std::vector<int> trajectory_radices(const Alphabets& a, int horizon) {
  std::vector<int> radices{a.m};
  for (int t = 1; t <= horizon; ++t) {
    radices.push_back(a.x);
    radices.push_back(a.y);
    radices.push_back(a.e);
  }
  return radices;
}

// --- Selector ---------------------------------------------------------------

Selector::Selector(std::initializer_list<Coordinate> coords) {
  for (const auto& c : coords) insert(c);
}

Selector Selector::prefix(Stream s, int t) {
  if (s == Stream::M) return t >= 0 ? message() : Selector{};
  return range(s, 1, t);
}

Selector Selector::range(Stream s, int from, int to) {
  Selector out;
  if (s == Stream::M) {
    if (from <= 0 && to >= 0) out.insert({Stream::M, 0});
    return out;
  }
  for (int t = std::max(from, 1); t <= to; ++t) out.coords_.push_back({s, t});
  return out;
}

void Selector::insert(Coordinate c) {
  if (c.stream == Stream::M ? c.time != 0 : c.time < 1)
    throw QueryError("invalid coordinate " + coordinate_name(c));
  const auto pos = std::lower_bound(coords_.begin(), coords_.end(), c, [](const Coordinate& lhs, const Coordinate& rhs) {
    return layout_position(lhs) < layout_position(rhs);
  });
  if (pos == coords_.end() || !(*pos == c)) coords_.insert(pos, c);
}

Selector& Selector::operator|=(const Selector& other) {
  for (const auto& c : other.coords_) insert(c);
  return *this;
}

bool Selector::contains(Coordinate c) const { return std::find(coords_.begin(), coords_.end(), c) != coords_.end(); }

bool Selector::intersects(const Selector& other) const {
  return std::any_of(coords_.begin(), coords_.end(), [&](const Coordinate& c) { return other.contains(c); });
}

std::string Selector::to_string() const {
  // groups consecutive times of a stream: {M0, X1..2, E1}
  std::vector<std::string> parts;
  for (Stream s : {Stream::M, Stream::X, Stream::Y, Stream::E}) {
    std::vector<int> times;
    for (const auto& c : coords_)
      if (c.stream == s) times.push_back(c.time);
    for (std::size_t i = 0; i < times.size();) {
      std::size_t j = i;
      while (j + 1 < times.size() && times[j + 1] == times[j] + 1) ++j;
      std::string part(1, stream_letter(s));
      part += std::to_string(times[i]);
      if (j > i) part += ".." + std::to_string(times[j]);
      parts.push_back(part);
      i = j + 1;
    }
  }
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + "}";
}

// --- TrajectoryDistribution ----------------------------------------------------

std::optional<std::size_t> TrajectoryDistribution::position_of(Coordinate c) const {
  const auto it = std::find(coordinates.begin(), coordinates.end(), c);
  if (it == coordinates.end()) return std::nullopt;
  return static_cast<std::size_t>(it - coordinates.begin());
}

double TrajectoryDistribution::total_mass() const {
  return deterministic_sum({probabilities.data(), static_cast<std::size_t>(probabilities.size())});
}

namespace {

struct JointBuilder {
  const Alphabets& a;
  int horizon;
  const StochasticKernel& encoder;
  const StochasticKernel& forward;
  const StochasticKernel& feedback;
  Eigen::VectorXd& out;

  // Depth-first over time steps; each kernel's history index grows by
  // appending the newest symbols as least significant digits.
  void step(int i, std::uint64_t traj, double mass, std::uint64_t enc_hist, std::uint64_t fwd_prefix,
            std::uint64_t fb_prefix) {
    if (i > horizon) {
      out[static_cast<Eigen::Index>(traj)] = mass;
      return;
    }
    const auto& enc = encoder.at_time(i);
    const auto& fwd = forward.at_time(i);
    const auto& fb = feedback.at_time(i);
    for (int x = 0; x < a.x; ++x) {
      const double px = enc(static_cast<Eigen::Index>(enc_hist), x);
      if (px == 0.0) continue;
      const std::uint64_t fwd_hist = fwd_prefix * static_cast<std::uint64_t>(a.x) + static_cast<std::uint64_t>(x);
      for (int y = 0; y < a.y; ++y) {
        const double py = fwd(static_cast<Eigen::Index>(fwd_hist), y);
        if (py == 0.0) continue;
        const std::uint64_t fb_hist = fb_prefix * static_cast<std::uint64_t>(a.y) + static_cast<std::uint64_t>(y);
        for (int e = 0; e < a.e; ++e) {
          const double pe = fb(static_cast<Eigen::Index>(fb_hist), e);
          if (pe == 0.0) continue;
          const std::uint64_t next_traj =
              ((traj * static_cast<std::uint64_t>(a.x) + static_cast<std::uint64_t>(x)) * static_cast<std::uint64_t>(a.y) +
               static_cast<std::uint64_t>(y)) *
                  static_cast<std::uint64_t>(a.e) +
              static_cast<std::uint64_t>(e);
          step(i + 1, next_traj, mass * px * py * pe,
               (enc_hist * static_cast<std::uint64_t>(a.x) + static_cast<std::uint64_t>(x)) * static_cast<std::uint64_t>(a.e) +
                   static_cast<std::uint64_t>(e),
               fwd_hist * static_cast<std::uint64_t>(a.y) + static_cast<std::uint64_t>(y),
               fb_hist * static_cast<std::uint64_t>(a.e) + static_cast<std::uint64_t>(e));
        }
      }
    }
  }
};

std::vector<std::size_t> resolve(const TrajectoryDistribution& dist, const Selector& s) {
  std::vector<std::size_t> pos;
  pos.reserve(s.size());
  for (const auto& c : s) {
    const auto p = dist.position_of(c);
    if (!p) throw QueryError("coordinate " + coordinate_name(c) + " is not part of the distribution");
    pos.push_back(*p);
  }
  return pos;
}

double clamp_information(double value, const char* what) {
  if (value <= -kNegativeSlack) {
    std::ostringstream os;
    os.precision(17);
    os << what << " evaluated to " << value << " bits";
    throw ConsistencyError(os.str());
  }
  return value < 0.0 ? 0.0 : value;
}

}  // namespace

TrajectoryDistribution build_joint(const SystemSpec& spec, std::uint64_t guard) {
  check_guard(spec.alphabets, spec.horizon, guard);
  const SystemSpec full = expand(spec);
  TrajectoryDistribution dist;
  dist.horizon = full.horizon;
  dist.coordinates = trajectory_layout(full.horizon);
  dist.radices = trajectory_radices(full.alphabets, full.horizon);
  dist.kind = DistributionKind::exact;
  dist.probabilities = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(radix_product(dist.radices)));

  JointBuilder builder{full.alphabets,
                       full.horizon,
                       std::get<StochasticKernel>(full.encoder),
                       std::get<StochasticKernel>(full.forward_channel),
                       std::get<StochasticKernel>(full.feedback_channel),
                       dist.probabilities};
  for (int m = 0; m < full.alphabets.m; ++m) {
    const double pm = full.message_prior[m];
    if (pm == 0.0) continue;
    builder.step(1, static_cast<std::uint64_t>(m), pm, static_cast<std::uint64_t>(m), 0, 0);
  }
  return dist;
}

TrajectoryDistribution marginal(const TrajectoryDistribution& dist, const Selector& keep) {
  if (keep.empty()) throw QueryError("marginal: empty selector");
  const auto pos = resolve(dist, keep);
  TrajectoryDistribution out;
  out.horizon = dist.horizon;
  out.kind = dist.kind;
  for (auto p : pos) {
    out.coordinates.push_back(dist.coordinates[p]);
    out.radices.push_back(dist.radices[p]);
  }
  out.probabilities = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(radix_product(out.radices)));
  const auto strides = mixed_radix_strides(out.radices);
  std::vector<int> digits(dist.radices.size(), 0);
  for (Eigen::Index idx = 0; idx < dist.probabilities.size(); ++idx) {
    const double p = dist.probabilities[idx];
    if (p != 0.0) {
      decode_mixed_radix(static_cast<std::uint64_t>(idx), dist.radices, digits);
      std::uint64_t target = 0;
      for (std::size_t k = 0; k < pos.size(); ++k) target += static_cast<std::uint64_t>(digits[pos[k]]) * strides[k];
      out.probabilities[static_cast<Eigen::Index>(target)] += p;
    }
  }
  return out;
}

double entropy(const TrajectoryDistribution& dist, const Selector& a) {
  if (a.empty()) throw QueryError("entropy: empty selector");
  JointAnalyzer analyzer(dist);
  return analyzer.entropy(a);
}

double cmi(const TrajectoryDistribution& dist, const Selector& a, const Selector& b, const Selector& c) {
  JointAnalyzer analyzer(dist);
  return analyzer.cmi(a, b, c);
}

// --- JointAnalyzer -------------------------------------------------------------

JointAnalyzer::JointAnalyzer(const TrajectoryDistribution& dist) : dist_(&dist) {
  for (int r : dist.radices) {
    if (r > 256) throw QueryError("alphabet sizes above 256 are not supported");
  }
  std::vector<Eigen::Index> atoms;
  for (Eigen::Index idx = 0; idx < dist.probabilities.size(); ++idx) {
    if (dist.probabilities[idx] > 0.0) atoms.push_back(idx);
  }
  mass_.reserve(atoms.size());
  symbols_.resize(static_cast<Eigen::Index>(atoms.size()), static_cast<Eigen::Index>(dist.radices.size()));
  std::vector<int> digits(dist.radices.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    mass_.push_back(dist.probabilities[atoms[k]]);
    decode_mixed_radix(static_cast<std::uint64_t>(atoms[k]), dist.radices, digits);
    for (std::size_t c = 0; c < digits.size(); ++c)
      symbols_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = static_cast<std::uint8_t>(digits[c]);
  }
}

std::vector<std::size_t> JointAnalyzer::positions(const Selector& s) const { return resolve(*dist_, s); }

double JointAnalyzer::entropy(const Selector& a) {
  const auto pos = positions(a);
  if (pos.empty()) return 0.0;
  if (const auto it = memo_.find(pos); it != memo_.end()) return it->second;

  std::vector<int> radices;
  for (auto p : pos) radices.push_back(dist_->radices[p]);
  const auto strides = mixed_radix_strides(radices);
  std::vector<double> table(radix_product(radices), 0.0);
  const auto atoms = static_cast<Eigen::Index>(mass_.size());
  std::vector<std::uint64_t> index(mass_.size(), 0);
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const auto col = symbols_.col(static_cast<Eigen::Index>(pos[k]));
    for (Eigen::Index r = 0; r < atoms; ++r) index[static_cast<std::size_t>(r)] += col[r] * strides[k];
  }
  for (std::size_t r = 0; r < mass_.size(); ++r) table[index[r]] += mass_[r];

  std::vector<double> terms;
  terms.reserve(table.size());
  for (double p : table) {
    if (p > 0.0) terms.push_back(-p * std::log2(p));
  }
  const double h = deterministic_sum(terms);
  memo_.emplace(pos, h);
  return h;
}

double JointAnalyzer::cmi(const Selector& a, const Selector& b, const Selector& c) {
  if (a.empty() || b.empty()) return 0.0;
  if (a.intersects(b) || a.intersects(c) || b.intersects(c))
    throw QueryError("cmi: selectors " + a.to_string() + ", " + b.to_string() + ", " + c.to_string() + " overlap");
  const double value = entropy(a | c) + entropy(b | c) - entropy(a | b | c) - entropy(c);
  return clamp_information(value, "conditional mutual information");
}

void write_joint_csv(std::ostream& out, const TrajectoryDistribution& dist) {
  for (const auto& c : dist.coordinates) out << coordinate_name(c) << ',';
  out << "probability\n";
  std::vector<int> digits(dist.radices.size());
  char buf[32];
  for (Eigen::Index idx = 0; idx < dist.probabilities.size(); ++idx) {
    const double p = dist.probabilities[idx];
    if (p <= 0.0) continue;
    decode_mixed_radix(static_cast<std::uint64_t>(idx), dist.radices, digits);
    for (int d : digits) out << d << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << buf << '\n';
  }
}

}  // namespace iflow

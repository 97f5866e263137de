#include "iflow/commands.hpp"

#include "iflow/error.hpp"
#include "iflow/info_functionals.hpp"
#include "iflow/monte_carlo.hpp"
#include "iflow/spec_io.hpp"
#include "iflow/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iflow::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

OutputFormat format_of(const RunConfig& c, OutputFormat fallback) { return c.format.value_or(fallback); }

SystemSpec load_valid_spec(const RunConfig& c) {
  if (c.spec_path.empty()) throw ConfigError("--spec is required");
  SystemSpec spec = load_spec(c.spec_path);
  check_guard(spec.alphabets, spec.horizon, c.guard);
  ValidationReport report;
  try {
    report = validate(spec);
  } catch (const SpecError& e) {
    throw SpecError(c.spec_path + ": " + e.what());
  }
  if (!report.ok()) {
    std::ostringstream os;
    os << c.spec_path << ": " << report.violations.size() << " violation(s)";
    for (const auto& v : report.violations)
      os << "\n  " << v.kernel << " step " << v.step << " row " << v.row << ": " << v.message;
    throw SpecError(os.str());
  }
  return spec;
}

void check_tolerance(const RunConfig& c) {
  if (!(c.tolerance > 0.0)) throw ConfigError("--tol must be positive");
}

ojson dims_json(const SystemSpec& s) {
  return {{"m", s.alphabets.m}, {"x", s.alphabets.x}, {"y", s.alphabets.y}, {"e", s.alphabets.e}, {"horizon", s.horizon}};
}

std::string verdict_line(const IdentityReport& r) {
  std::ostringstream os;
  os << to_string(r.id) << ": " << to_string(r.verdict) << " (residual " << num(r.residual);
  if (r.gap_bits) os << ", gap " << num(*r.gap_bits);
  os << ")";
  return os.str();
}

// --- compute ------------------------------------------------------------------

CommandResult compute(const RunConfig& c) {
  const SystemSpec spec = load_valid_spec(c);
  const auto dist = build_joint(spec, c.guard);
  const Catalog catalog = named_quantities(dist);
  CommandResult out;
  if (format_of(c, OutputFormat::json) == OutputFormat::csv) {
    std::ostringstream os;
    os << "label,value_bits,per_step_terms,formula\n";
    for (const auto& e : catalog.entries) {
      os << '"' << e.label << "\"," << num(e.value.bits) << ",\"";
      for (std::size_t i = 0; i < e.value.terms.size(); ++i) os << (i ? ";" : "") << num(e.value.terms[i]);
      os << "\",\"" << e.formula << "\"\n";
    }
    out.report = os.str();
  } else {
    ojson doc;
    doc["command"] = "compute";
    doc["spec_digest"] = hex(spec_digest(spec));
    doc["dims"] = dims_json(spec);
    doc.update(catalog_to_json(catalog));
    out.report = doc.dump(2) + "\n";
  }
  if (c.dump_joint) {
    std::ofstream f(*c.dump_joint);
    if (!f) throw ConfigError("cannot write " + *c.dump_joint);
    write_joint_csv(f, dist);
  }
  std::ostringstream s;
  for (const auto& e : catalog.entries) s << e.label << " = " << num(e.value.bits) << " bits\n";
  out.summary = s.str();
  return out;
}

// --- verify ---------------------------------------------------------------------

CommandResult verify(const RunConfig& c) {
  check_tolerance(c);
  const SystemSpec spec = load_valid_spec(c);
  const auto dist = build_joint(spec, c.guard);
  const bool det = encoder_is_deterministic(spec);
  const auto reports = verify_all(named_quantities(dist), det, c.tolerance);
  const bool ok = all_in_scope_hold(reports);

  CommandResult out;
  out.exit_code = ok ? kExitOk : kExitViolation;
  if (format_of(c, OutputFormat::json) == OutputFormat::csv) {
    std::ostringstream os;
    os << "identity,verdict,lhs_bits,rhs_sum_bits,residual_bits,gap_bits\n";
    for (const auto& r : reports) {
      os << to_string(r.id) << ',' << to_string(r.verdict) << ',' << num(r.lhs.bits) << ','
         << num(r.lhs.bits - r.residual) << ',' << num(r.residual) << ',' << (r.gap_bits ? num(*r.gap_bits) : "")
         << '\n';
    }
    out.report = os.str();
  } else {
    ojson doc;
    doc["command"] = "verify";
    doc["spec_digest"] = hex(spec_digest(spec));
    doc["tolerance"] = c.tolerance;
    doc["encoder_deterministic"] = det;
    doc["all_in_scope_hold"] = ok;
    auto list = ojson::array();
    for (const auto& r : reports) list.push_back(report_to_json(r));
    doc["reports"] = std::move(list);
    out.report = doc.dump(2) + "\n";
  }
  std::ostringstream s;
  for (const auto& r : reports) s << verdict_line(r) << '\n';
  if (c.proof_trace) s << proof_trace(reports);
  out.summary = s.str();
  return out;
}

// --- fuzz -------------------------------------------------------------------------

CommandResult fuzz(const RunConfig& c) {
  check_tolerance(c);
  if (c.alphabet_max < 1) throw ConfigError("--alphabet-max must be at least 1");
  if (c.max_n < 1) throw ConfigError("--max-n must be at least 1");
  FuzzConfig fc;
  fc.master_seed = c.seed;
  fc.trials = c.trials;
  fc.dims = {std::min(2, c.alphabet_max), c.alphabet_max, 1, c.max_n};
  fc.encoder = c.encoder;
  fc.tolerance = c.tolerance;
  fc.jobs = c.jobs;
  fc.guard = c.guard;
  const FuzzSummary summary = iflow::fuzz(fc);

  CommandResult out;
  out.exit_code = summary.passed() ? kExitOk : kExitViolation;
  if (format_of(c, OutputFormat::json) == OutputFormat::csv) {
    std::ostringstream os;
    os << "identity,in_scope,out_of_scope,violations,max_abs_residual_bits,max_defect_bits,"
          "max_abs_residual_out_of_scope_bits\n";
    for (const auto& st : summary.identities) {
      os << to_string(st.id) << ',' << st.in_scope << ',' << st.out_of_scope << ',' << st.violations << ','
         << num(st.max_abs_residual) << ',' << num(st.max_defect) << ',' << num(st.max_abs_residual_out_of_scope)
         << '\n';
    }
    out.report = os.str();
  } else {
    ojson doc;
    doc["command"] = "fuzz";
    doc.update(summary_to_json(summary));
    out.report = doc.dump(2) + "\n";
  }
  std::ostringstream s;
  s << summary.config.trials << " trials, " << summary.violations.size() << " in-scope violation(s)\n";
  for (const auto& st : summary.identities) {
    s << "  " << to_string(st.id) << ": in scope " << st.in_scope << ", max defect " << num(st.max_defect);
    if (st.out_of_scope) s << ", out of scope " << st.out_of_scope;
    s << '\n';
  }
  out.summary = s.str();
  return out;
}

// --- simulate ---------------------------------------------------------------------

CommandResult simulate(const RunConfig& c) {
  if (c.samples == 0) throw ConfigError("--samples must be positive");
  const SystemSpec spec = load_valid_spec(c);
  const SampleBatch batch = sample(spec, c.samples, c.seed);
  CommandResult out;
  std::ostringstream s;
  if (format_of(c, OutputFormat::json) == OutputFormat::csv) {
    std::ostringstream os;
    write_batch_csv(os, batch);
    out.report = os.str();
    s << batch.count() << " trajectories, digest " << hex(batch_digest(batch)) << '\n';
    out.summary = s.str();
    return out;
  }
  const auto exact_dist = build_joint(spec, c.guard);
  const auto empirical = empirical_distribution(batch, c.guard);
  const Catalog exact = named_quantities(exact_dist);
  const Catalog estimated = named_quantities(empirical);

  ojson doc;
  doc["command"] = "simulate";
  doc["spec_digest"] = hex(batch.spec_digest);
  doc["samples"] = c.samples;
  doc["seed"] = c.seed;
  doc["batch_digest"] = hex(batch_digest(batch));
  doc["estimator"] = "plug-in (biased upward for finite samples)";
  auto list = ojson::array();
  for (std::size_t k = 0; k < exact.entries.size(); ++k) {
    const auto& e = exact.entries[k];
    const double est = estimated.entries[k].value.bits;
    const double err = std::abs(est - e.value.bits);
    list.push_back({{"label", e.label}, {"exact_bits", e.value.bits}, {"estimate_bits", est}, {"abs_error_bits", err}});
    s << e.label << ": exact " << num(e.value.bits) << ", estimate " << num(est) << ", error " << num(err) << '\n';
  }
  doc["quantities"] = std::move(list);
  out.report = doc.dump(2) + "\n";
  out.summary = s.str();
  return out;
}

// --- sweep --------------------------------------------------------------------------

CommandResult sweep(const RunConfig& c) {
  check_tolerance(c);
  if (!c.sweep) throw ConfigError("sweep needs --param, --from, --to and --steps");
  const auto& p = *c.sweep;
  if (p.steps < 2) throw ConfigError("--steps must be at least 2");
  SystemSpec spec = load_valid_spec(c);
  set_kernel_parameter(spec, p.path, p.from);  // rejects non-parametric fields
  const double lo = std::min(p.from, p.to);
  const double hi = std::max(p.from, p.to);
  if (lo < 0.0 || hi > 0.5) throw ConfigError("bsc eps sweep range must lie within [0, 0.5]");

  struct Row {
    double value;
    Catalog catalog;
    std::vector<IdentityReport> reports;
  };
  std::vector<Row> rows;
  bool ok = true;
  for (int k = 0; k < p.steps; ++k) {
    const double value = k + 1 == p.steps ? p.to : p.from + (p.to - p.from) * k / (p.steps - 1);
    set_kernel_parameter(spec, p.path, value);
    const auto dist = build_joint(spec, c.guard);
    Catalog catalog = named_quantities(dist);
    auto reports = verify_all(catalog, encoder_is_deterministic(spec), c.tolerance);
    ok = ok && all_in_scope_hold(reports);
    rows.push_back({value, std::move(catalog), std::move(reports)});
  }

  CommandResult out;
  out.exit_code = ok ? kExitOk : kExitViolation;
  if (format_of(c, OutputFormat::csv) == OutputFormat::csv) {
    std::ostringstream os;
    os << p.path;
    for (const auto& e : rows.front().catalog.entries) os << ",\"" << e.label << '"';
    for (const auto& r : rows.front().reports) os << ",residual:" << to_string(r.id);
    os << ",gap:theorem2\n";
    for (const auto& row : rows) {
      os << num(row.value);
      for (const auto& e : row.catalog.entries) os << ',' << num(e.value.bits);
      double gap = 0.0;
      for (const auto& r : row.reports) {
        os << ',' << num(r.residual);
        if (r.gap_bits) gap = *r.gap_bits;
      }
      os << ',' << num(gap) << '\n';
    }
    out.report = os.str();
  } else {
    ojson doc;
    doc["command"] = "sweep";
    doc["parameter"] = p.path;
    auto list = ojson::array();
    for (const auto& row : rows) {
      ojson item;
      item["value"] = row.value;
      ojson q;
      for (const auto& e : row.catalog.entries) q[e.label] = e.value.bits;
      item["quantities"] = std::move(q);
      ojson res;
      for (const auto& r : row.reports) res[std::string(to_string(r.id))] = r.residual;
      item["residuals"] = std::move(res);
      list.push_back(std::move(item));
    }
    doc["rows"] = std::move(list);
    out.report = doc.dump(2) + "\n";
  }
  std::ostringstream s;
  s << p.steps << " sweep rows over " << p.path << ", all in-scope identities " << (ok ? "hold" : "NOT holding") << '\n';
  out.summary = s.str();
  return out;
}

}  // namespace

std::string proof_trace(const std::vector<IdentityReport>& reports) {
  std::ostringstream os;
  char buf[128];
  for (const auto& r : reports) {
    os << "\n" << to_string(r.id) << ": " << r.statement << "  [" << to_string(r.verdict) << "]\n";
    std::vector<const Component*> cols{&r.lhs};
    for (const auto& c : r.rhs) cols.push_back(&c);
    std::size_t steps = 0;
    for (auto* c : cols) steps = std::max(steps, c->terms.size());
    os << "  i ";
    for (auto* c : cols) {
      std::snprintf(buf, sizeof buf, " %20s", c->label.c_str());
      os << buf;
    }
    os << "           lhs-rhs\n";
    auto term = [](const Component* c, std::size_t i) { return i < c->terms.size() ? c->terms[i] : 0.0; };
    for (std::size_t i = 0; i < steps; ++i) {
      std::snprintf(buf, sizeof buf, "  %-2zu", i + 1);
      os << buf;
      double diff = term(cols[0], i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        std::snprintf(buf, sizeof buf, " %20.12f", term(cols[k], i));
        os << buf;
        if (k > 0) diff -= term(cols[k], i);
      }
      std::snprintf(buf, sizeof buf, " %17.3e\n", diff);
      os << buf;
    }
    os << "  = ";
    for (auto* c : cols) {
      std::snprintf(buf, sizeof buf, "%20.12f ", c->bits);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%17.3e\n", r.residual);
    os << buf;
    if (r.gap_bits) {
      std::snprintf(buf, sizeof buf, "  gap CMI[Y;M | E-] = %.12f (residual - gap = %.3e)\n", *r.gap_bits,
                    r.residual - *r.gap_bits);
      os << buf;
    }
    for (const auto& e : r.extras) {
      std::snprintf(buf, sizeof buf, "  %s = %.12f\n", e.label.c_str(), e.bits);
      os << buf;
    }
  }
  return os.str();
}

CommandResult run(const RunConfig& config) {
  try {
    switch (config.command) {
      case Command::compute:
        return compute(config);
      case Command::verify:
        return verify(config);
      case Command::fuzz:
        return fuzz(config);
      case Command::simulate:
        return simulate(config);
      case Command::sweep:
        return sweep(config);
    }
  } catch (const GuardExceeded& e) {
    return {kExitInputError, {}, {}, e.what()};
  } catch (const SpecError& e) {
    return {kExitInputError, {}, {}, e.what()};
  } catch (const std::invalid_argument& e) {
    return {kExitInputError, {}, {}, e.what()};
  }
  return {kExitInputError, {}, {}, "unknown command"};
}

}  // namespace iflow::cli

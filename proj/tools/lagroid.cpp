// lagroid: command-line front end for model files and the catalog.
//
// Exit codes: 0 pass, 1 check failed, 2 usage / unknown name, 3 numeric abort.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagroid/conserved.hpp"
#include "lagroid/integrate.hpp"
#include "lagroid/model.hpp"

namespace {

using namespace lagroid;

constexpr int kPass = 0, kFail = 1, kUsage = 2, kAbort = 3;

struct UsageError : Error {
  using Error::Error;
};

struct Common {
  std::string model;
  std::vector<std::string> params;
  bool force = false;
  std::uint64_t seed = 0;
  int samples = 32;
  double lo = -2.0, hi = 2.0;
  double atol = 1e-9, rtol = 1e-9;
};

struct Run {
  std::string x0, y0;
  double t_end = 10.0, dt = 1e-3;
  double tol = 1e-7;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("model", c.model, "catalog name or model file")->required();
  cmd->add_option("--param", c.params, "override a parameter, k=v (repeatable)");
  cmd->add_flag("--force", c.force, "continue with a model that fails validation");
  cmd->add_option("--seed", c.seed, "sampling seed");
  cmd->add_option("--samples", c.samples, "sample points per equality check");
  cmd->add_option("--lo", c.lo, "lower bound of the sample box");
  cmd->add_option("--hi", c.hi, "upper bound of the sample box");
  cmd->add_option("--atol", c.atol, "absolute tolerance of sampled checks");
  cmd->add_option("--rtol", c.rtol, "relative tolerance of sampled checks");
}

void add_run(CLI::App* cmd, Run& r, bool required) {
  auto* y0 = cmd->add_option("--y0", r.y0, "initial fiber coordinates, comma separated");
  if (required) y0->required();
  cmd->add_option("--x0", r.x0, "initial base coordinates, comma separated");
  cmd->add_option("--t-end", r.t_end, "final time")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", r.dt, "RK4 step")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", r.tol, "drift tolerance");
  cmd->add_option("--out", r.out, "CSV output path");
}

SampleDomain domain_of(const Common& c) {
  SampleDomain d;
  d.fallback = {c.lo, c.hi};
  d.samples = c.samples;
  d.seed = c.seed;
  d.atol = c.atol;
  d.rtol = c.rtol;
  d.check();
  return d;
}

Parameters overrides_of(const Common& c) {
  Parameters p;
  for (const auto& kv : c.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects k=v, got '" + kv + "'");
    try {
      std::size_t used = 0;
      double v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
      p[kv.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw UsageError("--param value is not a number: '" + kv + "'");
    }
  }
  return p;
}

Model open_model(const Common& c, bool force) {
  LoadOptions opt;
  opt.overrides = overrides_of(c);
  opt.force = force;
  opt.domain = domain_of(c);
  return load_model(c.model, opt);
}

std::vector<double> numbers(const std::string& list, std::size_t expected, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (v.size() != expected)
    throw UsageError(std::string(flag) + " expects " + std::to_string(expected) + " values, got " + std::to_string(v.size()));
  return v;
}

State initial_state(const Model& m, const Run& r) {
  return {numbers(r.x0, static_cast<std::size_t>(m.algebroid->base_dim()), "--x0"),
          numbers(r.y0, static_cast<std::size_t>(m.algebroid->rank()), "--y0")};
}

std::string fmt17(double v) {
  if (v == 0.0) v = 0.0;  // no "-0" in reports
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void write_csv(const std::string& path, const std::vector<std::string>& header, const Trajectory& tr, bool with_state) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (std::size_t n = 0; n < tr.size(); ++n) {
    out << fmt17(tr.times[n]);
    if (with_state) {
      for (double v : tr.states[n].x) out << ',' << fmt17(v);
      for (double v : tr.states[n].y) out << ',' << fmt17(v);
    }
    for (const auto& mon : tr.monitors) out << ',' << fmt17(mon[n]);
    out << '\n';
  }
}

void print_validation(const ValidationReport& rep) {
  for (const auto& c : rep.checks) std::cout << "  " << c.name << ": residual " << sci(c.residual) << " " << verdict(c.passed) << "\n";
}

/// Prints the drift table and returns true iff every relative drift is
/// within tol.
bool report_drift(const Trajectory& tr, double tol) {
  if (tr.size() < 2) {
    std::cout << "drift: not enough samples\n";
    return false;
  }
  DriftReport rep = drift(tr);
  bool ok = true;
  std::cout << "drift (tolerance " << sci(tol) << "):\n";
  for (const auto& q : rep.quantities) {
    bool pass = q.relative <= tol;
    ok = ok && pass;
    std::cout << "  " << q.name << ": initial " << fmt17(q.initial) << ", max deviation " << sci(q.max_deviation)
              << ", relative " << sci(q.relative) << " " << verdict(pass) << "\n";
  }
  return ok;
}

int finish_run(const SimulationResult& res, const std::vector<std::string>& header, const Run& r, bool with_state) {
  if (!r.out.empty()) write_csv(r.out, header, res.trajectory, with_state);
  std::cout << "samples: " << res.trajectory.size() << "\n";
  if (!res.ok()) {
    std::cout << "abort at t = " << fmt17(res.trajectory.times.back()) << ": " << res.message << "\n";
    return kAbort;
  }
  bool ok = report_drift(res.trajectory, r.tol);
  std::cout << "result: " << verdict(ok) << "\n";
  return ok ? kPass : kFail;
}

std::vector<std::string> state_header(const Model& m) {
  std::vector<std::string> h = {"t"};
  for (const auto& n : m.file.base_coords) h.push_back(n);
  for (const auto& n : m.file.fiber_coords) h.push_back(n);
  return h;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Common& c, double threshold) {
  LoadOptions opt;
  opt.overrides = overrides_of(c);
  opt.force = true;
  opt.domain = domain_of(c);
  opt.threshold = threshold;
  Model m = load_model(c.model, opt);
  std::cout << "model: " << m.file.name << " (base dim " << m.algebroid->base_dim() << ", rank " << m.algebroid->rank()
            << ")\n";
  print_validation(m.validation);
  std::cout << "result: " << verdict(m.validated) << "\n";
  return m.validated ? kPass : kFail;
}

int cmd_show(const Common& c) {
  Model m = open_model(c, c.force);
  std::cout << to_json(print_model(m)).dump(2) << "\n";
  return kPass;
}

int cmd_simulate(const Common& c, const Run& r, const std::string& lag, const std::vector<std::string>& monitor_args) {
  Model m = open_model(c, c.force);
  LagrangianSystem sys = m.system(lag);
  State s0 = initial_state(m, r);
  std::vector<Monitor> monitors;
  for (const auto& entry : monitor_args.empty() ? std::vector<std::string>{"energy"} : monitor_args) {
    if (entry == "energy")
      monitors.push_back(energy_monitor(sys));
    else if (entry.rfind("expr:", 0) == 0)
      monitors.push_back(expr_monitor(entry.substr(5), m.parse(entry.substr(5))));
    else
      throw UsageError("--monitor expects 'energy' or 'expr:<expression>', got '" + entry + "'");
  }
  SimulationResult res = simulate(sys, s0, r.t_end, r.dt, monitors);
  auto header = state_header(m);
  for (const auto& mon : monitors) header.push_back(mon.name);
  return finish_run(res, header, r, true);
}

int cmd_noether(const Common& c, const Run& r, const std::string& lag, const std::string& section,
                const std::string& h, const std::string& k, bool run) {
  Model m = open_model(c, c.force);
  LagrangianSystem sys = m.system(lag);
  SampleDomain d = domain_of(c);
  Section X = m.section(section);
  Expr hf = m.function(h);
  std::optional<Expr> K;
  if (!k.empty()) K = m.parse(k);
  NoetherResult res = noether_test(sys, X, hf, d, K);
  std::cout << "residual: " << sci(res.residual) << "\n";
  if (!res.success) {
    std::cout << "result: FAIL (d_{X^c} L differs from the lift of d h)\n";
    return kFail;
  }
  // same quantity with parameters kept as names
  Symbols sym = m.symbolic_parameters();
  const int mdim = m.algebroid->base_dim();
  Expr Ls = parse(m.lagrangian_text(lag), sym, {});
  Expr fs = -parse(m.function_text(h), sym, {});
  auto xs = m.section_text(section);
  for (std::size_t a = 0; a < xs.size(); ++a) fs = fs + parse(xs[a], sym, {}) * diff(Ls, mdim + static_cast<int>(a));
  if (K) fs = fs + parse(k, sym, {});
  std::cout << "f = " << to_string(tidy(fs)) << "\n";
  std::cout << "f (parameters substituted) = " << to_string(tidy(res.certificate->quantity)) << "\n";
  if (!run) {
    std::cout << "result: PASS\n";
    return kPass;
  }
  if (r.y0.empty()) throw UsageError("--simulate needs --y0");
  SimulationResult sim = simulate(sys, initial_state(m, r), r.t_end, r.dt, {expr_monitor("f", res.certificate->quantity)});
  auto header = state_header(m);
  header.push_back("f");
  return finish_run(sim, header, r, true);
}

int cmd_equivalence(const Common& c, const std::string& left, const std::string& right, const std::string& alpha,
                    const std::string& v) {
  Model m = open_model(c, c.force);
  LagrangianSystem l = m.system(left), r = m.system(right);
  SampleDomain d = domain_of(c);

  SampledVerdict geo = geometric_equiv(l, r, d);
  std::cout << "geometric: " << verdict(geo.passed) << " (residual " << sci(geo.residual) << ")\n";
  SampledVerdict dyn = dynamical_equiv(l, r, d);
  std::cout << "dynamical: " << verdict(dyn.passed) << " (residual " << sci(dyn.residual) << ")\n";

  std::optional<GaugeData> g;
  if (!alpha.empty() || !v.empty()) {
    if (alpha.empty() || v.empty()) throw UsageError("--alpha and --v go together");
    g = GaugeData{m.one_form(alpha), m.function(v)};
  } else {
    try {
      g = trivial_decompose(LagrangianSystem(m.algebroid, r.lagrangian() - l.lagrangian()), d);
      std::cout << "gauge data recovered from L' - L: alpha = (";
      for (std::size_t a = 0; a < g->alpha.components.size(); ++a)
        std::cout << (a ? ", " : "") << to_string(tidy(g->alpha.components[a]));
      std::cout << "), V = " << to_string(tidy(g->potential)) << "\n";
    } catch (const NotNullLagrangian& e) {
      std::cout << "gauge: FAIL (L' - L is not a null Lagrangian, omega residual " << sci(e.residual()) << ")\n";
    } catch (const DecompositionFailed& e) {
      std::cout << "gauge: FAIL (" << e.what() << ")\n";
    }
  }
  if (g) {
    GaugeCheck gc = is_gauge_pair(l, r, *g, d);
    std::cout << "gauge: " << verdict(gc.passed) << " (lagrangian residual " << sci(gc.lagrangian_residual)
              << ", d alpha " << sci(gc.alpha_residual) << ", d V " << sci(gc.potential_residual) << ")\n";
  }
  std::cout << "result: " << verdict(dyn.passed) << "\n";
  return dyn.passed ? kPass : kFail;
}

int cmd_nonnoether(const Common& c, const Run& r, const std::string& left, const std::string& right) {
  Model m = open_model(c, c.force);
  LagrangianSystem l = m.system(left), rs = m.system(right);
  SampleDomain d = domain_of(c);
  NonNoetherMonitors nm;
  try {
    nm = nonnoether_monitors(l, rs, d, c.force);
  } catch (const NotDynamicallyEquivalent& e) {
    std::cout << e.what() << "\nresult: FAIL\n";
    return kFail;
  }
  std::cout << "dynamical equivalence: " << verdict(nm.equivalence_verified) << " (residual "
            << sci(nm.equivalence_residual) << ")\n";
  SimulationResult res = simulate(l, initial_state(m, r), r.t_end, r.dt, nm.monitors);
  std::vector<std::string> header = {"t"};
  for (const auto& mon : nm.monitors) header.push_back(mon.name);
  return finish_run(res, header, r, false);
}

int cmd_family(const Common& c, const std::string& lag, const std::string& section, const std::vector<double>& ts,
               double flow_dt, int points) {
  Model m = open_model(c, c.force);
  LagrangianSystem sys = m.system(lag);
  FamilyReport rep;
  try {
    rep = gauge_family(sys, m.section(section), ts, flow_dt, domain_of(c), points);
  } catch (const HypothesisViolated& e) {
    std::cout << e.what() << "\nresult: FAIL\n";
    return kFail;
  }
  std::cout << "t, fiber residual, closedness residual, verdict\n";
  for (const auto& e : rep.entries)
    std::cout << fmt17(e.t) << ", " << sci(e.fiber_residual) << ", " << sci(e.closedness_residual) << ", " << verdict(e.passed)
              << "\n";
  std::cout << "result: " << verdict(rep.passed()) << "\n";
  return rep.passed() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian mechanics on Lie algebroids"};
  app.require_subcommand(1);

  Common common;
  Run run;
  std::string lag = "L", left, right, section, h = "0", k, alpha, v;
  std::vector<std::string> monitor_args;
  std::vector<double> times;
  double threshold = kValidationThreshold, flow_dt = 1e-3;
  int points = 8;
  bool noether_run = false;

  auto* validate = app.add_subcommand("validate", "check antisymmetry, anchor morphism and Jacobi");
  add_common(validate, common);
  validate->add_option("--threshold", threshold, "residual threshold");

  auto* show = app.add_subcommand("show", "print the model in canonical form");
  add_common(show, common);

  auto* list = app.add_subcommand("list", "list catalog models");

  auto* sim = app.add_subcommand("simulate", "integrate the Euler-Lagrange field");
  add_common(sim, common);
  add_run(sim, run, true);
  sim->add_option("--lagrangian", lag, "Lagrangian name or expression");
  sim->add_option("--monitor", monitor_args, "energy | expr:<expression> (repeatable)");

  auto* noether = app.add_subcommand("noether", "test a symmetry and print its conserved quantity");
  noether->set_help_flag("--help", "print help");  // -h would shadow --h
  add_common(noether, common);
  add_run(noether, run, false);
  noether->add_option("--lagrangian", lag, "Lagrangian name or expression");
  noether->add_option("--section", section, "section name or comma-separated components")->required();
  noether->add_option("--h", h, "function on the base");
  noether->add_option("--k", k, "constant added to the conserved quantity");
  noether->add_flag("--simulate", noether_run, "also simulate and report drift of f");

  auto* equiv = app.add_subcommand("equivalence", "compare two Lagrangians");
  add_common(equiv, common);
  equiv->add_option("--left", left, "first Lagrangian")->required();
  equiv->add_option("--right", right, "second Lagrangian")->required();
  equiv->add_option("--alpha", alpha, "gauge 1-form, name or components");
  equiv->add_option("--v", v, "gauge function on the base");

  auto* nonnoether = app.add_subcommand("nonnoether", "monitor char. polynomial invariants of an equivalent pair");
  add_common(nonnoether, common);
  add_run(nonnoether, run, true);
  nonnoether->add_option("--left", left, "first Lagrangian")->required();
  nonnoether->add_option("--right", right, "second Lagrangian")->required();

  auto* family = app.add_subcommand("family", "check the gauge family along the flow of a complete lift");
  add_common(family, common);
  family->add_option("--lagrangian", lag, "Lagrangian name or expression");
  family->add_option("--section", section, "section name or comma-separated components")->required();
  family->add_option("--times", times, "comma-separated times")->delimiter(',')->required();
  family->add_option("--flow-dt", flow_dt, "RK4 step of the flow")->check(CLI::PositiveNumber);
  family->add_option("--points", points, "sample points per time")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*validate) return cmd_validate(common, threshold);
    if (*show) return cmd_show(common);
    if (*list) {
      for (const auto& n : catalog_names()) std::cout << n << "\n";
      return kPass;
    }
    if (*sim) return cmd_simulate(common, run, lag, monitor_args);
    if (*noether) return cmd_noether(common, run, lag, section, h, k, noether_run);
    if (*equiv) return cmd_equivalence(common, left, right, alpha, v);
    if (*nonnoether) return cmd_nonnoether(common, run, left, right);
    if (*family) return cmd_family(common, lag, section, times, flow_dt, points);
  } catch (const ValidationFailed& e) {
    std::cout << "model failed validation (use --force to continue):\n";
    print_validation(e.report());
    return kFail;
  } catch (const SingularHessian& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAbort;
  } catch (const UndecidableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAbort;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAbort;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "lagroid/conserved.hpp"
#include "lagroid/integrate.hpp"
#include "lagroid/model.hpp"
#include "support.hpp"

using namespace lagroid;
using testing_support::Rng;

namespace {

const SampleDomain kDomain{};

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double residual(const std::vector<Expr>& v, const LieAlgebroid& A) { return max_abs_sampled(v, kDomain, A.variable_count()); }

Model rigid_body(double i2, double i3) {
  LoadOptions opt;
  opt.overrides = {{"I2", i2}, {"I3", i3}};
  return load_model("rigid-body", opt);
}

Outcome rigid_body_regression() {
  Outcome out;
  auto start = std::chrono::steady_clock::now();
  Model m = load_model("rigid-body");
  const auto& A = *m.algebroid;
  const double I1 = 3, I2 = 2, I3 = 2;
  LagrangianSystem sys = m.system("L");

  // A is constant and diagonal, so the field is y'_a = R_a / A_aa
  const Expr euler[] = {Expr((I2 - I3) / I1) * A.y(1) * A.y(2), Expr((I3 - I1) / I2) * A.y(0) * A.y(2),
                        Expr((I1 - I2) / I3) * A.y(0) * A.y(1)};
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b)
      if (a != b) worst = std::max(worst, max_abs_sampled(std::vector<Expr>{sys.hessian(a, b)}, kDomain, 3));
    worst = std::max(worst, equal_sampled(sys.forces()[static_cast<std::size_t>(a)] / sys.hessian(a, a), euler[a], kDomain).residual);
  }
  ELField Z(sys);
  Rng rng(101);
  for (int n = 0; n < 32; ++n) {
    State s = testing_support::random_state(rng, A, -2, 2);
    Velocity v = Z(s);
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(v.ydot[static_cast<std::size_t>(a)] - euler[a].eval(point_of(s))));
  }
  out.require(worst <= 1e-9, "field residual " + sci(worst));

  SimulationResult r = simulate(sys, State{{}, {1.0, 0.5, -0.7}}, 10.0, 1e-3,
                                {expr_monitor("I1*y1", m.lagrangian("I1*y1")), energy_monitor(sys)});
  out.require(r.ok(), "simulation aborted");
  DriftReport d = drift(r.trajectory);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(d.get("I1*y1").relative <= 1e-8, "momentum drift " + sci(d.get("I1*y1").relative));
  out.require(d.get("energy").relative <= 1e-8, "energy drift " + sci(d.get("energy").relative));
  out.require(seconds < 5.0, "runtime " + sci(seconds) + " s");
  if (out.passed)
    out.detail = "field residual " + sci(worst) + ", drift I1*y1 " + sci(d.get("I1*y1").relative) + ", drift E " +
                 sci(d.get("energy").relative) + ", " + sci(seconds) + " s";
  return out;
}

Outcome noether_dichotomy() {
  Outcome out;
  Model sym = rigid_body(2, 2), asym = rigid_body(2, 2.5);
  NoetherResult a = noether_test(sym.system("L"), sym.section("xi1"), Expr(0.0), kDomain);
  NoetherResult b = noether_test(asym.system("L"), asym.section("xi1"), Expr(0.0), kDomain);
  out.require(a.success && a.residual <= 1e-10, "symmetric residual " + sci(a.residual));
  out.require(!b.success && b.residual >= 0.05, "asymmetric residual " + sci(b.residual));
  if (out.passed) out.detail = "residual " + sci(a.residual) + " with I2 = I3, " + sci(b.residual) + " with I3 = 2.5";
  return out;
}

Outcome algebroid_validation() {
  Outcome out;
  for (const char* name : {"rigid-body", "tangent-r1", "tangent-r2"}) {
    LoadOptions opt;
    opt.force = true;
    Model m = load_model(name, opt);
    for (const auto& c : m.validation.checks)
      out.require(c.residual <= 1e-10, std::string(name) + " " + c.name + " " + sci(c.residual));
  }
  // so(3) with C^3_12 raised by 0.1 and nothing else touched
  std::vector<double> c(27, 0.0);
  auto at = [](int a, int b, int g) { return static_cast<std::size_t>((a * 3 + b) * 3 + g); };
  for (auto [a, b, g] : {std::tuple{0, 1, 2}, std::tuple{1, 2, 0}, std::tuple{2, 0, 1}}) {
    c[at(a, b, g)] = 1.0;
    c[at(b, a, g)] = -1.0;
  }
  c[at(0, 1, 2)] += 0.1;
  ValidationReport perturbed = validate(lie_algebra(3, c), kDomain);
  out.require(!perturbed.get("jacobi").passed && perturbed.get("jacobi").residual >= 0.05,
              "perturbed jacobi " + sci(perturbed.get("jacobi").residual));
  LoadOptions opt;
  opt.force = true;
  Model broken = load_model("rigid-body-broken", opt);
  out.require(broken.validation.get("jacobi").residual >= 0.05, "catalog perturbed model");
  if (out.passed) out.detail = "perturbed jacobi residual " + sci(perturbed.get("jacobi").residual);
  return out;
}

Outcome calculus_identities() {
  Outcome out;
  Rng rng(104);
  double dd = 0.0, lifts = 0.0;
  for (const auto& model : testing_support::valid_catalog()) {
    const auto& A = *model.algebroid;
    for (int n = 0; n < 20; ++n) {
      Expr f = testing_support::random_polynomial(rng, testing_support::base_vars(A), 3);
      dd = std::max(dd, residual(d_on_oneform(A, d_on_function(A, f)).entries, A));
    }
    const ProlongedSection D = euler_section(A);
    for (int n = 0; n < 10; ++n) {
      Section X = testing_support::random_section(rng, A), Y = testing_support::random_section(rng, A);
      Section XY = bracket(A, X, Y);
      ProlongedSection Xc = complete_lift(A, X), Yc = complete_lift(A, Y), Xv = vertical_lift(A, X), Yv = vertical_lift(A, Y);
      ProlongedSection minus_Xv{Xv.base, {}};
      for (const auto& v : Xv.fiber) minus_Xv.fiber.push_back(-v);
      for (const ProlongedSection& r :
           {prolonged_bracket(A, Xc, Yc) - complete_lift(A, XY), prolonged_bracket(A, Xc, Yv) - vertical_lift(A, XY),
            prolonged_bracket(A, Xv, Yv), prolonged_bracket(A, D, Xv) - minus_Xv, prolonged_bracket(A, D, Xc)})
        lifts = std::max(lifts, residual(components(r), A));
    }
  }
  out.require(dd <= 1e-9, "d^2 residual " + sci(dd));
  out.require(lifts <= 1e-8, "lift residual " + sci(lifts));
  if (out.passed) out.detail = "d^2 residual " + sci(dd) + ", lift residual " + sci(lifts);
  return out;
}

Outcome null_lagrangians() {
  Outcome out;
  Rng rng(105);
  auto models = testing_support::valid_catalog();
  double omega = 0.0, recovered = 0.0;
  for (int n = 0; n < 10; ++n) {
    const Model& m = models[static_cast<std::size_t>(n) % models.size()];
    const auto& A = *m.algebroid;
    Expr f = testing_support::random_polynomial(rng, testing_support::base_vars(A), 3);
    Expr V = testing_support::random_polynomial(rng, testing_support::base_vars(A), 3);
    OneFormOnM alpha = d_on_function(A, f);
    LagrangianSystem l0(m.algebroid, hat(A, alpha) + V);
    omega = std::max(omega, residual(l0.omega().all(), A));
    try {
      GaugeData g = trivial_decompose(l0, kDomain);
      for (int a = 0; a < A.rank(); ++a)
        recovered = std::max(recovered, residual({g.alpha.components[static_cast<std::size_t>(a)] -
                                                  alpha.components[static_cast<std::size_t>(a)]},
                                                 A));
      recovered = std::max(recovered, residual({g.potential - V}, A));
    } catch (const Error& e) {
      out.require(false, m.file.name + ": " + e.what());
    }
  }
  out.require(omega <= 1e-9, "omega residual " + sci(omega));
  out.require(recovered <= 1e-9, "recovery residual " + sci(recovered));
  if (out.passed) out.detail = "omega residual " + sci(omega) + ", recovery residual " + sci(recovered);
  return out;
}

Outcome gauge_consistency() {
  Outcome out;
  Rng rng(106);
  auto models = testing_support::valid_catalog();
  int agreed = 0;
  for (int n = 0; n < 20; ++n) {
    const Model& m = models[static_cast<std::size_t>(n) % models.size()];
    const auto& A = *m.algebroid;
    LagrangianSystem l = m.system("L");
    GaugeData g{d_on_function(A, testing_support::random_polynomial(rng, testing_support::base_vars(A), 3)),
                Expr(rng.uniform(-5, 5))};
    LagrangianSystem r(m.algebroid, l.lagrangian() + hat(A, g.alpha) + g.potential);
    bool ok = is_gauge_pair(l, r, g, kDomain).passed && geometric_equiv(l, r, kDomain).passed &&
              dynamical_equiv(l, r, kDomain).passed;
    out.require(ok, m.file.name + " pair " + std::to_string(n));
    agreed += ok;
  }
  Model t = load_model("tangent-r1");
  const auto& A = *t.algebroid;
  LagrangianSystem l = t.system("free");
  GaugeData g{{{A.x(0)}}, A.parse("x1^2")};
  LagrangianSystem r(t.algebroid, l.lagrangian() + hat(A, g.alpha) + g.potential);
  out.require(geometric_equiv(l, r, kDomain).passed, "negative pair is not geometrically equivalent");
  out.require(!is_gauge_pair(l, r, g, kDomain).passed, "negative pair accepted as gauge");
  out.require(!dynamical_equiv(l, r, kDomain).passed, "negative pair dynamically equivalent");
  if (out.passed) out.detail = std::to_string(agreed) + "/20 gauge pairs equivalent, d V != 0 pair rejected";
  return out;
}

Outcome dynamical_consistency() {
  Outcome out;
  Rng rng(107);
  double worst = 0.0;
  int systems = 0;
  for (const auto& model : testing_support::valid_catalog()) {
    const auto& A = *model.algebroid;
    const int p = A.rank(), m = A.base_dim();
    for (const auto& [name, L] : model.lagrangians) {
      LagrangianSystem sys(model.algebroid, L);
      ELField Z(sys);
      std::vector<Expr> dE_dx, dE_dy;
      for (int i = 0; i < m; ++i) dE_dx.push_back(diff(sys.energy(), A.x_slot(i)));
      for (int a = 0; a < p; ++a) dE_dy.push_back(diff(sys.energy(), A.y_slot(a)));
      int checked = 0;
      for (int attempt = 0; attempt < 1000 && checked < 50; ++attempt) {
        State s = testing_support::random_state(rng, A, -2.0, 2.0);
        if (!regularity(sys, s).regular) continue;
        ++checked;
        auto pt = point_of(s);
        Velocity v = Z(s);
        for (int b = 0; b < p; ++b) {
          // i_Z omega on T_b and V_b against d E on the same basis elements
          double lhs_t = 0.0, lhs_v = 0.0, rhs_t = 0.0;
          for (int a = 0; a < p; ++a) {
            lhs_t += 2 * s.y[static_cast<std::size_t>(a)] * sys.omega().D(a, b).eval(pt) -
                     sys.omega().B(b, a).eval(pt) * v.ydot[static_cast<std::size_t>(a)];
            lhs_v += s.y[static_cast<std::size_t>(a)] * sys.omega().B(a, b).eval(pt);
          }
          for (int i = 0; i < m; ++i) rhs_t += A.anchor(b, i).eval(pt) * dE_dx[static_cast<std::size_t>(i)].eval(pt);
          worst = std::max({worst, std::abs(lhs_t - rhs_t), std::abs(lhs_v - dE_dy[static_cast<std::size_t>(b)].eval(pt))});
        }
      }
      if (checked == 0) continue;  // nowhere regular, not a dynamical system
      out.require(checked == 50, model.file.name + "/" + name + " has too few regular states");
      ++systems;
    }
  }
  out.require(worst <= 1e-8, "residual " + sci(worst));
  if (out.passed) out.detail = std::to_string(systems) + " systems x 50 states, residual " + sci(worst);
  return out;
}

Outcome non_noether() {
  Outcome out;
  Model m = load_model("harmonic-pair");
  LagrangianSystem l = m.system("L"), r = m.system("L2");
  out.require(dynamical_equiv(l, r, kDomain).passed, "pair not dynamically equivalent");
  NonNoetherMonitors nm = nonnoether_monitors(l, r, kDomain);
  Rng rng(108);
  double worst_drift = 0.0;
  for (int n = 0; n < 5; ++n) {
    SimulationResult sim = simulate(l, testing_support::random_state(rng, *m.algebroid), 10.0, 1e-3, nm.monitors);
    out.require(sim.ok(), "trajectory aborted");
    worst_drift = std::max(worst_drift, drift(sim.trajectory).worst_relative());
  }
  out.require(worst_drift <= 1e-7, "monitor drift " + sci(worst_drift));

  double worst_poly = 0.0;
  for (int n = 0; n < 1000; ++n) {
    int p = rng.integer(1, 3);
    Eigen::MatrixXd A = testing_support::random_spd(rng, p), Ap = testing_support::random_matrix(rng, p);
    CharPolyResult cp = char_poly(A, Ap);
    worst_poly = std::max(worst_poly, cp.expansion_residual);
    // f(lambda) = det(A' - lambda A) / det(A) by permutation expansion
    double detA = testing_support::leibniz_det(A);
    for (double lam : {-1.5, 0.0, 0.5, 2.0}) {
      double f = 0.0;
      for (double c : cp.coefficients) f = f * lam + c;
      double want = testing_support::leibniz_det(Ap - lam * A) / detA;
      worst_poly = std::max(worst_poly, std::abs(f - want) / std::max(1.0, std::abs(want)));
    }
  }
  out.require(worst_poly <= 1e-9, "char_poly residual " + sci(worst_poly));
  if (out.passed) out.detail = "monitor drift " + sci(worst_drift) + ", char_poly residual " + sci(worst_poly);
  return out;
}

Outcome family_check() {
  Outcome out;
  Model m = rigid_body(2, 2);
  FamilyReport rep = gauge_family(m.system("L"), m.section("xi1"), {0.25, 0.5, 1.0}, 1e-3, kDomain);
  double worst = 0.0;
  for (const auto& e : rep.entries) {
    out.require(e.passed, "t = " + sci(e.t) + " failed");
    worst = std::max({worst, e.fiber_residual, e.closedness_residual});
  }
  out.require(worst <= 1e-4, "family residual " + sci(worst));

  Rng rng(109);
  double back = 0.0;
  auto round_trip = [&](const LieAlgebroid& A, const ProlongedSection& Xc, const State& s, double t) {
    State r = flow_on_E(A, Xc, flow_on_E(A, Xc, s, t, 1e-3), -t, 1e-3);
    for (std::size_t i = 0; i < s.x.size(); ++i) back = std::max(back, std::abs(r.x[i] - s.x[i]));
    for (std::size_t a = 0; a < s.y.size(); ++a) back = std::max(back, std::abs(r.y[a] - s.y[a]));
  };
  ProlongedSection xi1 = complete_lift(*m.algebroid, m.section("xi1"));
  for (int n = 0; n < 5; ++n) {
    State s = testing_support::random_state(rng, *m.algebroid, -2.0, 2.0);
    for (double t : {0.25, 0.5, 1.0}) round_trip(*m.algebroid, xi1, s, t);
  }
  // random linear sections; short time keeps the quadratic-anchor model away from blow-up
  for (const auto& model : testing_support::valid_catalog()) {
    const auto& A = *model.algebroid;
    for (int n = 0; n < 3; ++n)
      round_trip(A, complete_lift(A, testing_support::random_section(rng, A, 1)),
                 testing_support::random_state(rng, A, -0.5, 0.5), 0.5);
  }
  out.require(back <= 1e-8, "reversibility " + sci(back));
  if (out.passed) out.detail = "family residual " + sci(worst) + ", reversibility " + sci(back);
  return out;
}

Outcome rk4_order() {
  Outcome out;
  LieAlgebroid A = tangent_bundle(1);
  LagrangianSystem sys(A, A.parse("(y1^2 - x1^2)/2"));
  auto error = [&](double h) {
    SimulationResult r = simulate(sys, State{{1.0}, {0.0}}, 1.0, h);
    return std::abs(r.trajectory.states.back().x[0] - std::cos(1.0));
  };
  double e1 = error(1e-2), e2 = error(5e-3), e3 = error(2.5e-3);
  double r1 = e1 / e2, r2 = e2 / e3;
  out.require(r1 >= 12 && r1 <= 20, "ratio " + sci(r1));
  out.require(r2 >= 12 && r2 <= 20, "ratio " + sci(r2));
  if (out.passed) out.detail = "ratios " + sci(r1) + ", " + sci(r2);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"rigid-body regression", rigid_body_regression},
      {"Noether dichotomy", noether_dichotomy},
      {"algebroid validation", algebroid_validation},
      {"calculus identities", calculus_identities},
      {"null Lagrangians", null_lagrangians},
      {"gauge equivalence consistency", gauge_consistency},
      {"dynamical consistency", dynamical_consistency},
      {"non-Noether quantities", non_noether},
      {"gauge family", family_check},
      {"RK4 order", rk4_order},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %zu %s: %s\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  return failed == 0 ? 0 : 1;
}

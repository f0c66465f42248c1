// Fixed-step RK4 flows on E and conserved-quantity monitoring.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lagroid/dynamics.hpp"

namespace lagroid {

struct Monitor {
  std::string name;
  std::function<double(const State&)> eval;
};

inline Monitor expr_monitor(std::string name, Expr e) {
  return {std::move(name), [e = std::move(e)](const State& s) { return e.eval(point_of(s)); }};
}

inline Monitor energy_monitor(const LagrangianSystem& sys) { return expr_monitor("energy", sys.energy()); }

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<std::string> monitor_names;
  std::vector<std::vector<double>> monitors;  // monitors[k][n]: monitor k at sample n

  std::size_t size() const { return times.size(); }
  const std::vector<double>& monitor(const std::string& name) const {
    for (std::size_t k = 0; k < monitor_names.size(); ++k)
      if (monitor_names[k] == name) return monitors[k];
    throw Error("no monitor named " + name);
  }
};

enum class AbortReason { none, singular_hessian, non_finite, monitor_domain };

struct SimulationResult {
  Trajectory trajectory;
  AbortReason abort = AbortReason::none;
  std::string message;
  bool ok() const { return abort == AbortReason::none; }
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

}  // namespace detail

/// One classic RK4 step for the autonomous system z' = f(z).
template <class Field>
std::vector<double> rk4_step(const Field& f, const std::vector<double>& z, double h) {
  const std::size_t n = z.size();
  auto axpy = [n](const std::vector<double>& a, double s, const std::vector<double>& b) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  std::vector<double> k1 = f(z);
  std::vector<double> k2 = f(axpy(z, h / 2, k1));
  std::vector<double> k3 = f(axpy(z, h / 2, k2));
  std::vector<double> k4 = f(axpy(z, h, k3));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

/// Number of steps of size at most |h| covering |t|; the step is shrunk to
/// land exactly on t.
inline long step_count(double t, double h) {
  if (!(h > 0.0)) throw Error("step size must be positive");
  if (t == 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(std::abs(t) / h - 1e-9)));
}

/// Integrates Z_L from s0 up to t_end with fixed step h. A step that reaches
/// a singular Hessian or a non-finite state stops the run; the trajectory up
/// to the last accepted state is kept.
inline SimulationResult simulate(const LagrangianSystem& sys, const State& s0, double t_end, double h,
                                 const std::vector<Monitor>& monitors = {}) {
  if (!(h > 0.0)) throw Error("step size must be positive");
  if (!(t_end >= 0.0)) throw Error("t_end must be non-negative");
  const auto& A = sys.algebroid();
  const int m = A.base_dim();
  if (s0.x.size() != static_cast<std::size_t>(m) || s0.y.size() != static_cast<std::size_t>(A.rank()))
    throw ShapeError("initial state does not match the algebroid dimensions");

  ELField field(sys);
  auto f = [&](const std::vector<double>& z) {
    Velocity v = field(std::span<const double>(z));
    std::vector<double> dz = std::move(v.xdot);
    dz.insert(dz.end(), v.ydot.begin(), v.ydot.end());
    if (!detail::all_finite(dz)) throw DomainError("non-finite velocity");
    return dz;
  };

  SimulationResult res;
  Trajectory& tr = res.trajectory;
  for (const auto& mon : monitors) tr.monitor_names.push_back(mon.name);
  tr.monitors.resize(monitors.size());

  auto record = [&](double t, const std::vector<double>& z) {
    State s = state_of(z, m);
    std::vector<double> values;
    for (const auto& mon : monitors) values.push_back(mon.eval(s));
    tr.times.push_back(t);
    tr.states.push_back(std::move(s));
    for (std::size_t k = 0; k < values.size(); ++k) tr.monitors[k].push_back(values[k]);
  };

  std::vector<double> z = point_of(s0);
  try {
    record(0.0, z);
  } catch (const DomainError& e) {
    res.abort = AbortReason::monitor_domain;
    res.message = e.what();
    return res;
  }
  const long n = step_count(t_end, h);
  const double step = n > 0 ? t_end / static_cast<double>(n) : 0.0;
  for (long k = 1; k <= n; ++k) {
    try {
      std::vector<double> next = rk4_step(f, z, step);
      if (!detail::all_finite(next)) throw DomainError("non-finite state");
      // the landing state must itself be regular
      field(std::span<const double>(next));
      double t = (k == n) ? t_end : step * static_cast<double>(k);
      record(t, next);
      z = std::move(next);
    } catch (const SingularHessian& e) {
      res.abort = AbortReason::singular_hessian;
      res.message = e.what();
      break;
    } catch (const DomainError& e) {
      res.abort = AbortReason::non_finite;
      res.message = e.what();
      break;
    }
  }
  return res;
}

/// Compiled anchored vector field rho^{LE}(P) on E.
class AnchoredField {
 public:
  AnchoredField(const LieAlgebroid& A, const ProlongedSection& P)
      : xdot_(anchored_base_field(A, P)), ydot_(P.fiber) {}

  std::vector<double> operator()(const std::vector<double>& z) const {
    std::vector<double> dz;
    dz.reserve(xdot_.size() + ydot_.size());
    for (const auto& e : xdot_) dz.push_back(e.eval(z));
    for (const auto& e : ydot_) dz.push_back(e.eval(z));
    return dz;
  }

 private:
  std::vector<Expr> xdot_, ydot_;
};

/// Time-t flow of the anchored field of P, by RK4 with steps of at most h.
inline State flow_on_E(const LieAlgebroid& A, const ProlongedSection& P, const State& s, double t, double h) {
  AnchoredField f(A, P);
  std::vector<double> z = point_of(s);
  const long n = step_count(t, h);
  for (long k = 0; k < n; ++k) {
    z = rk4_step(f, z, t / static_cast<double>(n));
    if (!detail::all_finite(z)) throw DomainError("flow left the finite domain");
  }
  return state_of(z, A.base_dim());
}

struct Drift {
  std::string name;
  double initial = 0.0;
  double max_deviation = 0.0;
  double relative = 0.0;  // max_deviation / max(1, |initial|)
};

struct DriftReport {
  std::vector<Drift> quantities;

  const Drift& get(const std::string& name) const {
    for (const auto& q : quantities)
      if (q.name == name) return q;
    throw Error("no drift entry named " + name);
  }
  double worst_relative() const {
    double w = 0.0;
    for (const auto& q : quantities) w = std::max(w, q.relative);
    return w;
  }
};

inline DriftReport drift(const Trajectory& tr) {
  if (tr.size() < 2) throw Error("drift needs at least two samples");
  DriftReport rep;
  for (std::size_t k = 0; k < tr.monitors.size(); ++k) {
    const auto& v = tr.monitors[k];
    Drift d{tr.monitor_names[k], v.front(), 0.0, 0.0};
    for (double x : v) d.max_deviation = std::max(d.max_deviation, std::abs(x - d.initial));
    d.relative = d.max_deviation / std::max(1.0, std::abs(d.initial));
    rep.quantities.push_back(d);
  }
  return rep;
}

}  // namespace lagroid

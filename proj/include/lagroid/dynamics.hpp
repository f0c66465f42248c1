// Lagrangian machinery on a Lie algebroid: Poincare forms, energy, and the
// Euler-Lagrange section Z_L.
#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lagroid/algebroid.hpp"

namespace lagroid {

struct State {
  std::vector<double> x;
  std::vector<double> y;
};

/// Flattens a state into the evaluation layout (x first, then y).
inline std::vector<double> point_of(const State& s) {
  std::vector<double> pt = s.x;
  pt.insert(pt.end(), s.y.begin(), s.y.end());
  return pt;
}

inline State state_of(std::span<const double> pt, int m) {
  return {std::vector<double>(pt.begin(), pt.begin() + m), std::vector<double>(pt.begin() + m, pt.end())};
}

/// Coefficients of omega_L = B_{ab} T^a ^ V^b + D_{ab} T^a ^ T^b with D stored
/// as its antisymmetric representative.
struct OmegaCoefficients {
  int rank = 0;
  std::vector<Expr> b;
  std::vector<Expr> d;

  const Expr& B(int i, int j) const { return b[static_cast<std::size_t>(i * rank + j)]; }
  const Expr& D(int i, int j) const { return d[static_cast<std::size_t>(i * rank + j)]; }

  std::vector<Expr> all() const {
    std::vector<Expr> v = b;
    v.insert(v.end(), d.begin(), d.end());
    return v;
  }
};

class SingularHessian : public Error {
 public:
  explicit SingularHessian(double condition)
      : Error("Hessian d2L/dy2 is singular (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

inline constexpr double kConditionLimit = 1e12;

/// 2-norm condition number; infinite for singular matrices.
inline double condition_number(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  double hi = s(0), lo = s(s.size() - 1);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

class LagrangianSystem {
 public:
  LagrangianSystem(LieAlgebroid algebroid, Expr lagrangian)
      : A_(std::make_shared<const LieAlgebroid>(std::move(algebroid))), L_(std::move(lagrangian)) {
    build();
  }
  LagrangianSystem(std::shared_ptr<const LieAlgebroid> algebroid, Expr lagrangian)
      : A_(std::move(algebroid)), L_(std::move(lagrangian)) {
    build();
  }

  const LieAlgebroid& algebroid() const { return *A_; }
  const std::shared_ptr<const LieAlgebroid>& algebroid_ptr() const { return A_; }
  const Expr& lagrangian() const { return L_; }

  /// theta_a = dL/dy^a
  const std::vector<Expr>& momenta() const { return theta_; }
  const Expr& hessian(int a, int b) const { return hess_[static_cast<std::size_t>(a * p() + b)]; }
  const std::vector<Expr>& hessian_entries() const { return hess_; }
  /// d2L/dx^i dy^a
  const Expr& mixed(int i, int a) const { return mixed_[static_cast<std::size_t>(i * p() + a)]; }
  const Expr& energy() const { return energy_; }
  const OmegaCoefficients& omega() const { return omega_; }
  /// Right-hand side R_a of A_{ab} dy^b/dt = R_a.
  const std::vector<Expr>& forces() const { return forces_; }

  /// Numeric Hessian at a state.
  Eigen::MatrixXd hessian_at(const State& s) const { return hessian_at(point_of(s)); }
  Eigen::MatrixXd hessian_at(std::span<const double> pt) const {
    Eigen::MatrixXd h(p(), p());
    for (int a = 0; a < p(); ++a)
      for (int b = 0; b < p(); ++b) h(a, b) = hessian(a, b).eval(pt);
    return h;
  }

 private:
  int p() const { return A_->rank(); }

  void build() {
    const auto& A = *A_;
    const int p = A.rank(), m = A.base_dim();
    for (const auto s : free_slots(L_))
      if (s >= A.variable_count()) throw ShapeError("Lagrangian uses an undeclared variable slot");
    for (int a = 0; a < p; ++a) theta_.push_back(diff(L_, A.y_slot(a)));
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) hess_.push_back(diff(theta_[static_cast<std::size_t>(a)], A.y_slot(b)));
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < p; ++a) mixed_.push_back(diff(theta_[static_cast<std::size_t>(a)], A.x_slot(i)));

    energy_ = -L_;
    for (int a = 0; a < p; ++a) energy_ = energy_ + A.y(a) * theta_[static_cast<std::size_t>(a)];

    omega_.rank = p;
    omega_.b = hess_;
    omega_.d.assign(static_cast<std::size_t>(p * p), Expr());
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) {
        Expr e;
        for (int g = 0; g < p; ++g) e = e + theta_[static_cast<std::size_t>(g)] * A.structure(a, b, g);
        for (int i = 0; i < m; ++i)
          e = e - A.anchor(a, i) * mixed(i, b) + A.anchor(b, i) * mixed(i, a);
        e = Expr(0.5) * e;
        omega_.d[static_cast<std::size_t>(a * p + b)] = e;
        omega_.d[static_cast<std::size_t>(b * p + a)] = -e;
      }

    // R_a = rho^i_a dL/dx^i - C^g_{ab} y^b theta_g - (d2L/dx^i dy^a) rho^i_b y^b
    for (int a = 0; a < p; ++a) {
      Expr r;
      for (int i = 0; i < m; ++i) r = r + A.anchor(a, i) * diff(L_, A.x_slot(i));
      for (int b = 0; b < p; ++b)
        for (int g = 0; g < p; ++g) r = r - A.structure(a, b, g) * A.y(b) * theta_[static_cast<std::size_t>(g)];
      for (int i = 0; i < m; ++i) {
        Expr xdot_i;
        for (int b = 0; b < p; ++b) xdot_i = xdot_i + A.anchor(b, i) * A.y(b);
        r = r - mixed(i, a) * xdot_i;
      }
      forces_.push_back(r);
    }
  }

  std::shared_ptr<const LieAlgebroid> A_;
  Expr L_;
  std::vector<Expr> theta_, hess_, mixed_;
  Expr energy_;
  OmegaCoefficients omega_;
  std::vector<Expr> forces_;
};

inline const std::vector<Expr>& poincare_one_form(const LagrangianSystem& sys) { return sys.momenta(); }
inline const OmegaCoefficients& omega(const LagrangianSystem& sys) { return sys.omega(); }
inline const Expr& energy(const LagrangianSystem& sys) { return sys.energy(); }

struct Regularity {
  double condition = 0.0;
  bool regular = false;
};

inline Regularity regularity(const LagrangianSystem& sys, const State& s) {
  double c = condition_number(sys.hessian_at(s));
  return {c, c < kConditionLimit};
}

struct Velocity {
  std::vector<double> xdot;
  std::vector<double> ydot;
};

/// Numeric value of a prolonged section at one point.
struct ProlongedValue {
  std::vector<double> base;
  std::vector<double> fiber;
};

inline ProlongedValue vertical_endomorphism(const ProlongedValue& v) {
  return {std::vector<double>(v.base.size(), 0.0), v.base};
}

/// Stateless evaluator of the Euler-Lagrange vector field on E.
class ELField {
 public:
  explicit ELField(const LagrangianSystem& sys) : sys_(&sys) {}

  Velocity operator()(const State& s) const { return (*this)(std::span<const double>(point_of(s))); }

  Velocity operator()(std::span<const double> pt) const {
    const auto& A = sys_->algebroid();
    const int m = A.base_dim(), p = A.rank();
    Velocity v;
    v.xdot.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < p; ++a) v.xdot[static_cast<std::size_t>(i)] += A.anchor(a, i).eval(pt) * pt[static_cast<std::size_t>(m + a)];

    Eigen::MatrixXd h = sys_->hessian_at(pt);
    Eigen::VectorXd r(p);
    for (int a = 0; a < p; ++a) r(a) = sys_->forces()[static_cast<std::size_t>(a)].eval(pt);
    double cond = condition_number(h);
    if (!(cond < kConditionLimit)) throw SingularHessian(cond);
    Eigen::VectorXd ydot = h.partialPivLu().solve(r);
    v.ydot.assign(ydot.data(), ydot.data() + p);
    return v;
  }

  /// Z_L at a state as a prolonged value: base part y, fiber part dy/dt.
  ProlongedValue section(const State& s) const {
    Velocity v = (*this)(s);
    return {s.y, v.ydot};
  }

 private:
  const LagrangianSystem* sys_;
};

inline ELField el_field(const LagrangianSystem& sys) { return ELField(sys); }

}  // namespace lagroid

// Equivalence of Lagrangians, Noether symmetries, gauge families generated by
// complete lifts, and non-Noether invariants from dynamically equivalent pairs.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lagroid/integrate.hpp"

namespace lagroid {

class AlgebroidMismatch : public Error {
 public:
  using Error::Error;
};

class NotNullLagrangian : public Error {
 public:
  explicit NotNullLagrangian(double residual)
      : Error("not a null Lagrangian (omega residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DecompositionFailed : public Error {
 public:
  using Error::Error;
};

class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

class NotDynamicallyEquivalent : public Error {
 public:
  using Error::Error;
};

inline bool same_algebroid(const LieAlgebroid& a, const LieAlgebroid& b) {
  if (&a == &b) return true;
  if (a.base_dim() != b.base_dim() || a.rank() != b.rank()) return false;
  if (a.symbols().names() != b.symbols().names()) return false;
  for (std::size_t k = 0; k < a.structure_entries().size(); ++k)
    if (!same(a.structure_entries()[k], b.structure_entries()[k])) return false;
  for (std::size_t k = 0; k < a.anchor_entries().size(); ++k)
    if (!same(a.anchor_entries()[k], b.anchor_entries()[k])) return false;
  return true;
}

namespace detail {

inline void require_same_algebroid(const LagrangianSystem& l, const LagrangianSystem& r) {
  if (!same_algebroid(l.algebroid(), r.algebroid()))
    throw AlgebroidMismatch("Lagrangians live on different algebroids");
}

// Pairwise sampled equality of two expression lists with the domain's
// absolute and relative tolerances.
inline SampledVerdict all_equal_sampled(const std::vector<Expr>& a, const std::vector<Expr>& b,
                                        const SampleDomain& d, int nvars) {
  SampledVerdict v;
  for_each_sample(d, nvars, [&](std::span<const double> pt) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      double va = a[k].eval(pt), vb = b[k].eval(pt);
      double r = std::abs(va - vb);
      v.residual = std::max(v.residual, r);
      if (r > d.atol + d.rtol * std::max(std::abs(va), std::abs(vb))) v.passed = false;
    }
  });
  return v;
}

inline Expr drop_fiber(const LieAlgebroid& A, Expr e) {
  for (int a = 0; a < A.rank(); ++a) e = substitute(e, A.y_slot(a), Expr(0.0));
  return e;
}

}  // namespace detail

/// omega_L == omega_L' coefficientwise.
inline SampledVerdict geometric_equiv(const LagrangianSystem& l, const LagrangianSystem& r, const SampleDomain& d) {
  detail::require_same_algebroid(l, r);
  return detail::all_equal_sampled(l.omega().all(), r.omega().all(), d, l.algebroid().variable_count());
}

inline constexpr double kDynamicalTolerance = 1e-8;

/// Draws `count` states from the domain at which every listed system is
/// regular. A singular draw is redrawn at most three times.
inline std::vector<State> sample_regular_states(const std::vector<const LagrangianSystem*>& systems,
                                                const SampleDomain& d, int count) {
  const auto& A = systems.front()->algebroid();
  Sampler sampler(d, A.variable_count());
  std::vector<State> states;
  for (int n = 0; n < count; ++n) {
    for (int attempt = 0;; ++attempt) {
      std::vector<double> pt = sampler.next();
      State s = state_of(pt, A.base_dim());
      bool ok = true;
      try {
        for (const auto* sys : systems) ok = ok && regularity(*sys, s).regular;
      } catch (const DomainError&) {
        ok = false;
      }
      if (ok) {
        states.push_back(std::move(s));
        break;
      }
      if (attempt >= kMaxResamples) throw SingularHessian(std::numeric_limits<double>::infinity());
    }
  }
  return states;
}

/// Z_L == Z_L' at each given state, within kDynamicalTolerance.
inline SampledVerdict dynamical_equiv(const LagrangianSystem& l, const LagrangianSystem& r,
                                      const std::vector<State>& states, double tol = kDynamicalTolerance) {
  detail::require_same_algebroid(l, r);
  ELField fl(l), fr(r);
  SampledVerdict v;
  for (const auto& s : states) {
    Velocity a = fl(s), b = fr(s);
    auto cmp = [&](const std::vector<double>& u, const std::vector<double>& w) {
      for (std::size_t k = 0; k < u.size(); ++k) {
        double res = std::abs(u[k] - w[k]);
        v.residual = std::max(v.residual, res);
        if (res > tol * std::max({1.0, std::abs(u[k]), std::abs(w[k])})) v.passed = false;
      }
    };
    cmp(a.xdot, b.xdot);
    cmp(a.ydot, b.ydot);
  }
  return v;
}

inline SampledVerdict dynamical_equiv(const LagrangianSystem& l, const LagrangianSystem& r, const SampleDomain& d,
                                      double tol = kDynamicalTolerance) {
  return dynamical_equiv(l, r, sample_regular_states({&l, &r}, d, d.samples), tol);
}

// ---------------------------------------------------------------------------
// Gauge equivalence.

struct GaugeData {
  OneFormOnM alpha;
  Expr potential;  // V, a function on M
};

struct GaugeCheck {
  bool passed = false;
  double lagrangian_residual = 0.0;  // L' - L - hat(alpha) - V
  double alpha_residual = 0.0;       // d^E alpha
  double potential_residual = 0.0;   // d^E V
};

inline GaugeCheck is_gauge_pair(const LagrangianSystem& l, const LagrangianSystem& r, const GaugeData& g,
                                const SampleDomain& d) {
  detail::require_same_algebroid(l, r);
  const auto& A = l.algebroid();
  const int nv = A.variable_count();
  GaugeCheck c;
  const Expr diff_expr[] = {r.lagrangian() - l.lagrangian() - hat(A, g.alpha) - g.potential};
  c.lagrangian_residual = max_abs_sampled(diff_expr, d, nv);
  c.alpha_residual = max_abs_sampled(d_on_oneform(A, g.alpha).entries, d, nv);
  c.potential_residual = max_abs_sampled(d_on_function(A, g.potential).components, d, nv);
  c.passed = c.lagrangian_residual <= d.atol && c.alpha_residual <= d.atol && c.potential_residual <= d.atol;
  return c;
}

/// Splits a null Lagrangian as hat(alpha) + V with alpha closed.
inline GaugeData trivial_decompose(const LagrangianSystem& l0, const SampleDomain& d) {
  const auto& A = l0.algebroid();
  const int nv = A.variable_count(), p = A.rank();
  double w = max_abs_sampled(l0.omega().all(), d, nv);
  if (w > d.atol) throw NotNullLagrangian(w);

  std::vector<Expr> fiber_dependence;
  Expr potential = l0.lagrangian();
  for (int a = 0; a < p; ++a) potential = potential - A.y(a) * l0.momenta()[static_cast<std::size_t>(a)];
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) fiber_dependence.push_back(l0.hessian(a, b));
    fiber_dependence.push_back(diff(potential, A.y_slot(a)));
  }
  double yres = max_abs_sampled(fiber_dependence, d, nv);
  if (yres > d.atol)
    throw DecompositionFailed("decomposition failed: fiber dependence residual " + std::to_string(yres));

  GaugeData g;
  for (const auto& th : l0.momenta()) g.alpha.components.push_back(detail::drop_fiber(A, th));
  g.potential = detail::drop_fiber(A, potential);
  double closed = max_abs_sampled(d_on_oneform(A, g.alpha).entries, d, nv);
  if (closed > d.atol)
    throw DecompositionFailed("decomposition failed: d alpha residual " + std::to_string(closed));
  return g;
}

// ---------------------------------------------------------------------------
// Noether.

struct NoetherCertificate {
  Section symmetry;
  Expr h;
  double residual = 0.0;
  Expr quantity;  // f = X^a dL/dy^a - h + K
};

struct NoetherResult {
  bool success = false;
  double residual = 0.0;
  std::optional<NoetherCertificate> certificate;
};

/// Checks d_{X^c} L == hat(d^E h). On success the certificate carries the
/// conserved quantity f = i_{X^c} Theta_L - h + K. A supplied K must satisfy
/// d^{LE} K == 0.
inline NoetherResult noether_test(const LagrangianSystem& sys, const Section& X, const Expr& h, const SampleDomain& d,
                                  const std::optional<Expr>& K = std::nullopt) {
  const auto& A = sys.algebroid();
  const int nv = A.variable_count();
  detail::require_base_only(A, {h}, "h");
  const Expr r[] = {anchored_derivative(A, complete_lift(A, X), sys.lagrangian()) - hat(A, d_on_function(A, h))};
  NoetherResult res;
  res.residual = max_abs_sampled(r, d, nv);
  res.success = res.residual <= d.atol;
  if (K) {
    std::vector<Expr> dk;
    for (int a = 0; a < A.rank(); ++a) {
      dk.push_back(detail::anchor_apply(A, a, *K));
      dk.push_back(diff(*K, A.y_slot(a)));
    }
    double kres = max_abs_sampled(dk, d, nv);
    if (kres > d.atol) throw Error("K is not d-closed on the prolongation (residual " + std::to_string(kres) + ")");
  }
  if (res.success) {
    Expr f = -h;
    for (int a = 0; a < A.rank(); ++a)
      f = f + X.components[static_cast<std::size_t>(a)] * sys.momenta()[static_cast<std::size_t>(a)];
    if (K) f = f + *K;
    res.certificate = NoetherCertificate{X, h, res.residual, f};
  }
  return res;
}

// ---------------------------------------------------------------------------
// One-parameter gauge families L_t = L o flow_t of rho^{LE}(X^c).

struct FamilyEntry {
  double t = 0.0;
  bool passed = false;
  double fiber_residual = 0.0;      // y-dependence of d(L_t - L)/dy and of the remainder
  double closedness_residual = 0.0;  // d^E of the extracted 1-form and remainder
};

struct FamilyReport {
  GaugeData generator;  // d_{X^c} L = hat(beta) + W
  std::vector<FamilyEntry> entries;
  bool passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const FamilyEntry& e) { return e.passed; });
  }
};

inline constexpr double kFamilyTolerance = 1e-4;
inline constexpr double kFamilyStep = 1e-5;

/// Verifies numerically that each L_t differs from L by a closed gauge term.
/// The hypothesis on d_{X^c} L is checked symbolically first.
inline FamilyReport gauge_family(const LagrangianSystem& sys, const Section& X, const std::vector<double>& ts,
                                 double h_flow, const SampleDomain& d, int points = 8) {
  const auto& A = sys.algebroid();
  const int m = A.base_dim(), p = A.rank(), nv = A.variable_count();
  const ProlongedSection Xc = complete_lift(A, X);
  FamilyReport rep;

  Expr G = anchored_derivative(A, Xc, sys.lagrangian());
  std::vector<Expr> beta;
  Expr W = G;
  for (int a = 0; a < p; ++a) {
    beta.push_back(diff(G, A.y_slot(a)));
    W = W - A.y(a) * beta.back();
  }
  std::vector<Expr> fiber_dep;
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) fiber_dep.push_back(diff(beta[static_cast<std::size_t>(a)], A.y_slot(b)));
    fiber_dep.push_back(diff(W, A.y_slot(a)));
  }
  double hyp = max_abs_sampled(fiber_dep, d, nv);
  if (hyp > d.atol) throw HypothesisViolated("hypothesis violated: d_{X^c} L is not fiber-affine (residual " + std::to_string(hyp) + ")");
  for (auto& b : beta) rep.generator.alpha.components.push_back(detail::drop_fiber(A, b));
  rep.generator.potential = detail::drop_fiber(A, W);
  double closed = std::max(max_abs_sampled(d_on_oneform(A, rep.generator.alpha).entries, d, nv),
                           max_abs_sampled(d_on_function(A, rep.generator.potential).components, d, nv));
  if (closed > d.atol) throw HypothesisViolated("hypothesis violated: beta or W not closed (residual " + std::to_string(closed) + ")");

  const double delta = kFamilyStep;
  for (double t : ts) {
    FamilyEntry e{t, false, 0.0, 0.0};
    auto gap = [&](std::vector<double> pt) {  // (L_t - L)(pt)
      State s = state_of(pt, m);
      State moved = t == 0.0 ? s : flow_on_E(A, Xc, s, t, h_flow);
      return sys.lagrangian().eval(point_of(moved)) - sys.lagrangian().eval(pt);
    };
    auto shifted = [](std::vector<double> pt, int slot, double by) {
      pt[static_cast<std::size_t>(slot)] += by;
      return pt;
    };
    // b_a = d(L_t - L)/dy^a by central differences
    auto one_form = [&](const std::vector<double>& pt) {
      std::vector<double> b(static_cast<std::size_t>(p));
      for (int a = 0; a < p; ++a)
        b[static_cast<std::size_t>(a)] = (gap(shifted(pt, A.y_slot(a), delta)) - gap(shifted(pt, A.y_slot(a), -delta))) / (2 * delta);
      return b;
    };
    auto remainder = [&](const std::vector<double>& pt) {
      std::vector<double> b = one_form(pt);
      double w = gap(pt);
      for (int a = 0; a < p; ++a) w -= pt[static_cast<std::size_t>(A.y_slot(a))] * b[static_cast<std::size_t>(a)];
      return w;
    };

    SampleDomain dd = d;
    dd.samples = std::max(points, 8);
    Sampler sampler(dd, nv);
    for (int n = 0; n < points; ++n) {
      std::vector<double> pt = sampler.next();
      std::vector<double> other = sampler.next();
      for (int i = 0; i < m; ++i) other[static_cast<std::size_t>(i)] = pt[static_cast<std::size_t>(i)];

      std::vector<double> b = one_form(pt), b2 = one_form(other);
      double w = remainder(pt), w2 = remainder(other);
      for (int a = 0; a < p; ++a)
        e.fiber_residual = std::max(e.fiber_residual, std::abs(b[static_cast<std::size_t>(a)] - b2[static_cast<std::size_t>(a)]));
      e.fiber_residual = std::max(e.fiber_residual, std::abs(w - w2));

      // x-derivatives of b and of the remainder
      std::vector<std::vector<double>> db(static_cast<std::size_t>(m));
      std::vector<double> dw(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        auto plus = shifted(pt, A.x_slot(i), delta), minus = shifted(pt, A.x_slot(i), -delta);
        std::vector<double> bp = one_form(plus), bm = one_form(minus);
        db[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(p));
        for (int a = 0; a < p; ++a)
          db[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = (bp[static_cast<std::size_t>(a)] - bm[static_cast<std::size_t>(a)]) / (2 * delta);
        dw[static_cast<std::size_t>(i)] = (remainder(plus) - remainder(minus)) / (2 * delta);
      }
      auto rho = [&](int a, int i) { return A.anchor(a, i).eval(pt); };
      for (int a = 0; a < p; ++a) {
        double dwa = 0.0;
        for (int i = 0; i < m; ++i) dwa += rho(a, i) * dw[static_cast<std::size_t>(i)];
        e.closedness_residual = std::max(e.closedness_residual, std::abs(dwa));
        for (int c = a + 1; c < p; ++c) {
          double v = 0.0;
          for (int i = 0; i < m; ++i)
            v += rho(a, i) * db[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] -
                 rho(c, i) * db[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
          for (int g = 0; g < p; ++g) v -= A.structure(a, c, g).eval(pt) * b[static_cast<std::size_t>(g)];
          e.closedness_residual = std::max(e.closedness_residual, std::abs(v));
        }
      }
    }
    e.passed = e.fiber_residual <= kFamilyTolerance && e.closedness_residual <= kFamilyTolerance;
    rep.entries.push_back(e);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial of A' A^{-1} from traces of powers.

struct CharPolyResult {
  /// f(lambda) = det(M - lambda I) = sum_k coefficients[k] lambda^(p-k), so
  /// coefficients[0] = (-1)^p and coefficients[p] = det M.
  std::vector<double> coefficients;
  /// traces[k-1] = tr(M^k), k = 1..p
  std::vector<double> traces;
  /// Largest gap to the principal-minor expansion (p <= 3), NaN otherwise.
  double expansion_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Coefficients of det(lambda I - M) (monic, a_0 = 1) from power traces.
inline std::vector<double> newton_coefficients(const std::vector<double>& traces) {
  const std::size_t p = traces.size();
  std::vector<double> a(p + 1, 0.0);
  a[0] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += a[k - j] * traces[j - 1];
    a[k] = -s / static_cast<double>(k);
  }
  return a;
}

namespace detail {

// det(lambda I - M) coefficients from sums of principal minors, p <= 3.
inline std::vector<double> minor_coefficients(const Eigen::MatrixXd& M) {
  const long p = M.rows();
  std::vector<double> a{1.0};
  if (p >= 1) a.push_back(-M.trace());
  if (p == 2) a.push_back(M.determinant());
  if (p == 3) {
    double e2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) e2 += M(i, i) * M(j, j) - M(i, j) * M(j, i);
    a.push_back(e2);
    a.push_back(-M.determinant());
  }
  return a;
}

}  // namespace detail

inline CharPolyResult char_poly(const Eigen::MatrixXd& A, const Eigen::MatrixXd& A_prime) {
  const long p = A.rows();
  if (A.cols() != p || A_prime.rows() != p || A_prime.cols() != p) throw ShapeError("char_poly: matrices must be p x p");
  double cond = condition_number(A);
  if (!(cond < kConditionLimit)) throw SingularHessian(cond);
  // M = A' A^{-1}  <=>  A^T M^T = A'^T
  Eigen::MatrixXd M = A.transpose().partialPivLu().solve(A_prime.transpose()).transpose();

  CharPolyResult res;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
  for (long k = 1; k <= p; ++k) {
    power = power * M;
    res.traces.push_back(power.trace());
  }
  std::vector<double> a = newton_coefficients(res.traces);
  const double sign = (p % 2 == 0) ? 1.0 : -1.0;
  for (double ak : a) res.coefficients.push_back(sign * ak);

  if (p <= 3) {
    std::vector<double> direct = detail::minor_coefficients(M);
    res.expansion_residual = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      res.expansion_residual = std::max(res.expansion_residual, std::abs(direct[k] - a[k]));
  }
  return res;
}

/// Largest violation of Newton's identities between coefficients and traces.
inline double newton_residual(const CharPolyResult& r) {
  const std::size_t p = r.traces.size();
  const double sign = (p % 2 == 0) ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t k = 1; k <= p; ++k) {
    // k a_k + sum_{j=1..k} a_{k-j} t_j = 0 with a_k = sign * c_k
    double s = static_cast<double>(k) * sign * r.coefficients[k];
    for (std::size_t j = 1; j <= k; ++j) s += sign * r.coefficients[k - j] * r.traces[j - 1];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Raw 2-form route: (w' - lambda w)^p = f(lambda) w^p via Pfaffians.

/// Pfaffian of a real antisymmetric matrix by pivoted skew elimination.
inline double pfaffian(Eigen::MatrixXd a) {
  const long n = a.rows();
  if (n % 2 != 0) return 0.0;
  double pf = 1.0;
  for (long k = 0; k + 1 < n; k += 2) {
    Eigen::Index rel = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&rel);
    long kp = k + 1 + static_cast<long>(rel);
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == 0.0) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      Eigen::VectorXd tau = a.row(k).tail(n - k - 2).transpose() / a(k, k + 1);
      Eigen::VectorXd col = a.col(k + 1).tail(n - k - 2);
      a.bottomRightCorner(n - k - 2, n - k - 2) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

/// Matrix of omega_L at a state in the basis (T_1..T_p, V_1..V_p):
/// omega(T_a, T_b) = 2 D_ab, omega(T_a, V_b) = B_ab.
inline Eigen::MatrixXd omega_matrix(const LagrangianSystem& sys, const State& s) {
  const int p = sys.algebroid().rank();
  std::vector<double> pt = point_of(s);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      w(a, b) = 2.0 * sys.omega().D(a, b).eval(pt);
      double bab = sys.omega().B(a, b).eval(pt);
      w(a, p + b) = bab;
      w(p + b, a) = -bab;
    }
  return w;
}

/// Coefficients (same normalization as CharPolyResult) of f(lambda) defined
/// by (w' - lambda w)^p = f(lambda) w^p for 2p x 2p antisymmetric matrices.
inline std::vector<double> bihamiltonian_coefficients(const Eigen::MatrixXd& omega_prime, const Eigen::MatrixXd& omega_l) {
  const long n = omega_l.rows();
  if (n % 2 != 0 || omega_prime.rows() != n) throw ShapeError("2-forms must be even-dimensional and of equal size");
  const long p = n / 2;
  double base = pfaffian(omega_l);
  if (base == 0.0) throw SingularHessian(std::numeric_limits<double>::infinity());
  Eigen::MatrixXd V(p + 1, p + 1);
  Eigen::VectorXd f(p + 1);
  for (long j = 0; j <= p; ++j) {
    double lam = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(p + 1));
    for (long k = 0; k <= p; ++k) V(j, k) = std::pow(lam, static_cast<double>(p - k));
    f(j) = pfaffian(omega_prime - lam * omega_l) / base;
  }
  Eigen::VectorXd c = V.partialPivLu().solve(f);
  return {c.data(), c.data() + c.size()};
}

// ---------------------------------------------------------------------------
// Non-Noether monitors.

struct NonNoetherMonitors {
  std::vector<Monitor> monitors;  // c0..cp then t1..tp
  bool equivalence_verified = false;
  double equivalence_residual = 0.0;
};

inline CharPolyResult char_poly_at(const LagrangianSystem& l, const LagrangianSystem& r, const State& s) {
  return char_poly(l.hessian_at(s), r.hessian_at(s));
}

/// State-indexed invariants of a dynamically equivalent pair. Without
/// `force`, a pair that fails dynamical_equiv is rejected.
inline NonNoetherMonitors nonnoether_monitors(const LagrangianSystem& l, const LagrangianSystem& r,
                                              const SampleDomain& d, bool force = false) {
  NonNoetherMonitors out;
  SampledVerdict v = dynamical_equiv(l, r, d);
  out.equivalence_verified = v.passed;
  out.equivalence_residual = v.residual;
  if (!v.passed && !force)
    throw NotDynamicallyEquivalent("Lagrangians are not dynamically equivalent (residual " + std::to_string(v.residual) + ")");
  const int p = l.algebroid().rank();
  for (int k = 0; k <= p; ++k)
    out.monitors.push_back({"c" + std::to_string(k), [&l, &r, k](const State& s) {
                              return char_poly_at(l, r, s).coefficients[static_cast<std::size_t>(k)];
                            }});
  for (int k = 1; k <= p; ++k)
    out.monitors.push_back({"t" + std::to_string(k), [&l, &r, k](const State& s) {
                              return char_poly_at(l, r, s).traces[static_cast<std::size_t>(k - 1)];
                            }});
  return out;
}

}  // namespace lagroid

// Lie algebroids in a single trivializing chart.
//
// Coordinates are x^1..x^m on the base and y^1..y^p on the fiber, laid out in
// that order as evaluation slots. The structure is given by functions
// C^g_{ab}(x) with [e_a, e_b] = C^g_{ab} e_g and an anchor rho^i_a(x) with
// rho(e_a) = rho^i_a d/dx^i. Indices in this API are zero-based.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lagroid/symbolics.hpp"

namespace lagroid {

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Components X^a(x) of a section of E.
struct Section {
  std::vector<Expr> components;
};

/// Components alpha_a(x) of a 1-form on E (a section of the dual bundle).
struct OneFormOnM {
  std::vector<Expr> components;
};

/// Antisymmetric p x p array, e.g. d^E of a 1-form.
struct TwoFormOnM {
  int rank = 0;
  std::vector<Expr> entries;  // row-major

  const Expr& operator()(int a, int b) const { return entries[static_cast<std::size_t>(a * rank + b)]; }
};

/// A section of the prolongation in the basis {T_a, V_a}: base components
/// xi^a(x, y) and fiber components V^a(x, y).
struct ProlongedSection {
  std::vector<Expr> base;
  std::vector<Expr> fiber;
};

class LieAlgebroid {
 public:
  /// `structure` holds C^g_{ab} at index (a*p + b)*p + g; `anchor` holds
  /// rho^i_a at index a*m + i. Every entry must depend on base slots only.
  LieAlgebroid(std::vector<std::string> base_names, std::vector<std::string> fiber_names,
               std::vector<Expr> structure, std::vector<Expr> anchor)
      : m_(static_cast<int>(base_names.size())),
        p_(static_cast<int>(fiber_names.size())),
        structure_(std::move(structure)),
        anchor_(std::move(anchor)) {
    for (auto& n : base_names) symbols_.declare(n);
    for (auto& n : fiber_names) symbols_.declare(n);
    if (p_ < 1) throw ShapeError("rank must be at least 1");
    if (structure_.size() != static_cast<std::size_t>(p_ * p_ * p_))
      throw ShapeError("structure functions: expected " + std::to_string(p_ * p_ * p_) + " entries, got " +
                       std::to_string(structure_.size()));
    if (anchor_.size() != static_cast<std::size_t>(p_ * m_))
      throw ShapeError("anchor: expected " + std::to_string(p_ * m_) + " entries, got " +
                       std::to_string(anchor_.size()));
    for (const auto& c : structure_)
      if (!is_base_only(c)) throw ShapeError("structure function depends on fiber coordinates: " + to_string(c));
    for (const auto& r : anchor_)
      if (!is_base_only(r)) throw ShapeError("anchor entry depends on fiber coordinates: " + to_string(r));
  }

  int base_dim() const { return m_; }
  int rank() const { return p_; }
  int variable_count() const { return m_ + p_; }
  const Symbols& symbols() const { return symbols_; }

  int x_slot(int i) const { return i; }
  int y_slot(int a) const { return m_ + a; }
  Expr x(int i) const { return symbols_.var(x_slot(i)); }
  Expr y(int a) const { return symbols_.var(y_slot(a)); }

  /// C^g_{ab}
  const Expr& structure(int a, int b, int g) const {
    return structure_[static_cast<std::size_t>((a * p_ + b) * p_ + g)];
  }
  /// rho^i_a
  const Expr& anchor(int a, int i) const { return anchor_[static_cast<std::size_t>(a * m_ + i)]; }

  const std::vector<Expr>& structure_entries() const { return structure_; }
  const std::vector<Expr>& anchor_entries() const { return anchor_; }

  bool is_base_only(const Expr& e) const {
    auto s = free_slots(e);
    return s.empty() || *s.rbegin() < m_;
  }

  Expr parse(std::string_view text, const Parameters& params = {}) const {
    return lagroid::parse(text, symbols_, params);
  }

 private:
  int m_;
  int p_;
  Symbols symbols_;
  std::vector<Expr> structure_;
  std::vector<Expr> anchor_;
};

// ---------------------------------------------------------------------------
// Standard algebroids.

inline std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

/// TM over R^m with the coordinate frame: C = 0, rho = identity.
inline LieAlgebroid tangent_bundle(int m) {
  std::vector<Expr> c(static_cast<std::size_t>(m * m * m));
  std::vector<Expr> rho(static_cast<std::size_t>(m * m));
  for (int a = 0; a < m; ++a) rho[static_cast<std::size_t>(a * m + a)] = Expr(1.0);
  return LieAlgebroid(numbered("x", m), numbered("y", m), std::move(c), std::move(rho));
}

/// A Lie algebra seen as an algebroid over a point.
inline LieAlgebroid lie_algebra(int p, const std::vector<double>& constants) {
  std::vector<Expr> c(constants.begin(), constants.end());
  return LieAlgebroid({}, numbered("y", p), std::move(c), {});
}

/// so(3) with C^g_{ab} = epsilon_{abg}.
inline LieAlgebroid so3() {
  std::vector<double> c(27, 0.0);
  auto at = [&](int a, int b, int g) -> double& { return c[static_cast<std::size_t>((a * 3 + b) * 3 + g)]; };
  at(0, 1, 2) = 1;
  at(1, 2, 0) = 1;
  at(2, 0, 1) = 1;
  at(1, 0, 2) = -1;
  at(2, 1, 0) = -1;
  at(0, 2, 1) = -1;
  return lie_algebra(3, c);
}

// ---------------------------------------------------------------------------
// Validation.

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  bool passed = true;
};

struct ValidationReport {
  std::vector<IdentityCheck> checks;  // antisymmetry, anchor-morphism, jacobi
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const IdentityCheck& get(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw Error("no identity check named " + name);
  }
};

inline constexpr double kValidationThreshold = 1e-8;

namespace detail {

// rho(e_a) applied to a function of x
inline Expr anchor_apply(const LieAlgebroid& A, int a, const Expr& f) {
  Expr r;
  for (int i = 0; i < A.base_dim(); ++i) r = r + A.anchor(a, i) * diff(f, A.x_slot(i));
  return r;
}

}  // namespace detail

/// Samples the three coordinate identities that make (C, rho) a Lie algebroid:
/// antisymmetry of C, rho as a bracket morphism, and the Jacobi identity.
inline ValidationReport validate(const LieAlgebroid& A, const SampleDomain& d,
                                 double threshold = kValidationThreshold) {
  const int p = A.rank(), m = A.base_dim();
  std::vector<Expr> antisym, morphism, jacobi;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int g = 0; g < p; ++g) antisym.push_back(A.structure(a, b, g) + A.structure(b, a, g));

  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < m; ++i) {
        Expr lhs = detail::anchor_apply(A, a, A.anchor(b, i)) - detail::anchor_apply(A, b, A.anchor(a, i));
        Expr rhs;
        for (int g = 0; g < p; ++g) rhs = rhs + A.anchor(g, i) * A.structure(a, b, g);
        morphism.push_back(lhs - rhs);
      }

  // sum over cyclic (a, b, c) of rho_a(C^n_{bc}) + C^k_{bc} C^n_{ak}
  auto cyclic_term = [&](int a, int b, int c, int n) {
    Expr t = detail::anchor_apply(A, a, A.structure(b, c, n));
    for (int k = 0; k < p; ++k) t = t + A.structure(b, c, k) * A.structure(a, k, n);
    return t;
  };
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c)
        for (int n = 0; n < p; ++n)
          jacobi.push_back(cyclic_term(a, b, c, n) + cyclic_term(b, c, a, n) + cyclic_term(c, a, b, n));

  ValidationReport report;
  const int nv = A.variable_count();
  for (auto& [name, exprs] : {std::pair<std::string, std::vector<Expr>*>{"antisymmetry", &antisym},
                              {"anchor-morphism", &morphism},
                              {"jacobi", &jacobi}}) {
    double r = max_abs_sampled(*exprs, d, nv);
    report.checks.push_back({name, r, r <= threshold});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exterior calculus on E.

namespace detail {

inline void require_base_only(const LieAlgebroid& A, const std::vector<Expr>& v, const char* what) {
  for (const auto& e : v)
    if (!A.is_base_only(e)) throw ShapeError(std::string(what) + " must depend on base coordinates only");
}

inline void require_rank(const LieAlgebroid& A, std::size_t n, const char* what) {
  if (n != static_cast<std::size_t>(A.rank()))
    throw ShapeError(std::string(what) + ": expected " + std::to_string(A.rank()) + " components");
}

}  // namespace detail

/// (d^E f)_a = rho^i_a df/dx^i
inline OneFormOnM d_on_function(const LieAlgebroid& A, const Expr& f) {
  detail::require_base_only(A, {f}, "function on M");
  OneFormOnM w;
  for (int a = 0; a < A.rank(); ++a) w.components.push_back(detail::anchor_apply(A, a, f));
  return w;
}

/// (d^E alpha)_{ab} = rho_a(alpha_b) - rho_b(alpha_a) - C^g_{ab} alpha_g
inline TwoFormOnM d_on_oneform(const LieAlgebroid& A, const OneFormOnM& alpha) {
  detail::require_rank(A, alpha.components.size(), "one-form");
  detail::require_base_only(A, alpha.components, "one-form");
  const int p = A.rank();
  TwoFormOnM w{p, std::vector<Expr>(static_cast<std::size_t>(p * p))};
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) {
      Expr e = detail::anchor_apply(A, a, alpha.components[static_cast<std::size_t>(b)]) -
               detail::anchor_apply(A, b, alpha.components[static_cast<std::size_t>(a)]);
      for (int g = 0; g < p; ++g) e = e - A.structure(a, b, g) * alpha.components[static_cast<std::size_t>(g)];
      w.entries[static_cast<std::size_t>(a * p + b)] = e;
      w.entries[static_cast<std::size_t>(b * p + a)] = -e;
    }
  return w;
}

/// The fiber-linear function alpha_a(x) y^a.
inline Expr hat(const LieAlgebroid& A, const OneFormOnM& alpha) {
  detail::require_rank(A, alpha.components.size(), "one-form");
  Expr e;
  for (int a = 0; a < A.rank(); ++a) e = e + alpha.components[static_cast<std::size_t>(a)] * A.y(a);
  return e;
}

/// rho^E(X) f for a base function f.
inline Expr anchor_derivative(const LieAlgebroid& A, const Section& X, const Expr& f) {
  Expr r;
  for (int a = 0; a < A.rank(); ++a) r = r + X.components[static_cast<std::size_t>(a)] * detail::anchor_apply(A, a, f);
  return r;
}

inline Section bracket(const LieAlgebroid& A, const Section& X, const Section& Y) {
  detail::require_rank(A, X.components.size(), "section");
  detail::require_rank(A, Y.components.size(), "section");
  detail::require_base_only(A, X.components, "section");
  detail::require_base_only(A, Y.components, "section");
  const int p = A.rank();
  Section out;
  for (int g = 0; g < p; ++g) {
    Expr e = anchor_derivative(A, X, Y.components[static_cast<std::size_t>(g)]) -
             anchor_derivative(A, Y, X.components[static_cast<std::size_t>(g)]);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        e = e + A.structure(a, b, g) * X.components[static_cast<std::size_t>(a)] * Y.components[static_cast<std::size_t>(b)];
    out.components.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prolongation.

/// The vector field rho^{LE}(P) on E applied to F(x, y):
/// (rho^i_a xi^a) dF/dx^i + V^a dF/dy^a.
inline Expr anchored_derivative(const LieAlgebroid& A, const ProlongedSection& P, const Expr& F) {
  Expr r;
  for (int a = 0; a < A.rank(); ++a) {
    const Expr& xi = P.base[static_cast<std::size_t>(a)];
    if (!xi.is_constant(0.0)) r = r + xi * detail::anchor_apply(A, a, F);
    r = r + P.fiber[static_cast<std::size_t>(a)] * diff(F, A.y_slot(a));
  }
  return r;
}

/// x-components rho^i_a xi^a of the anchored field.
inline std::vector<Expr> anchored_base_field(const LieAlgebroid& A, const ProlongedSection& P) {
  std::vector<Expr> v;
  for (int i = 0; i < A.base_dim(); ++i) {
    Expr e;
    for (int a = 0; a < A.rank(); ++a) e = e + A.anchor(a, i) * P.base[static_cast<std::size_t>(a)];
    v.push_back(e);
  }
  return v;
}

inline ProlongedSection complete_lift(const LieAlgebroid& A, const Section& X) {
  detail::require_rank(A, X.components.size(), "section");
  detail::require_base_only(A, X.components, "section");
  const int p = A.rank();
  ProlongedSection P{X.components, {}};
  for (int a = 0; a < p; ++a) {
    Expr v;
    for (int b = 0; b < p; ++b) {
      Expr coeff = detail::anchor_apply(A, b, X.components[static_cast<std::size_t>(a)]);
      for (int g = 0; g < p; ++g) coeff = coeff - A.structure(g, b, a) * X.components[static_cast<std::size_t>(g)];
      v = v + coeff * A.y(b);
    }
    P.fiber.push_back(v);
  }
  return P;
}

inline ProlongedSection vertical_lift(const LieAlgebroid& A, const Section& X) {
  detail::require_rank(A, X.components.size(), "section");
  detail::require_base_only(A, X.components, "section");
  return {std::vector<Expr>(static_cast<std::size_t>(A.rank())), X.components};
}

/// The Euler (Liouville) section (0, y).
inline ProlongedSection euler_section(const LieAlgebroid& A) {
  ProlongedSection D{std::vector<Expr>(static_cast<std::size_t>(A.rank())), {}};
  for (int a = 0; a < A.rank(); ++a) D.fiber.push_back(A.y(a));
  return D;
}

inline ProlongedSection prolonged_bracket(const LieAlgebroid& A, const ProlongedSection& P, const ProlongedSection& Q) {
  const int p = A.rank();
  ProlongedSection R;
  for (int g = 0; g < p; ++g) {
    Expr e = anchored_derivative(A, P, Q.base[static_cast<std::size_t>(g)]) -
             anchored_derivative(A, Q, P.base[static_cast<std::size_t>(g)]);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        e = e + A.structure(a, b, g) * P.base[static_cast<std::size_t>(a)] * Q.base[static_cast<std::size_t>(b)];
    R.base.push_back(e);
  }
  for (int a = 0; a < p; ++a)
    R.fiber.push_back(anchored_derivative(A, P, Q.fiber[static_cast<std::size_t>(a)]) -
                      anchored_derivative(A, Q, P.fiber[static_cast<std::size_t>(a)]));
  return R;
}

/// S(xi, V) = (0, xi)
inline ProlongedSection vertical_endomorphism(const ProlongedSection& P) {
  return {std::vector<Expr>(P.base.size()), P.base};
}

inline ProlongedSection operator-(const ProlongedSection& P, const ProlongedSection& Q) {
  ProlongedSection R;
  for (std::size_t a = 0; a < P.base.size(); ++a) R.base.push_back(P.base[a] - Q.base[a]);
  for (std::size_t a = 0; a < P.fiber.size(); ++a) R.fiber.push_back(P.fiber[a] - Q.fiber[a]);
  return R;
}

inline std::vector<Expr> components(const ProlongedSection& P) {
  std::vector<Expr> v = P.base;
  v.insert(v.end(), P.fiber.begin(), P.fiber.end());
  return v;
}

}  // namespace lagroid

// Generators and independent reference computations shared by the tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagroid/model.hpp"

namespace testing_support {

using namespace lagroid;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  /// Small integer-valued coefficient in [-3, 3], never 0.
  double coefficient() {
    int c = integer(1, 3);
    return integer(0, 1) ? c : -c;
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Random polynomial of total degree <= degree in the given variables.
inline Expr random_polynomial(Rng& rng, const std::vector<Expr>& vars, int degree, int terms = 4) {
  Expr p(rng.coefficient());
  if (vars.empty()) return p;
  for (int t = 0; t < terms; ++t) {
    Expr mono(rng.coefficient());
    int deg = rng.integer(1, degree);
    for (int k = 0; k < deg; ++k) mono = mono * vars[static_cast<std::size_t>(rng.integer(0, static_cast<int>(vars.size()) - 1))];
    p = p + mono;
  }
  return p;
}

inline std::vector<Expr> base_vars(const LieAlgebroid& A) {
  std::vector<Expr> v;
  for (int i = 0; i < A.base_dim(); ++i) v.push_back(A.x(i));
  return v;
}

inline std::vector<Expr> all_vars(const LieAlgebroid& A) {
  std::vector<Expr> v = base_vars(A);
  for (int a = 0; a < A.rank(); ++a) v.push_back(A.y(a));
  return v;
}

inline Section random_section(Rng& rng, const LieAlgebroid& A, int degree = 2) {
  Section s;
  for (int a = 0; a < A.rank(); ++a) s.components.push_back(random_polynomial(rng, base_vars(A), degree, 3));
  return s;
}

inline OneFormOnM random_form(Rng& rng, const LieAlgebroid& A, int degree = 2) {
  OneFormOnM w;
  for (int a = 0; a < A.rank(); ++a) w.components.push_back(random_polynomial(rng, base_vars(A), degree, 3));
  return w;
}

/// Models that pass validation, loaded from the catalog.
inline std::vector<Model> valid_catalog() {
  std::vector<Model> v;
  for (const auto& n : catalog_names())
    if (n != "rigid-body-broken") v.push_back(load_model(n));
  return v;
}

/// Determinant by the Leibniz expansion (permutations), for small n.
inline double leibniz_det(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inversions;
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= a(i, perm[static_cast<std::size_t>(i)]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline Eigen::MatrixXd random_matrix(Rng& rng, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

/// Symmetric and diagonally dominant, so comfortably invertible.
inline Eigen::MatrixXd random_spd(Rng& rng, int n) {
  Eigen::MatrixXd m = random_matrix(rng, n);
  Eigen::MatrixXd s = m * m.transpose();
  s += Eigen::MatrixXd::Identity(n, n) * (1.0 + n);
  return s;
}

inline State random_state(Rng& rng, const LieAlgebroid& A, double lo = -1.0, double hi = 1.0) {
  State s;
  for (int i = 0; i < A.base_dim(); ++i) s.x.push_back(rng.uniform(lo, hi));
  for (int a = 0; a < A.rank(); ++a) s.y.push_back(rng.uniform(lo, hi));
  return s;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, std::abs(d));
  return m;
}

}  // namespace testing_support

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lagroid/symbolics.hpp"
#include "support.hpp"

using namespace lagroid;
using testing_support::Rng;

namespace {

Symbols xy() { return Symbols({"x1", "x2", "y1", "y2"}); }

double at(const Expr& e, std::vector<double> pt) { return e.eval(pt); }

// Random expression tree mixing every node kind; used for structural properties.
Expr random_tree(Rng& rng, const Symbols& s, int depth) {
  if (depth == 0 || rng.integer(0, 4) == 0) {
    if (rng.integer(0, 2) == 0) return Expr(rng.coefficient());
    return s.var(rng.integer(0, s.size() - 1));
  }
  switch (rng.integer(0, 7)) {
    case 0: return random_tree(rng, s, depth - 1) + random_tree(rng, s, depth - 1);
    case 1: return random_tree(rng, s, depth - 1) - random_tree(rng, s, depth - 1);
    case 2: return random_tree(rng, s, depth - 1) * random_tree(rng, s, depth - 1);
    case 3: return random_tree(rng, s, depth - 1) / (Expr(5.0) + pow(random_tree(rng, s, depth - 1), 2.0));
    case 4: return pow(random_tree(rng, s, depth - 1), static_cast<double>(rng.integer(2, 3)));
    case 5: return -random_tree(rng, s, depth - 1);
    case 6: return sin(random_tree(rng, s, depth - 1));
    default: return cos(random_tree(rng, s, depth - 1));
  }
}

}  // namespace

TEST(Parse, HalfSquare) {
  Symbols s({"y1"});
  EXPECT_DOUBLE_EQ(at(parse("y1^2/2", s), {3.0}), 4.5);
}

TEST(Parse, PythagoreanIdentity) {
  Symbols s({"x1"});
  EXPECT_NEAR(at(parse("sin(x1)^2 + cos(x1)^2", s), {0.7}), 1.0, 1e-12);
}

TEST(Parse, TrailingOperatorReportsOffset) {
  Symbols s({"x1"});
  try {
    parse("x1*", s);
    FAIL() << "expected a syntax error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
    EXPECT_NE(std::string(e.what()).find("offset 3"), std::string::npos);
  }
}

TEST(Parse, UndeclaredIdentifier) {
  Symbols s({"x1"});
  EXPECT_THROW(parse("x1 + z", s), UndeclaredIdentifier);
}

TEST(Parse, ParametersAreSubstituted) {
  Symbols s({"y1"});
  Parameters p{{"k", 4.0}};
  Expr e = parse("k*y1", s, p);
  EXPECT_DOUBLE_EQ(at(e, {2.0}), 8.0);
  EXPECT_EQ(free_slots(e).size(), 1u);
}

TEST(Parse, PrecedenceAndAssociativity) {
  Symbols s({"x1"});
  EXPECT_DOUBLE_EQ(at(parse("2^3^2", s), {0.0}), 512.0);
  EXPECT_DOUBLE_EQ(at(parse("-x1^2", s), {2.0}), -4.0);
  EXPECT_DOUBLE_EQ(at(parse("1 - 2 - 3", s), {0.0}), -4.0);
  EXPECT_DOUBLE_EQ(at(parse("8/2/2", s), {0.0}), 2.0);
  EXPECT_DOUBLE_EQ(at(parse("2*(x1 + 1)", s), {1.5}), 5.0);
  EXPECT_DOUBLE_EQ(at(parse("1.5e1 + .5", s), {0.0}), 15.5);
}

TEST(Parse, NonConstantExponentRejected) {
  Symbols s({"x1", "y1"});
  EXPECT_THROW(parse("x1^y1", s), ParseError);
  EXPECT_NO_THROW(parse("x1^(1/2)", s));
}

TEST(Parse, MalformedInputs) {
  Symbols s({"x1"});
  for (const char* bad : {"", "(x1", "x1)", "sin x1", "sin()", "x1 x1", "2..3", "*x1", "x1 +"})
    EXPECT_THROW(parse(bad, s), ParseError) << bad;
}

TEST(Eval, DomainErrorsAreRaised) {
  Symbols s({"x1"});
  EXPECT_THROW(at(parse("log(x1)", s), {-1.0}), DomainError);
  EXPECT_THROW(at(parse("log(x1)", s), {0.0}), DomainError);
  EXPECT_THROW(at(parse("sqrt(x1)", s), {-0.5}), DomainError);
  EXPECT_THROW(at(parse("1/x1", s), {0.0}), DomainError);
  EXPECT_THROW(at(parse("x1^(-1)", s), {0.0}), DomainError);
  EXPECT_THROW(at(parse("x1^0.5", s), {-1.0}), DomainError);
  EXPECT_THROW(at(parse("exp(x1)", s), {1000.0}), DomainError);
}

TEST(Diff, PolynomialRule) {
  Symbols s({"y1"});
  Expr d = diff(parse("y1^2/2", s), 0);
  EXPECT_TRUE(equal_sampled(d, s.var(0), SampleDomain{}).passed);
}

TEST(Diff, ChainRule) {
  Symbols s({"x1", "y1"});
  Expr d = diff(parse("exp(x1*y1)", s), 0);
  EXPECT_TRUE(equal_sampled(d, parse("y1*exp(x1*y1)", s), SampleDomain{}).passed);
}

TEST(Diff, AbsentVariableIsStructuralZero) {
  Symbols s({"x1", "x2"});
  Expr d = diff(parse("sin(x2)", s), 0);
  EXPECT_TRUE(d.is_constant(0.0));
}

TEST(Diff, AllFunctionRules) {
  Symbols s({"x1"});
  SampleDomain d;
  d.fallback = {0.2, 1.2};
  struct Case {
    const char* f;
    const char* df;
  };
  for (auto c : {Case{"sin(x1)", "cos(x1)"}, Case{"cos(x1)", "-sin(x1)"}, Case{"tan(x1)", "1/cos(x1)^2"},
                 Case{"exp(2*x1)", "2*exp(2*x1)"}, Case{"log(x1)", "1/x1"}, Case{"sqrt(x1)", "0.5/sqrt(x1)"},
                 Case{"1/x1", "-1/x1^2"}, Case{"x1^-1.5", "-1.5*x1^-2.5"}, Case{"(x1+1)/(x1-2)", "-3/(x1-2)^2"}})
    EXPECT_TRUE(equal_sampled(diff(parse(c.f, s), 0), parse(c.df, s), d).passed) << c.f;
}

TEST(EqualSampled, Identity) {
  Symbols s({"x1"});
  SampledVerdict v = equal_sampled(parse("sin(x1)^2 + cos(x1)^2", s), Expr(1.0), SampleDomain{});
  EXPECT_TRUE(v.passed);
  EXPECT_LE(v.residual, 1e-12);
}

TEST(EqualSampled, SmallOffsetDetected) {
  Symbols s({"y1"});
  EXPECT_FALSE(equal_sampled(parse("y1", s), parse("y1 + 1e-6", s), SampleDomain{}).passed);
}

TEST(EqualSampled, Commutativity) {
  Symbols s({"x1", "y1"});
  SampledVerdict v = equal_sampled(parse("x1*y1 - y1*x1", s), Expr(0.0), SampleDomain{});
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.residual, 0.0);
}

TEST(EqualSampled, UndecidableAfterResampling) {
  Symbols s({"x1"});
  SampleDomain d;
  d.fallback = {-2.0, -1.0};
  EXPECT_THROW(equal_sampled(parse("log(x1)", s), Expr(0.0), d), UndecidableError);
}

TEST(EqualSampled, OccasionalDomainErrorIsResampled) {
  // sqrt(x1) fails on half the box; some draws land on the good side
  Symbols s({"x1"});
  SampleDomain d;
  d.fallback = {-0.05, 2.0};
  EXPECT_TRUE(equal_sampled(parse("sqrt(x1)^2", s), s.var(0), d).passed);
}

TEST(SampleDomain, RejectsBadConfiguration) {
  SampleDomain d;
  d.samples = 4;
  EXPECT_THROW(d.check(), Error);
  SampleDomain e;
  e.fallback = {1.0, 1.0};
  EXPECT_THROW(e.check(), Error);
}

TEST(Print, KnownForms) {
  Symbols s({"x1", "y1"});
  EXPECT_EQ(to_string(parse("x1 - y1", s)), "x1 - y1");
  EXPECT_EQ(to_string(parse("(x1 + y1)*2", s)), "2*(x1 + y1)");
  EXPECT_EQ(to_string(parse("-(x1^2)", s)), "-x1^2");
  EXPECT_EQ(to_string(tidy(parse("0.5*(3*(2*y1))", s))), "3*y1");
}

// ---------------------------------------------------------------------------
// Properties.

TEST(Property, FoldIsIdempotent) {
  Rng rng(11);
  Symbols s = xy();
  for (int n = 0; n < 300; ++n) {
    Expr e = random_tree(rng, s, 5);
    Expr once = fold(e);
    EXPECT_TRUE(same(fold(once), once)) << to_string(e);
  }
}

TEST(Property, PrintParseRoundTrip) {
  Rng rng(12);
  Symbols s = xy();
  SampleDomain d;
  for (int n = 0; n < 200; ++n) {
    Expr e = random_tree(rng, s, 5);
    Expr back = parse(to_string(e), s);
    SampledVerdict v = equal_sampled(e, back, d);
    EXPECT_TRUE(v.passed) << to_string(e) << " residual " << v.residual;
  }
}

TEST(Property, TidyPreservesValue) {
  Rng rng(13);
  Symbols s = xy();
  for (int n = 0; n < 200; ++n) {
    Expr e = random_tree(rng, s, 5);
    EXPECT_TRUE(equal_sampled(e, tidy(e), SampleDomain{}).passed) << to_string(e);
  }
}

TEST(Property, DiffMatchesCentralDifferences) {
  Rng rng(14);
  Symbols s({"a", "b", "c", "d", "e", "f"});
  std::vector<Expr> vars;
  for (int k = 0; k < 6; ++k) vars.push_back(s.var(k));
  for (int n = 0; n < 40; ++n) {
    int nv = rng.integer(1, 6);
    std::vector<Expr> used(vars.begin(), vars.begin() + nv);
    Expr p = testing_support::random_polynomial(rng, used, 4, 6);
    int slot = rng.integer(0, nv - 1);
    Expr dp = diff(p, slot);
    for (int k = 0; k < 32; ++k) {
      std::vector<double> pt(6);
      for (auto& v : pt) v = rng.uniform(-2.0, 2.0);
      const double h = 1e-6;
      auto plus = pt, minus = pt;
      plus[static_cast<std::size_t>(slot)] += h;
      minus[static_cast<std::size_t>(slot)] -= h;
      double fd = (p.eval(plus) - p.eval(minus)) / (2 * h);
      double exact = dp.eval(pt);
      EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact))) << to_string(p);
    }
  }
}

TEST(Property, DiffOfAbsentVariableIsZero) {
  Rng rng(15);
  Symbols s = xy();
  for (int n = 0; n < 100; ++n) {
    Expr e = random_tree(rng, s, 4);
    for (int slot = 0; slot < s.size(); ++slot)
      if (!depends_on(e, slot)) {
        EXPECT_TRUE(diff(e, slot).is_constant(0.0));
      }
  }
}

TEST(Property, EqualSampledReflexiveAndSymmetric) {
  Rng rng(16);
  Symbols s = xy();
  SampleDomain d;
  d.seed = 99;
  for (int n = 0; n < 100; ++n) {
    Expr a = random_tree(rng, s, 4), b = random_tree(rng, s, 4);
    EXPECT_TRUE(equal_sampled(a, a, d).passed);
    SampledVerdict ab = equal_sampled(a, b, d), ba = equal_sampled(b, a, d);
    EXPECT_EQ(ab.passed, ba.passed);
    EXPECT_EQ(ab.residual, ba.residual);
  }
}

TEST(Property, SubstituteThenEvaluate) {
  Rng rng(17);
  Symbols s = xy();
  for (int n = 0; n < 100; ++n) {
    Expr e = random_tree(rng, s, 4);
    Expr sub = substitute(e, 0, Expr(0.25));
    std::vector<double> pt = {0.25, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::vector<double> other = pt;
    other[0] = 1.75;  // value at the substituted slot must not matter
    double want = e.eval(pt);
    EXPECT_NEAR(sub.eval(other), want, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

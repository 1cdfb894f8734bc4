#include <doctest.h>

#include <random>

#include "reference_values.hpp"
#include "test_util.hpp"
#include "zetarule/bernoulli.hpp"
#include "zetarule/zeta.hpp"

using namespace zetarule;
using testutil::parse;
using testutil::rel_err;

namespace {

const NumericContext& ctx192() {
  static const NumericContext ctx(192);
  return ctx;
}

const ZetaEngine& engine192() {
  static const ZetaEngine e(ctx192());
  return e;
}

Complex cx(double re, double im) { return Complex(re, im, ctx192().working_bits()); }

// Cauchy-circle derivative: mean of zeta(s + r e^{i phi}) e^{-i phi} / r.
Complex cauchy_derivative(const ZetaEngine& e, const Complex& s, double r_double, long m) {
  const Precision wb = e.context().working_bits();
  const Real r(r_double, wb);
  const Real pi = e.context().pi();
  Complex sum(wb);
  for (long j = 0; j < m; ++j) {
    const Complex u = Complex::polar(Real(1L, wb), pi * 2L * j / m);
    sum += e.zeta(s + u * r) / u;
  }
  return sum / (r * m);
}

}  // namespace

TEST_CASE("Bernoulli numbers from the tangent triangle") {
  const BernoulliTable t(12);
  CHECK(t.b2k(1) == mpq_class(1, 6));
  CHECK(t.b2k(2) == mpq_class(-1, 30));
  CHECK(t.b2k(3) == mpq_class(1, 42));
  CHECK(t.b2k(6) == mpq_class(-691, 2730));
  CHECK(t.b2k(12) == mpq_class("-236364091/2730"));
}

TEST_CASE("classical values") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const Real pi = ctx192().pi();
  const Real tol = ctx192().target_tol();
  CHECK(rel_err(e.zeta(Real(2L, wb)), pi * pi / 6L) < tol);
  CHECK(abs(e.zeta(Real(0L, wb)) + Real(0.5, wb)) < tol);
  CHECK(rel_err(e.zeta(Real(-7L, wb)), Real(1L, wb) / 240L) < tol);
  CHECK(rel_err(e.zeta(Real(-1L, wb)), Real(-1L, wb) / 12L) < tol);
  CHECK(abs(e.zeta(Real(-4L, wb))) < tol);
  CHECK_THROWS_AS(e.zeta(Real(1L, wb)), PoleError);
  CHECK_THROWS_AS(e.zeta(cx(1.0, 0.0)), PoleError);
}

TEST_CASE("zeta against the reference values") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const double lim = 1e-48;
  CHECK(rel_err(e.zeta(Real(0.5, wb)), parse(ref::zeta_half, wb)) < lim);
  CHECK(rel_err(e.zeta(Real(3L, wb)), parse(ref::zeta_3, wb)) < lim);
  CHECK(rel_err(e.zeta(Real(-1.5, wb)), parse(ref::zeta_m1_5, wb)) < lim);
  CHECK(rel_err(e.zeta(Real(-7.25, wb)), parse(ref::zeta_m7_25, wb)) < lim);
  CHECK(rel_err(e.zeta(cx(2, 3)), parse(ref::zeta_2_3i, wb)) < lim);
  CHECK(rel_err(e.zeta(cx(0.5, 14)), parse(ref::zeta_half_14i, wb)) < lim);
  CHECK(rel_err(e.zeta(cx(-3.5, 20)), parse(ref::zeta_m3_5_20i, wb)) < lim);
  CHECK(rel_err(e.zeta(cx(0.1, 0.05)), parse(ref::zeta_0_1_0_05i, wb)) < lim);
}

TEST_CASE("zeta' against the reference values") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const double lim = 1e-48;
  const Real pi = ctx192().pi();
  CHECK(rel_err(e.zeta_deriv(Real(0.5, wb)), parse(ref::zeta_deriv_half, wb)) < lim);
  CHECK(rel_err(e.zeta_deriv(cx(2, 3)), parse(ref::zeta_deriv_2_3i, wb)) < lim);
  CHECK(rel_err(e.zeta_deriv(cx(-2.5, 7)), parse(ref::zeta_deriv_m2_5_7i, wb)) < lim);
  CHECK(rel_err(e.zeta_deriv(Real(0L, wb)), -log(pi * 2L) / 2L) < lim);
  CHECK(rel_err(e.zeta_deriv(Real(-2L, wb)), -e.zeta(Real(3L, wb)) / (pi * pi * 4L)) < lim);
  const Complex rho1(Real(0.5, wb), parse(ref::tau_1, wb));
  const Complex d = e.zeta_deriv(rho1);
  CHECK(rel_err(d, parse(ref::zeta_deriv_rho_1, wb)) < 1e-40);
  CHECK(abs(d) > 0.7);
  CHECK(abs(d) < 0.9);
}

TEST_CASE("closed form for zeta'(-2n)") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  CHECK(rel_err(e.zeta_deriv_neg_even(1), parse(ref::zeta_deriv_m2, wb)) < 1e-48);
  CHECK(rel_err(e.zeta_deriv_neg_even(2), parse(ref::zeta_deriv_m4, wb)) < 1e-48);
  CHECK(rel_err(e.zeta_deriv_neg_even(5), parse(ref::zeta_deriv_m10, wb)) < 1e-48);
  CHECK(rel_err(e.zeta_deriv_neg_even(10), parse(ref::zeta_deriv_m20, wb)) < 1e-48);
  CHECK(e.zeta_deriv_neg_even(1) < 0.0);
  CHECK(e.zeta_deriv_neg_even(2) > 0.0);
  const Real pi = ctx192().pi();
  const Real n2 = e.zeta(Real(5L, wb)) * 24L / (pow(pi * 2L, Real(4L, wb)) * 2L);
  CHECK(rel_err(e.zeta_deriv_neg_even(2), n2) < 1e-55);
  CHECK_THROWS(e.zeta_deriv_neg_even(0));
  CHECK(rel_err(e.zeta_second_deriv_neg_even(1), parse(ref::zeta_second_deriv_m2, wb)) < 1e-48);
  CHECK(rel_err(e.zeta_second_deriv_neg_even(3), parse(ref::zeta_second_deriv_m6, wb)) < 1e-48);
}

TEST_CASE("property: closed form agrees with zeta'(-2n) for n = 1..10") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  for (int n = 1; n <= 10; ++n) {
    const Real d = e.zeta_deriv(Real(static_cast<long>(-2 * n), wb));
    CHECK(abs(e.zeta_deriv_neg_even(n) - d) <= ctx192().target_tol() * 10L * max(Real(1L, wb), abs(d)));
  }
}

TEST_CASE("property: Cauchy-circle derivative cross-check") {
  const auto& e = engine192();
  const Real lim = ctx192().target_tol() * 10L;
  for (const Complex& s : {cx(2, 3), cx(0.5, 14.134725141734694), cx(-2.5, 7), cx(0.75, -1.5), cx(-2.0, 0.0)}) {
    const Complex c = cauchy_derivative(e, s, 1e-3, 64);
    const Complex d = e.zeta_deriv(s);
    CHECK(abs(c - d) <= lim * max(Real(1L, 64), abs(d)));
  }
}

TEST_CASE("property: reflection agrees with direct summation in the left half-plane") {
  // Direct summation this far left cancels terms of size N^{-sigma}, so it
  // runs at twice the precision to serve as the reference.
  const auto& e = engine192();
  const ZetaEngine wide(ctx192().doubled());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-10.0, -0.5);
  std::uniform_real_distribution<double> im(-25.0, 25.0);
  const Real lim = ctx192().target_tol() * 100L;
  for (int i = 0; i < 100; ++i) {
    const Complex s = cx(re(rng), im(rng));
    const Complex reflected = e.zeta(s);
    const Complex direct = wide.zeta_em(s, wide.plan_for(s, false));
    REQUIRE(abs(reflected - direct) <= lim * max(Real(1L, 64), abs(direct)));
  }
}

TEST_CASE("property: doubling the Euler-Maclaurin cutoff leaves results unchanged") {
  const auto& e = engine192();
  const Real tol = ctx192().target_tol();
  for (const Complex& s : {cx(0.5, 14), cx(2, 3), cx(0.8, 100), cx(3.5, -40)}) {
    const EmPlan plan = e.plan_for(s, true);
    const EmPlan twice{plan.n_terms * 2, plan.corrections};
    Complex d1, d2;
    const Complex z1 = e.zeta_em(s, plan, &d1);
    const Complex z2 = e.zeta_em(s, twice, &d2);
    CHECK(abs(z1 - z2) < tol * max(Real(1L, 64), abs(z1)));
    CHECK(abs(d1 - d2) < tol * max(Real(1L, 64), abs(d1)));
  }
}

TEST_CASE("log-space zeta at large negative arguments") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const Complex direct = log(Complex(e.zeta(Real(-1.5, wb))));
  const Complex logspace = e.log_zeta(Complex(Real(-1.5, wb)));
  CHECK(abs(exp(logspace) - exp(direct)) < 1e-50);
  // zeta(-71.5) is about 1e+52; the log form never overflows even much further out.
  const Complex far = e.log_zeta(Complex(Real(-5000.5, wb)));
  CHECK(far.re() > 20000.0);
  CHECK(rel_err(exp(e.log_zeta(Complex(Real(-31.5, wb)))).re(), e.zeta(Real(-31.5, wb))) < 1e-45);
}

TEST_CASE("log-gamma and digamma") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  CHECK(rel_err(e.log_gamma(cx(3.5, 2)), parse(ref::loggamma_3_5_2i, wb)) < 1e-48);
  const Complex lg = e.log_gamma(cx(-2.3, 0.7));
  CHECK(rel_err(exp(lg), exp(parse(ref::loggamma_m2_3_0_7i, wb))) < 1e-45);
  CHECK(rel_err(e.digamma(cx(0.25, 5)), parse(ref::digamma_0_25_5i, wb)) < 1e-48);
}

TEST_CASE("Riemann-Siegel theta and Hardy Z") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const Real pi = ctx192().pi();
  CHECK(rel_err(e.riemann_siegel_theta(Real(14L, wb)), parse(ref::theta_14, wb)) < 1e-48);
  CHECK(rel_err(e.riemann_siegel_theta(Real(100L, wb)), parse(ref::theta_100, wb)) < 1e-48);
  CHECK(rel_err(e.riemann_siegel_theta_deriv(Real(30L, wb)), parse(ref::theta_deriv_30, wb)) < 1e-48);
  CHECK(rel_err(e.hardy_z(Real(14L, wb)), parse(ref::hardy_z_14, wb)) < 1e-45);
  CHECK(rel_err(e.hardy_z(Real(50L, wb)), parse(ref::hardy_z_50, wb)) < 1e-45);

  // Gram points: theta(g0) = 0, theta(g1) = pi.
  CHECK(abs(e.riemann_siegel_theta(parse(ref::gram_0, wb))) < 1e-45);
  CHECK(abs(e.riemann_siegel_theta(parse(ref::gram_1, wb)) - pi) < 1e-45);

  // theta has its minimum near t = 6.29.
  const Real tmin = parse(ref::theta_min_t, wb);
  CHECK(abs(e.riemann_siegel_theta_deriv(tmin)) < 1e-25);
  for (double t : {2.0, 4.0, 6.0, 6.5, 8.0, 12.0}) {
    CHECK(e.riemann_siegel_theta(Real(t, wb)) > e.riemann_siegel_theta(tmin));
  }

  CHECK(e.hardy_z(Real(14L, wb)) * e.hardy_z(Real(14.2, wb)) < 0.0);
  for (double t : {3.0, 21.5, 77.7}) {
    const Real tt(t, wb);
    CHECK(rel_err(abs(e.hardy_z(tt)), abs(e.zeta(Complex(Real(0.5, wb), tt)))) < 1e-50);
  }
  // Z at consecutive Gram points: (-1)^n Z(g_n) > 0 holds for the first ones.
  CHECK(e.hardy_z(parse(ref::gram_0, wb)) > 0.0);
  CHECK(e.hardy_z(parse(ref::gram_1, wb)) < 0.0);
}

TEST_CASE("engine is usable at other precisions") {
  for (int bits : {64, 128, 256}) {
    const NumericContext ctx(bits);
    const ZetaEngine e(ctx);
    const Real tol = ctx.target_tol();
    const Real pi = ctx.pi();
    CHECK(rel_err(e.zeta(ctx.real(2L)), pi * pi / 6L) < tol);
    CHECK(rel_err(e.zeta(ctx.real(0.5)), Real(ref::zeta_half, 300)) < max(tol, Real(1e-49, 64)));
  }
}

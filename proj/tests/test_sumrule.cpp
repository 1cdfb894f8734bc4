#include <doctest.h>

#include <algorithm>

#include "reference_values.hpp"
#include "test_util.hpp"
#include "zetarule/sumrule.hpp"

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

const ZeroStore& zeros100() {
  static const ZeroStore s = locate_zeros(100, engine192());
  return s;
}

SumRuleParams params(const char* a, const char* x, long zeros = 100) {
  SumRuleParams p = SumRuleParams::make(a, x, ctx192());
  p.n_zeros = zeros;
  return p;
}

Real wb_real(const char* s) { return parse(s, ctx192().working_bits()); }

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(params("0.5", "0.5").validate());
  CHECK_THROWS_AS(params("1", "0.5").validate(), ParameterError);
  CHECK_THROWS_AS(params("0", "0.5").validate(), ParameterError);
  CHECK_THROWS_AS(params("-2", "0.5").validate(), ParameterError);
  CHECK_THROWS_AS(params("41", "0.5").validate(), ParameterError);
  CHECK_NOTHROW(params("40", "0.5").validate());
  CHECK_THROWS_AS(params("0.5", "1").validate(), ParameterError);
  CHECK_THROWS_AS(params("0.5", "0").validate(), ParameterError);
  CHECK_THROWS_AS(params("0.5", "1.5").validate(), ParameterError);
  CHECK_THROWS_AS(SumRuleParams::make("half", "0.5", ctx192()), ParameterError);
  auto p = params("0.5", "0.5");
  p.n_trivial = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  try {
    params("1", "0.5").validate();
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("pole") != std::string::npos);
  }
}

TEST_CASE("integrand values") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  CHECK(rel_err(integrand(Complex(Real(wb), Real(0.3, wb)), params("0.5", "0.5"), e), parse(ref::integrand_03i, wb)) <
        1e-48);
  CHECK(rel_err(integrand(Complex(Real(1.2, wb), Real(0.4, wb)), params("2", "0.25"), e),
                parse(ref::integrand_2_025, wb)) < 1e-48);
  const Complex at0 = integrand(Complex(Real(wb)), params("0.5", "0.5"), e);
  CHECK(abs(at0 - Complex(Real(-2L, wb))) < 1e-55);
  // Conjugate symmetry on the imaginary axis.
  const Complex up = integrand(Complex(Real(wb), Real(2.5, wb)), params("0.9", "0.75"), e);
  const Complex down = integrand(Complex(Real(wb), Real(-2.5, wb)), params("0.9", "0.75"), e);
  CHECK(abs(up - conj(down)) < 1e-55);
}

TEST_CASE("integrand refuses to sit on a pole") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const auto p = params("0.5", "0.5");
  try {
    (void)integrand(Complex(Real(1.5, wb)), p, e);
    FAIL("expected SingularityError");
  } catch (const SingularityError& err) {
    CHECK(std::string(err.what()).find("half-integer") != std::string::npos);
  }
  // s_1 = (1 + sqrt(5))/2 for a = 1/2.
  const Complex s1((1L + sqrt(Real(5L, wb))) / 2L);
  try {
    (void)integrand(s1, p, e);
    FAIL("expected SingularityError");
  } catch (const SingularityError& err) {
    CHECK(std::string(err.what()).find("trivial-zero pole n = 1") != std::string::npos);
  }
}

TEST_CASE("contour integral matches its closed form") {
  const auto& e = engine192();
  struct Case {
    const char *a, *x, *want;
  };
  for (const Case c : {Case{"0.5", "0.5", ref::integral_05_05}, Case{"2", "0.25", ref::integral_2_025},
                       Case{"0.9", "0.75", ref::integral_09_075}}) {
    const IntegralResult r = contour_integral(params(c.a, c.x), e);
    CHECK(rel_err(r.value.re(), wb_real(c.want)) < 1e-38);
    CHECK(rel_err(r.closed_form, wb_real(c.want)) < 1e-38);
    CHECK(abs(r.value - Complex(r.closed_form)) <= ctx192().target_tol() * 10L * abs(r.closed_form));
    CHECK(r.levels >= 3);
  }
}

TEST_CASE("pole locations") {
  const auto& z = zeros100();
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  auto p = params("0.5", "0.5", 3);
  p.n_trivial = 3;
  p.n_halfint = 2;
  const auto cat = pole_catalog(p, z, e);
  CHECK(cat.size() == 3 + 3 + 6);
  bool saw_rho = false, saw_conj = false, saw_t1 = false;
  for (const auto& s : cat) {
    if (s.family == PoleFamily::critical_zero && s.index == 1) {
      saw_rho = true;
      CHECK(rel_err(s.location, parse(ref::pole_rho1_a05, wb)) < 1e-40);
      CHECK(s.location.im() < 0.0);
    }
    if (s.family == PoleFamily::critical_zero_conjugate && s.index == 1) {
      saw_conj = true;
      CHECK(rel_err(s.location, conj(parse(ref::pole_rho1_a05, wb))) < 1e-40);
    }
    if (s.family == PoleFamily::trivial_zero && s.index == 1) {
      saw_t1 = true;
      CHECK(abs(s.location - Complex((1L + sqrt(Real(5L, wb))) / 2L)) < 1e-55);
    }
    CHECK(s.location.re() > 0.0);
  }
  CHECK((saw_rho && saw_conj && saw_t1));

  auto p2 = params("2", "0.25", 1);
  p2.n_trivial = 1;
  p2.n_halfint = 0 + 1;
  for (const auto& s : pole_catalog(p2, z, e)) {
    if (s.family == PoleFamily::critical_zero) CHECK(rel_err(s.location, parse(ref::pole_rho1_a2, wb)) < 1e-40);
  }
}

TEST_CASE("first terms of the three series") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const Real a(0.5, wb), x(0.5, wb);
  CHECK(rel_err(trivial_series_term(1, a, x, e), parse(ref::trivial_term_1, wb)) < 1e-48);
  CHECK(rel_err(half_integer_series_term(1, a, x, e), parse(ref::half_integer_term_1, wb)) < 1e-48);
  const auto& rho1 = zeros100().zero(1);
  CHECK(rel_err(zero_sum_term_printed(rho1, a, x, e), parse(ref::zero_term_1, wb)) < 1e-40);
  const Real k0 = half_integer_series_term(0, a, x, e);
  CHECK(rel_err(k0, 2L * sqrt(a) / (ctx192().pi() * e.zeta(a))) < 1e-55);
}

TEST_CASE("property: sinh and printed forms of a zero term agree") {
  const auto& e = engine192();
  const auto& z = zeros100();
  for (const char* a : {"0.3", "0.5", "2", "5", "0.9"}) {
    for (const char* x : {"0.25", "0.5", "0.75"}) {
      const Real aa = wb_real(a), xx = wb_real(x);
      for (long k : {1L, 2L, 17L, 100L}) {
        const Complex s = zero_sum_term(z.zero(k), aa, xx, e);
        const Complex q = zero_sum_term_printed(z.zero(k), aa, xx, e);
        CHECK(abs(s - q) <= ctx192().target_tol() * 100L * abs(s));
      }
    }
  }
}

TEST_CASE("property: analytic residues pair up under conjugation and match the printed terms") {
  const auto& e = engine192();
  auto p = params("0.9", "0.75", 20);
  p.n_trivial = 20;
  p.n_halfint = 5;
  const auto cat = pole_catalog(p, zeros100(), e);
  std::vector<const PoleSite*> rho(21), bar(21);
  for (const auto& s : cat) {
    if (s.family == PoleFamily::critical_zero) rho[static_cast<size_t>(s.index)] = &s;
    if (s.family == PoleFamily::critical_zero_conjugate) bar[static_cast<size_t>(s.index)] = &s;
    if (s.printed_residue) {
      CHECK(abs(*s.printed_residue - s.analytic_residue) <= ctx192().target_tol() * 1000L * abs(s.analytic_residue));
    }
  }
  for (size_t j = 1; j <= 20; ++j) {
    REQUIRE(rho[j] != nullptr);
    REQUIRE(bar[j] != nullptr);
    CHECK(abs(rho[j]->location - conj(bar[j]->location)) < 1e-55);
    CHECK(abs(rho[j]->analytic_residue - conj(bar[j]->analytic_residue)) <=
          ctx192().target_tol() * abs(rho[j]->analytic_residue));
  }
}

TEST_CASE("property: series terms decay") {
  const auto& e = engine192();
  const auto& z = zeros100();
  const Real a = wb_real("0.5"), x = wb_real("0.5");
  CHECK(abs(zero_sum_term(z.zero(100), a, x, e)) < 1e-7);
  CHECK(abs(zero_sum_term(z.zero(100), a, x, e)) < abs(zero_sum_term(z.zero(50), a, x, e)));
  CHECK(abs(zero_sum_term(z.zero(50), a, x, e)) < abs(zero_sum_term(z.zero(1), a, x, e)));
  // Growth of x^{-n/(2a)} wins for the first few terms, then the factorial takes over.
  Real prev = abs(trivial_series_term(6, a, x, e));
  for (long n = 7; n <= 40; ++n) {
    const Real t = abs(trivial_series_term(n, a, x, e));
    CHECK(t < prev);
    prev = t;
  }
  auto p = params("0.5", "0.5");
  p.n_trivial = 40;
  CHECK(trivial_series(p, e).tail_bound < 1e-40);
  CHECK(abs(half_integer_series_term(6, a, x, e)) < 1e-30);
}

TEST_CASE("resonant a is reported and still closes as a double pole") {
  const auto& e = engine192();
  const Precision wb = ctx192().working_bits();
  const auto res = find_resonance(Real(2L, wb), 80);
  REQUIRE(res.has_value());
  CHECK(res->first == 3);
  CHECK(res->second == 1);
  CHECK_FALSE(find_resonance(Real(0.5, wb), 80).has_value());
  CHECK_FALSE(find_resonance(Real(0.9, wb), 80).has_value());

  auto p = params("2", "0.25", 10);
  try {
    (void)evaluate_sumrule(p, zeros100(), e);
    FAIL("expected ResonanceError");
  } catch (const ResonanceError& err) {
    CHECK(err.k() == 1);
  }
  CHECK_THROWS_AS(trivial_series_term(3, Real(2L, wb), Real(0.25, wb), e), ResonanceError);

  p.n_trivial = 30;
  p.n_halfint = 4;
  const auto cat = pole_catalog(p, zeros100(), e);
  const auto merged = std::count_if(cat.begin(), cat.end(), [](const PoleSite& s) {
    return s.family == PoleFamily::merged;
  });
  // k = 1..4 meet n = 3, 15, 35, 63; the double pole exists whatever the trivial truncation.
  CHECK(merged == 4);
  for (const auto& s : cat) {
    if (s.family != PoleFamily::merged) continue;
    CHECK(s.order == 2);
    CHECK_FALSE(s.printed_residue.has_value());
    const ResidueResult nr = numeric_residue(s, cat, p, e);
    CHECK(abs(nr.value - s.analytic_residue) < max(abs(s.analytic_residue), Real(1e-30, 64)) * 1e-45);
  }
  const ClosureReport c = verify_residue_theorem(p, zeros100(), e);
  CHECK(c.passed);
  CHECK(c.orientation == -1);
}

TEST_CASE("numeric residues agree with the analytic ones") {
  const auto& e = engine192();
  const auto rows = arbitrate_residues(params("0.5", "0.5", 5), zeros100(), e, 4, 2, 3);
  CHECK(rows.size() == 4 + 3 + 6);
  for (const auto& r : rows) {
    CHECK(r.rel_error < 1e-45);
    if (r.printed_rel_error) CHECK(*r.printed_rel_error < 1e-45);
  }
}

TEST_CASE("closure over all families and ablation of one") {
  const auto& e = engine192();
  auto p = params("0.5", "0.5", 10);
  p.n_trivial = 30;
  const ClosureReport full = verify_residue_theorem(p, zeros100(), e);
  CHECK(full.passed);
  CHECK(full.orientation == -1);
  const Real want = 2L * sqrt(p.a) / sqrt(sqrt(p.x));
  CHECK(rel_err(full.normalization_factor, want) < 1e-40);
  REQUIRE(full.families.size() == 3);

  ClosureOptions no_half;
  no_half.include_half_integer = false;
  const ClosureReport ablated = verify_residue_theorem(p, zeros100(), e, no_half);
  CHECK_FALSE(ablated.passed);
  const Complex half_sum = full.families[2].sum;
  CHECK(abs(half_sum) > 1.0);
  CHECK(abs(ablated.residual - abs(half_sum)) < abs(half_sum) * 1e-6);
}

TEST_CASE("sum rule closes within its tail bound") {
  const auto& e = engine192();
  const auto r = evaluate_sumrule(params("0.5", "0.5"), zeros100(), e);
  CHECK(r.passed);
  CHECK(abs(r.residual) <= r.tail_bound);
  CHECK(r.tail_bound < 1e-10);
  // With the sign as usually printed the identity is off by twice the k-series.
  const Real* printed = r.extra("residual_with_printed_k_sign");
  REQUIRE(printed != nullptr);
  CHECK(abs(*printed) > 1.0);
  CHECK(r.zeros_used == 100);
}

TEST_CASE("property: the tail bound is honest") {
  const auto& e = engine192();
  for (const char* a : {"0.5", "0.9", "5"}) {
    const auto small = evaluate_sumrule(params(a, "0.5", 20), zeros100(), e);
    const auto big = evaluate_sumrule(params(a, "0.5", 100), zeros100(), e);
    // The true remainder after 20 zeros is at least approximated by the next 80.
    CHECK(abs(small.lhs_zero_sum - big.lhs_zero_sum) <= *small.extra("zero_sum_tail"));
    CHECK(abs(big.residual) <= big.tail_bound * 10L);

    auto p = params(a, "0.5");
    p.n_trivial = 12;
    p.n_halfint = 2;
    const SeriesValue t_small = trivial_series(p, e);
    const SeriesValue h_small = half_integer_series(p, e);
    p.n_trivial = 60;
    p.n_halfint = 10;
    CHECK(abs(trivial_series(p, e).value - t_small.value) <= t_small.tail_bound);
    CHECK(abs(half_integer_series(p, e).value - h_small.value) <= h_small.tail_bound);
  }
}

TEST_CASE("property: zero-sum order does not matter") {
  const auto& e = engine192();
  const auto& z = zeros100();
  const auto p = params("0.9", "0.75");
  const Real a = p.a, x = p.x;
  Real forward(ctx192().working_bits()), backward(ctx192().working_bits());
  for (long k = 1; k <= 100; ++k) forward += zero_sum_term(z.zero(k), a, x, e).re();
  for (long k = 100; k >= 1; --k) backward += zero_sum_term(z.zero(k), a, x, e).re();
  CHECK(abs(forward - backward) <= ctx192().target_tol() * 10L * max(Real(1L, 64), abs(forward)));
  CHECK(abs(forward - zero_sum_lhs(p, z, e).value) <= ctx192().target_tol() * 10L * max(Real(1L, 64), abs(forward)));
}

TEST_CASE("special case a = 1/2 in its published form") {
  const auto& e = engine192();
  const Real x = wb_real("0.5");
  const auto r = evaluate_rh_form(x, zeros100(), e);
  CHECK(r.passed);
  const Real* factor = r.extra("k_series_factor");
  REQUIRE(factor != nullptr);
  CHECK(abs(*factor - sqrt(sqrt(x))) < 1e-40);
  CHECK(rel_err(sqrt(sqrt(x)), wb_real(ref::pow_half_quarter)) < 1e-55);

  // Single-term check at the first zero.
  const auto one = evaluate_rh_form(x, zeros100(), e, 1);
  const auto gen = evaluate_sumrule(params("0.5", "0.5", 1), zeros100(), e);
  CHECK(abs(one.lhs_zero_sum - gen.lhs_zero_sum) < 1e-45);
}

TEST_CASE("prime-sum form at a = 1/2") {
  const auto& e = engine192();
  const MangoldtTable t = mangoldt_sieve(100'000);
  const auto r = evaluate_guillera(wb_real("0.5"), zeros100(), t, e, 50);
  CHECK(r.passed);
  CHECK(abs(r.residual) < 1e-3);
  CHECK(abs(*r.extra("residual_uncorrected")) < 1e-2);
  const Real tail = guillera_lambda_tail(100'000, wb_real("0.5"), ctx192());
  CHECK(tail > 0.0);
  CHECK(tail < 0.01);
  CHECK_THROWS_AS(evaluate_guillera(wb_real("1"), zeros100(), t, e, 10), ParameterError);
}

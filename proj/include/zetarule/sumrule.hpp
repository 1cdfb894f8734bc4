#pragma once

// A two-parameter sum rule over the critical zeros.
//
// The starting point is
//
//   (1/2 pi i) Int_{-i oo}^{i oo} x^{s(1-s)} / (cos(pi s) zeta(4a s(1-s))) ds
//       = x^{1/4} / (2 pi zeta(a)),
//
// and closing the contour to the right picks up three pole families:
// half-integers s = k + 1/2, the images of the trivial zeros
// s_n = (1 + sqrt((2n+a)/a))/2, and the images of each critical zero
// s_rho = (1 + sqrt(1 - rho/a))/2 together with its conjugate.
//
// Sign and normalization conventions (checked numerically by the tests):
//  * the contour integral equals minus the sum of right half-plane residues;
//  * the published form of the identity is the residue identity multiplied
//    by 2 sqrt(a) x^{-1/4};
//  * the half-integer series enters with a plus sign,
//      + (2 sqrt(a)/pi) sum_{k>=1} (-1)^k x^{-k^2} / zeta(a(1-4k^2)),
//    which is the opposite of the sign as usually printed.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zetarule/arith.hpp"
#include "zetarule/errors.hpp"
#include "zetarule/numctx.hpp"
#include "zetarule/zeros.hpp"
#include "zetarule/zeta.hpp"

namespace zetarule {

inline constexpr double kMaxA = 40.0;

/// (2n+a)/a is an even square (m = 2k): the trivial-zero pole s_n coincides
/// with the half-integer pole k + 1/2 and both printed series terms blow up.
class ResonanceError : public ParameterError {
 public:
  ResonanceError(const std::string& what, long n, long k) : ParameterError(what), n_(n), k_(k) {}
  long n() const { return n_; }
  long k() const { return k_; }

 private:
  long n_, k_;
};

/// The integrand was evaluated at (or numerically on top of) a pole.
class SingularityError : public Error {
 public:
  using Error::Error;
};

struct SumRuleParams {
  Real a;
  Real x;
  long n_zeros = 100;
  long n_trivial = 80;
  long n_halfint = 12;

  /// Parses decimals at the context's working precision.
  static SumRuleParams make(std::string_view a, std::string_view x, const NumericContext& ctx);
  /// Throws ParameterError for a outside (0, 40], a = 1, x outside (0, 1)
  /// or non-positive truncations.
  void validate() const;
};

/// First (n, k) with (2n+a)/a = (2k)^2 and n <= n_max, if any.
std::optional<std::pair<long, long>> find_resonance(const Real& a, long n_max);

enum class PoleFamily { trivial_zero, half_integer, critical_zero, critical_zero_conjugate, merged };

std::string to_string(PoleFamily f);

struct PoleSite {
  PoleFamily family = PoleFamily::half_integer;
  long index = 0;          ///< n, k or zero index; k for merged sites
  long partner_index = 0;  ///< n for merged sites
  int order = 1;
  Complex location;
  /// Residue of the integrand derived from its local expansion at the pole.
  Complex analytic_residue;
  /// The same residue reconstructed from the matching term of the published
  /// identity (undefined for merged sites, where that term is singular).
  std::optional<Complex> printed_residue;
};

/// x^{s(1-s)} / (cos(pi s) zeta(4a s(1-s))).
Complex integrand(const Complex& s, const SumRuleParams& p, const ZetaEngine& engine);

struct IntegralResult {
  Complex value;
  Real closed_form;  ///< x^{1/4} / (2 pi zeta(a))
  Real half_width;   ///< T
  long points = 0;
  int levels = 0;
};

/// Trapezoid rule on s = it, |t| <= T, halving the step until two levels
/// agree to target_tol.
IntegralResult contour_integral(const SumRuleParams& p, const ZetaEngine& engine, int jobs = 1);

/// Families: trivial_zero n = 1..n_trivial, half_integer k = 0..n_halfint,
/// critical zeros 1..n_zeros with conjugates. Coincident trivial-zero and
/// half-integer poles become one double-pole `merged` site.
std::vector<PoleSite> pole_catalog(const SumRuleParams& p, const ZeroStore& store, const ZetaEngine& engine);

struct ResidueResult {
  Complex value;
  Real radius;
  long points = 0;
};

/// Circle quadrature around the site; the radius is a quarter of the
/// distance to the nearest other catalog site, capped at 1e-2.
ResidueResult numeric_residue(const PoleSite& site, const std::vector<PoleSite>& catalog, const SumRuleParams& p,
                              const ZetaEngine& engine);
ResidueResult numeric_residue(const PoleSite& site, const Real& radius, const SumRuleParams& p,
                              const ZetaEngine& engine);

struct SeriesValue {
  Real value;
  Real tail_bound;
};

/// One term of the zero sum in the sinh form
///   -x^{(rho-a)/(4a)} / (sqrt(rho-a) sinh((pi/2) sqrt((rho-a)/a)) zeta'(rho)).
Complex zero_sum_term(const ZeroRecord& z, const Real& a, const Real& x, const ZetaEngine& engine);
/// The same term as usually printed, with sin and sqrt(a - rho).
Complex zero_sum_term_printed(const ZeroRecord& z, const Real& a, const Real& x, const ZetaEngine& engine);

SeriesValue zero_sum_lhs(const SumRuleParams& p, const ZeroStore& store, const ZetaEngine& engine);
Real trivial_series_term(long n, const Real& a, const Real& x, const ZetaEngine& engine);
SeriesValue trivial_series(const SumRuleParams& p, const ZetaEngine& engine);
/// (2 sqrt(a)/pi) (-1)^k x^{-k^2} / zeta(a(1-4k^2)); k = 0 gives 2 sqrt(a)/(pi zeta(a)).
Real half_integer_series_term(long k, const Real& a, const Real& x, const ZetaEngine& engine);
SeriesValue half_integer_series(const SumRuleParams& p, const ZetaEngine& engine);

struct EvaluationReport {
  std::string kind;
  Real a;
  Real x;
  Real lhs_zero_sum;
  Real rhs_const;
  Real rhs_n_series;
  Real rhs_k_series;
  Real residual;
  Real tail_bound;
  long zeros_used = 0;
  long wall_time_ms = 0;
  bool passed = false;
  std::string criterion;
  std::string normalization;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, Real>> extras;

  const Real* extra(const std::string& name) const;
};

EvaluationReport evaluate_integral(const SumRuleParams& p, const ZetaEngine& engine, int jobs = 1);
EvaluationReport evaluate_sumrule(const SumRuleParams& p, const ZeroStore& store, const ZetaEngine& engine);
EvaluationReport evaluate_rh_form(const Real& x, const ZeroStore& store, const ZetaEngine& engine,
                                  long n_zeros = 100, long n_trivial = 80, long n_halfint = 12);
EvaluationReport evaluate_guillera(const Real& x, const ZeroStore& store, const MangoldtTable& mangoldt,
                                   const ZetaEngine& engine, long n_zeros = 100);

/// Closed form of Int_N^oo sqrt(t) / ((t+x)(1+tx)) dt times (1-x^2)/pi.
Real guillera_lambda_tail(long n, const Real& x, const NumericContext& ctx);

struct ClosureOptions {
  bool include_trivial = true;
  bool include_half_integer = true;
  bool include_zeros = true;
  int jobs = 1;
};

struct FamilySum {
  PoleFamily family;
  Complex sum;
  Real tail_bound;  ///< in residue units
  long sites = 0;
};

struct ClosureReport {
  Real a, x;
  Complex integral;
  Complex residue_sum;
  int orientation = 0;  ///< integral = orientation * residue_sum
  Real residual;        ///< |integral - orientation * residue_sum|
  Real combined_tail;
  /// published constant / -(integral + Res_{1/2}); expected 2 sqrt(a) x^{-1/4}
  Real normalization_factor;
  std::vector<FamilySum> families;
  bool passed = false;
};

ClosureReport verify_residue_theorem(const SumRuleParams& p, const ZeroStore& store, const ZetaEngine& engine,
                                     const ClosureOptions& opts = {});

struct ArbitrationRow {
  PoleSite site;
  Complex numeric;
  Real rel_error;  ///< |numeric - analytic| / |analytic|
  std::optional<Real> printed_rel_error;
};

/// numeric_residue against analytic_residue for sites with n <= max_n,
/// k <= max_k and zero index <= max_zero.
std::vector<ArbitrationRow> arbitrate_residues(const SumRuleParams& p, const ZeroStore& store,
                                               const ZetaEngine& engine, long max_n, long max_k, long max_zero,
                                               int jobs = 1);

}  // namespace zetarule

#pragma once

// Riemann zeta machinery at arbitrary precision: Euler-Maclaurin summation
// for Re s >= sigma0, the functional equation to the left of it, Stirling
// log-gamma/digamma, the Riemann-Siegel theta function and Hardy's Z.

#include <memory>
#include <vector>

#include "zetarule/bernoulli.hpp"
#include "zetarule/errors.hpp"
#include "zetarule/numctx.hpp"

namespace zetarule {

struct ZetaEngineConfig {
  int em_terms = 10;             ///< smallest Euler-Maclaurin cutoff N tried
  int em_corrections = 2;        ///< minimum number of Bernoulli corrections M
  double reflection_threshold = 0.5;
  int max_em_terms = 1 << 17;
  int max_corrections = 160;     ///< size of the eager Bernoulli cache
};

/// One Euler-Maclaurin evaluation plan: partial sum to N-1 plus M corrections.
struct EmPlan {
  int n_terms = 0;
  int corrections = 0;
};

class ZetaEngine {
 public:
  explicit ZetaEngine(const NumericContext& ctx, ZetaEngineConfig cfg = {});

  const NumericContext& context() const { return ctx_; }
  const ZetaEngineConfig& config() const { return cfg_; }

  Complex zeta(const Complex& s) const;
  Real zeta(const Real& s) const;
  Complex zeta_deriv(const Complex& s) const;
  Real zeta_deriv(const Real& s) const;

  /// Closed form zeta'(-2n) = (-1)^n zeta(2n+1) (2n)! / (2 (2 pi)^{2n}), n >= 1.
  Real zeta_deriv_neg_even(int n) const;
  /// zeta''(-2n) from the differentiated functional equation, n >= 1.
  Real zeta_second_deriv_neg_even(int n) const;

  /// A logarithm of zeta(s) (not necessarily the principal one) assembled
  /// from the reflection factors when Re s < sigma0, so that huge values
  /// at large negative arguments never need to be formed.
  Complex log_zeta(const Complex& s) const;

  Complex log_gamma(const Complex& z) const;
  Complex digamma(const Complex& z) const;

  Real riemann_siegel_theta(const Real& t) const;
  Real riemann_siegel_theta_deriv(const Real& t) const;
  Real hardy_z(const Real& t) const;
  /// Z'(t) given zeta and zeta' already evaluated at 1/2 + it.
  Real hardy_z_deriv(const Real& t, const Complex& zeta_val, const Complex& zeta_prime) const;

  /// Cheapest plan meeting the remainder estimate at s (value or derivative).
  EmPlan plan_for(const Complex& s, bool derivative) const;
  /// Direct Euler-Maclaurin at s with a fixed plan (no reflection), returning
  /// zeta(s) and, when requested, zeta'(s) in `deriv`.
  Complex zeta_em(const Complex& s, const EmPlan& plan, Complex* deriv = nullptr) const;

 private:
  bool use_reflection(const Complex& s) const;
  Real log_int(long n) const;
  Complex chi_log_parts(const Complex& s) const;

  NumericContext ctx_;
  ZetaEngineConfig cfg_;
  std::shared_ptr<const BernoulliTable> bernoulli_;
  std::vector<Real> em_coeff_;        // B_{2j} / (2j)!
  std::vector<Real> stirling_coeff_;  // B_{2j} / (2j (2j-1))
  std::vector<Real> digamma_coeff_;   // B_{2j} / (2j)
  std::vector<Real> log_cache_;       // ln n, n < log_cache_.size()
  Real pi_, ln2_, lnpi_, ln2pi_, euler_;
};

}  // namespace zetarule

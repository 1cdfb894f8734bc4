#include "zetarule/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace zetarule {

namespace {

constexpr int kLogCacheSize = 4096;

Real from_rational(const mpq_class& q, Precision prec) {
  Real r(prec);
  mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real factorial(unsigned long n, Precision prec) {
  Real r(prec);
  mpfr_fac_ui(r.raw(), n, MPFR_RNDN);
  return r;
}

double log_abs(double re, double im) { return 0.5 * std::log(re * re + im * im); }

}  // namespace

ZetaEngine::ZetaEngine(const NumericContext& ctx, ZetaEngineConfig cfg)
    : ctx_(ctx),
      cfg_(cfg),
      bernoulli_(std::make_shared<const BernoulliTable>(std::max(cfg.max_corrections, 8))) {
  if (cfg_.em_terms < 10 || cfg_.em_corrections < 2) {
    throw ParameterError("ZetaEngineConfig requires em_terms >= 10 and em_corrections >= 2");
  }
  const Precision wb = ctx_.working_bits();
  const int kmax = bernoulli_->max_k();
  em_coeff_.reserve(static_cast<size_t>(kmax));
  stirling_coeff_.reserve(static_cast<size_t>(kmax));
  digamma_coeff_.reserve(static_cast<size_t>(kmax));
  for (int j = 1; j <= kmax; ++j) {
    const Real b = from_rational(bernoulli_->b2k(j), wb);
    em_coeff_.push_back(b / factorial(static_cast<unsigned long>(2 * j), wb));
    stirling_coeff_.push_back(b / (static_cast<long>(2 * j) * (2 * j - 1)));
    digamma_coeff_.push_back(b / static_cast<long>(2 * j));
  }
  log_cache_.reserve(kLogCacheSize);
  log_cache_.emplace_back(wb);  // ln 0 placeholder
  log_cache_.emplace_back(wb);  // ln 1 = 0
  for (long n = 2; n < kLogCacheSize; ++n) log_cache_.push_back(log(Real(n, wb)));
  pi_ = constant(Constant::pi, ctx_);
  ln2_ = constant(Constant::ln2, ctx_);
  euler_ = constant(Constant::euler_gamma, ctx_);
  lnpi_ = log(pi_);
  ln2pi_ = ln2_ + lnpi_;
}

Real ZetaEngine::log_int(long n) const {
  if (n < static_cast<long>(log_cache_.size())) return log_cache_[static_cast<size_t>(n)];
  return log(Real(n, ctx_.working_bits()));
}

bool ZetaEngine::use_reflection(const Complex& s) const {
  if (!(s.re() < cfg_.reflection_threshold)) return false;
  // Near s = 0 the reflection pairs sin(pi s/2) -> 0 with the pole of
  // zeta(1-s); the direct series is well conditioned there.
  return abs(s) > 0.25;
}

EmPlan ZetaEngine::plan_for(const Complex& s, bool derivative) const {
  const double sigma = s.re().to_double();
  const double t = s.im().to_double();
  const double tol_ln = -(ctx_.precision_bits() + 16) * std::numbers::ln2;
  const int jmax = static_cast<int>(em_coeff_.size());

  std::vector<double> lnc(em_coeff_.size());
  for (size_t j = 0; j < em_coeff_.size(); ++j) {
    lnc[j] = std::log(std::fabs(em_coeff_[j].to_double()));
  }

  double n = cfg_.em_terms;
  while (n <= cfg_.max_em_terms) {
    const double ln_n = std::log(n);
    const double dfac = derivative ? std::log(ln_n + 1.0) : 0.0;
    // ln|s|; the derivative of the leading s factor does not vanish at s = 0
    double acc = derivative ? std::max(log_abs(sigma, t), 0.0) : log_abs(sigma, t);
    for (int j = 1; j < jmax; ++j) {
      // log-magnitude of the j-th correction term
      const double lt = lnc[static_cast<size_t>(j - 1)] + acc - (sigma + 2 * j - 1) * ln_n + dfac;
      const double denom = std::max(sigma + 2 * j - 1, 1.0);
      const double growth = std::max(0.0, log_abs(sigma + 2 * j - 1, t) - std::log(denom));
      if (j - 1 >= cfg_.em_corrections && lt + growth < tol_ln) {
        return {static_cast<int>(n), j - 1};
      }
      acc += log_abs(sigma + 2 * j - 1, t) + log_abs(sigma + 2 * j, t);
    }
    n = n < 40 ? n + 5 : std::ceil(n * 1.12);
  }
  throw PrecisionError("Euler-Maclaurin remainder cannot reach tolerance at s = " + s.re().to_string(12) +
                       " + " + s.im().to_string(12) + "i within " + std::to_string(cfg_.max_em_terms) +
                       " terms");
}

Complex ZetaEngine::zeta_em(const Complex& s, const EmPlan& plan, Complex* deriv) const {
  const Precision wb = ctx_.working_bits();
  const Complex sw(Real(s.re(), wb), Real(s.im(), wb));
  if (sw.re() == 1.0 && sw.im().is_zero()) throw PoleError("zeta has a pole at s = 1");
  const long n_cut = plan.n_terms;

  Complex sum(Real(1L, wb), Real(wb));
  Complex dsum(wb);
  for (long n = 2; n < n_cut; ++n) {
    const Real ln = log_int(n);
    Complex term = Complex::polar(exp(-(sw.re() * ln)), -(sw.im() * ln));
    if (deriv != nullptr) dsum -= term * ln;
    sum += term;
  }

  const Real ln_n = log_int(n_cut);
  const Real big_n(n_cut, wb);
  const Complex n_pow = Complex::polar(exp(-(sw.re() * ln_n)), -(sw.im() * ln_n));  // N^{-s}
  const Complex s_minus_1 = sw - 1L;
  const Complex tail = n_pow * big_n / s_minus_1;  // N^{1-s} / (s-1)
  sum += tail;
  sum += n_pow / 2L;
  if (deriv != nullptr) {
    dsum -= tail * ln_n;
    dsum -= tail / s_minus_1;
    dsum -= n_pow * ln_n / 2L;
  }

  Complex poch = sw;                // s (s+1) ... (s+2j-2)
  Complex poch_d(Real(1L, wb));     // d/ds of poch
  Complex pw = n_pow / big_n;       // N^{-s-2j+1}
  const Real inv_n2 = Real(1L, wb) / (big_n * big_n);
  for (int j = 1; j <= plan.corrections; ++j) {
    const Real& c = em_coeff_[static_cast<size_t>(j - 1)];
    sum += poch * pw * c;
    if (deriv != nullptr) dsum += (poch_d - poch * ln_n) * pw * c;
    const Complex a = sw + static_cast<long>(2 * j - 1);
    const Complex b = sw + static_cast<long>(2 * j);
    const Complex q = a * b;
    const Complex dq = a + b;
    poch_d = poch_d * q + poch * dq;
    poch = poch * q;
    pw *= inv_n2;
  }
  if (deriv != nullptr) *deriv = dsum;
  return sum;
}

Complex ZetaEngine::chi_log_parts(const Complex& s) const {
  // s ln 2 + (s - 1) ln pi + log Gamma(1 - s)
  return s * ln2_ + (s - 1L) * lnpi_ + log_gamma(1L - s);
}

Complex ZetaEngine::zeta(const Complex& s) const {
  if (s.re() == 1.0 && s.im().is_zero()) throw PoleError("zeta has a pole at s = 1");
  if (use_reflection(s)) {
    const Complex one_minus = 1L - s;
    const Complex z1 = zeta_em(one_minus, plan_for(one_minus, false));
    return exp(chi_log_parts(s)) * sin(s * pi_ / 2L) * z1;
  }
  return zeta_em(s, plan_for(s, false));
}

Real ZetaEngine::zeta(const Real& s) const { return zeta(Complex(s)).re(); }

Complex ZetaEngine::zeta_deriv(const Complex& s) const {
  if (s.re() == 1.0 && s.im().is_zero()) throw PoleError("zeta has a pole at s = 1");
  Complex d;
  if (use_reflection(s)) {
    const Complex one_minus = 1L - s;
    Complex d1;
    const Complex z1 = zeta_em(one_minus, plan_for(one_minus, true), &d1);
    const Complex e = exp(chi_log_parts(s));
    const Complex half_arg = s * pi_ / 2L;
    const Complex sn = sin(half_arg);
    const Complex chi = e * sn;
    const Complex chi_d = e * (cos(half_arg) * pi_ / 2L + sn * (ln2pi_ - digamma(one_minus)));
    return chi_d * z1 - chi * d1;
  }
  zeta_em(s, plan_for(s, true), &d);
  return d;
}

Real ZetaEngine::zeta_deriv(const Real& s) const { return zeta_deriv(Complex(s)).re(); }

Real ZetaEngine::zeta_deriv_neg_even(int n) const {
  if (n < 1) throw ParameterError("zeta'(-2n) closed form needs n >= 1");
  const Precision wb = ctx_.working_bits();
  const Real z = zeta(Real(2L * n + 1, wb));
  Real v = z * factorial(static_cast<unsigned long>(2 * n), wb) /
           (pow(pi_ * 2L, Real(2L * n, wb)) * 2L);
  return n % 2 == 0 ? v : -v;
}

Real ZetaEngine::zeta_second_deriv_neg_even(int n) const {
  if (n < 1) throw ParameterError("zeta''(-2n) needs n >= 1");
  const Precision wb = ctx_.working_bits();
  // psi(2n+1) = H_{2n} - gamma
  Real harmonic(wb);
  for (long j = 1; j <= 2L * n; ++j) harmonic += Real(1L, wb) / j;
  const Real psi = harmonic - euler_;
  const Real arg(2L * n + 1, wb);
  const Real log_deriv = ln2pi_ - psi - zeta_deriv(arg) / zeta(arg);
  return zeta_deriv_neg_even(n) * log_deriv * 2L;
}

Complex ZetaEngine::log_zeta(const Complex& s) const {
  if (!use_reflection(s)) return log(zeta(s));
  const Complex one_minus = 1L - s;
  const Complex z1 = zeta_em(one_minus, plan_for(one_minus, false));
  return chi_log_parts(s) + log(sin(s * pi_ / 2L)) + log(z1);
}

namespace {

// Shift needed so that |z + m| is large enough for the asymptotic series and
// z + m stays away from the negative real axis.
long stirling_shift(const Complex& z, double radius) {
  const double re = z.re().to_double();
  const double im = std::fabs(z.im().to_double());
  long m = 0;
  if (re < 0.0) m = static_cast<long>(std::ceil(-re));
  if (im < radius) {
    const double need = std::sqrt(radius * radius - im * im) - re;
    m = std::max(m, static_cast<long>(std::ceil(need)));
  }
  return m;
}

}  // namespace

Complex ZetaEngine::log_gamma(const Complex& z) const {
  const Precision wb = ctx_.working_bits();
  const double radius = static_cast<double>(wb) * std::numbers::ln2 / (2.0 * std::numbers::pi) + 2.0;
  const long m = stirling_shift(z, radius);

  Complex w(Real(z.re(), wb), Real(z.im(), wb));
  Complex shift_sum(wb);
  for (long j = 0; j < m; ++j) {
    shift_sum += log(w);
    w = w + 1L;
  }
  const Complex lw = log(w);
  Complex result = (w - Real(0.5, wb)) * lw - w + ln2pi_ / 2L;

  const Complex inv = Complex(Real(1L, wb)) / w;
  const Complex inv2 = inv * inv;
  Complex pw = inv;
  const Real eps = ldexp(Real(1L, wb), -static_cast<long>(wb));
  for (size_t k = 0; k < stirling_coeff_.size(); ++k) {
    const Complex term = pw * stirling_coeff_[k];
    result += term;
    if (abs(term) < eps) break;
    pw *= inv2;
  }
  return result - shift_sum;
}

Complex ZetaEngine::digamma(const Complex& z) const {
  const Precision wb = ctx_.working_bits();
  const double radius = static_cast<double>(wb) * std::numbers::ln2 / (2.0 * std::numbers::pi) + 2.0;
  const long m = stirling_shift(z, radius);

  Complex w(Real(z.re(), wb), Real(z.im(), wb));
  Complex shift_sum(wb);
  for (long j = 0; j < m; ++j) {
    shift_sum += Complex(Real(1L, wb)) / w;
    w = w + 1L;
  }
  const Complex inv = Complex(Real(1L, wb)) / w;
  const Complex inv2 = inv * inv;
  Complex result = log(w) - inv / 2L;
  Complex pw = inv2;
  const Real eps = ldexp(Real(1L, wb), -static_cast<long>(wb));
  for (size_t k = 0; k < digamma_coeff_.size(); ++k) {
    const Complex term = pw * digamma_coeff_[k];
    result -= term;
    if (abs(term) < eps) break;
    pw *= inv2;
  }
  return result - shift_sum;
}

Real ZetaEngine::riemann_siegel_theta(const Real& t) const {
  if (!(t > 0.0)) throw ParameterError("riemann_siegel_theta needs t > 0");
  const Precision wb = ctx_.working_bits();
  const Real tw(t, wb);
  const Complex z(Real(0.25, wb), tw / 2L);
  return log_gamma(z).im() - tw * lnpi_ / 2L;
}

Real ZetaEngine::riemann_siegel_theta_deriv(const Real& t) const {
  if (!(t > 0.0)) throw ParameterError("riemann_siegel_theta needs t > 0");
  const Precision wb = ctx_.working_bits();
  const Complex z(Real(0.25, wb), Real(t, wb) / 2L);
  return (digamma(z).re() - lnpi_) / 2L;
}

Real ZetaEngine::hardy_z(const Real& t) const {
  if (!(t > 0.0)) throw ParameterError("hardy_z needs t > 0");
  const Precision wb = ctx_.working_bits();
  const Complex s(Real(0.5, wb), Real(t, wb));
  const Complex z = zeta(s);
  const Complex rotated = Complex::polar(Real(1L, wb), riemann_siegel_theta(t)) * z;
  const Real bound = ctx_.target_tol() * 1000L * max(Real(1L, wb), abs(z));
  if (abs(rotated.im()) > bound) {
    throw ConsistencyError("Hardy Z has imaginary part " + rotated.im().to_string(6) + " at t = " +
                           t.to_string(20));
  }
  return rotated.re();
}

Real ZetaEngine::hardy_z_deriv(const Real& t, const Complex& zeta_val, const Complex& zeta_prime) const {
  const Precision wb = ctx_.working_bits();
  const Complex rot = Complex::polar(Real(1L, wb), riemann_siegel_theta(t));
  const Complex inner = zeta_val * riemann_siegel_theta_deriv(t) + zeta_prime;
  // d/dt [e^{i theta} zeta(1/2 + it)] = i e^{i theta} (theta' zeta + zeta')
  return -(rot * inner).im();
}

}  // namespace zetarule

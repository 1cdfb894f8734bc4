#include "zetarule/numctx.hpp"

#include <cmath>
#include <cstring>
#include <memory>

namespace zetarule {

namespace {

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

Precision wider(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

using Unary = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

Real apply(Unary f, const Real& x) {
  Real r(x.precision());
  f(r.raw(), x.raw(), kRnd);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Real

Real::Real(Precision prec) {
  mpfr_init2(v_, prec);
  mpfr_set_zero(v_, 1);
}

Real::Real(double v, Precision prec) {
  mpfr_init2(v_, prec);
  mpfr_set_d(v_, v, kRnd);
}

Real::Real(long v, Precision prec) {
  mpfr_init2(v_, prec);
  mpfr_set_si(v_, v, kRnd);
}

Real::Real(std::string_view decimal, Precision prec) {
  mpfr_init2(v_, prec);
  std::string s(decimal);
  if (s.empty() || mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  }
}

Real::Real(const Real& other, Precision prec) {
  mpfr_init2(v_, prec);
  mpfr_set(v_, other.v_, kRnd);
}

Real::Real(const Real& other) {
  mpfr_init2(v_, other.precision());
  mpfr_set(v_, other.v_, kRnd);
}

Real::Real(Real&& other) noexcept {
  std::memcpy(v_, other.v_, sizeof(mpfr_t));
  other.v_->_mpfr_d = nullptr;
}

Real& Real::operator=(const Real& other) {
  if (this == &other) return *this;
  if (v_->_mpfr_d == nullptr) {
    mpfr_init2(v_, other.precision());
  } else if (precision() != other.precision()) {
    mpfr_set_prec(v_, other.precision());
  }
  mpfr_set(v_, other.v_, kRnd);
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() {
  if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return sign() > 0 ? "inf" : "-inf";
  if (is_zero()) return "0";
  mpfr_exp_t e = 0;
  std::unique_ptr<char, void (*)(char*)> buf(
      mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(std::max(digits, 1)), v_, kRnd),
      mpfr_free_str);
  std::string m(buf.get());
  std::string out;
  if (m.front() == '-') {
    out.push_back('-');
    m.erase(0, 1);
  }
  out.push_back(m[0]);
  if (m.size() > 1) {
    out.push_back('.');
    out.append(m, 1);
  }
  out.push_back('e');
  const long exp10 = static_cast<long>(e) - 1;
  out += exp10 < 0 ? "-" : "+";
  out += std::to_string(std::labs(exp10));
  return out;
}

std::string Real::to_string() const {
  const auto digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * std::log10(2.0))) + 1;
  return to_string(digits);
}

std::string Real::to_fixed(int significant_digits) const {
  if (!is_finite()) return to_string(1);
  if (is_zero()) return "0";
  mpfr_exp_t e = 0;
  std::unique_ptr<char, void (*)(char*)> buf(
      mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(std::max(significant_digits, 1)), v_, kRnd),
      mpfr_free_str);
  std::string m(buf.get());
  std::string out;
  if (m.front() == '-') {
    out.push_back('-');
    m.erase(0, 1);
  }
  const long int_digits = static_cast<long>(e);
  if (int_digits <= 0) {
    out += "0.";
    out.append(static_cast<size_t>(-int_digits), '0');
    out += m;
  } else if (int_digits >= static_cast<long>(m.size())) {
    out += m;
    out.append(static_cast<size_t>(int_digits) - m.size(), '0');
  } else {
    out.append(m, 0, static_cast<size_t>(int_digits));
    out.push_back('.');
    out.append(m, static_cast<size_t>(int_digits));
  }
  return out;
}

long Real::exponent2() const {
  if (!mpfr_regular_p(v_)) return std::numeric_limits<long>::min() / 2;
  return mpfr_get_exp(v_);
}

Real Real::operator-() const { return apply(mpfr_neg, *this); }

Real& Real::operator+=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), kRnd);
  mpfr_add(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), kRnd);
  mpfr_sub(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), kRnd);
  mpfr_mul(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  if (o.is_zero()) throw DomainError("div", "division by zero");
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), kRnd);
  mpfr_div(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator*=(long k) {
  mpfr_mul_si(v_, v_, k, kRnd);
  return *this;
}

Real& Real::operator/=(long k) {
  if (k == 0) throw DomainError("div", "division by zero");
  mpfr_div_si(v_, v_, k, kRnd);
  return *this;
}

Real operator+(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_add(r.raw(), a.raw(), b.raw(), kRnd);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_sub(r.raw(), a.raw(), b.raw(), kRnd);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_mul(r.raw(), a.raw(), b.raw(), kRnd);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  if (b.is_zero()) throw DomainError("div", "division by zero");
  Real r(wider(a, b));
  mpfr_div(r.raw(), a.raw(), b.raw(), kRnd);
  return r;
}
Real operator+(const Real& a, long b) {
  Real r(a.precision());
  mpfr_add_si(r.raw(), a.raw(), b, kRnd);
  return r;
}
Real operator-(const Real& a, long b) {
  Real r(a.precision());
  mpfr_sub_si(r.raw(), a.raw(), b, kRnd);
  return r;
}
Real operator*(const Real& a, long b) {
  Real r(a.precision());
  mpfr_mul_si(r.raw(), a.raw(), b, kRnd);
  return r;
}
Real operator/(const Real& a, long b) {
  if (b == 0) throw DomainError("div", "division by zero");
  Real r(a.precision());
  mpfr_div_si(r.raw(), a.raw(), b, kRnd);
  return r;
}
Real operator+(long a, const Real& b) { return b + a; }
Real operator-(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_sub(r.raw(), a, b.raw(), kRnd);
  return r;
}
Real operator*(long a, const Real& b) { return b * a; }
Real operator/(long a, const Real& b) {
  if (b.is_zero()) throw DomainError("div", "division by zero");
  Real r(b.precision());
  mpfr_si_div(r.raw(), a, b.raw(), kRnd);
  return r;
}
Real operator*(const Real& a, double b) {
  Real r(a.precision());
  mpfr_mul_d(r.raw(), a.raw(), b, kRnd);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.raw(), b.raw())) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.raw(), b.raw());
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}
std::partial_ordering operator<=>(const Real& a, double b) {
  if (mpfr_nan_p(a.raw()) || std::isnan(b)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_d(a.raw(), b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }
bool operator==(const Real& a, double b) { return (a <=> b) == std::partial_ordering::equivalent; }

Real abs(const Real& x) { return apply(mpfr_abs, x); }

Real sqrt(const Real& x) {
  if (x.sign() < 0) throw DomainError("sqrt", "negative argument");
  return apply(mpfr_sqrt, x);
}

Real exp(const Real& x) { return apply(mpfr_exp, x); }

Real log(const Real& x) {
  if (x.is_zero()) throw DomainError("log", "logarithm of zero");
  if (x.sign() < 0) throw DomainError("log", "logarithm of a negative real");
  return apply(mpfr_log, x);
}

Real pow(const Real& x, const Real& y) {
  Real r(wider(x, y));
  mpfr_pow(r.raw(), x.raw(), y.raw(), kRnd);
  return r;
}

Real sin(const Real& x) { return apply(mpfr_sin, x); }
Real cos(const Real& x) { return apply(mpfr_cos, x); }
Real tan(const Real& x) { return apply(mpfr_tan, x); }
Real atan(const Real& x) { return apply(mpfr_atan, x); }
Real sinh(const Real& x) { return apply(mpfr_sinh, x); }
Real cosh(const Real& x) { return apply(mpfr_cosh, x); }

Real atan2(const Real& y, const Real& x) {
  Real r(wider(x, y));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), kRnd);
  return r;
}

Real lgamma(const Real& x) {
  Real r(x.precision());
  int sign = 0;
  mpfr_lgamma(r.raw(), &sign, x.raw(), kRnd);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), e, kRnd);
  return r;
}

Real max(const Real& a, const Real& b) { return (a < b) ? b : a; }
Real min(const Real& a, const Real& b) { return (b < a) ? b : a; }
Real round_nearest(const Real& x) { return apply(mpfr_rint, x); }

// ------------------------------------------------------------- Complex

Complex::Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
Complex::Complex(const Real& re) : re_(re), im_(re.precision()) {}
Complex::Complex(double re, double im, Precision prec) : re_(re, prec), im_(im, prec) {}

Complex Complex::i(Precision prec) { return Complex(0.0, 1.0, prec); }

Complex Complex::polar(const Real& r, const Real& theta) {
  Real s(theta.precision()), c(theta.precision());
  mpfr_sin_cos(s.raw(), c.raw(), theta.raw(), kRnd);
  return {r * c, r * s};
}

Precision Complex::precision() const { return std::max(re_.precision(), im_.precision()); }

Complex& Complex::operator+=(const Complex& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}
Complex& Complex::operator-=(const Complex& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}
Complex& Complex::operator*=(const Complex& o) { return *this = *this * o; }
Complex& Complex::operator/=(const Complex& o) { return *this = *this / o; }
Complex& Complex::operator*=(const Real& o) {
  re_ *= o;
  im_ *= o;
  return *this;
}
Complex& Complex::operator/=(const Real& o) {
  re_ /= o;
  im_ /= o;
  return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re() + b.re(), a.im() + b.im()}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re() - b.re(), a.im() - b.im()}; }

Complex operator*(const Complex& a, const Complex& b) {
  return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}

Complex operator/(const Complex& a, const Complex& b) {
  if (b.re().is_zero() && b.im().is_zero()) throw DomainError("div", "complex division by zero");
  const Real d = norm(b);
  return {(a.re() * b.re() + a.im() * b.im()) / d, (a.im() * b.re() - a.re() * b.im()) / d};
}

Complex operator*(const Complex& a, const Real& b) { return {a.re() * b, a.im() * b}; }
Complex operator*(const Real& a, const Complex& b) { return b * a; }
Complex operator/(const Complex& a, const Real& b) { return {a.re() / b, a.im() / b}; }
Complex operator/(const Real& a, const Complex& b) { return Complex(a) / b; }
Complex operator+(const Complex& a, const Real& b) { return {a.re() + b, a.im()}; }
Complex operator-(const Complex& a, const Real& b) { return {a.re() - b, a.im()}; }
Complex operator-(const Real& a, const Complex& b) { return {a - b.re(), -b.im()}; }
Complex operator*(const Complex& a, long b) { return {a.re() * b, a.im() * b}; }
Complex operator/(const Complex& a, long b) { return {a.re() / b, a.im() / b}; }
Complex operator+(const Complex& a, long b) { return {a.re() + b, a.im()}; }
Complex operator-(const Complex& a, long b) { return {a.re() - b, a.im()}; }
Complex operator-(long a, const Complex& b) { return {a - b.re(), -b.im()}; }

Complex conj(const Complex& z) { return {z.re(), -z.im()}; }

Real norm(const Complex& z) { return z.re() * z.re() + z.im() * z.im(); }

Real abs(const Complex& z) {
  Real r(z.precision());
  mpfr_hypot(r.raw(), z.re().raw(), z.im().raw(), kRnd);
  return r;
}

Real arg(const Complex& z) {
  if (z.re().is_zero() && z.im().is_zero()) throw DomainError("arg", "argument of zero");
  // -0 imaginary parts count as +0 so the cut value is +pi.
  if (z.im().is_zero()) {
    Real y(z.im().precision());
    return atan2(y, z.re());
  }
  return atan2(z.im(), z.re());
}

Complex exp(const Complex& z) { return Complex::polar(exp(z.re()), z.im()); }

Complex log(const Complex& z) {
  if (z.re().is_zero() && z.im().is_zero()) throw DomainError("log", "logarithm of zero");
  return {log(abs(z)), arg(z)};
}

Complex sqrt(const Complex& z) {
  const Precision p = z.precision();
  if (z.re().is_zero() && z.im().is_zero()) return Complex(p);
  const Real r = abs(z);
  if (z.re().sign() >= 0) {
    Real u = sqrt(ldexp(r + z.re(), -1));
    Real v = z.im() / (u * 2);
    return {std::move(u), std::move(v)};
  }
  Real v = sqrt(ldexp(r - z.re(), -1));
  if (z.im().sign() < 0) v = -v;
  Real u = z.im() / (v * 2);
  return {std::move(u), std::move(v)};
}

Complex sin(const Complex& z) {
  Real s(z.precision()), c(z.precision());
  mpfr_sin_cos(s.raw(), c.raw(), z.re().raw(), kRnd);
  return {s * cosh(z.im()), c * sinh(z.im())};
}

Complex cos(const Complex& z) {
  Real s(z.precision()), c(z.precision());
  mpfr_sin_cos(s.raw(), c.raw(), z.re().raw(), kRnd);
  return {c * cosh(z.im()), -(s * sinh(z.im()))};
}

Complex sinh(const Complex& z) {
  Real s(z.precision()), c(z.precision());
  mpfr_sin_cos(s.raw(), c.raw(), z.im().raw(), kRnd);
  return {sinh(z.re()) * c, cosh(z.re()) * s};
}

Complex cosh(const Complex& z) {
  Real s(z.precision()), c(z.precision());
  mpfr_sin_cos(s.raw(), c.raw(), z.im().raw(), kRnd);
  return {cosh(z.re()) * c, sinh(z.re()) * s};
}

Complex pow(const Real& x, const Complex& s) {
  if (x.sign() <= 0) throw DomainError("pow", "base must be positive");
  return exp(s * log(x));
}

// ------------------------------------------------------ NumericContext

NumericContext::NumericContext(int precision_bits) : bits_(precision_bits), tol_(64) {
  if (precision_bits < kMinBits) {
    throw std::invalid_argument("precision_bits must be >= " + std::to_string(kMinBits));
  }
  tol_ = ldexp(Real(1L, working_bits()), 10 - precision_bits);
}

NumericContext::NumericContext(int precision_bits, const Real& target_tol)
    : NumericContext(precision_bits) {
  const Real floor = ldexp(Real(1L, working_bits()), -precision_bits);
  if (!(target_tol > 0.0) || target_tol < floor) {
    throw std::invalid_argument("target_tol must be positive and >= 2^-precision_bits");
  }
  tol_ = Real(target_tol, working_bits());
}

Real NumericContext::pi() const { return constant(Constant::pi, *this); }

Real constant(Constant c, const NumericContext& ctx) {
  Real r(ctx.working_bits());
  switch (c) {
    case Constant::pi:
      mpfr_const_pi(r.raw(), kRnd);
      break;
    case Constant::euler_gamma:
      mpfr_const_euler(r.raw(), kRnd);
      break;
    case Constant::ln2:
      mpfr_const_log2(r.raw(), kRnd);
      break;
  }
  return r;
}

Real constant(std::string_view name, const NumericContext& ctx) {
  if (name == "pi") return constant(Constant::pi, ctx);
  if (name == "euler_gamma" || name == "gamma") return constant(Constant::euler_gamma, ctx);
  if (name == "ln2") return constant(Constant::ln2, ctx);
  throw std::invalid_argument("unknown constant '" + std::string(name) + "'");
}

}  // namespace zetarule

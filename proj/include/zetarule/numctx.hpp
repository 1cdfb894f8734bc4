#pragma once

// Multiple-precision real and complex scalars on top of MPFR.
//
// Every value carries its own mantissa width; binary operations produce a
// result at the wider of the two operand precisions and round to nearest.
// Complex functions use principal branches with the cut on the negative
// real axis, and Im(log z) lies in (-pi, pi].

#include <mpfr.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zetarule {

using Precision = mpfr_prec_t;

/// Raised for a mathematically undefined elementary operation. The
/// operation name is kept separately so callers can report it.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string op, const std::string& what)
      : std::domain_error(op + ": " + what), op_(std::move(op)) {}
  const std::string& operation() const noexcept { return op_; }

 private:
  std::string op_;
};

class Real {
 public:
  Real() : Real(64) {}
  explicit Real(Precision prec);
  Real(double v, Precision prec);
  Real(long v, Precision prec);
  Real(int v, Precision prec) : Real(static_cast<long>(v), prec) {}
  Real(std::string_view decimal, Precision prec);
  /// Copy `other` rounded to `prec`.
  Real(const Real& other, Precision prec);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  Precision precision() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant decimal digits.
  std::string to_string(int digits) const;
  /// Shortest digit count that round-trips at this precision.
  std::string to_string() const;
  /// Positional notation ("14.1347...", "-0.000123...") with
  /// `significant_digits` significant digits.
  std::string to_fixed(int significant_digits) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Base-2 exponent e with 0.5 <= |v| / 2^e < 1; very negative for zero.
  long exponent2() const;

  Real operator-() const;
  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long k);
  Real& operator/=(long k);

 private:
  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator+(const Real& a, long b);
Real operator-(const Real& a, long b);
Real operator*(const Real& a, long b);
Real operator/(const Real& a, long b);
Real operator+(long a, const Real& b);
Real operator-(long a, const Real& b);
Real operator*(long a, const Real& b);
Real operator/(long a, const Real& b);
Real operator*(const Real& a, double b);
inline Real operator+(const Real& a, int b) { return a + static_cast<long>(b); }
inline Real operator-(const Real& a, int b) { return a - static_cast<long>(b); }
inline Real operator*(const Real& a, int b) { return a * static_cast<long>(b); }
inline Real operator/(const Real& a, int b) { return a / static_cast<long>(b); }
inline Real operator+(int a, const Real& b) { return static_cast<long>(a) + b; }
inline Real operator-(int a, const Real& b) { return static_cast<long>(a) - b; }
inline Real operator*(int a, const Real& b) { return static_cast<long>(a) * b; }
inline Real operator/(int a, const Real& b) { return static_cast<long>(a) / b; }

std::partial_ordering operator<=>(const Real& a, const Real& b);
std::partial_ordering operator<=>(const Real& a, double b);
bool operator==(const Real& a, const Real& b);
bool operator==(const Real& a, double b);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real pow(const Real& x, const Real& y);
Real sin(const Real& x);
Real cos(const Real& x);
Real tan(const Real& x);
Real atan(const Real& x);
Real atan2(const Real& y, const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real lgamma(const Real& x);
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real round_nearest(const Real& x);

class Complex {
 public:
  Complex() = default;
  explicit Complex(Precision prec) : re_(prec), im_(prec) {}
  Complex(Real re, Real im);
  /// Real axis embedding; the imaginary part is +0 at the same precision.
  Complex(const Real& re);  // NOLINT(google-explicit-constructor)
  Complex(double re, double im, Precision prec);

  static Complex i(Precision prec);
  static Complex polar(const Real& r, const Real& theta);

  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  Real& re() { return re_; }
  Real& im() { return im_; }
  Precision precision() const;

  Complex operator-() const { return {-re_, -im_}; }
  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex& operator/=(const Real& o);

 private:
  Real re_, im_;
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex operator/(const Real& a, const Complex& b);
Complex operator+(const Complex& a, const Real& b);
Complex operator-(const Complex& a, const Real& b);
Complex operator-(const Real& a, const Complex& b);
Complex operator*(const Complex& a, long b);
Complex operator/(const Complex& a, long b);
Complex operator+(const Complex& a, long b);
Complex operator-(const Complex& a, long b);
Complex operator-(long a, const Complex& b);
inline Complex operator*(long a, const Complex& b) { return b * a; }
inline Complex operator+(long a, const Complex& b) { return b + a; }
inline Complex operator*(const Complex& a, int b) { return a * static_cast<long>(b); }
inline Complex operator/(const Complex& a, int b) { return a / static_cast<long>(b); }
inline Complex operator+(const Complex& a, int b) { return a + static_cast<long>(b); }
inline Complex operator-(const Complex& a, int b) { return a - static_cast<long>(b); }
inline Complex operator-(int a, const Complex& b) { return static_cast<long>(a) - b; }
inline Complex operator*(int a, const Complex& b) { return b * static_cast<long>(a); }
inline Complex operator+(int a, const Complex& b) { return b + static_cast<long>(a); }

Complex conj(const Complex& z);
/// |z|^2 without the square root.
Real norm(const Complex& z);
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex sin(const Complex& z);
Complex cos(const Complex& z);
Complex sinh(const Complex& z);
Complex cosh(const Complex& z);
/// x^s = exp(s log x) for real x > 0.
Complex pow(const Real& x, const Complex& s);

enum class Constant { pi, euler_gamma, ln2 };

/// Working precision and evaluation tolerance shared by every computation.
/// Immutable once built.
class NumericContext {
 public:
  static constexpr int kDefaultBits = 192;
  static constexpr int kMinBits = 64;
  /// Extra mantissa bits carried through intermediate computations.
  static constexpr int kGuardBits = 32;

  explicit NumericContext(int precision_bits = kDefaultBits);
  NumericContext(int precision_bits, const Real& target_tol);

  int precision_bits() const { return bits_; }
  Precision working_bits() const { return bits_ + kGuardBits; }
  /// Defaults to 2^(10 - precision_bits).
  const Real& target_tol() const { return tol_; }
  /// Same tolerance policy at twice the precision.
  NumericContext doubled() const { return NumericContext(2 * bits_); }

  Real real(double v) const { return Real(v, working_bits()); }
  Real real(long v) const { return Real(v, working_bits()); }
  Real real(int v) const { return Real(static_cast<long>(v), working_bits()); }
  Real real(std::string_view decimal) const { return Real(decimal, working_bits()); }
  Complex complex(double re, double im) const { return Complex(re, im, working_bits()); }
  Real pi() const;

 private:
  int bits_;
  Real tol_;
};

Real constant(Constant c, const NumericContext& ctx);
/// Named lookup: "pi", "euler_gamma" (or "gamma"), "ln2".
Real constant(std::string_view name, const NumericContext& ctx);

}  // namespace zetarule

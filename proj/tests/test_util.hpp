#pragma once

#include <doctest.h>

#include <string>

#include "zetarule/numctx.hpp"

namespace doctest {
template <>
struct StringMaker<zetarule::Real> {
  static String convert(const zetarule::Real& v) { return v.to_string(12).c_str(); }
};
}  // namespace doctest

namespace testutil {

using zetarule::Complex;
using zetarule::Real;

inline Real rel_err(const Real& got, const Real& want) {
  if (want.is_zero()) return abs(got);
  return abs(got - want) / abs(want);
}

inline Real rel_err(const Complex& got, const Complex& want) {
  const Real w = abs(want);
  if (w.is_zero()) return abs(got);
  return abs(got - want) / w;
}

inline Real parse(const char* s, zetarule::Precision prec) { return Real(s, prec); }

inline Complex parse(const char* const (&s)[2], zetarule::Precision prec) {
  return Complex(Real(s[0], prec), Real(s[1], prec));
}

// 1 ulp of |v| at `prec` bits.
inline Real ulp(const Real& v, zetarule::Precision prec) {
  return ldexp(Real(1L, prec), v.exponent2() - static_cast<long>(prec));
}

inline std::string show(const Real& v) { return v.to_string(12); }

}  // namespace testutil

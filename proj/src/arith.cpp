#include "zetarule/arith.hpp"

#include <string>

namespace zetarule {

Real MangoldtTable::lambda(long n, Precision prec) const {
  if (n < 1 || n > limit_) throw ParameterError("Lambda(" + std::to_string(n) + ") is outside the sieve table");
  const std::uint32_t p = base_[static_cast<size_t>(n)];
  if (p == 0) return Real(0L, prec);
  return log(Real(static_cast<long>(p), prec));
}

MangoldtTable mangoldt_sieve(long n) {
  if (n < 2 || n > MangoldtTable::kMaxLimit) {
    throw ParameterError("sieve limit must be in [2, 10^7], got " + std::to_string(n));
  }
  MangoldtTable t;
  t.limit_ = n;
  t.base_.assign(static_cast<size_t>(n) + 1, 0);
  std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
  for (long p = 2; p <= n; ++p) {
    if (composite[static_cast<size_t>(p)]) continue;
    for (long m = p * p; m <= n; m += p) composite[static_cast<size_t>(m)] = true;
    for (long q = p; q <= n; q *= p) {
      t.base_[static_cast<size_t>(q)] = static_cast<std::uint32_t>(p);
      if (q > n / p) break;
    }
  }
  return t;
}

Real guillera_h(const Real& x, const NumericContext& ctx) {
  const Precision wb = ctx.working_bits();
  const Real xx(x, wb);
  if (!(xx > 0.0)) throw ParameterError("h(x) needs x > 0");
  if (abs(xx - 1L) < 1e-6) {
    throw ParameterError("h(x) has a removable singularity at x = 1; |x - 1| < 1e-6 is not supported");
  }
  const Real pi = constant(Constant::pi, ctx);
  const Real gamma = constant(Constant::euler_gamma, ctx);
  const Real rx = sqrt(xx);
  const Real t1 = 1L / (rx * (xx * xx - 1L));
  const Real t2 = -1L / (2L * xx - 2L);
  const Real t3 = (log(8L * pi) + gamma) / (pi * (xx + 1L));
  const Real t4 = -2L * rx * atan(1L / rx) / (pi * (xx + 1L));
  return t1 + t2 + t3 + t4;
}

}  // namespace zetarule

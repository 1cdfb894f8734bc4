#pragma once

// Von Mangoldt function by sieve, and the elementary correction term h(x)
// of Guillera's prime-sum identity.

#include <cstdint>
#include <vector>

#include "zetarule/errors.hpp"
#include "zetarule/numctx.hpp"

namespace zetarule {

class MangoldtTable {
 public:
  static constexpr long kMaxLimit = 10'000'000;

  long limit() const { return limit_; }
  /// p when n = p^k (k >= 1), 0 otherwise.
  std::uint32_t base_prime(long n) const { return base_.at(static_cast<size_t>(n)); }
  /// Lambda(n) = ln p for n = p^k, 0 otherwise, at `prec`.
  Real lambda(long n, Precision prec) const;
  Real lambda(long n, const NumericContext& ctx) const { return lambda(n, ctx.working_bits()); }

 private:
  friend MangoldtTable mangoldt_sieve(long n);
  long limit_ = 0;
  std::vector<std::uint32_t> base_;
};

/// Throws ParameterError unless 2 <= n <= 10^7.
MangoldtTable mangoldt_sieve(long n);

/// h(x) = 1/(sqrt(x)(x^2-1)) - 1/(2x-2) + (ln(8 pi)+gamma)/(pi(x+1))
///        - (2/pi) sqrt(x) arccot(sqrt(x))/(x+1).
/// The individual terms blow up at x = 1, so |x - 1| < 1e-6 is refused.
Real guillera_h(const Real& x, const NumericContext& ctx);

}  // namespace zetarule

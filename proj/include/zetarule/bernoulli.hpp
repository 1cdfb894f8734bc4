#pragma once

#include <gmpxx.h>

#include <vector>

namespace zetarule {

/// Exact even-index Bernoulli numbers B_2, B_4, ..., B_{2 max_k}, built from
/// the tangent numbers so that no rational reduction is needed along the way.
class BernoulliTable {
 public:
  explicit BernoulliTable(int max_k);

  int max_k() const { return static_cast<int>(b2k_.size()); }
  /// B_{2k}, 1 <= k <= max_k().
  const mpq_class& b2k(int k) const { return b2k_.at(static_cast<size_t>(k - 1)); }
  /// Tangent number T_k = |B_{2k}| 2^{2k} (2^{2k} - 1) / (2k).
  const mpz_class& tangent(int k) const { return tangent_.at(static_cast<size_t>(k - 1)); }

 private:
  std::vector<mpz_class> tangent_;
  std::vector<mpq_class> b2k_;
};

}  // namespace zetarule

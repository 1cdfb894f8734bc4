#include "zetarule/bernoulli.hpp"

#include <stdexcept>

namespace zetarule {

BernoulliTable::BernoulliTable(int max_k) {
  if (max_k < 1) throw std::invalid_argument("BernoulliTable needs max_k >= 1");
  const auto n = static_cast<size_t>(max_k);

  // Tangent-number triangle (Brent & Harvey): in-place, integer only.
  std::vector<mpz_class> t(n + 1);
  t[1] = 1;
  for (size_t k = 2; k <= n; ++k) t[k] = t[k - 1] * static_cast<unsigned long>(k - 1);
  for (size_t k = 2; k <= n; ++k) {
    for (size_t j = k; j <= n; ++j) {
      t[j] = t[j - 1] * static_cast<unsigned long>(j - k) + t[j] * static_cast<unsigned long>(j - k + 2);
    }
  }

  tangent_.assign(t.begin() + 1, t.end());
  b2k_.reserve(n);
  for (size_t k = 1; k <= n; ++k) {
    mpz_class four_k;
    mpz_ui_pow_ui(four_k.get_mpz_t(), 4, static_cast<unsigned long>(k));
    mpq_class b(t[k] * static_cast<unsigned long>(2 * k), four_k * (four_k - 1));
    b.canonicalize();
    if (k % 2 == 0) b = -b;
    b2k_.push_back(b);
  }
}

}  // namespace zetarule

#pragma once

// Seeded generators and independent reference computations for the tests.

#include <xeig/xeig.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace xeig::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  Rational rational(std::int64_t num_lo, std::int64_t num_hi, std::int64_t den_hi) {
    Rational q(mpz_class(static_cast<long>(integer(num_lo, num_hi))), mpz_class(static_cast<long>(integer(1, den_hi))));
    q.canonicalize();
    return q;
  }
  Rational positive_at_most_one() {
    const auto den = integer(1, 6);
    Rational q(mpz_class(static_cast<long>(integer(1, den))), mpz_class(static_cast<long>(den)));
    q.canonicalize();
    return q;
  }

  /// Random DSL family; `exact_only` restricts power laws to integer exponents.
  WeightFamily family(int depth = 2, bool exact_only = false) {
    const int kinds = depth > 0 ? 5 : 3;
    switch (integer(0, kinds - 1)) {
      case 0: {
        const Rational alpha = exact_only ? Rational(integer(1, 3)) : rational(1, 6, 2);
        return WeightFamily::power_law(alpha);
      }
      case 1:
        return WeightFamily::constant(rational(1, 9, 4));
      case 2:
        return WeightFamily::exp_tail(positive_at_most_one(), positive_at_most_one());
      case 3:
        return WeightFamily::piecewise(family(depth - 1, exact_only), family(depth - 1, exact_only), integer(-4, 4));
      default: {
        std::map<std::int64_t, Rational> values;
        const auto count = integer(0, 3);
        for (std::int64_t i = 0; i < count; ++i) values[integer(-6, 6)] = rational(1, 7, 5);
        return WeightFamily::table(std::move(values), family(depth - 1, exact_only));
      }
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Rank by plain Gauss-Jordan elimination over Q.
inline Index rref_rank(RationalMatrix m) {
  Index r = 0;
  for (Index c = 0; c < m.cols() && r < m.rows(); ++c) {
    Index p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    for (Index j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    for (Index i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c) / m(r, c);
      for (Index j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

inline RationalMatrix rational_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  const auto n = static_cast<Index>(rows.size());
  RationalMatrix m(n, static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (long v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline RationalMatrix diagonal(std::initializer_list<long> d) {
  RationalMatrix m(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (long v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

/// Direct boundedness check of |lambda|^{-n} beta(n-k+1, n) on [-N, N]: the
/// sequence is treated as bounded when its largest log value over the outer
/// quarter does not exceed the largest over the inner half by more than `slack`.
inline bool bounded_by_scan(const WeightFamily& f, double log_modulus, std::int64_t k, std::int64_t n_max, double slack) {
  std::vector<double> logw(static_cast<std::size_t>(2 * n_max + k + 2));
  const std::int64_t lo = -n_max - k - 1;
  for (std::size_t i = 0; i < logw.size(); ++i) logw[i] = log_weight(f, lo + static_cast<std::int64_t>(i));
  double inner = -1e300, outer = -1e300;
  for (std::int64_t n = -n_max; n <= n_max; ++n) {
    double s = -static_cast<double>(n) * log_modulus;
    for (std::int64_t j = n - k + 1; j <= n; ++j) s += logw[static_cast<std::size_t>(j - lo)];
    const auto a = n < 0 ? -n : n;
    if (a <= n_max / 2) inner = std::max(inner, s);
    if (a >= 3 * n_max / 4) outer = std::max(outer, s);
  }
  return outer <= inner + slack;
}

}  // namespace xeig::testing

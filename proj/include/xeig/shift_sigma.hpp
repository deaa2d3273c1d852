#pragma once

// Extended eigenvalues of the bilateral weighted shift T e_n = w_n e_{n-1}.
//
// For lambda != 0, lambda is an extended eigenvalue iff for some k >= 0 the
// two-sided sequence lambda^{-n} beta(n-k+1, n) is bounded; zero never is.
// The eigenoperator realizing order k is X e_n = lambda^{-n} beta(n-k+1, n) e_{n-k}.

#include <xeig/dense_operator.hpp>
#include <xeig/status.hpp>
#include <xeig/weights.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xeig {

struct SigmaVerdict {
  Status status = Status::Unknown;
  std::optional<std::int64_t> witness_k;
  Mode mode = Mode::Analytic;
  std::string detail;
  /// Analytic mode only: the least witness order exceeds the requested kMax.
  bool witness_beyond_kmax = false;
};

struct MembershipOptions {
  int k_max = 20;
  Mode mode = Mode::Analytic;
  std::int64_t horizon = 10000;
  double slope_tolerance = 1e-3;
  /// Moduli of floating-point lambdas within this relative distance of a
  /// critical radius are treated as lying on it.
  double modulus_tolerance = 1e-12;
};

namespace detail {

// Least k with base^k <= |lambda| (the +infinity side is bounded at order k).
inline std::optional<std::int64_t> least_plus_order(const ComplexScalar& lambda, const TailClass& plus,
                                                    double tol) {
  if (lambda.compare_modulus(1, tol) >= 0) return 0;
  if (plus.kind != TailClass::Kind::Exponential) return std::nullopt;
  const double estimate = lambda.log_abs() / plus.rate();
  auto k = static_cast<std::int64_t>(std::max(0.0, std::floor(estimate) - 1));
  while (lambda.compare_modulus(pow(plus.parameter, k), tol) < 0) ++k;
  while (k > 0 && lambda.compare_modulus(pow(plus.parameter, k - 1), tol) >= 0) --k;
  return k;
}

// Least k with |lambda| <= base^{-k} (the -infinity side is bounded at order k).
inline std::optional<std::int64_t> least_minus_order(const ComplexScalar& lambda, const TailClass& minus,
                                                     double tol) {
  if (lambda.compare_modulus(1, tol) <= 0) return 0;
  if (minus.kind != TailClass::Kind::Exponential) return std::nullopt;
  const double estimate = -lambda.log_abs() / minus.rate();
  auto k = static_cast<std::int64_t>(std::max(0.0, std::floor(estimate) - 1));
  while (lambda.compare_modulus(pow(minus.parameter, -k), tol) > 0) ++k;
  while (k > 0 && lambda.compare_modulus(pow(minus.parameter, -(k - 1)), tol) <= 0) --k;
  return k;
}

inline std::optional<std::int64_t> least_witness_order(const ComplexScalar& lambda, const GrowthDescriptor& g,
                                                       double tol) {
  const auto kp = least_plus_order(lambda, g.plus, tol);
  const auto km = least_minus_order(lambda, g.minus, tol);
  if (!kp || !km) return std::nullopt;
  return std::max(*kp, *km);
}

// Least-squares fit y ~ a + s*t + p*log(t) over t in [t0, t1]; returns s.
inline double exponential_slope(const std::vector<double>& t, const std::vector<double>& y) {
  Eigen::MatrixXd design(static_cast<Index>(t.size()), 3);
  Eigen::VectorXd rhs(static_cast<Index>(t.size()));
  const double t_mid = 0.5 * (t.front() + t.back());
  for (std::size_t i = 0; i < t.size(); ++i) {
    design(static_cast<Index>(i), 0) = 1.0;
    design(static_cast<Index>(i), 1) = (t[i] - t_mid);
    design(static_cast<Index>(i), 2) = std::log(t[i]) - std::log(t_mid);
    rhs(static_cast<Index>(i)) = y[i];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return coef(1);
}

inline SigmaVerdict analytic_membership(const WeightFamily& family, const ComplexScalar& lambda,
                                        const MembershipOptions& opt) {
  SigmaVerdict v;
  v.mode = Mode::Analytic;
  const GrowthDescriptor g = growth_descriptor(family);
  const auto k = least_witness_order(lambda, g, opt.modulus_tolerance);
  if (!k) {
    v.status = Status::Out;
    const bool small = lambda.compare_modulus(1, opt.modulus_tolerance) < 0;
    v.detail = small ? "|lambda| < 1 and the +inf tail is " + g.plus.str() +
                           ": lambda^-n beta(n-k+1,n) grows as n -> +inf for every k"
                     : "|lambda| > 1 and the -inf tail is " + g.minus.str() +
                           ": lambda^-n beta(n-k+1,n) grows as n -> -inf for every k";
    return v;
  }
  v.status = Status::In;
  v.witness_k = *k;
  v.witness_beyond_kmax = *k > opt.k_max;
  v.detail = "least bounded order k=" + std::to_string(*k) + " (tails: +inf " + g.plus.str() + ", -inf " +
             g.minus.str() + ")";
  if (v.witness_beyond_kmax) v.detail += "; exceeds kMax=" + std::to_string(opt.k_max);
  return v;
}

inline SigmaVerdict sampled_membership(const WeightFamily& family, const ComplexScalar& lambda,
                                       const MembershipOptions& opt) {
  SigmaVerdict v;
  v.mode = Mode::Sampled;
  const std::int64_t horizon = opt.horizon;
  if (horizon < 8) throw std::invalid_argument("sampling horizon must be at least 8");
  const int k_top = std::max(opt.k_max, 1);

  // prefix[i] = sum of log w_j for j in [lo, lo + i)
  const std::int64_t lo = -horizon - k_top - 1;
  std::vector<double> prefix(static_cast<std::size_t>(2 * horizon + k_top + 3), 0.0);
  for (std::size_t i = 1; i < prefix.size(); ++i)
    prefix[i] = prefix[i - 1] + log_weight(family, lo + static_cast<std::int64_t>(i) - 1);
  const auto log_beta = [&](std::int64_t k, std::int64_t n) {  // beta(n-k+1, n)
    return prefix[static_cast<std::size_t>(n - lo + 1)] - prefix[static_cast<std::size_t>(n - k - lo + 1)];
  };
  const double log_mod = lambda.log_abs();

  // outward slopes of log|lambda^-n beta(n-k+1,n)| on the outer half of each side
  std::vector<double> plus_slope(k_top + 1), minus_slope(k_top + 1);
  std::vector<double> t, y;
  for (int k = 0; k <= k_top; ++k) {
    t.clear();
    y.clear();
    for (std::int64_t n = horizon / 2; n <= horizon; ++n) {
      t.push_back(static_cast<double>(n));
      y.push_back(-static_cast<double>(n) * log_mod + log_beta(k, n));
    }
    plus_slope[k] = exponential_slope(t, y);
    t.clear();
    y.clear();
    for (std::int64_t m = horizon / 2; m <= horizon; ++m) {
      t.push_back(static_cast<double>(m));
      y.push_back(static_cast<double>(m) * log_mod + log_beta(k, -m));
    }
    minus_slope[k] = exponential_slope(t, y);
  }

  const double tau = opt.slope_tolerance;
  const auto bounded = [&](double s) { return s < -tau; };
  const auto unbounded = [&](double s) { return s > tau; };

  for (int k = 0; k <= opt.k_max; ++k) {
    if (bounded(plus_slope[k]) && bounded(minus_slope[k])) {
      v.status = Status::In;
      v.witness_k = k;
      v.detail = "order k=" + std::to_string(k) + ": outward slopes " + std::to_string(plus_slope[k]) + " (+inf), " +
                 std::to_string(minus_slope[k]) + " (-inf) below -tau";
      return v;
    }
  }
  bool all_fail = true;
  for (int k = 0; k <= opt.k_max && all_fail; ++k)
    all_fail = unbounded(plus_slope[k]) || unbounded(minus_slope[k]);
  // a failing side whose slope still drops with k could be repaired at a higher order
  const auto stalled = [&](const std::vector<double>& s) {
    return !unbounded(s[k_top]) || s[k_top] - s[k_top - 1] > -tau;
  };
  if (all_fail && stalled(plus_slope) && stalled(minus_slope)) {
    v.status = Status::Out;
    v.detail = "every order k<=" + std::to_string(opt.k_max) +
               " has a side with outward slope above tau and the slope does not improve with k";
    return v;
  }
  v.status = Status::Unknown;
  v.detail = "slopes within tau=" + std::to_string(tau) + " of zero or still improving at kMax";
  return v;
}

}  // namespace detail

/// Decides lambda in Sigma(T) for the weighted shift with the given weights.
inline SigmaVerdict shift_membership(const WeightFamily& family, const ComplexScalar& lambda,
                                     const MembershipOptions& opt = {}) {
  if (opt.k_max < 0) throw std::invalid_argument("kMax must be non-negative");
  if (!std::isfinite(lambda.value().real()) || !std::isfinite(lambda.value().imag()))
    throw std::invalid_argument("lambda must be finite");
  if (lambda.is_zero()) {
    SigmaVerdict v;
    v.status = Status::Out;
    v.mode = opt.mode;
    v.detail = "T is injective with dense range, so zero is never an extended eigenvalue";
    return v;
  }
  return opt.mode == Mode::Analytic ? detail::analytic_membership(family, lambda, opt)
                                    : detail::sampled_membership(family, lambda, opt);
}

// ---------------------------------------------------------------------------
// Annulus

/// A radius in [0, +inf].
struct Radius {
  bool infinite = false;
  Rational value{0};

  static Radius finite(Rational r) { return {false, std::move(r)}; }
  static Radius infinity() { return {true, 0}; }
  double to_double() const { return infinite ? INFINITY : xeig::to_double(value); }
  std::string str() const { return infinite ? "inf" : to_string(value); }
};

enum class Boundary { Closed, Open };

struct AnnulusReport {
  std::vector<Rational> c_seq;  // indexed by k = 0..kMax
  std::vector<Rational> d_seq;
  Radius c;
  Radius d;
  Boundary inner = Boundary::Closed;
  Boundary outer = Boundary::Closed;
  bool contains_unit_circle = true;

  std::string shape() const {
    return std::string(inner == Boundary::Closed ? "closed" : "open") + "-" +
           (outer == Boundary::Closed ? "closed" : "open");
  }
};

/// c_k = limsup |beta(n+1,n+k)|^{1/n}, d_k = liminf |beta(1-n,k-n)|^{-1/n}
/// read off the tail classes, their limits c and d, and the boundary shape.
inline AnnulusReport annulus(const WeightFamily& family, int k_max) {
  if (k_max < 1) throw std::invalid_argument("kMax must be at least 1");
  const GrowthDescriptor g = growth_descriptor(family);
  AnnulusReport r;
  const bool plus_exp = g.plus.kind == TailClass::Kind::Exponential;
  const bool minus_exp = g.minus.kind == TailClass::Kind::Exponential;
  for (int k = 0; k <= k_max; ++k) {
    r.c_seq.push_back(plus_exp ? pow(g.plus.parameter, static_cast<std::int64_t>(k)) : Rational(1));
    r.d_seq.push_back(minus_exp ? pow(g.minus.parameter, -static_cast<std::int64_t>(k)) : Rational(1));
  }
  r.c = Radius::finite(plus_exp ? Rational(0) : Rational(1));
  r.d = minus_exp ? Radius::infinity() : Radius::finite(1);

  const auto member_at = [&](const Rational& modulus) {
    return detail::least_witness_order(ComplexScalar::exact(modulus), g, 0.0).has_value();
  };
  r.inner = (r.c.value > 0 && member_at(r.c.value)) ? Boundary::Closed : Boundary::Open;
  r.outer = (!r.d.infinite && member_at(r.d.value)) ? Boundary::Closed : Boundary::Open;
  r.contains_unit_circle = member_at(1);
  return r;
}

// ---------------------------------------------------------------------------
// Norms of powers: ||T^k|| = max_n beta(n-k+1, n)

namespace detail {

struct BetaProfile {
  std::vector<std::int64_t> n;
  std::vector<ExactScalar> value;
  ExactScalar max;
  std::vector<std::int64_t> argmax;
};

inline BetaProfile beta_profile(const WeightFamily& family, std::int64_t k, std::int64_t window) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (window < 2 * k) throw std::invalid_argument("window must be at least 2k");
  BetaProfile p;
  for (std::int64_t n = -window; n <= window; ++n) {
    p.n.push_back(n);
    p.value.push_back(beta(family, n - k + 1, n));
  }
  p.max = *std::max_element(p.value.begin(), p.value.end());
  bool interior = false;
  for (std::size_t i = 0; i < p.n.size(); ++i) {
    if (p.value[i] == p.max) {
      p.argmax.push_back(p.n[i]);
      interior = interior || (p.n[i] > -window && p.n[i] < window);
    }
  }
  if (!interior)
    throw std::runtime_error("maximum of beta(n-k+1,n) is not attained inside the window [-" +
                             std::to_string(window) + ", " + std::to_string(window) + "]; enlarge it");
  return p;
}

}  // namespace detail

/// ||T^k||, the exact maximum of beta(n-k+1, n) over n in [-window, window].
inline ExactScalar power_norm(const WeightFamily& family, std::int64_t k, std::int64_t window) {
  return detail::beta_profile(family, k, window).max;
}

/// Every n in the window where beta(n-k+1, n) attains its maximum.
inline std::vector<std::int64_t> argmax_beta(const WeightFamily& family, std::int64_t k, std::int64_t window) {
  return detail::beta_profile(family, k, window).argmax;
}

struct NormProfile {
  std::vector<ExactScalar> norms;  // norms[k-1] = ||T^k||
  std::vector<double> roots;       // roots[k-1] = ||T^k||^{1/k}
  bool quasinilpotent = false;
  /// "proof" when the tail classes force the answer and the numbers agree,
  /// "evidence" otherwise.
  std::string basis = "evidence";
};

inline NormProfile quasinilpotence_profile(const WeightFamily& family, int k_max, double threshold = 0.25,
                                           std::int64_t extra_window = 0) {
  if (k_max < 2) throw std::invalid_argument("kMax must be at least 2");
  NormProfile p;
  for (int k = 1; k <= k_max; ++k) {
    p.norms.push_back(power_norm(family, k, 2 * k + extra_window));
    p.roots.push_back(std::exp(p.norms.back().log() / k));
  }
  // nonincreasing over the second half with a strict overall drop
  const std::size_t half = static_cast<std::size_t>(k_max) / 2;
  bool decreasing = p.roots.back() < p.roots[half];
  for (std::size_t i = half + 1; i < p.roots.size() && decreasing; ++i)
    decreasing = p.roots[i] <= p.roots[i - 1];
  p.quasinilpotent = decreasing && p.roots.back() < threshold;

  // Weights tending to zero on both sides force spectral radius zero; a
  // constant tail r keeps it at least r.
  const GrowthDescriptor g = growth_descriptor(family);
  const bool law = g.plus.decays() && g.minus.decays();
  p.basis = (law == p.quasinilpotent) ? "proof" : "evidence";
  return p;
}

/// Closed form of ||T^k|| for w_n = (1+|n|)^{-1}: (m!)^{-2} with m=(k+1)/2 for
/// odd k, (m!(m+1)!)^{-1} with m=k/2 for even k.
inline Rational harmonic_power_norm(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  mpz_class a;
  mpz_class b;
  if (k % 2 == 1) {
    const auto m = static_cast<unsigned long>((k + 1) / 2);
    mpz_fac_ui(a.get_mpz_t(), m);
    b = a;
  } else {
    const auto m = static_cast<unsigned long>(k / 2);
    mpz_fac_ui(a.get_mpz_t(), m);
    mpz_fac_ui(b.get_mpz_t(), m + 1);
  }
  return Rational(mpz_class(1), a * b);
}

// ---------------------------------------------------------------------------
// Truncations and witnesses on the index window [-W, W]

/// Truncation of T to span{e_n : |n| <= W}; row/column i holds index i - W.
inline DenseOperator shift_truncation(const WeightFamily& family, std::int64_t window) {
  const Index size = 2 * window + 1;
  if (family.exact()) {
    RationalMatrix m(size, size);
    for (std::int64_t n = -window + 1; n <= window; ++n) m(n - 1 + window, n + window) = eval_weight(family, n).value();
    return DenseOperator(std::move(m));
  }
  ComplexMatrix m = ComplexMatrix::Zero(size, size);
  for (std::int64_t n = -window + 1; n <= window; ++n) m(n - 1 + window, n + window) = eval_weight(family, n).to_double();
  return DenseOperator(std::move(m));
}

/// Truncation of X e_n = lambda^{-n} beta(n-k+1, n) e_{n-k}. Exact when
/// lambda is an exact real and all weights are rational.
inline DenseOperator build_shift_witness(const WeightFamily& family, const ComplexScalar& lambda, std::int64_t k,
                                         std::int64_t window) {
  if (lambda.is_zero()) throw std::invalid_argument("lambda must be non-zero");
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  if (window < 1) throw std::invalid_argument("window must be positive");
  const Index size = 2 * window + 1;
  if (k >= size) throw std::invalid_argument("k exceeds the window width; the truncated witness would vanish");
  if (lambda.exact_real() && family.exact()) {
    RationalMatrix m(size, size);
    for (std::int64_t n = -window + k; n <= window; ++n)
      m(n - k + window, n + window) = pow(lambda.re(), -n) * beta(family, n - k + 1, n).value();
    return DenseOperator(std::move(m));
  }
  ComplexMatrix m = ComplexMatrix::Zero(size, size);
  const std::complex<double> inv = 1.0 / lambda.value();
  for (std::int64_t n = -window + k; n <= window; ++n) {
    std::complex<double> power = 1.0;
    const std::complex<double> factor = n >= 0 ? inv : lambda.value();
    for (std::int64_t i = 0; i < (n >= 0 ? n : -n); ++i) power *= factor;
    m(n - k + window, n + window) = power * beta(family, n - k + 1, n).to_double();
  }
  return DenseOperator(std::move(m));
}

struct IntertwiningCheck {
  bool exact_pass = false;
  bool exact_arithmetic = false;
  double interior_residual = 0.0;  // Frobenius norm of XT - lambda TX on interior entries
  std::size_t pairs_checked = 0;
};

/// Checks w_n x_{n-1,j} = lambda w_{j+1} x_{n,j+1} (x_{n,j} is the e_j
/// coefficient of X e_n) for every pair whose indices all lie in the window.
inline IntertwiningCheck verify_intertwining(const DenseOperator& x, const WeightFamily& family,
                                             const ComplexScalar& lambda, std::int64_t window) {
  const Index size = 2 * window + 1;
  if (x.dim() != size)
    throw std::invalid_argument("dimension mismatch: X is " + std::to_string(x.dim()) + "x" +
                                std::to_string(x.dim()) + ", window needs " + std::to_string(size));
  const auto at = [&](std::int64_t row, std::int64_t col) { return std::pair{row + window, col + window}; };

  IntertwiningCheck out;
  out.exact_arithmetic = x.exact() && lambda.exact_real() && family.exact();
  out.exact_pass = true;
  std::vector<ExactScalar> w;
  for (std::int64_t n = -window; n <= window; ++n) w.push_back(eval_weight(family, n));
  const auto weight = [&](std::int64_t n) -> const ExactScalar& { return w[static_cast<std::size_t>(n + window)]; };

  for (std::int64_t n = -window + 1; n <= window; ++n) {
    for (std::int64_t j = -window; j <= window - 1; ++j) {
      ++out.pairs_checked;
      const auto [r1, c1] = at(j, n - 1);
      const auto [r2, c2] = at(j + 1, n);
      if (out.exact_arithmetic) {
        const Rational lhs = weight(n).value() * x.rational()(r1, c1);
        const Rational rhs = lambda.re() * weight(j + 1).value() * x.rational()(r2, c2);
        if (lhs != rhs) out.exact_pass = false;
      } else {
        const std::complex<double> lhs = weight(n).to_double() * x.numeric()(r1, c1);
        const std::complex<double> rhs = lambda.value() * weight(j + 1).to_double() * x.numeric()(r2, c2);
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        if (std::abs(lhs - rhs) > 1e-12 * scale) out.exact_pass = false;
      }
    }
  }

  // Operator route: XT - lambda TX on rows j in [-W, W-1], columns n in [-W+1, W].
  const ComplexMatrix t = shift_truncation(family, window).numeric();
  const ComplexMatrix diff = x.numeric() * t - lambda.value() * (t * x.numeric());
  out.interior_residual = diff.block(0, 1, size - 1, size - 1).norm();
  return out;
}

}  // namespace xeig

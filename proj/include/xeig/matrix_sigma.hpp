#pragma once

// Extended eigenvalues of finite matrices.
//
// On C^n the map X -> XT - lambda TX has eigenvalues mu_j - lambda mu_i
// (mu ranging over the spectrum of T), so it has a kernel iff mu = lambda nu
// for some eigenvalues mu, nu. A zero eigenvalue makes every lambda work.

#include <xeig/dense_operator.hpp>
#include <xeig/exact_linalg.hpp>
#include <xeig/status.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xeig {

using Complex = std::complex<double>;

inline constexpr double kClusterTolerance = 1e-8;

/// Sorts by modulus, then by argument in [0, 2pi).
inline bool modulus_phase_less(Complex a, Complex b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma < mb;
  const auto phase = [](Complex z) {
    const double t = std::arg(z);
    return t < 0 ? t + 2 * M_PI : t;
  };
  return phase(a) < phase(b);
}

inline bool close_relative(Complex a, Complex b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

struct Spectrum {
  std::vector<Complex> values;
  /// Exact eigenvalues where every one was recovered as a verified rational.
  std::optional<std::vector<Rational>> exact;
  bool singular = false;
  std::string method;
};

namespace detail {

// Continued-fraction convergents of x with denominators up to max_den.
inline std::vector<Rational> rational_candidates(double x, long max_den = 1000000) {
  std::vector<Rational> out;
  if (!std::isfinite(x) || std::fabs(x) > 1e12) return out;
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int i = 0; i < 40; ++i) {
    const double a = std::floor(r);
    const mpz_class ai(a);
    const mpz_class p2 = ai * p1 + p0;
    const mpz_class q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    out.emplace_back(p2, q2);
    out.back().canonicalize();
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return out;
}

// A defective eigenvalue of multiplicity m moves by about eps^(1/m) in floating
// point, so the window is wide; exact singularity decides.
inline double snap_window(Index dim) {
  return std::max(1e-6, 10.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / static_cast<double>(dim)));
}

inline std::optional<Rational> snap_eigenvalue(const RationalMatrix& t, Complex mu) {
  const double window = snap_window(t.rows()) * std::max(1.0, std::abs(mu));
  if (std::fabs(mu.imag()) > window) return std::nullopt;
  auto candidates = rational_candidates(mu.real());
  for (auto it = candidates.begin(); it != candidates.end(); ++it) {
    if (std::fabs(to_double(*it) - mu.real()) > window) continue;
    if (is_singular(t - *it * RationalMatrix::identity(t.rows()))) return *it;
  }
  return std::nullopt;
}

// n - rank((T - qI)^n), the algebraic multiplicity of q.
inline Index algebraic_multiplicity(const RationalMatrix& t, const Rational& q) {
  const Index n = t.rows();
  const RationalMatrix shifted = t - q * RationalMatrix::identity(n);
  RationalMatrix power = shifted;
  for (Index p = 1; p < n; p *= 2) power = power * power;
  return n - rank(power);
}

// Largest dimension for which snapped spectra are certified exactly.
inline constexpr Index kExactSpectrumCap = 48;

}  // namespace detail

/// Eigenvalues of T; `singular` is decided exactly for rational T and by
/// sigma_min <= tol ||T|| otherwise.
inline Spectrum spectrum(const DenseOperator& t, double tol) {
  Spectrum s;
  const ComplexMatrix& a = t.numeric();
  const double norm = operator_norm(a);

  if (is_lower_triangular(a) || is_upper_triangular(a)) {
    s.method = "triangular";
    for (Index i = 0; i < a.rows(); ++i) s.values.push_back(a(i, i));
    if (t.exact()) {
      std::vector<Rational> diag;
      for (Index i = 0; i < a.rows(); ++i) diag.push_back(t.rational()(i, i));
      s.singular = std::any_of(diag.begin(), diag.end(), [](const Rational& q) { return q == 0; });
      s.exact = std::move(diag);
    } else {
      s.singular = std::any_of(s.values.begin(), s.values.end(),
                               [&](Complex z) { return std::abs(z) <= tol * norm; });
    }
    return s;
  }

  s.method = "schur";
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver did not converge");
  for (Index i = 0; i < a.rows(); ++i) s.values.push_back(solver.eigenvalues()(i));

  if (t.exact()) {
    s.singular = is_singular(t.rational());
    std::vector<Rational> snapped;
    if (a.rows() <= detail::kExactSpectrumCap) {
      for (Complex mu : s.values) {
        auto q = detail::snap_eigenvalue(t.rational(), mu);
        if (!q) break;
        snapped.push_back(*q);
      }
    }
    // every snapped value must occur exactly as often as its multiplicity
    bool certified = snapped.size() == s.values.size();
    for (std::size_t i = 0; certified && i < snapped.size(); ++i) {
      const auto count = std::count(snapped.begin(), snapped.end(), snapped[i]);
      certified = count == detail::algebraic_multiplicity(t.rational(), snapped[i]);
    }
    if (certified) {
      for (std::size_t i = 0; i < snapped.size(); ++i) s.values[i] = to_double(snapped[i]);
      s.exact = std::move(snapped);
    }
  } else {
    s.singular = smallest_singular_value(a) <= tol * norm;
  }
  return s;
}

struct MatrixSigmaSet {
  enum class Kind { AllOfC, FiniteSet };
  Kind kind = Kind::FiniteSet;
  std::vector<Complex> values;  // sorted by (modulus, phase)
  /// Present when every ratio is an exact rational.
  std::optional<std::vector<Rational>> exact_values;
  double tolerance = kClusterTolerance;

  bool contains(Complex lambda) const {
    if (kind == Kind::AllOfC) return true;
    return std::any_of(values.begin(), values.end(), [&](Complex v) { return close_relative(v, lambda, tolerance); });
  }
  bool contains(const Rational& lambda) const {
    if (kind == Kind::AllOfC) return true;
    if (exact_values)
      return std::find(exact_values->begin(), exact_values->end(), lambda) != exact_values->end();
    return contains(Complex(to_double(lambda), 0.0));
  }
  /// Equal as sets up to the clustering tolerance.
  bool same_as(const MatrixSigmaSet& other, double tol = kClusterTolerance) const {
    if (kind != other.kind) return false;
    if (kind == Kind::AllOfC) return true;
    if (values.size() != other.values.size()) return false;
    // order-free: near the negative axis the sort key wraps around 2pi
    const auto covered = [tol](const std::vector<Complex>& from, const std::vector<Complex>& to) {
      return std::all_of(from.begin(), from.end(), [&](Complex a) {
        return std::any_of(to.begin(), to.end(), [&](Complex b) { return close_relative(a, b, tol); });
      });
    };
    return covered(values, other.values) && covered(other.values, values);
  }
};

inline const char* to_string(MatrixSigmaSet::Kind k) { return k == MatrixSigmaSet::Kind::AllOfC ? "AllOfC" : "FiniteSet"; }

/// The ratio set {mu/nu} of the spectrum, or all of C when T is singular.
inline MatrixSigmaSet matrix_sigma(const DenseOperator& t, double tol = 1e-10) {
  const Spectrum s = spectrum(t, tol);
  MatrixSigmaSet out;
  if (s.singular) {
    out.kind = MatrixSigmaSet::Kind::AllOfC;
    return out;
  }
  const std::size_t n = s.values.size();

  if (s.exact) {
    std::vector<Rational> ratios;
    for (const Rational& mu : *s.exact)
      for (const Rational& nu : *s.exact) ratios.push_back(mu / nu);
    std::sort(ratios.begin(), ratios.end());
    ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
    for (const Rational& q : ratios) out.values.emplace_back(to_double(q), 0.0);
    std::vector<std::size_t> order(ratios.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return modulus_phase_less(out.values[a], out.values[b]); });
    std::vector<Complex> sorted_values;
    std::vector<Rational> sorted_exact;
    for (std::size_t i : order) {
      sorted_values.push_back(out.values[i]);
      sorted_exact.push_back(ratios[i]);
    }
    out.values = std::move(sorted_values);
    out.exact_values = std::move(sorted_exact);
    return out;
  }

  std::vector<Complex> ratios;
  ratios.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ratios.push_back(i == j ? Complex(1.0, 0.0) : s.values[i] / s.values[j]);
  std::sort(ratios.begin(), ratios.end(), modulus_phase_less);
  // 1 is kept exactly as a cluster representative
  out.values.emplace_back(1.0, 0.0);
  for (Complex r : ratios) {
    const bool known = std::any_of(out.values.begin(), out.values.end(),
                                   [&](Complex v) { return close_relative(v, r, kClusterTolerance); });
    if (!known) out.values.push_back(r);
  }
  std::sort(out.values.begin(), out.values.end(), modulus_phase_less);
  return out;
}

// ---------------------------------------------------------------------------
// Sylvester-type oracle: the dim^2 x dim^2 matrix of X -> XT - lambda TX

struct SylvesterOptions {
  double tol = 1e-10;
  /// Largest dim^2 handled by a dense SVD.
  Index dense_cap = 4096;
  /// Largest dim^2 handled by exact elimination when T and lambda are rational.
  Index exact_cap = 144;
  /// Hard limit on dim^2; beyond it the call is rejected.
  Index max_cap = 1 << 20;
  int max_iterations = 300;
};

struct SylvesterResult {
  Status status = Status::Unknown;
  std::optional<ComplexMatrix> witness;  // unit spectral norm
  double smin = 0.0;
  std::string method;
  bool approximate = false;
};

/// vec(X) is column-major: index i + j*n holds X(i,j).
inline ComplexMatrix sylvester_matrix(const ComplexMatrix& t, Complex lambda) {
  const Index n = t.rows();
  ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        m(i + j * n, i + k * n) += t(k, j);            // (XT)_ij = sum_k X_ik T_kj
        m(i + j * n, k + j * n) -= lambda * t(i, k);  // (TX)_ij = sum_k T_ik X_kj
      }
  return m;
}

inline RationalMatrix sylvester_matrix(const RationalMatrix& t, const Rational& lambda) {
  const Index n = t.rows();
  RationalMatrix m(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        m(i + j * n, i + k * n) += t(k, j);
        m(i + j * n, k + j * n) -= lambda * t(i, k);
      }
  return m;
}

namespace detail {

inline ComplexMatrix unvec(const Eigen::VectorXcd& v, Index n) {
  ComplexMatrix x(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = v(i + j * n);
  return x;
}

inline ComplexMatrix unit_spectral(ComplexMatrix x) {
  const double norm = operator_norm(x);
  if (norm > 0) x /= norm;
  return x;
}

// Largest power T^p that is non-zero, when T^dim == 0 exactly.
inline std::optional<DenseOperator> nilpotent_top_power(const DenseOperator& t) {
  const Index n = t.dim();
  if (t.exact()) {
    RationalMatrix last = RationalMatrix::identity(n);
    RationalMatrix power = t.rational();
    for (Index p = 1; p <= n && !power.is_zero(); ++p) {
      last = power;
      power = power * t.rational();
    }
    if (!power.is_zero()) return std::nullopt;
    return DenseOperator(std::move(last));
  }
  ComplexMatrix last = ComplexMatrix::Identity(n, n);
  ComplexMatrix power = t.numeric();
  for (Index p = 1; p <= n && !power.isZero(0.0); ++p) {
    last = power;
    power = power * t.numeric();
  }
  if (!power.isZero(0.0)) return std::nullopt;
  return DenseOperator(std::move(last));
}

// Solves Y R - lambda R Y = C for upper triangular R.
inline ComplexMatrix schur_solve(const ComplexMatrix& r, Complex lambda, const ComplexMatrix& c, double floor) {
  const Index n = r.rows();
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = n - 1; i >= 0; --i) {
      Complex acc = c(i, j);
      for (Index k = 0; k < j; ++k) acc -= y(i, k) * r(k, j);
      for (Index k = i + 1; k < n; ++k) acc += lambda * r(i, k) * y(k, j);
      Complex d = r(j, j) - lambda * r(i, i);
      if (std::abs(d) < floor) d = floor;
      y(i, j) = acc / d;
    }
  }
  return y;
}

// Solves Z R* - conj(lambda) R* Z = B, the adjoint problem.
inline ComplexMatrix schur_solve_adjoint(const ComplexMatrix& r, Complex lambda, const ComplexMatrix& b, double floor) {
  const Index n = r.rows();
  const ComplexMatrix s = r.adjoint();
  const Complex mu = std::conj(lambda);
  ComplexMatrix z = ComplexMatrix::Zero(n, n);
  for (Index j = n - 1; j >= 0; --j) {
    for (Index i = 0; i < n; ++i) {
      Complex acc = b(i, j);
      for (Index k = j + 1; k < n; ++k) acc -= z(i, k) * s(k, j);
      for (Index k = 0; k < i; ++k) acc += mu * s(i, k) * z(k, j);
      Complex d = s(j, j) - mu * s(i, i);
      if (std::abs(d) < floor) d = floor;
      z(i, j) = acc / d;
    }
  }
  return z;
}

inline SylvesterResult iterative_membership(const DenseOperator& t, Complex lambda, const SylvesterOptions& opt) {
  const Index n = t.dim();
  const double norm = operator_norm(t.numeric());
  Eigen::ComplexSchur<ComplexMatrix> schur(t.numeric());
  if (schur.info() != Eigen::Success) throw std::runtime_error("Schur decomposition did not converge");
  const ComplexMatrix& q = schur.matrixU();
  const ComplexMatrix& r = schur.matrixT();
  const double floor = std::numeric_limits<double>::epsilon() * std::max(norm, 1.0) * (1.0 + std::abs(lambda));

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;
  ComplexMatrix y(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) y(i, j) = Complex(gauss(rng), gauss(rng));
  y /= y.norm();

  double estimate = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    // (M* M)^-1 y, whose dominant direction is the right singular vector of sigma_min
    const ComplexMatrix w = schur_solve_adjoint(r, lambda, y, floor);
    const ComplexMatrix z = schur_solve(r, lambda, w, floor);
    const double growth = z.norm();
    if (!std::isfinite(growth) || growth == 0) break;
    y = z / growth;
    const double next = 1.0 / std::sqrt(growth);
    if (it > 0 && std::fabs(next - estimate) <= 1e-10 * std::max(next, 1e-300)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  const ComplexMatrix residual = y * r - lambda * (r * y);

  SylvesterResult res;
  res.method = "schur-inverse-iteration";
  res.approximate = true;
  res.smin = residual.norm();
  res.status = res.smin <= opt.tol * norm ? Status::In : Status::Out;
  if (res.status == Status::In) res.witness = unit_spectral(q * y * q.adjoint());
  return res;
}

}  // namespace detail

/// Decides lambda in Sigma(T) for a finite matrix by examining the kernel of
/// X -> XT - lambda TX. Exact for rational T and rational real lambda.
inline SylvesterResult sylvester_membership(const DenseOperator& t, const ComplexScalar& lambda,
                                            const SylvesterOptions& opt = {}) {
  const Index n = t.dim();
  const Index n2 = n * n;
  if (n2 > opt.max_cap)
    throw std::invalid_argument("dimension overflow: dim^2 = " + std::to_string(n2) + " exceeds the cap " +
                                std::to_string(opt.max_cap));
  const Complex lam = lambda.value();

  if (auto top = detail::nilpotent_top_power(t)) {
    SylvesterResult res;
    res.status = Status::In;
    res.method = "nilpotent";
    res.smin = 0.0;
    res.witness = detail::unit_spectral(top->numeric());
    return res;
  }

  if (t.exact() && lambda.exact_real() && n2 <= opt.exact_cap) {
    const RationalMatrix m = sylvester_matrix(t.rational(), lambda.re());
    SylvesterResult res;
    res.method = "exact";
    if (auto v = kernel_vector(m)) {
      res.status = Status::In;
      res.smin = 0.0;
      Eigen::VectorXcd numeric(n2);
      for (Index i = 0; i < n2; ++i) numeric(i) = to_double((*v)[static_cast<std::size_t>(i)]);
      res.witness = detail::unit_spectral(detail::unvec(numeric, n));
    } else {
      res.status = Status::Out;
      res.smin = smallest_singular_value(m.to_complex());
    }
    return res;
  }

  if (n2 <= opt.dense_cap) {
    const ComplexMatrix m = sylvester_matrix(t.numeric(), lam);
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    SylvesterResult res;
    res.method = "dense-svd";
    res.smin = svd.singularValues()(n2 - 1);
    res.status = res.smin <= opt.tol * operator_norm(t.numeric()) ? Status::In : Status::Out;
    if (res.status == Status::In) res.witness = detail::unit_spectral(detail::unvec(svd.matrixV().col(n2 - 1), n));
    return res;
  }
  return detail::iterative_membership(t, lam, opt);
}

struct WitnessResidual {
  double residual = 0.0;
  double xnorm = 0.0;
  bool zero_witness = false;
};

/// ||XT - lambda TX|| and ||X|| in the spectral norm.
inline WitnessResidual witness_residual(const DenseOperator& t, const DenseOperator& x, const ComplexScalar& lambda) {
  if (t.dim() != x.dim())
    throw std::invalid_argument("dimension mismatch: T is " + std::to_string(t.dim()) + ", X is " +
                                std::to_string(x.dim()));
  WitnessResidual out;
  if (t.exact() && x.exact() && lambda.exact_real()) {
    const RationalMatrix d = x.rational() * t.rational() - lambda.re() * (t.rational() * x.rational());
    out.residual = d.is_zero() ? 0.0 : operator_norm(d.to_complex());
  } else {
    out.residual = operator_norm(ComplexMatrix(x.numeric() * t.numeric() - lambda.value() * (t.numeric() * x.numeric())));
  }
  out.xnorm = operator_norm(x.numeric());
  out.zero_witness = out.xnorm == 0.0;
  return out;
}

/// X = T^p for the largest p with T^p != 0; nullopt unless T is nilpotent.
inline std::optional<DenseOperator> nilpotent_witness(const DenseOperator& t) { return detail::nilpotent_top_power(t); }

// ---------------------------------------------------------------------------
// Similarity orbits

/// Random invertible G = U diag(s) V^T with Haar orthogonal U, V and
/// log-uniform singular values in [cond^-1/2, cond^1/2]. Draw i uses its own
/// substream seeded from (seed, i), so draws can be generated in any order.
class SimilaritySampler {
 public:
  struct Draw {
    RealMatrix g;
    RealMatrix g_inv;
    double condition = 1.0;
  };

  SimilaritySampler(Index dim, double cond_max, std::uint64_t seed, bool include_identity = false,
                    int rejection_budget = 64)
      : dim_(dim), cond_max_(cond_max), seed_(seed), include_identity_(include_identity), budget_(rejection_budget) {
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    if (!(cond_max > 1.0) || !std::isfinite(cond_max)) throw std::invalid_argument("condMax must exceed 1");
  }

  Draw draw(std::uint64_t index) const {
    if (include_identity_ && index == 0) return {RealMatrix::Identity(dim_, dim_), RealMatrix::Identity(dim_, dim_), 1.0};
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    for (int attempt = 0; attempt < budget_; ++attempt) {
      const RealMatrix u = haar_orthogonal(rng);
      const RealMatrix v = haar_orthogonal(rng);
      std::uniform_real_distribution<double> unit(-0.5, 0.5);
      Eigen::VectorXd s(dim_);
      for (Index i = 0; i < dim_; ++i) s(i) = std::exp(unit(rng) * std::log(cond_max_));
      Draw d;
      d.g = u * s.asDiagonal() * v.transpose();
      d.g_inv = v * s.cwiseInverse().asDiagonal() * u.transpose();
      const auto sv = Eigen::JacobiSVD<RealMatrix>(d.g).singularValues();
      d.condition = sv(0) / sv(dim_ - 1);
      if (d.condition <= cond_max_) return d;
    }
    throw std::runtime_error("rejection budget exhausted after " + std::to_string(budget_) + " draws");
  }

 private:
  RealMatrix haar_orthogonal(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss;
    RealMatrix a(dim_, dim_);
    for (Index j = 0; j < dim_; ++j)
      for (Index i = 0; i < dim_; ++i) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<RealMatrix> qr(a);
    RealMatrix q = qr.householderQ();
    const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < dim_; ++j)
      if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
  }

  Index dim_;
  double cond_max_;
  std::uint64_t seed_;
  bool include_identity_;
  int budget_;
};

inline DenseOperator conjugate(const DenseOperator& t, const SimilaritySampler::Draw& d) {
  return DenseOperator(ComplexMatrix(d.g.cast<Complex>() * t.numeric() * d.g_inv.cast<Complex>()));
}

/// count conjugates G T G^-1; deterministic given the seed.
inline std::vector<DenseOperator> sample_similarity_orbit(const DenseOperator& t, int count, double cond_max,
                                                          std::uint64_t seed, bool include_identity = false) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  SimilaritySampler sampler(t.dim(), cond_max, seed, include_identity);
  std::vector<DenseOperator> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(conjugate(t, sampler.draw(static_cast<std::uint64_t>(i))));
  return out;
}

struct OrbitDistance {
  double distance = 0.0;
  /// curve[i]: best distance after the deterministic candidates and the first
  /// i+1 random conjugations.
  std::vector<double> curve;
  double deterministic = 0.0;  // best over identity and permutations alone
};

/// Upper bound on dist(Sim(A), B): the identity, every permutation matrix
/// (dim <= 6), then `samples` random G.
inline OrbitDistance orbit_distance(const DenseOperator& a, const DenseOperator& b, int samples, double cond_max,
                                    std::uint64_t seed) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  const Index n = a.dim();
  const ComplexMatrix& am = a.numeric();
  const ComplexMatrix& bm = b.numeric();

  OrbitDistance out;
  out.deterministic = operator_norm(ComplexMatrix(am - bm));
  if (n <= 6) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end())) {
      ComplexMatrix c(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) c(i, j) = am(perm[i], perm[j]);
      out.deterministic = std::min(out.deterministic, operator_norm(ComplexMatrix(c - bm)));
    }
  }
  SimilaritySampler sampler(n, cond_max, seed);
  double best = out.deterministic;
  for (int i = 0; i < samples; ++i) {
    const auto d = sampler.draw(static_cast<std::uint64_t>(i));
    const ComplexMatrix c = d.g.cast<Complex>() * am * d.g_inv.cast<Complex>();
    best = std::min(best, operator_norm(ComplexMatrix(c - bm)));
    out.curve.push_back(best);
  }
  out.distance = best;
  return out;
}

}  // namespace xeig

#pragma once

// The Volterra operator (Vf)(x) = int_0^x f(t) dt on L^2[0,1], its grid
// discretizations, composition witnesses for lambda > 0, and a constrained
// least-squares probe of ||XT - lambda TX|| over normalized X.

#include <xeig/dense_operator.hpp>
#include <xeig/matrix_sigma.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xeig {

enum class Scheme { Rectangle, Trapezoid };

inline const char* to_string(Scheme s) { return s == Scheme::Rectangle ? "rectangle" : "trapezoid"; }

struct VolterraDiscretization {
  Index n = 0;
  Scheme scheme = Scheme::Rectangle;
  DenseOperator matrix;
};

/// Rectangle: V(i,j) = h for j < i. Trapezoid: row 0 is zero; row i >= 1 has
/// h/2 at j = 0 and j = i and h for 0 < j < i. h = 1/N.
inline VolterraDiscretization discretize_volterra(Index n, Scheme scheme = Scheme::Rectangle) {
  if (n < 2) throw std::invalid_argument("grid size must be at least 2");
  const Rational h(1, n);
  const Rational half(1, 2 * n);
  RationalMatrix v(n, n);
  for (Index i = 1; i < n; ++i) {
    if (scheme == Scheme::Rectangle) {
      for (Index j = 0; j < i; ++j) v(i, j) = h;
    } else {
      v(i, 0) = half;
      for (Index j = 1; j < i; ++j) v(i, j) = h;
      v(i, i) = half;
    }
  }
  return {n, scheme, DenseOperator(std::move(v))};
}

namespace detail {

// |[i h, (i+1) h) ∩ [j h / a, (j+1) h / a)| / h with h = 1/N.
inline Rational cell_overlap(Index i, Index j, const Rational& a) {
  const Rational lo = std::max(Rational(i), Rational(Rational(j) / a));
  const Rational hi = std::min(Rational(i + 1), Rational(Rational(j + 1) / a));
  return hi > lo ? Rational(hi - lo) : Rational(0);
}

inline RationalMatrix galerkin_composition(const Rational& a, Index n) {
  RationalMatrix x(n, n);
  for (Index i = 0; i < n; ++i) {
    // cell i maps into cells floor(a i) .. ceil(a (i+1)) - 1
    const Rational start = a * i;
    const mpz_class first = start.get_num() / start.get_den();
    for (Index j = first.get_si(); j < n; ++j) {
      if (Rational(j) >= a * (i + 1)) break;
      x(i, j) = cell_overlap(i, j, a);
    }
  }
  return x;
}

inline RationalMatrix reflect_transpose(const RationalMatrix& x) {
  const Index n = x.rows();
  RationalMatrix y(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) y(i, j) = x(n - 1 - j, n - 1 - i);
  return y;
}

}  // namespace detail

/// X with X V_N = lambda V_N X up to O(1/N), for the rectangle rule.
/// lambda <= 1: the cell average of f(lambda x). lambda > 1: J Y^T J where Y
/// is the witness for 1/lambda and J reverses the grid (V_N^T = J V_N J).
/// Requires the reduced denominator of min(lambda, 1/lambda) to divide N.
inline DenseOperator composition_witness(const Rational& lambda, Index n) {
  if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
  if (n < 2) throw std::invalid_argument("grid size must be at least 2");
  const bool reflect = lambda > 1;
  const Rational a = reflect ? Rational(1 / lambda) : lambda;
  if (!a.get_den().fits_slong_p() || n % a.get_den().get_si() != 0)
    throw std::invalid_argument("lambda = " + to_string(lambda) + " is not aligned with the grid N = " +
                                std::to_string(n) + " (denominator of " + to_string(a) + " must divide N)");
  RationalMatrix x = detail::galerkin_composition(a, n);
  return DenseOperator(reflect ? detail::reflect_transpose(x) : std::move(x));
}

/// Same construction for any positive real lambda in floating point; not grid
/// exact, so the measured residual includes interpolation error.
inline DenseOperator composition_witness_interpolating(double lambda, Index n) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive and finite");
  if (n < 2) throw std::invalid_argument("grid size must be at least 2");
  const bool reflect = lambda > 1;
  const double a = reflect ? 1.0 / lambda : lambda;
  RealMatrix x = RealMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = static_cast<Index>(std::floor(a * static_cast<double>(i))); j < n; ++j) {
      const double lo = std::max(static_cast<double>(i), static_cast<double>(j) / a);
      const double hi = std::min(static_cast<double>(i + 1), static_cast<double>(j + 1) / a);
      if (static_cast<double>(j) >= a * static_cast<double>(i + 1)) break;
      if (hi > lo) x(i, j) = hi - lo;
    }
  if (reflect) x = RealMatrix(x.transpose().reverse());
  return DenseOperator(ComplexMatrix(x.cast<Complex>()));
}

/// ||X V - lambda V X|| / ||X|| in the spectral norm.
inline double relative_commutation_residual(const DenseOperator& x, const DenseOperator& v, const ComplexScalar& lambda) {
  const WitnessResidual r = witness_residual(v, x, lambda);
  return r.xnorm == 0 ? std::numeric_limits<double>::infinity() : r.residual / r.xnorm;
}

struct MembershipEvidence {
  Rational lambda;
  std::vector<std::pair<Index, double>> residuals;
  /// -slope of log residual against log N; +inf when every residual is 0,
  /// nullopt when some but not all are 0 or fewer than two grids were given.
  std::optional<double> convergence_order;
};

inline MembershipEvidence volterra_membership_evidence(const Rational& lambda, const std::vector<Index>& grids) {
  if (grids.empty()) throw std::invalid_argument("grid list is empty");
  for (std::size_t i = 1; i < grids.size(); ++i)
    if (grids[i] <= grids[i - 1]) throw std::invalid_argument("grid sizes must be strictly increasing");
  MembershipEvidence out;
  out.lambda = lambda;
  for (Index n : grids) {
    const DenseOperator x = composition_witness(lambda, n);
    const auto v = discretize_volterra(n, Scheme::Rectangle);
    out.residuals.emplace_back(n, relative_commutation_residual(x, v.matrix, ComplexScalar::exact(lambda)));
  }
  const bool all_zero = std::all_of(out.residuals.begin(), out.residuals.end(), [](const auto& p) { return p.second == 0; });
  const bool all_positive = std::all_of(out.residuals.begin(), out.residuals.end(), [](const auto& p) { return p.second > 0; });
  if (all_zero) {
    out.convergence_order = std::numeric_limits<double>::infinity();
  } else if (all_positive && out.residuals.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(out.residuals.size());
    for (const auto& [n, r] : out.residuals) {
      const double lx = std::log(static_cast<double>(n));
      const double ly = std::log(r);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out.convergence_order = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return out;
}

/// Sigma(gamma I + V_N); the matrix is triangular with constant diagonal gamma.
inline MatrixSigmaSet shifted_volterra_sigma(const ComplexScalar& gamma, Index n, Scheme scheme = Scheme::Rectangle,
                                             double tol = 1e-10) {
  if (gamma.is_zero()) throw std::invalid_argument("gamma must be non-zero");
  const auto v = discretize_volterra(n, scheme);
  if (gamma.exact_real()) {
    RationalMatrix m = v.matrix.rational();
    for (Index i = 0; i < n; ++i) m(i, i) += gamma.re();
    return matrix_sigma(DenseOperator(std::move(m)), tol);
  }
  ComplexMatrix m = v.matrix.numeric();
  for (Index i = 0; i < n; ++i) m(i, i) += gamma.value();
  return matrix_sigma(DenseOperator(std::move(m)), tol);
}

// ---------------------------------------------------------------------------
// Constrained residual probe

struct ProbeOptions {
  /// Target for the normalized residual; iterations stop once it is reached.
  double tolerance = 1e-9;
  /// Relative size of the projected gradient at which CGLS stops.
  double gradient_tolerance = 1e-10;
  int max_iterations = 5000;
  int max_secant_steps = 60;
};

struct ProbeResult {
  Complex lambda;
  int m = 0;
  int k = 0;
  double j = 0;
  bool feasible = false;
  double minimal_residual = 0.0;  // ||XT - lambda TX||_F / sqrt(N)
  double xnorm = 0.0;             // ||X||_F / sqrt(N)
  bool ball_active = false;
  bool converged = false;
  int iterations = 0;
  ComplexMatrix x;
};

/// Midpoint samples of x^p on the grid (i + 1/2)/N.
inline Eigen::VectorXd monomial_samples(int power, Index n) {
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = std::pow((static_cast<double>(i) + 0.5) / static_cast<double>(n), power);
  return v;
}

namespace detail {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
struct ProbeOperator {
  const Mat<S>& t;
  S lambda;
  const Mat<S>& a;  // constraint matrix, X -> <A, X>
  double a_norm2;

  Mat<S> project(const Mat<S>& z) const { return z - (a.conjugate().cwiseProduct(z).sum() / a_norm2) * a; }
  Mat<S> sylvester(const Mat<S>& x) const { return x * t - lambda * (t * x); }
  Mat<S> sylvester_adjoint(const Mat<S>& y) const {
    return y * t.adjoint() - Eigen::numext::conj(lambda) * (t.adjoint() * y);
  }
  Mat<S> apply(const Mat<S>& z) const { return sylvester(project(z)); }
  Mat<S> apply_adjoint(const Mat<S>& y) const { return project(sylvester_adjoint(y)); }
};

template <typename S>
struct CglsOutcome {
  Mat<S> z;
  int iterations = 0;
  bool converged = false;
  bool exceeded = false;  // stopped because ||z|| passed the radius
};

// CGLS for min ||B z - b||^2 + rho ||z||^2 from a warm start, optionally
// stopping as soon as ||z|| exceeds `radius` (from z = 0 and rho = 0 the
// iterate norms increase monotonically). `floor` is an absolute residual
// below which there is nothing left to gain.
template <typename S>
CglsOutcome<S> cgls(const ProbeOperator<S>& op, const Mat<S>& b, double rho, Mat<S> z, double radius, double floor,
                    double gradient_tol, int max_iterations) {
  CglsOutcome<S> out;
  Mat<S> r = b - op.apply(z);
  Mat<S> s = op.apply_adjoint(r) - rho * z;
  Mat<S> p = s;
  const double s0 = op.apply_adjoint(b).norm();
  double gamma = s.squaredNorm();
  const auto done = [&](double residual, double gradient) {
    return (rho == 0 && residual <= floor) || gradient <= gradient_tol * s0;
  };
  if (s0 == 0 || done(r.norm(), std::sqrt(gamma))) {
    out.z = std::move(z);
    out.converged = true;
    return out;
  }
  for (int it = 1; it <= max_iterations; ++it) {
    const Mat<S> q = op.apply(p);
    const double delta = q.squaredNorm() + rho * p.squaredNorm();
    if (delta <= 0) break;
    const double alpha = gamma / delta;
    z += alpha * p;
    r -= alpha * q;
    out.iterations = it;
    if (z.norm() > radius) {
      out.exceeded = true;
      break;
    }
    s = op.apply_adjoint(r) - rho * z;
    const double gamma_next = s.squaredNorm();
    if (done(r.norm(), std::sqrt(gamma_next))) {
      out.converged = true;
      break;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  out.z = std::move(z);
  return out;
}

template <typename S>
void solve_probe(const Mat<S>& tm, S lambda, const Mat<S>& a, double radius, const ProbeOptions& opt,
                 ProbeResult& res) {
  const Index n = tm.rows();
  const double scale = std::sqrt(static_cast<double>(n));
  const double a_norm2 = a.squaredNorm();
  const Mat<S> x0 = a / a_norm2;
  const double x0_norm = x0.norm();
  if (x0_norm > radius * (1 + 1e-12))
    throw std::runtime_error("infeasible constraint: the minimum-norm feasible X has normalized norm " +
                             std::to_string(x0_norm / scale) + " > j = " + std::to_string(radius / scale));
  res.feasible = true;
  const double r_ball = std::sqrt(std::max(0.0, radius * radius - x0_norm * x0_norm));
  const double floor = 0.1 * opt.tolerance * scale;

  const ProbeOperator<S> op{tm, lambda, a, a_norm2};
  const Mat<S> b = -op.sylvester(x0);
  const Mat<S> zero = Mat<S>::Zero(n, n);

  auto run = cgls(op, b, 0.0, zero, r_ball, floor, opt.gradient_tolerance, opt.max_iterations);
  res.iterations = run.iterations;
  res.converged = run.converged;
  Mat<S> z = run.z;

  if (run.exceeded) {
    // The ball is active: find rho > 0 with ||z(rho)|| = r by a bracketed
    // secant (Illinois) iteration on 1/||z(rho)|| - 1/r, increasing in rho.
    res.ball_active = true;
    const auto phi = [&](double rho, Mat<S>& warm, bool& ok) {
      auto o = cgls(op, b, rho, warm, std::numeric_limits<double>::infinity(), floor, opt.gradient_tolerance,
                    opt.max_iterations);
      res.iterations += o.iterations;
      ok = o.converged;
      warm = std::move(o.z);
      const double zn = warm.norm();
      return (zn > 0 ? 1.0 / zn : std::numeric_limits<double>::infinity()) - 1.0 / r_ball;
    };
    double lo = 0.0;
    double f_lo = 1.0 / run.z.norm() - 1.0 / r_ball;
    double hi = op.apply_adjoint(b).norm() / r_ball;
    Mat<S> z_lo = run.z;
    Mat<S> z_hi = zero;
    bool ok = false;
    double f_hi = phi(hi, z_hi, ok);
    bool converged = ok;
    int side = 0;
    for (int step = 0; step < opt.max_secant_steps; ++step) {
      if (f_hi <= 1e-10 / r_ball || hi - lo <= 1e-12 * hi) break;
      double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
      if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
      Mat<S> z_mid = f_hi < -f_lo ? z_hi : z_lo;
      const double f_mid = phi(mid, z_mid, ok);
      converged = ok;
      if (f_mid >= 0) {
        hi = mid;
        f_hi = f_mid;
        z_hi = std::move(z_mid);
        if (side == 1) f_lo *= 0.5;
        side = 1;
      } else {
        lo = mid;
        f_lo = f_mid;
        z_lo = std::move(z_mid);
        if (side == -1) f_hi *= 0.5;
        side = -1;
      }
    }
    z = z_hi;
    res.converged = converged;
  }
  const double zn = z.norm();
  if (zn > r_ball && zn > 0) z *= r_ball / zn;

  const Mat<S> x = x0 + op.project(z);
  res.minimal_residual = op.sylvester(x).norm() / scale;
  res.xnorm = x.norm() / scale;
  res.x = x.template cast<Complex>();
}

}  // namespace detail

/// Minimizes ||XT - lambda TX||_F over {X : h <X x_m, y_k> = 1, ||X||_F <= j sqrt(N)}
/// where x_m, y_k are midpoint-sampled monomials and h = 1/N. Both norms are
/// reported divided by sqrt(N), so the identity has norm 1.
inline ProbeResult constrained_residual_probe(const DenseOperator& t, const ComplexScalar& lambda, int m, int k,
                                              double j, const ProbeOptions& opt = {}) {
  if (m < 0 || k < 0) throw std::invalid_argument("test-vector indices must be non-negative");
  if (!(j >= 1)) throw std::invalid_argument("norm bound j must be at least 1");
  const Index n = t.dim();
  const double h = 1.0 / static_cast<double>(n);

  ProbeResult res;
  res.lambda = lambda.value();
  res.m = m;
  res.k = k;
  res.j = j;

  const Eigen::VectorXd x = monomial_samples(m, n);
  const Eigen::VectorXd y = monomial_samples(k, n);
  const RealMatrix a = h * y * x.transpose();
  if (a.squaredNorm() < 1e-300) throw std::runtime_error("infeasible constraint: test vectors are numerically zero");
  const double radius = j * std::sqrt(static_cast<double>(n));

  const ComplexMatrix& tm = t.numeric();
  if (tm.imag().isZero(0.0) && lambda.value().imag() == 0.0) {
    const RealMatrix tr = tm.real();
    detail::solve_probe<double>(tr, lambda.value().real(), a, radius, opt, res);
  } else {
    const ComplexMatrix ac = a.cast<Complex>();
    detail::solve_probe<Complex>(tm, lambda.value(), ac, radius, opt, res);
  }
  return res;
}

struct ProbeCurvePoint {
  Index n = 0;
  ProbeResult result;
};

/// The probe on V_N for each grid size.
inline std::vector<ProbeCurvePoint> volterra_probe_curve(const ComplexScalar& lambda, int m, int k, double j,
                                                         const std::vector<Index>& grids,
                                                         Scheme scheme = Scheme::Rectangle,
                                                         const ProbeOptions& opt = {}) {
  std::vector<ProbeCurvePoint> out;
  for (Index n : grids) {
    const auto v = discretize_volterra(n, scheme);
    out.push_back({n, constrained_residual_probe(v.matrix, lambda, m, k, j, opt)});
  }
  return out;
}

}  // namespace xeig

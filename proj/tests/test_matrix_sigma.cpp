#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace xeig;
using xeig::testing::diagonal;
using xeig::testing::Gen;
using xeig::testing::rational_matrix;
using xeig::testing::rref_rank;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

RationalMatrix random_integer_matrix(Gen& gen, Index n, long lo, long hi) {
  RationalMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = gen.integer(lo, hi);
  return m;
}

// Inverse over Q by Gauss-Jordan on [A | I]; nullopt when singular.
std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
  const Index n = a.rows();
  RationalMatrix aug(n, 2 * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  for (Index c = 0; c < n; ++c) {
    Index p = c;
    while (p < n && aug(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    for (Index j = 0; j < 2 * n; ++j) std::swap(aug(p, j), aug(c, j));
    const Rational pivot = aug(c, c);
    for (Index j = 0; j < 2 * n; ++j) aug(c, j) /= pivot;
    for (Index i = 0; i < n; ++i) {
      if (i == c || aug(i, c) == 0) continue;
      const Rational f = aug(i, c);
      for (Index j = 0; j < 2 * n; ++j) aug(i, j) -= f * aug(c, j);
    }
  }
  RationalMatrix inv(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

// P J P^-1 with J upper triangular carrying small integer eigenvalues, so the
// spectrum is rational but the matrix is dense.
RationalMatrix rational_spectrum_matrix(Gen& gen, Index n, bool diagonalizable = false) {
  RationalMatrix j(n, n);
  for (Index i = 0; i < n; ++i) {
    j(i, i) = diagonalizable ? Rational(gen.integer(1, 3) * (i + 1) * (gen.coin() ? 1 : -1)) : Rational(gen.integer(-4, 4));
    for (Index c = i + 1; c < n; ++c) j(i, c) = !diagonalizable && gen.coin() ? gen.integer(-2, 2) : 0;
  }
  for (;;) {
    const RationalMatrix p = random_integer_matrix(gen, n, -3, 3);
    if (auto pinv = inverse(p)) return p * j * *pinv;
  }
}

bool oracle_member(const RationalMatrix& t, const Rational& lambda) {
  const RationalMatrix m = sylvester_matrix(t, lambda);
  return rref_rank(m) < m.rows();
}

}  // namespace

TEST(ExactLinalg, BareissRankMatchesGaussJordan) {
  Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Index rows = gen.integer(1, 6);
    const Index cols = gen.integer(1, 6);
    RationalMatrix m(rows, cols);
    const Index true_rank = gen.integer(0, std::min(rows, cols));
    // sum of true_rank random rank-one terms
    for (Index r = 0; r < true_rank; ++r) {
      std::vector<Rational> u(rows), v(cols);
      for (auto& x : u) x = gen.rational(-5, 5, 3);
      for (auto& x : v) x = gen.rational(-5, 5, 3);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) += u[i] * v[j];
    }
    EXPECT_EQ(rank(m), rref_rank(m));
  }
}

TEST(ExactLinalg, KernelVectorIsInKernel) {
  Gen gen(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = gen.integer(3, 5);
    RationalMatrix m = random_integer_matrix(gen, n, -4, 4);
    for (Index j = 0; j < n; ++j) m(n - 1, j) = m(0, j) + m(1 % n, j);
    const auto v = kernel_vector(m);
    ASSERT_TRUE(v.has_value());
    bool nonzero = false;
    for (Index i = 0; i < n; ++i) {
      Rational acc = 0;
      for (Index j = 0; j < n; ++j) acc += m(i, j) * (*v)[j];
      EXPECT_EQ(acc, 0);
      nonzero = nonzero || (*v)[i] != 0;
    }
    EXPECT_TRUE(nonzero);
  }
  EXPECT_FALSE(kernel_vector(RationalMatrix::identity(3)).has_value());
}

TEST(MatrixSigma, DiagonalRatioSet) {
  const auto s = matrix_sigma(DenseOperator(diagonal({1, 2})));
  EXPECT_EQ(s.kind, MatrixSigmaSet::Kind::FiniteSet);
  ASSERT_TRUE(s.exact_values.has_value());
  EXPECT_EQ(*s.exact_values, (std::vector<Rational>{q(1, 2), q(1), q(2)}));
  const auto t = matrix_sigma(DenseOperator(diagonal({1, 2, 4})));
  EXPECT_EQ(*t.exact_values, (std::vector<Rational>{q(1, 4), q(1, 2), q(1), q(2), q(4)}));
  EXPECT_TRUE(t.contains(q(4)));
  EXPECT_FALSE(t.contains(q(3)));
}

TEST(MatrixSigma, ZeroEigenvalueGivesEverything) {
  EXPECT_EQ(matrix_sigma(DenseOperator(diagonal({0, 1}))).kind, MatrixSigmaSet::Kind::AllOfC);
  EXPECT_EQ(matrix_sigma(DenseOperator(rational_matrix({{1, 2}, {2, 4}}))).kind, MatrixSigmaSet::Kind::AllOfC);
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 2.0, 4.0 + 1e-14;
  EXPECT_EQ(matrix_sigma(DenseOperator(m)).kind, MatrixSigmaSet::Kind::AllOfC);
}

TEST(MatrixSigma, RotationHasUnimodularRatios) {
  // eigenvalues +-i: ratios {-1, 1}
  const auto s = matrix_sigma(DenseOperator(rational_matrix({{0, -1}, {1, 0}})));
  EXPECT_EQ(s.kind, MatrixSigmaSet::Kind::FiniteSet);
  ASSERT_EQ(s.values.size(), 2u);
  EXPECT_TRUE(s.contains(Complex(-1, 0)));
  EXPECT_TRUE(s.contains(q(1)));
  EXPECT_FALSE(s.contains(Complex(0, 1)));
}

TEST(MatrixSigma, DenseRationalSpectrumIsSnappedExactly) {
  Gen gen(33);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = gen.integer(2, 4);
    const auto t = rational_spectrum_matrix(gen, n);
    const auto s = matrix_sigma(DenseOperator(t));
    if (s.kind == MatrixSigmaSet::Kind::AllOfC) continue;
    ASSERT_TRUE(s.exact_values.has_value());
    for (const auto& lam : *s.exact_values) EXPECT_TRUE(oracle_member(t, lam)) << to_string(lam);
  }
}

TEST(MatrixSigma, AgreesWithNullSpaceOracle) {
  Gen gen(34);
  int disagreements = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = gen.integer(2, 4);
    const RationalMatrix t = trial % 2 == 0 ? rational_spectrum_matrix(gen, n) : random_integer_matrix(gen, n, -5, 5);
    const auto s = matrix_sigma(DenseOperator(t));
    std::set<Rational> candidates{q(1), q(-1), q(2), q(1, 2)};
    if (s.exact_values) candidates.insert(s.exact_values->begin(), s.exact_values->end());
    for (int c = 0; c < 4; ++c) candidates.insert(gen.rational(-6, 6, 4));
    for (const auto& lam : candidates) {
      const bool a = s.contains(lam);
      const bool b = oracle_member(t, lam);
      const auto sylvester = sylvester_membership(DenseOperator(t), ComplexScalar::exact(lam));
      if (a != b || (sylvester.status == Status::In) != b) ++disagreements;
    }
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(MatrixSigma, NumericPathAgreesWithExact) {
  Gen gen(35);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = gen.integer(2, 4);
    const auto t = rational_spectrum_matrix(gen, n, true);
    const auto exact = matrix_sigma(DenseOperator(t));
    const auto numeric = matrix_sigma(DenseOperator(t.to_complex()));
    if (exact.kind == MatrixSigmaSet::Kind::AllOfC) {
      EXPECT_EQ(numeric.kind, MatrixSigmaSet::Kind::AllOfC);
      continue;
    }
    EXPECT_TRUE(exact.same_as(numeric, 1e-8));
  }
}

TEST(Nilpotent, StrictlyTriangularIsAllOfC) {
  Gen gen(36);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = gen.integer(2, 6);
    RationalMatrix t(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < i; ++j) t(i, j) = gen.rational(-5, 5, 3);
    t(1, 0) = gen.integer(1, 4);
    const DenseOperator op(t);
    EXPECT_EQ(matrix_sigma(op).kind, MatrixSigmaSet::Kind::AllOfC);
    const auto x = nilpotent_witness(op);
    ASSERT_TRUE(x.has_value());
    EXPECT_FALSE(x->rational().is_zero());
    for (const auto& lam : {q(1), q(-3), q(7, 2), q(0)}) {
      const auto r = witness_residual(op, *x, ComplexScalar::exact(lam));
      EXPECT_EQ(r.residual, 0.0);
      EXPECT_FALSE(r.zero_witness);
    }
    const auto res = sylvester_membership(op, parse_complex("2+3i"));
    EXPECT_EQ(res.status, Status::In);
    EXPECT_EQ(res.method, "nilpotent");
  }
  EXPECT_FALSE(nilpotent_witness(DenseOperator(diagonal({1, 0}))).has_value());
}

TEST(Sylvester, KroneckerLayout) {
  Gen gen(37);
  const Index n = 3;
  ComplexMatrix t(n, n), x(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      t(i, j) = Complex(gen.uniform(-1, 1), gen.uniform(-1, 1));
      x(i, j) = Complex(gen.uniform(-1, 1), gen.uniform(-1, 1));
    }
  const Complex lambda(0.3, -1.1);
  const ComplexMatrix m = sylvester_matrix(t, lambda);
  Eigen::VectorXcd v(n * n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) v(i + j * n) = x(i, j);
  const ComplexMatrix expected = x * t - lambda * (t * x);
  const Eigen::VectorXcd got = m * v;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) EXPECT_LT(std::abs(got(i + j * n) - expected(i, j)), 1e-14);
}

TEST(Sylvester, WitnessesSatisfyTheEquation) {
  Gen gen(38);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = gen.integer(2, 4);
    const auto t = rational_spectrum_matrix(gen, n);
    const auto s = matrix_sigma(DenseOperator(t));
    if (!s.exact_values) continue;
    for (const auto& lam : *s.exact_values) {
      for (bool exact : {true, false}) {
        const DenseOperator op = exact ? DenseOperator(t) : DenseOperator(t.to_complex());
        const auto lambda = exact ? ComplexScalar::exact(lam) : ComplexScalar::approximate({to_double(lam), 0});
        const auto res = sylvester_membership(op, lambda);
        ASSERT_EQ(res.status, Status::In) << to_string(lam);
        ASSERT_TRUE(res.witness.has_value());
        const auto r = witness_residual(op, DenseOperator(*res.witness), lambda);
        EXPECT_NEAR(r.xnorm, 1.0, 1e-12);
        EXPECT_LT(r.residual, 1e-8 * std::max(1.0, operator_norm(t.to_complex())));
      }
    }
  }
}

TEST(Sylvester, IterativePathMatchesDense) {
  Gen gen(39);
  SylvesterOptions iterative;
  iterative.dense_cap = 0;
  iterative.exact_cap = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = gen.integer(3, 5);
    const auto t = rational_spectrum_matrix(gen, n);
    const DenseOperator op(t.to_complex());
    if (matrix_sigma(DenseOperator(t)).kind == MatrixSigmaSet::Kind::AllOfC) continue;
    for (const auto& lam : {q(1), q(5, 7), q(-1, 3)}) {
      const auto lambda = ComplexScalar::approximate({to_double(lam), 0});
      const auto a = sylvester_membership(op, lambda);
      const auto b = sylvester_membership(op, lambda, iterative);
      EXPECT_EQ(b.method, "schur-inverse-iteration");
      EXPECT_TRUE(b.approximate);
      EXPECT_EQ(a.status, b.status) << to_string(lam);
    }
  }
}

TEST(Sylvester, DimensionCap) {
  SylvesterOptions opt;
  opt.max_cap = 8;
  EXPECT_THROW(sylvester_membership(DenseOperator(diagonal({1, 2, 3})), ComplexScalar::exact(2), opt),
               std::invalid_argument);
}

TEST(Similarity, ConjugatesKeepTheRatioSet) {
  const DenseOperator d(diagonal({1, 2, 4}));
  const auto reference = matrix_sigma(d);
  const auto orbit = sample_similarity_orbit(d, 50, 100.0, 20240611);
  ASSERT_EQ(orbit.size(), 50u);
  for (const auto& c : orbit) {
    const auto s = matrix_sigma(c);
    ASSERT_EQ(s.kind, MatrixSigmaSet::Kind::FiniteSet);
    EXPECT_TRUE(s.same_as(reference, kClusterTolerance));
  }
}

TEST(Similarity, SamplerIsDeterministicAndConditioned) {
  const SimilaritySampler a(4, 50.0, 99), b(4, 50.0, 99), c(4, 50.0, 100);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto da = a.draw(i), db = b.draw(i);
    EXPECT_EQ(da.g, db.g);
    EXPECT_LE(da.condition, 50.0);
    EXPECT_LT((da.g * da.g_inv - RealMatrix::Identity(4, 4)).norm(), 1e-10);
  }
  EXPECT_NE(a.draw(3).g, c.draw(3).g);
  const SimilaritySampler with_identity(3, 10.0, 1, true);
  EXPECT_EQ(with_identity.draw(0).g, RealMatrix::Identity(3, 3));
  EXPECT_THROW(SimilaritySampler(3, 1.0, 1), std::invalid_argument);
}

TEST(OrbitDistance, SelfAndPermutation) {
  const DenseOperator a(diagonal({1, 2, 4}));
  const auto self = orbit_distance(a, a, 5, 10.0, 1);
  EXPECT_EQ(self.distance, 0.0);
  const auto swapped = orbit_distance(a, DenseOperator(diagonal({4, 1, 2})), 5, 10.0, 1);
  EXPECT_EQ(swapped.deterministic, 0.0);
}

TEST(OrbitDistance, CurveIsNonincreasingAndSeeded) {
  const DenseOperator a(rational_matrix({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
  const DenseOperator b(rational_matrix({{0, 0, 0}, {2, 0, 0}, {0, 3, 0}}));
  const auto r = orbit_distance(a, b, 40, 100.0, 7);
  ASSERT_EQ(r.curve.size(), 40u);
  for (std::size_t i = 1; i < r.curve.size(); ++i) EXPECT_LE(r.curve[i], r.curve[i - 1]);
  EXPECT_LE(r.distance, r.deterministic);
  EXPECT_EQ(r.curve, orbit_distance(a, b, 40, 100.0, 7).curve);
}

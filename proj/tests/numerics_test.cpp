#include "piobs/numerics.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "piobs/testkit.hpp"

namespace piobs {
namespace {

using cd = std::complex<double>;

bool contains(const Spectrum& s, cd value, double tol) {
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (std::abs(s(i) - value) <= tol) return true;
  }
  return false;
}

TEST(EigTest, Diagonal) {
  const Spectrum s = eig(Eigen::Vector2d(-1, -2).asDiagonal().toDenseMatrix());
  ASSERT_EQ(s.size(), 2);
  EXPECT_TRUE(contains(s, -1.0, 1e-14));
  EXPECT_TRUE(contains(s, -2.0, 1e-14));
}

TEST(EigTest, RotationGenerator) {
  Matrix m(2, 2);
  m << 0, 1, -1, 0;
  const Spectrum s = eig(m);
  EXPECT_TRUE(contains(s, cd(0, 1), 1e-14));
  EXPECT_TRUE(contains(s, cd(0, -1), 1e-14));
}

TEST(EigTest, CompanionOfS2Plus3SPlus2) {
  Matrix m(2, 2);
  m << -3, 2, -1, 0;
  const Eigen::Vector2d poly = oracle::char_poly_2x2(m);
  EXPECT_DOUBLE_EQ(poly(0), 2.0);
  EXPECT_DOUBLE_EQ(poly(1), 3.0);
  const Spectrum s = eig(m);
  EXPECT_TRUE(contains(s, -1.0, 1e-12));
  EXPECT_TRUE(contains(s, -2.0, 1e-12));
}

TEST(EigTest, NonSquareIsDimensionError) {
  EXPECT_THROW(eig(Matrix::Zero(2, 3)), DimensionError);
}

TEST(EigTest, TriangularMatchesDiagonal) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 9;
    Matrix m = testkit::random_gaussian(n, n, rng);
    m = m.triangularView<Eigen::Upper>();
    Spectrum diag = m.diagonal().cast<cd>();
    EXPECT_LE(match_spectra(eig(m), diag), 1e-12);
  }
}

TEST(SvdTest, Examples) {
  Matrix a(2, 2);
  a << 1, 0, 0, 0;
  EXPECT_EQ(svd(a).singular_values, Eigen::Vector2d(1, 0));
  EXPECT_EQ(svd(Matrix::Zero(3, 2)).singular_values, Eigen::Vector2d(0, 0));
  Matrix b(2, 2);
  b << 3, 0, 0, 4;
  const auto f = svd(b);
  EXPECT_NEAR(f.singular_values(0), 4.0, 1e-15);
  EXPECT_NEAR(f.singular_values(1), 3.0, 1e-15);
}

TEST(SvdTest, SignConvention) {
  Matrix m(2, 2);
  m << 0, -2, -1, 0;
  const auto f = svd(m);
  for (Eigen::Index j = 0; j < f.U.cols(); ++j) {
    Eigen::Index lead;
    f.U.col(j).cwiseAbs().maxCoeff(&lead);
    EXPECT_GE(f.U(lead, j), 0.0);
  }
  EXPECT_LE((f.U * f.singular_values.asDiagonal() * f.V.transpose() - m)
                .norm(),
            1e-14);
}

TEST(SvdTest, ReconstructsRandomMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = dim(rng), c = dim(rng);
    const Matrix m = testkit::random_gaussian(r, c, rng);
    const auto f = svd(m);
    Matrix sigma = Matrix::Zero(r, c);
    sigma.diagonal() = f.singular_values;
    EXPECT_LE((m - f.U * sigma * f.V.transpose()).norm(), 1e-12 * m.norm());
    for (Eigen::Index i = 1; i < f.singular_values.size(); ++i) {
      EXPECT_GE(f.singular_values(i - 1), f.singular_values(i));
    }
    EXPECT_LE((f.U.transpose() * f.U - Matrix::Identity(r, r)).norm(), 1e-12);
    EXPECT_LE((f.V.transpose() * f.V - Matrix::Identity(c, c)).norm(), 1e-12);
  }
}

TEST(SvdTest, Deterministic) {
  std::mt19937_64 rng(3);
  const Matrix m = testkit::random_gaussian(5, 4, rng);
  const auto a = svd(m);
  const auto b = svd(m);
  EXPECT_EQ(a.U, b.U);
  EXPECT_EQ(a.V, b.V);
}

TEST(RankTest, Examples) {
  Matrix a(2, 2);
  a << 1, 0, 0, 0;
  EXPECT_EQ(numerical_rank(a, 1e-9), 1);
  EXPECT_EQ(numerical_rank(Matrix::Identity(3, 3), 1e-9), 3);
  Matrix b(2, 2);
  b << 1, 1, 1, 1 + 1e-15;
  // Second singular value of b is below 1e-15.
  EXPECT_LT(svd(b).singular_values(1), 1e-14);
  EXPECT_EQ(numerical_rank(b, 1e-9), 1);
  EXPECT_EQ(numerical_rank(Matrix::Zero(3, 3), 1e-9), 0);
  EXPECT_THROW(numerical_rank(a, 0.0), ConfigError);
}

TEST(RankTest, InvariantUnderOrthogonalFactors) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int r = 2 + trial % 6, c = 3 + trial % 5;
    const int k = trial % (std::min(r, c) + 1);
    const Matrix m = testkit::random_gaussian(r, k, rng) *
                     testkit::random_gaussian(k, c, rng);
    const int base = numerical_rank(m);
    EXPECT_EQ(base, k);
    const Matrix u = testkit::random_orthogonal(r, rng);
    const Matrix v = testkit::random_orthogonal(c, rng);
    EXPECT_EQ(numerical_rank(Matrix(u * m * v)), base);
  }
}

TEST(InvertTest, Examples) {
  EXPECT_EQ(invert(Matrix::Identity(3, 3)), Matrix::Identity(3, 3));
  Matrix a(2, 2);
  a << 2, 0, 0, 4;
  Matrix expected(2, 2);
  expected << 0.5, 0, 0, 0.25;
  EXPECT_LE((invert(a) - expected).norm(), 1e-16);
}

TEST(InvertTest, RefusesIllConditioned) {
  const Matrix m = Eigen::Vector2d(1, 1e-15).asDiagonal();
  EXPECT_NEAR(condition_number(m), 1e15, 1.0);
  EXPECT_GT(condition_number(m), max_condition_number());
  EXPECT_THROW(invert(m), SingularityError);
  EXPECT_THROW(solve_linear(m, Matrix::Ones(2, 1)), SingularityError);
}

TEST(SolveLinearTest, Residual) {
  std::mt19937_64 rng(9);
  const Matrix a = testkit::random_gaussian(6, 6, rng);
  const Matrix b = testkit::random_gaussian(6, 2, rng);
  const Matrix x = solve_linear(a, b);
  EXPECT_LE((a * x - b).norm(), 1e-12 * a.norm() * x.norm());
  EXPECT_THROW(solve_linear(a, Matrix::Ones(5, 1)), DimensionError);
}

TEST(SylvesterTest, Scalar) {
  const Matrix x = solve_sylvester(Matrix::Constant(1, 1, 2.0),
                                   Matrix::Constant(1, 1, -1.0),
                                   Matrix::Constant(1, 1, 3.0));
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
}

TEST(SylvesterTest, ZeroRightHandSide) {
  std::mt19937_64 rng(1);
  const Matrix a = testkit::random_gaussian(3, 3, rng) + 5 * Matrix::Identity(3, 3);
  const Matrix b = testkit::random_gaussian(2, 2, rng) - 5 * Matrix::Identity(2, 2);
  EXPECT_EQ(solve_sylvester(a, b, Matrix::Zero(3, 2)).norm(), 0.0);
}

TEST(SylvesterTest, OverlappingSpectraRejected) {
  EXPECT_THROW(solve_sylvester(Matrix::Identity(2, 2), Matrix::Identity(1, 1),
                               Matrix::Ones(2, 1)),
               NoUniqueSolutionError);
}

TEST(SylvesterTest, MatchesKroneckerOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = dim(rng), n = dim(rng);
    const Matrix a = testkit::random_gaussian(m, m, rng);
    const Matrix b = testkit::random_gaussian(n, n, rng) +
                     3.0 * Matrix::Identity(n, n);
    const Matrix c = testkit::random_gaussian(m, n, rng);
    const Matrix x = solve_sylvester(a, b, c);
    const Matrix ref = oracle::sylvester_kronecker(a, b, c);
    EXPECT_LE((x - ref).norm(), 1e-8 * std::max(1.0, ref.norm()));
    EXPECT_LE((a * x - x * b - c).norm(),
              1e-8 * (a.norm() + b.norm()) * x.norm() + 1e-10 * c.norm());
  }
}

TEST(RealBlockFormTest, SpectrumAndStructure) {
  const std::vector<cd> poles{{-1, 2}, {-3, 0}, {-1, -2}, {-3, 0}};
  const Matrix l = real_block_form(poles);
  Spectrum expected(4);
  expected << cd(-1, 2), cd(-1, -2), -3.0, -3.0;
  EXPECT_LE(match_spectra(eig(l), expected), 1e-7);
  // Blocks run by descending real part; the repeated real pole is chained
  // into a Jordan block.
  EXPECT_EQ(l(0, 1), 2.0);
  EXPECT_EQ(l(1, 0), -2.0);
  EXPECT_EQ(l(2, 3), 1.0);
  EXPECT_EQ(l(3, 2), 0.0);
  EXPECT_THROW(real_block_form({{-1, 1}}), ConfigError);
}

TEST(MatchSpectraTest, MultisetSemantics) {
  Spectrum a(3), b(3), c(2);
  a << -1.0, -1.0, -2.0;
  b << -2.0, -1.0, -1.0;
  c << -1.0, -2.0;
  EXPECT_EQ(match_spectra(a, b), 0.0);
  EXPECT_TRUE(std::isinf(match_spectra(a, c)));
  b << -2.0, -2.0, -1.0;
  EXPECT_NEAR(match_spectra(a, b), 1.0, 1e-15);
}

TEST(NullSpaceTest, OrthonormalAndAnnihilating) {
  std::mt19937_64 rng(4);
  const Matrix c = testkit::random_gaussian(2, 5, rng);
  const Matrix n = null_space(c, 1e-12);
  ASSERT_EQ(n.cols(), 3);
  EXPECT_LE((c * n).norm(), 1e-13);
  EXPECT_LE((n.transpose() * n - Matrix::Identity(3, 3)).norm(), 1e-13);
}

}  // namespace
}  // namespace piobs

#include <random>

#include "hre/numerics.hpp"
#include "hre/sympgrp.hpp"
#include "test_util.hpp"

using namespace hre;

namespace {

CMatrix random_matrix(SeededSampler &s, std::size_t r, std::size_t c)
{
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = s.complex();
    return m;
}

// Diagonally dominant, so the condition number stays small.
CMatrix well_conditioned(SeededSampler &s, std::size_t n)
{
    CMatrix m = random_matrix(s, n, n) * 0.25;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += 4.0;
    return m;
}

CMatrix naive_product(const CMatrix &a, const CMatrix &b)
{
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

} // namespace

TEST(CMatrix, RejectsBadShapes)
{
    EXPECT_THROW(CMatrix(0, 3), std::invalid_argument);
    EXPECT_THROW(CMatrix(2, 2, std::vector<cplx>(3)), std::invalid_argument);
    EXPECT_THROW(CMatrix(1, 1, {cplx{std::nan(""), 0.0}}), std::invalid_argument);
    EXPECT_THROW(CMatrix(1, 1, {cplx{0.0, INFINITY}}), std::invalid_argument);
}

TEST(CMatrix, TransposeAndParts)
{
    const CMatrix m{{1.0, cplx{2, 3}}, {cplx{0, -1}, 4.0}};
    EXPECT_EQ(m.transpose()(0, 1), cplx(0, -1));
    EXPECT_EQ(m.real_part()(0, 1), cplx(2, 0));
    EXPECT_EQ(m.imag_part()(0, 1), cplx(3, 0));
    EXPECT_DOUBLE_EQ(m.max_abs(), 4.0);
}

TEST(MatMul, IdentityIsNeutral)
{
    SeededSampler s(1);
    const CMatrix x = random_matrix(s, 2, 2);
    EXPECT_EQ(CMatrix::identity(2) * x, x);
}

TEST(MatMul, JSquaredIsMinusIdentity)
{
    for (std::size_t g = 1; g <= 4; ++g) {
        EXPECT_EQ(j_matrix(g) * j_matrix(g), -CMatrix::identity(2 * g));
    }
}

TEST(MatMul, MatchesTripleLoop)
{
    SeededSampler s(2);
    for (int t = 0; t < 10; ++t) {
        const CMatrix a = random_matrix(s, 3, 3), b = random_matrix(s, 3, 3);
        EXPECT_MAT_NEAR(a * b, naive_product(a, b), 1e-14);
    }
    const CMatrix a = random_matrix(s, 2, 3), b = random_matrix(s, 3, 4);
    EXPECT_MAT_NEAR(a * b, naive_product(a, b), 1e-14);
}

TEST(MatMul, DimensionMismatchThrows)
{
    EXPECT_THROW(mat_mul(CMatrix(2, 3), CMatrix(2, 3)), std::invalid_argument);
}

TEST(MatMul, AssociativityProperty)
{
    SeededSampler s(3);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + s.raw() % 5;
        const CMatrix a = random_matrix(s, n, n), b = random_matrix(s, n, n), c = random_matrix(s, n, n);
        const double scale = std::max(1.0, a.max_abs() * b.max_abs() * c.max_abs() * static_cast<double>(n * n));
        EXPECT_LE(max_abs_diff((a * b) * c, a * (b * c)), 1e-9 * scale);
    }
}

TEST(MatInv, Identity)
{
    for (std::size_t g = 1; g <= 4; ++g) EXPECT_EQ(mat_inv(CMatrix::identity(g)), CMatrix::identity(g));
}

TEST(MatInv, Diagonal)
{
    const CMatrix d{{2.0, 0.0}, {0.0, cplx{0, 4}}};
    const CMatrix expected{{0.5, 0.0}, {0.0, cplx{0, -0.25}}};
    EXPECT_MAT_NEAR(mat_inv(d), expected, 1e-15);
}

TEST(MatInv, ResidualOnWellConditioned)
{
    SeededSampler s(4);
    for (int t = 0; t < 20; ++t) {
        const CMatrix a = well_conditioned(s, 4);
        EXPECT_MAT_NEAR(a * mat_inv(a), CMatrix::identity(4), 1e-10);
    }
}

TEST(MatInv, DoubleInverseProperty)
{
    SeededSampler s(5);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + s.raw() % 6;
        const CMatrix a = well_conditioned(s, n);
        EXPECT_MAT_NEAR(mat_inv(mat_inv(a)), a, 1e-8);
    }
}

TEST(MatInv, SingularThrows)
{
    EXPECT_THROW(mat_inv(CMatrix{{1.0, 2.0}, {2.0, 4.0}}), SingularMatrixError);
    EXPECT_THROW(mat_inv(CMatrix(3, 3)), SingularMatrixError);
    EXPECT_THROW(mat_inv(CMatrix(2, 3)), std::invalid_argument);
}

TEST(Determinant, ExplicitFormulas)
{
    SeededSampler s(6);
    const CMatrix a = random_matrix(s, 2, 2);
    EXPECT_CPLX_NEAR(determinant(a), a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0), 1e-13);
    const CMatrix b = random_matrix(s, 3, 3);
    const cplx expected = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                          b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                          b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    EXPECT_CPLX_NEAR(determinant(b), expected, 1e-12);
}

TEST(Blocks, SplitJ)
{
    for (std::size_t g = 1; g <= 3; ++g) {
        const auto [a, b, c, d] = block_split(j_matrix(g), g);
        EXPECT_EQ(a, CMatrix(g, g));
        EXPECT_EQ(b, CMatrix::identity(g));
        EXPECT_EQ(c, -CMatrix::identity(g));
        EXPECT_EQ(d, CMatrix(g, g));
    }
}

TEST(Blocks, SplitUnipotent)
{
    const CMatrix tau{{cplx{0, 2}, 1.0}, {1.0, cplx{0, 1}}};
    const auto blk = block_split(unipotent(tau));
    EXPECT_EQ(blk.a, CMatrix::identity(2));
    EXPECT_EQ(blk.b, tau);
    EXPECT_EQ(blk.c, CMatrix(2, 2));
    EXPECT_EQ(blk.d, CMatrix::identity(2));
}

TEST(Blocks, RoundTripIsBitExact)
{
    SeededSampler s(7);
    for (int t = 0; t < 20; ++t) {
        const CMatrix m = random_matrix(s, 6, 6);
        EXPECT_EQ(block_join(block_split(m, 3)), m);
    }
}

TEST(Blocks, DimensionErrors)
{
    EXPECT_THROW(block_split(CMatrix(4, 4), 3), std::invalid_argument);
    EXPECT_THROW(block_split(CMatrix(3, 3)), std::invalid_argument);
    EXPECT_THROW(block_join(CMatrix(2, 2), CMatrix(2, 2), CMatrix(1, 1), CMatrix(2, 2)), std::invalid_argument);
}

TEST(PositiveDefinite, LeadingMinors)
{
    EXPECT_TRUE(is_positive_definite(CMatrix{{2.0, 1.0}, {1.0, 1.0}}));
    EXPECT_FALSE(is_positive_definite(CMatrix{{1.0, 2.0}, {2.0, 1.0}}));
    EXPECT_FALSE(is_positive_definite(CMatrix(2, 2)));
}

TEST(Tolerance, Validation)
{
    EXPECT_NO_THROW(Tolerance());
    EXPECT_DOUBLE_EQ(Tolerance().abs_tol, 1e-10);
    EXPECT_DOUBLE_EQ(Tolerance().fd_step, 1e-6);
    EXPECT_THROW(Tolerance(0.0), std::invalid_argument);
    EXPECT_THROW(Tolerance(1e-10, -1.0), std::invalid_argument);
}

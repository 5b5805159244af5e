#include "hre/siegel.hpp"
#include "test_util.hpp"

using namespace hre;

TEST(InSiegel, Membership)
{
    EXPECT_TRUE(in_siegel(CMatrix{{cplx{0, 1}}}));
    EXPECT_FALSE(in_siegel(CMatrix{{cplx{3, 0}}}));
    EXPECT_FALSE(in_siegel(CMatrix{{cplx{0, -1}}}));
    EXPECT_TRUE(in_siegel(CMatrix{{cplx{0, 2}, cplx{1, 1}}, {cplx{1, 1}, cplx{0, 2}}}));
    // Im tau indefinite
    EXPECT_FALSE(in_siegel(CMatrix{{cplx{0, 1}, cplx{0, 2}}, {cplx{0, 2}, cplx{0, 1}}}));
    // not symmetric
    EXPECT_FALSE(in_siegel(CMatrix{{cplx{0, 1}, 1.0}, {0.0, cplx{0, 1}}}));
    EXPECT_THROW(in_siegel(CMatrix(2, 3)), std::invalid_argument);
}

TEST(SiegelPoint, MakeValidates)
{
    EXPECT_NO_THROW(SiegelPoint::scalar(cplx{0.5, 2.0}));
    EXPECT_THROW(SiegelPoint::scalar(cplx{0.5, 0.0}), std::domain_error);
    EXPECT_EQ(SiegelPoint::scalar(cplx{0, 1}, 3).g(), 3u);
}

TEST(SiegelPoint, SamplerStaysInside)
{
    SeededSampler s(31);
    for (int t = 0; t < 50; ++t) EXPECT_TRUE(in_siegel(s.siegel_point(1 + t % 4)));
}

TEST(Cocycle, Formula)
{
    const CMatrix tau{{cplx{0, 2}}};
    const CMatrix gamma{{1.0, 2.0}, {3.0, 7.0}};
    EXPECT_CPLX_NEAR(cocycle_j(gamma, tau)(0, 0), cplx(7.0, 6.0), 0.0);
    EXPECT_THROW(cocycle_j(gamma, CMatrix::identity(2)), std::invalid_argument);
}

TEST(Cocycle, CocycleRelationProperty)
{
    // j(g1 g2, tau) = j(g1, g2 tau) j(g2, tau)
    SeededSampler s(32);
    for (int t = 0; t < 30; ++t) {
        const std::size_t g = 1 + t % 3;
        const auto g1 = SymplecticMatrix::from(s.symplectic_word(g, 4, false), 1e-9);
        const auto g2 = SymplecticMatrix::from(s.symplectic_word(g, 4, false), 1e-9);
        const SiegelPoint tau = SiegelPoint::make(s.siegel_point(g));
        const SiegelPoint t2 = moebius(g2, tau);
        const CMatrix lhs = cocycle_j((g1 * g2).matrix(), tau.tau());
        const CMatrix rhs = cocycle_j(g1.matrix(), t2.tau()) * cocycle_j(g2.matrix(), tau.tau());
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-8 * std::max(1.0, lhs.max_abs()));
    }
}

TEST(Moebius, GenusOneFormula)
{
    const cplx t{0.25, 1.5};
    const CMatrix gamma{{2.0, 1.0}, {1.0, 1.0}};
    const auto out = moebius(SymplecticMatrix::from(gamma), SiegelPoint::scalar(t));
    EXPECT_CPLX_NEAR(out(0, 0), (2.0 * t + 1.0) / (t + 1.0), 1e-14);
    const auto inv = moebius(SymplecticMatrix::from(j_matrix(1)), SiegelPoint::scalar(t));
    EXPECT_CPLX_NEAR(inv(0, 0), -1.0 / t, 1e-14);
}

TEST(Moebius, TranslationAndActionLaw)
{
    SeededSampler s(33);
    for (int t = 0; t < 30; ++t) {
        const std::size_t g = 1 + t % 3;
        const SiegelPoint tau = SiegelPoint::make(s.siegel_point(g));
        const CMatrix n = s.integer_symmetric(g);
        EXPECT_MAT_NEAR(moebius(SymplecticMatrix::from(unipotent(n)), tau).tau(), tau.tau() + n, 1e-14);
        const auto g1 = SymplecticMatrix::from(s.integer_symplectic_word(g, 4));
        const auto g2 = SymplecticMatrix::from(s.integer_symplectic_word(g, 4));
        const CMatrix lhs = moebius(g1 * g2, tau).tau();
        const CMatrix rhs = moebius(g1, moebius(g2, tau)).tau();
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-9 * std::max(1.0, lhs.max_abs()));
    }
}

TEST(Moebius, RejectsComplexGamma)
{
    const CMatrix z{{cplx{0, 1}}};
    EXPECT_THROW(moebius(SymplecticMatrix::from(unipotent(z)), SiegelPoint::scalar(cplx{0, 1})), std::invalid_argument);
    EXPECT_THROW(moebius(SymplecticMatrix::identity(2), SiegelPoint::scalar(cplx{0, 1})), std::invalid_argument);
}

TEST(UDelta, Membership)
{
    const CMatrix tau{{cplx{0, 1}}};
    EXPECT_TRUE(u_delta_contains(CMatrix::identity(2), tau));
    // C tau + D = tau - i = 0
    const CMatrix delta{{1.0, 0.0}, {1.0, cplx{0, -1}}};
    EXPECT_FALSE(u_delta_contains(delta, tau));
}

TEST(GrassmannAct, ChartExitAndComposition)
{
    const CMatrix z{{cplx{0, 1}}};
    EXPECT_FALSE(grassmann_act(j_matrix(1), CMatrix{{0.0}}));
    const auto w = grassmann_act(j_matrix(1), z);
    ASSERT_TRUE(w);
    EXPECT_CPLX_NEAR((*w)(0, 0), -1.0 / cplx(0, 1), 1e-15);
    EXPECT_THROW(grassmann_act(CMatrix::identity(4), CMatrix{{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);

    SeededSampler s(34);
    for (int t = 0; t < 20; ++t) {
        const std::size_t g = 1 + t % 2;
        const CMatrix a = s.symplectic_word(g, 3), b = s.symplectic_word(g, 3);
        const CMatrix z0 = s.symmetric(g, true, -1.0, 1.0);
        const auto inner = grassmann_act(b, z0);
        if (!inner) continue;
        const auto lhs = grassmann_act(a * b, z0);
        const auto rhs = grassmann_act(a, *inner);
        if (!lhs || !rhs) continue;
        EXPECT_LE(max_abs_diff(*lhs, *rhs), 1e-7 * std::max(1.0, lhs->max_abs()));
    }
}

#include "hre/flows.hpp"
#include "test_util.hpp"

using namespace hre;

namespace {

const cplx i_unit{0.0, 1.0};

double scale_of(const CMatrix &m) { return std::max(1.0, m.max_abs()); }

SymplecticMatrix integer_gamma(SeededSampler &s, std::size_t g)
{
    return SymplecticMatrix::from(s.integer_symplectic_word(g, 4));
}

} // namespace

TEST(Psi, GroupLaw)
{
    EXPECT_EQ(psi(CMatrix(2, 2)).matrix(), CMatrix::identity(4));
    SeededSampler s(61);
    for (int t = 0; t < 20; ++t) {
        const std::size_t g = 1 + t % 3;
        const CMatrix z1 = s.symmetric(g, true), z2 = s.symmetric(g, true);
        EXPECT_EQ((psi(z1) * psi(z2)).matrix(), psi(z1 + z2).matrix());
        EXPECT_EQ(psi(z1).inverse().matrix(), psi(z1 * cplx{-1.0}).matrix());
    }
    EXPECT_THROW(psi(CMatrix{{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);
}

TEST(InBg, Membership)
{
    SeededSampler s(62);
    for (std::size_t g = 1; g <= 3; ++g) {
        EXPECT_TRUE(in_Bg(psi(s.siegel_point(g))));
        EXPECT_FALSE(in_Bg(psi(s.symmetric(g, false))));
        EXPECT_FALSE(in_Bg(SymplecticMatrix::from(j_matrix(g))));
        // right multiplication by the embedded parabolic keeps B D^{-1} fixed
        const CMatrix tau = s.siegel_point(g);
        const auto moved = SymplecticMatrix::from(unipotent(tau) * p_to_pprime(s.parabolic(g)), 1e-9);
        EXPECT_TRUE(in_Bg(moved));
    }
}

TEST(ExactFlow, ZeroAndTranslation)
{
    SeededSampler s(63);
    for (std::size_t g = 1; g <= 3; ++g) {
        const CMatrix tau = s.siegel_point(g);
        EXPECT_EQ(exact_flow(psi(tau), CMatrix(g, g)).matrix(), unipotent(tau));
        const CMatrix n = s.integer_symmetric(g);
        EXPECT_MAT_NEAR(exact_flow(psi(tau), two_pi_i * n).matrix(), unipotent(tau + n), 1e-14);
    }
    EXPECT_THROW(exact_flow(psi(CMatrix(2, 2)), CMatrix(3, 3)), std::invalid_argument);
}

TEST(ExactFlow, ReadsUpperTriangle)
{
    const CMatrix t{{1.0, 2.0}, {99.0, 3.0}};
    EXPECT_EQ(coefficient_matrix(t), (CMatrix{{1.0, 2.0}, {2.0, 3.0}}));
}

TEST(ExactFlow, GroupActionProperty)
{
    SeededSampler s(64);
    for (int t = 0; t < 30; ++t) {
        const std::size_t g = 1 + t % 3;
        const auto m0 = SymplecticMatrix::from(s.symplectic_word(g, 5), 1e-9);
        const CMatrix t1 = s.symmetric(g, true), t2 = s.symmetric(g, true);
        const CMatrix ab = exact_flow(exact_flow(m0, t1), t2).matrix();
        const CMatrix ba = exact_flow(exact_flow(m0, t2), t1).matrix();
        const CMatrix sum = exact_flow(m0, t1 + t2).matrix();
        EXPECT_LE(max_abs_diff(ab, ba), 1e-12 * scale_of(ab));
        EXPECT_LE(max_abs_diff(ab, sum), 1e-12 * scale_of(ab));
        const CMatrix j = j_matrix(g);
        EXPECT_LE(max_abs_diff(ab * j * ab.transpose(), j), 1e-10 * scale_of(ab) * scale_of(ab));
    }
}

TEST(Rk4Flow, SingleStepIsExact)
{
    for (std::size_t g = 1; g <= 3; ++g) {
        const auto m0 = psi(i_unit * CMatrix::identity(g));
        const auto r = rk4_flow(m0, 1, 1, two_pi_i, 1);
        EXPECT_MAT_NEAR(r.end.matrix(), unipotent(i_unit * CMatrix::identity(g) + e_basis(1, 1, g)), 1e-12);
    }
}

TEST(Rk4Flow, StepCountIrrelevant)
{
    const CMatrix tau{{cplx{0.1, 1.0}, 0.2}, {0.2, cplx{0, 1.5}}};
    const auto r1 = rk4_flow(psi(tau), 1, 2, cplx{0.7, -0.4}, 1);
    const auto r1000 = rk4_flow(psi(tau), 1, 2, cplx{0.7, -0.4}, 1000);
    EXPECT_MAT_NEAR(r1.end.matrix(), r1000.end.matrix(), 1e-11);
    EXPECT_THROW(rk4_flow(psi(tau), 1, 2, 1.0, 0), std::invalid_argument);
}

TEST(Rk4Flow, MatchesExactFlowProperty)
{
    SeededSampler s(65);
    for (int t = 0; t < 50; ++t) {
        const std::size_t g = 1 + t % 3;
        const auto m0 = SymplecticMatrix::from(s.symplectic_word(g, 6), 1e-9);
        const std::size_t k = 1 + s.raw() % g;
        const std::size_t l = k + s.raw() % (g - k + 1);
        const cplx dur = s.complex();
        const auto r = rk4_flow(m0, k, l, dur, 1 + s.raw() % 20);
        CMatrix coeff(g, g);
        coeff(k - 1, l - 1) = dur;
        const CMatrix exact = exact_flow(m0, coeff).matrix();
        EXPECT_LE(max_abs_diff(r.end.matrix(), exact), 1e-12 * scale_of(exact));
        EXPECT_LE(r.max_defect, 1e-10 * scale_of(exact) * scale_of(exact));
    }
}

TEST(Rk4Flow, GeneratorFiniteDifference)
{
    SeededSampler s(66);
    for (std::size_t g = 1; g <= 3; ++g) {
        const CMatrix tau = s.siegel_point(g);
        for (std::size_t k = 1; k <= g; ++k)
            for (std::size_t l = k; l <= g; ++l) EXPECT_LE(generator_fd_residual(tau, k, l), 1e-9);
    }
}

TEST(PsiDelta, IdentityAndUnipotentDelta)
{
    SeededSampler s(67);
    for (std::size_t g = 1; g <= 3; ++g) {
        const CMatrix tau = s.siegel_point(g);
        EXPECT_MAT_NEAR(psi_delta(SymplecticMatrix::identity(g), tau).matrix(), unipotent(tau), 1e-14);
        // delta in U_g(C): U_delta = H_g and psi_delta = psi
        const auto delta = psi(s.symmetric(g, true));
        EXPECT_TRUE(u_delta_contains(delta.matrix(), tau));
        EXPECT_MAT_NEAR(psi_delta(delta, tau).matrix(), unipotent(tau), 1e-12);
    }
}

TEST(PsiDelta, OutsideDomainThrows)
{
    // c tau + d = tau - i vanishes at tau = i
    const auto delta = SymplecticMatrix::from(CMatrix{{i_unit, 0.0}, {1.0, -i_unit}});
    EXPECT_THROW(psi_delta(delta, CMatrix{{i_unit}}), std::domain_error);
    EXPECT_THROW(p_delta(delta, CMatrix{{i_unit}}), SingularMatrixError);
}

TEST(PsiDelta, LiesOnLeafAndInBg)
{
    SeededSampler s(68);
    for (int t = 0; t < 30; ++t) {
        const LeafCase lc = draw_leaf_case(s, 1 + t % 3);
        const SymplecticMatrix st = psi_delta(lc.delta, lc.tau.tau());
        EXPECT_TRUE(in_Bg(st));
        // delta psi_delta(tau) is unipotent
        const auto [a, b, c, d] = block_split(lc.delta.matrix() * st.matrix());
        const double sc = scale_of(b);
        EXPECT_MAT_NEAR(a, CMatrix::identity(lc.tau.g()), 1e-9 * sc);
        EXPECT_LE(c.max_abs(), 1e-9 * sc);
        const CMatrix j = j_matrix(lc.tau.g());
        EXPECT_LE(max_abs_diff(st.matrix() * j * st.matrix().transpose(), j), 1e-10 * scale_of(st.matrix()) * scale_of(st.matrix()));
    }
}

TEST(PsiDelta, FactorizationProperty)
{
    SeededSampler s(69);
    for (int t = 0; t < 50; ++t) {
        const LeafCase lc = draw_leaf_case(s, 1 + t % 3);
        EXPECT_LE(psi_delta_factor_residual(lc.delta, lc.tau.tau()), 1e-10 * scale_of(psi_delta(lc.delta, lc.tau.tau()).matrix()));
    }
}

TEST(PDelta, GenusOneEntries)
{
    const CMatrix d{{2.0, cplx{0, 1}}, {cplx{0.5, 0.5}, 0.0}};
    CMatrix delta = d;
    delta(1, 1) = (1.0 + d(0, 1) * d(1, 0)) / d(0, 0);
    const auto sd = SymplecticMatrix::from(delta);
    const cplx tau{0.3, 1.2};
    const ParabolicElement p = p_delta(sd, CMatrix{{tau}});
    const cplx c = delta(1, 0), dd = delta(1, 1);
    EXPECT_CPLX_NEAR(p.a()(0, 0), 1.0 / (c * tau + dd), 1e-14);
    EXPECT_CPLX_NEAR(p.b()(0, 0), -c / two_pi_i, 1e-15);
}

TEST(PDelta, IdentityDelta)
{
    const CMatrix tau{{cplx{0, 1}, 0.5}, {0.5, cplx{0, 2}}};
    const ParabolicElement p = p_delta(SymplecticMatrix::identity(2), tau);
    EXPECT_EQ(p.a(), CMatrix::identity(2));
    EXPECT_EQ(p.b(), CMatrix(2, 2));
}

TEST(DeltaFrom, IdentityParabolic)
{
    const CMatrix tau{{cplx{0.2, 1.0}}};
    const auto delta = delta_from(tau, ParabolicElement::identity(1));
    EXPECT_MAT_NEAR(delta.matrix(), unipotent(tau * cplx{-1.0}), 1e-15);
    const ParabolicElement p = p_delta(delta, tau);
    EXPECT_MAT_NEAR(p.a(), CMatrix::identity(1), 1e-15);
    EXPECT_MAT_NEAR(p.b(), CMatrix(1, 1), 1e-15);
}

TEST(DeltaFrom, RoundTripProperty)
{
    SeededSampler s(70);
    for (int t = 0; t < 20; ++t) {
        const std::size_t g = 1 + t % 3;
        const CMatrix tau = s.siegel_point(g);
        const ParabolicElement p = s.parabolic(g);
        const auto delta = delta_from(tau, p);
        EXPECT_TRUE(is_symplectic(delta.matrix(), 1e-10 * scale_of(delta.matrix()) * scale_of(delta.matrix())).symplectic);
        EXPECT_TRUE(u_delta_contains(delta.matrix(), tau));
        EXPECT_LE(delta_round_trip_residual(tau, p), 1e-10);
    }
}

TEST(Equivariance, TrivialGamma)
{
    SeededSampler s(71);
    const LeafCase lc = draw_leaf_case(s, 2);
    const auto r = equivariance_check(lc.delta, SymplecticMatrix::identity(2), lc.tau);
    EXPECT_LE(r.residual, 1e-12 * scale_of(psi_delta(lc.delta, lc.tau.tau()).matrix()));
    EXPECT_TRUE(r.same_coset);
}

TEST(Equivariance, SeededTriplesProperty)
{
    SeededSampler s(72);
    int done = 0;
    while (done < 50) {
        const std::size_t g = 1 + done % 3;
        const LeafCase lc = draw_leaf_case(s, g);
        const auto gamma = integer_gamma(s, g);
        if (std::abs(determinant(cocycle_j((lc.delta * gamma).matrix(), lc.tau.tau()))) < 1e-3) continue;
        const auto r = equivariance_check(lc.delta, gamma, lc.tau);
        EXPECT_LE(r.residual, 1e-9);
        EXPECT_TRUE(r.same_coset);
        ++done;
    }
}

TEST(Equivariance, RejectsNonIntegerGamma)
{
    const auto delta = SymplecticMatrix::identity(1);
    const auto gamma = SymplecticMatrix::from(CMatrix{{2.0, 0.0}, {0.0, 0.5}});
    EXPECT_THROW(equivariance_check(delta, gamma, SiegelPoint::scalar(i_unit)), std::invalid_argument);
}

TEST(SampleLeaf, IdentityLeaf)
{
    std::vector<CMatrix> grid;
    for (int k = 1; k <= 5; ++k) grid.push_back(CMatrix{{cplx{0.0, 0.5 * k}}});
    const auto pts = sample_leaf({SymplecticMatrix::identity(1)}, grid);
    ASSERT_EQ(pts.size(), 5u);
    for (const auto &p : pts) {
        EXPECT_EQ(p.state.matrix(), unipotent(p.tau));
        EXPECT_TRUE(in_Bg(p.state));
    }
}

TEST(SampleLeaf, ExcludesSingularLocus)
{
    // c tau + d = tau - i, so tau = i is dropped
    const auto delta = SymplecticMatrix::from(CMatrix{{i_unit, 0.0}, {1.0, -i_unit}});
    std::vector<CMatrix> grid;
    for (int k = 1; k <= 5; ++k) grid.push_back(CMatrix{{cplx{0.0, 0.5 * (k + 1)}}});
    const auto pts = sample_leaf({delta}, grid);
    EXPECT_EQ(pts.size(), 4u);
    for (const auto &p : pts) EXPECT_NE(p.tau(0, 0), i_unit);
    EXPECT_THROW(sample_leaf({delta}, {CMatrix{{i_unit}}}), std::domain_error);
}

TEST(SampleLeaf, IrrationalTranslationLeaf)
{
    const double x = std::sqrt(2.0);
    const auto delta = SymplecticMatrix::from(CMatrix{{x, -1.0}, {1.0, 0.0}});
    std::vector<CMatrix> grid;
    for (int k = 0; k < 6; ++k) grid.push_back(CMatrix{{cplx{-0.5 + 0.2 * k, 0.7 + 0.1 * k}}});
    const auto pts = sample_leaf({delta}, grid);
    EXPECT_EQ(pts.size(), grid.size());
    for (const auto &p : pts) EXPECT_TRUE(same_leaf(delta, p.state, pts.front().state));
}

TEST(SameLeaf, PairwiseOnSamples)
{
    SeededSampler s(73);
    for (int t = 0; t < 10; ++t) {
        const std::size_t g = 1 + t % 3;
        const LeafCase lc = draw_leaf_case(s, g);
        std::vector<CMatrix> grid{lc.tau.tau()};
        for (int k = 0; k < 4; ++k) grid.push_back(lc.tau.tau() + cplx{0.0, 0.25 * (k + 1)} * CMatrix::identity(g));
        const auto pts = sample_leaf({lc.delta}, grid);
        for (const auto &a : pts)
            for (const auto &b : pts) EXPECT_TRUE(same_leaf(lc.delta, a.state, b.state));
        // a point of a different leaf
        const auto other = psi_delta(SymplecticMatrix::identity(g), lc.tau.tau());
        if (max_abs_diff(lc.delta.matrix(), CMatrix::identity(2 * g)) > 1e-6 && !closed_image_predicate(lc.delta)) {
            EXPECT_FALSE(same_leaf(lc.delta, pts.front().state, other));
        }
    }
}

TEST(SampleS, MatchesPDelta)
{
    SeededSampler s(74);
    const LeafCase lc = draw_leaf_case(s, 2);
    std::vector<SymplecticMatrix> gammas;
    for (int k = 0; k < 6; ++k) gammas.push_back(integer_gamma(s, 2));
    const auto ps = sample_s(lc.delta, lc.tau.tau(), gammas);
    std::size_t idx = 0;
    for (const auto &gamma : gammas) {
        const SymplecticMatrix dg = lc.delta * gamma;
        if (!u_delta_contains(dg.matrix(), lc.tau.tau())) continue;
        ASSERT_LT(idx, ps.size());
        EXPECT_EQ(ps[idx].a(), p_delta(dg, lc.tau.tau()).a());
        ++idx;
    }
    EXPECT_EQ(idx, ps.size());
}

TEST(TranslationInvariance, Cases)
{
    const CMatrix tau{{cplx{0, 1}, 0.25}, {0.25, cplx{0.5, 2}}};
    EXPECT_TRUE(translation_invariance_check(tau, CMatrix(2, 2)));
    EXPECT_TRUE(translation_invariance_check(tau, e_basis(1, 2, 2)));
    CMatrix half = e_basis(1, 1, 2);
    half(0, 0) = 0.5;
    EXPECT_FALSE(translation_invariance_check(tau, half));
}

TEST(TranslationInvariance, SeededProperty)
{
    SeededSampler s(75);
    for (int t = 0; t < 20; ++t) {
        const std::size_t g = 1 + t % 3;
        const CMatrix tau = s.siegel_point(g);
        const CMatrix n = s.integer_symmetric(g, -3, 3);
        EXPECT_TRUE(translation_invariance_check(tau, n));
        CMatrix frac = n;
        frac(0, g - 1) += 0.375;
        if (g > 1) frac(g - 1, 0) += 0.375;
        EXPECT_FALSE(translation_invariance_check(tau, frac));
    }
}

TEST(ClosedImage, NecessaryCondition)
{
    SeededSampler s(76);
    for (std::size_t g = 1; g <= 3; ++g) {
        const auto gamma = integer_gamma(s, g);
        EXPECT_TRUE(closed_image_predicate(gamma * psi(s.symmetric(g, true))));
    }
    const CMatrix z{{cplx{0.3, 0.7}, 0.1}, {0.1, cplx{-0.2, 1.1}}};
    EXPECT_FALSE(closed_image_predicate(psi(z) * SymplecticMatrix::from(j_matrix(2))));
    EXPECT_FALSE(closed_image_predicate(SymplecticMatrix::from(CMatrix{{0.5, 0.0}, {0.0, 2.0}})));
}

TEST(Bridge, FrameToLeaf)
{
    SeededSampler s(77);
    for (int t = 0; t < 30; ++t) {
        const LeafCase lc = draw_leaf_case(s, 1 + t % 3);
        EXPECT_LE(frame_bridge_residual(lc.delta, lc.tau), 1e-9);
    }
}

TEST(Bridge, FrameToTwistedEisenstein)
{
    SeededSampler s(78);
    const Phi1Evaluator phi;
    for (int t = 0; t < 20; ++t) {
        const LeafCase lc = draw_leaf_case(s, 1);
        const HodgeFrame acted = parabolic_act_frame(canonical_frame(lc.tau), p_delta(lc.delta, lc.tau.tau()), 1e-9);
        const RamanujanPoint lhs = frame_e_coordinates(acted, phi);
        const RamanujanPoint rhs = twist_phi1(lc.delta.matrix(), lc.tau(0, 0), phi);
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-7);
    }
    EXPECT_THROW(frame_e_coordinates(canonical_frame(SiegelPoint::scalar(i_unit, 2)), phi), std::invalid_argument);
}

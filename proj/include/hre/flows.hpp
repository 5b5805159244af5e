#ifndef HRE_FLOWS_HPP
#define HRE_FLOWS_HPP

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hre/derham.hpp"
#include "hre/numerics.hpp"
#include "hre/qseries.hpp"
#include "hre/siegel.hpp"
#include "hre/sympgrp.hpp"

namespace hre {

/// A point of Sp_{2g}(C), standing for its coset Sp_{2g}(Z) M.
using FlowState = SymplecticMatrix;

/// psi(Z) = (1 Z; 0 1) = exp(0 Z; 0 0).
inline SymplecticMatrix psi(const CMatrix &z, double tol = 1e-10)
{
    if (!is_symmetric(z, tol * std::max(1.0, z.max_abs()))) {
        throw std::invalid_argument("psi: Z must be symmetric");
    }
    return SymplecticMatrix::unchecked(unipotent(z));
}

inline SymplecticMatrix psi(const SiegelPoint &tau) { return psi(tau.tau()); }

/// D invertible and B D^{-1} in H_g.
inline bool in_Bg(const SymplecticMatrix &s)
{
    const auto [a, b, c, d] = s.blocks();
    if (!numerically_invertible(d)) {
        return false;
    }
    const CMatrix w = b * mat_inv(d);
    return in_siegel(w, 1e-9 * std::max(1.0, w.max_abs()));
}

/// Symmetric matrix sum_{k <= l} t_{kl} E^{kl}, read from the upper triangle of t.
inline CMatrix coefficient_matrix(const CMatrix &t)
{
    if (!t.is_square()) {
        throw std::invalid_argument("flow coefficients must be g x g");
    }
    CMatrix out(t.rows(), t.rows());
    for (std::size_t k = 0; k < t.rows(); ++k) {
        for (std::size_t l = k; l < t.rows(); ++l) {
            out(k, l) = t(k, l);
            out(l, k) = t(k, l);
        }
    }
    return out;
}

/// M0 psi(T / 2 pi i): the time-t map of sum t_{kl} V_{kl}.
inline FlowState exact_flow(const FlowState &m0, const CMatrix &t)
{
    if (t.rows() != m0.g()) {
        throw std::invalid_argument("exact_flow: genus mismatch");
    }
    return SymplecticMatrix::unchecked(m0.matrix() * unipotent(coefficient_matrix(t) / two_pi_i));
}

struct Rk4Result {
    FlowState end;
    double max_defect;  // largest |M J M^T - J| seen over all steps
};

/// Classical RK4 for M' = M A_{kl} with a fixed step.
inline Rk4Result rk4_flow(const FlowState &m0, std::size_t k, std::size_t l, cplx duration, std::size_t steps)
{
    if (steps < 1) {
        throw std::invalid_argument("rk4_flow: need at least one step");
    }
    const CMatrix a = lie_generator(k, l, m0.g());
    const cplx h = duration / static_cast<double>(steps);
    CMatrix m = m0.matrix();
    double max_defect = 0.0;
    const CMatrix j = j_matrix(m0.g());
    for (std::size_t s = 0; s < steps; ++s) {
        const CMatrix k1 = m * a;
        const CMatrix k2 = (m + (h / 2.0) * k1) * a;
        const CMatrix k3 = (m + (h / 2.0) * k2) * a;
        const CMatrix k4 = (m + h * k3) * a;
        m = m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        max_defect = std::max(max_defect, max_abs_diff(m * j * m.transpose(), j));
    }
    return {SymplecticMatrix::unchecked(std::move(m)), max_defect};
}

/// |(psi(tau + h E) - psi(tau - h E)) / (2 h 2 pi i) - psi(tau) A_{kl}|.
inline double generator_fd_residual(const CMatrix &tau, std::size_t k, std::size_t l, double h = 1e-5)
{
    const std::size_t g = tau.rows();
    const CMatrix e = h * e_basis(k, l, g);
    const CMatrix fd = (unipotent(tau + e) - unipotent(tau - e)) / (2.0 * h * two_pi_i);
    return max_abs_diff(fd, unipotent(tau) * lie_generator(k, l, g));
}

struct LeafSpec {
    SymplecticMatrix delta;

    std::size_t g() const { return delta.g(); }
};

/// delta^{-1} psi(delta . tau), defined on U_delta.
inline SymplecticMatrix psi_delta(const SymplecticMatrix &delta, const CMatrix &tau)
{
    if (!u_delta_contains(delta.matrix(), tau)) {
        throw std::domain_error("psi_delta: tau is outside U_delta");
    }
    const auto w = grassmann_act(delta.matrix(), tau);
    if (!w) {
        throw std::domain_error("psi_delta: tau is outside U_delta");
    }
    if (!is_symmetric(*w, 1e-8 * std::max(1.0, w->max_abs()))) {
        throw std::domain_error("psi_delta: delta . tau is not symmetric");
    }
    return SymplecticMatrix::unchecked(symplectic_inverse(delta.matrix()) * unipotent(symmetrize(*w)));
}

inline SymplecticMatrix psi_delta(const LeafSpec &spec, const SiegelPoint &tau)
{
    return psi_delta(spec.delta, tau.tau());
}

/// p_{delta,tau} = ((C tau + D)^{-1}, -C^T / 2 pi i).
inline ParabolicElement p_delta(const SymplecticMatrix &delta, const CMatrix &tau)
{
    const CMatrix j = cocycle_j(delta.matrix(), tau);
    if (!numerically_invertible(j)) {
        throw SingularMatrixError("p_delta: C tau + D is singular");
    }
    const CMatrix c = delta.blocks().c;
    const CMatrix a = mat_inv(j);
    return ParabolicElement::make(a, -c.transpose() / two_pi_i,
                                  1e-10 * std::max(1.0, a.max_abs() * c.max_abs()));
}

/// delta = (A^T  -A^T tau; -2 pi i B^T  A^{-1} + 2 pi i B^T tau), so that
/// tau in U_delta and p_{delta,tau} = p.
inline SymplecticMatrix delta_from(const CMatrix &tau, const ParabolicElement &p)
{
    const CMatrix at = p.a().transpose();
    const CMatrix bt = p.b().transpose();
    const CMatrix a_inv = p.a_inv_t().transpose();
    return SymplecticMatrix::from(block_join(at, -(at * tau), -two_pi_i * bt, a_inv + two_pi_i * (bt * tau)), 1e-9);
}

/// |psi_delta(tau) - psi(tau) p'_{delta,tau}|.
inline double psi_delta_factor_residual(const SymplecticMatrix &delta, const CMatrix &tau)
{
    const CMatrix lhs = psi_delta(delta, tau).matrix();
    const CMatrix rhs = unipotent(tau) * p_to_pprime(p_delta(delta, tau));
    return max_abs_diff(lhs, rhs);
}

/// |p_{delta_from(tau,p), tau} - p| over both blocks.
inline double delta_round_trip_residual(const CMatrix &tau, const ParabolicElement &p)
{
    const ParabolicElement q = p_delta(delta_from(tau, p), tau);
    return std::max(max_abs_diff(q.a(), p.a()), max_abs_diff(q.b(), p.b()));
}

struct EquivarianceResult {
    double residual;  // |gamma psi_{delta gamma}(tau) - psi_delta(gamma . tau)|
    bool same_coset;
};

inline EquivarianceResult equivariance_check(const SymplecticMatrix &delta, const SymplecticMatrix &gamma,
                                             const SiegelPoint &tau)
{
    if (!is_integer_symplectic(gamma.matrix())) {
        throw std::invalid_argument("equivariance_check: gamma must lie in Sp_2g(Z)");
    }
    const SymplecticMatrix dg = delta * gamma;
    if (!u_delta_contains(dg.matrix(), tau.tau())) {
        throw std::domain_error("equivariance_check: tau is outside U_{delta gamma}");
    }
    const SymplecticMatrix left = psi_delta(dg, tau.tau());
    const SymplecticMatrix right = psi_delta(delta, moebius(gamma, tau).tau());
    return {max_abs_diff(gamma.matrix() * left.matrix(), right.matrix()), same_coset_spz(left, right)};
}

/// delta s1 s2^{-1} delta^{-1} is unipotent (1 W; 0 1), i.e. s1 and s2 lie on
/// the same leaf delta^{-1} U_g(C).
inline bool same_leaf(const SymplecticMatrix &delta, const SymplecticMatrix &s1, const SymplecticMatrix &s2,
                      double tol = 1e-9)
{
    const CMatrix u = delta.matrix() * s1.matrix() * symplectic_inverse(s2.matrix()) *
                      symplectic_inverse(delta.matrix());
    const auto [a, b, c, d] = block_split(u);
    const std::size_t g = a.rows();
    const double scale = std::max(1.0, u.max_abs());
    return approx_equal(a, CMatrix::identity(g), tol * scale) && c.max_abs() <= tol * scale &&
           approx_equal(d, CMatrix::identity(g), tol * scale);
}

struct LeafSample {
    CMatrix tau;
    SymplecticMatrix state;
};

/// psi_delta over the grid points lying in U_delta, in grid order.
inline std::vector<LeafSample> sample_leaf(const LeafSpec &spec, const std::vector<CMatrix> &grid)
{
    std::vector<LeafSample> out;
    for (const auto &tau : grid) {
        if (!in_siegel(tau) || !u_delta_contains(spec.delta.matrix(), tau)) {
            continue;
        }
        SymplecticMatrix s = psi_delta(spec.delta, tau);
        if (!in_Bg(s)) {
            throw std::domain_error("sample_leaf: state left B_g");
        }
        out.push_back({tau, std::move(s)});
    }
    if (out.empty()) {
        throw std::domain_error("sample_leaf: no grid point lies in U_delta");
    }
    return out;
}

/// The points p_{delta gamma, tau} for the given gammas with tau in U_{delta gamma}.
inline std::vector<ParabolicElement> sample_s(const SymplecticMatrix &delta, const CMatrix &tau,
                                              const std::vector<SymplecticMatrix> &gammas)
{
    std::vector<ParabolicElement> out;
    for (const auto &gamma : gammas) {
        const SymplecticMatrix dg = delta * gamma;
        if (u_delta_contains(dg.matrix(), tau)) {
            out.push_back(p_delta(dg, tau));
        }
    }
    return out;
}

/// same_coset_spz(psi(tau + N), psi(tau)); also requires
/// psi(tau + N) psi(tau)^{-1} = psi(N).
inline bool translation_invariance_check(const CMatrix &tau, const CMatrix &n)
{
    const SymplecticMatrix moved = psi(tau + n);
    const SymplecticMatrix base = psi(tau);
    const CMatrix quotient = moved.matrix() * symplectic_inverse(base.matrix());
    if (!approx_equal(quotient, unipotent(n), 1e-12 * std::max(1.0, quotient.max_abs()))) {
        return false;
    }
    return same_coset_spz(moved, base);
}

/// Necessary condition for s in Sp_{2g}(Z) U_g(C): the A and C blocks are
/// integral. One-sided.
inline bool closed_image_predicate(const SymplecticMatrix &s, double tol = 1e-8)
{
    const auto [a, b, c, d] = s.blocks();
    std::vector<long long> scratch;
    return detail::round_to_integers(a, tol, scratch) && detail::round_to_integers(c, tol, scratch);
}

/// |Pi(P(b_tau . p_{delta,tau})) - psi_delta(tau)|.
inline double frame_bridge_residual(const SymplecticMatrix &delta, const SiegelPoint &tau)
{
    const HodgeFrame acted = parabolic_act_frame(canonical_frame(tau), p_delta(delta, tau.tau()), 1e-9);
    const SymplecticMatrix pi = pi_matrix(period_matrix(acted, 1e-9), 1e-9);
    return max_abs_diff(pi.matrix(), psi_delta(delta, tau.tau()).matrix());
}

/// Ramanujan coordinates of a g = 1 frame on the torus at tau: write the frame
/// as canonical . (a, b) and move phi_1(tau) by (a, b).
inline RamanujanPoint frame_e_coordinates(const HodgeFrame &frame, const Phi1Evaluator &phi)
{
    if (frame.g() != 1) {
        throw std::invalid_argument("frame_e_coordinates: genus 1 only");
    }
    const cplx tau = frame.tau()(0, 0);
    const cplx a = frame.omega()[0].gamma[0] / two_pi_i;
    const cplx b = frame.eta()[0].gamma[0] / two_pi_i;
    return parabolic_act_point(phi(tau).point, a, b);
}

struct LeafCase {
    SymplecticMatrix delta;
    SiegelPoint tau;
};

/// Seeded (delta, tau) with delta a word of length <= max_len and tau kept at
/// least `margin` away from the locus det(C tau + D) = 0.
inline LeafCase draw_leaf_case(SeededSampler &sampler, std::size_t g, std::size_t max_len = 6,
                               double margin = 1e-3)
{
    const SymplecticMatrix delta = SymplecticMatrix::from(sampler.symplectic_word(g, max_len), 1e-9);
    for (;;) {
        const CMatrix tau = sampler.siegel_point(g);
        if (std::abs(determinant(cocycle_j(delta.matrix(), tau))) >= margin && u_delta_contains(delta.matrix(), tau)) {
            return {delta, SiegelPoint::make(tau)};
        }
    }
}

} // namespace hre

#endif // HRE_FLOWS_HPP

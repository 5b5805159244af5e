#ifndef HRE_DERHAM_HPP
#define HRE_DERHAM_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "hre/numerics.hpp"
#include "hre/siegel.hpp"
#include "hre/sympgrp.hpp"

namespace hre {

/// A de Rham class of C^g / (Z^g + tau Z^g), stored as its periods over
/// gamma_l = e_l and delta_l = tau e_l.
struct CohClass {
    std::vector<cplx> gamma;
    std::vector<cplx> delta;

    static CohClass zero(std::size_t g) { return {std::vector<cplx>(g), std::vector<cplx>(g)}; }

    std::size_t g() const { return gamma.size(); }

    friend CohClass operator+(CohClass u, const CohClass &v)
    {
        if (u.g() != v.g()) {
            throw std::invalid_argument("CohClass: genus mismatch");
        }
        for (std::size_t i = 0; i < u.g(); ++i) {
            u.gamma[i] += v.gamma[i];
            u.delta[i] += v.delta[i];
        }
        return u;
    }

    friend CohClass operator-(const CohClass &u, const CohClass &v) { return u + v * cplx{-1.0}; }

    friend CohClass operator*(CohClass u, cplx s)
    {
        for (std::size_t i = 0; i < u.g(); ++i) {
            u.gamma[i] *= s;
            u.delta[i] *= s;
        }
        return u;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (std::size_t i = 0; i < g(); ++i) {
            m = std::max({m, std::abs(gamma[i]), std::abs(delta[i])});
        }
        return m;
    }
};

inline double max_abs_diff(const CohClass &u, const CohClass &v) { return (u - v).max_abs(); }

/// <u, v> = (u_gamma . v_delta - u_delta . v_gamma) / 2 pi i.
inline cplx pairing(const CohClass &u, const CohClass &v)
{
    if (u.g() != v.g() || u.delta.size() != u.g() || v.delta.size() != v.g()) {
        throw std::invalid_argument("pairing: genus mismatch");
    }
    cplx s = 0.0;
    for (std::size_t l = 0; l < u.g(); ++l) {
        s += u.gamma[l] * v.delta[l] - u.delta[l] * v.gamma[l];
    }
    return s / two_pi_i;
}

/// Gram matrix of the pairing on (omega_1..omega_g, eta_1..eta_g).
inline CMatrix gram_matrix(const std::vector<CohClass> &omega, const std::vector<CohClass> &eta)
{
    const std::size_t g = omega.size();
    std::vector<const CohClass *> basis;
    for (const auto &c : omega) basis.push_back(&c);
    for (const auto &c : eta) basis.push_back(&c);
    CMatrix gram(2 * g, 2 * g);
    for (std::size_t i = 0; i < 2 * g; ++i) {
        for (std::size_t j = 0; j < 2 * g; ++j) {
            gram(i, j) = pairing(*basis[i], *basis[j]);
        }
    }
    return gram;
}

/// Symplectic-Hodge frame (omega | eta) on the torus at tau.
class HodgeFrame
{
public:
    /// Requires the Gram matrix to equal J to `tol` scaled by max(1, |class|^2).
    static HodgeFrame make(SiegelPoint tau, std::vector<CohClass> omega, std::vector<CohClass> eta,
                           double tol = 1e-10)
    {
        const std::size_t g = tau.g();
        if (omega.size() != g || eta.size() != g) {
            throw std::invalid_argument("HodgeFrame: need g omega and g eta classes");
        }
        double scale = 1.0;
        for (const auto *v : {&omega, &eta}) {
            for (const auto &c : *v) {
                if (c.gamma.size() != g || c.delta.size() != g) {
                    throw std::invalid_argument("HodgeFrame: class has wrong length");
                }
                scale = std::max(scale, c.max_abs() * c.max_abs());
            }
        }
        const double defect = max_abs_diff(gram_matrix(omega, eta), j_matrix(g));
        if (defect > tol * scale) {
            throw std::domain_error("HodgeFrame: pairing Gram matrix is not the standard symplectic form");
        }
        return HodgeFrame(std::move(tau), std::move(omega), std::move(eta));
    }

    std::size_t g() const { return tau_.g(); }
    const SiegelPoint &tau() const { return tau_; }
    const std::vector<CohClass> &omega() const { return omega_; }
    const std::vector<CohClass> &eta() const { return eta_; }
    CMatrix gram() const { return gram_matrix(omega_, eta_); }

private:
    HodgeFrame(SiegelPoint tau, std::vector<CohClass> omega, std::vector<CohClass> eta)
        : tau_(std::move(tau)), omega_(std::move(omega)), eta_(std::move(eta))
    {
    }
    SiegelPoint tau_;
    std::vector<CohClass> omega_;
    std::vector<CohClass> eta_;
};

/// omega_k = 2 pi i dz_k with periods (2 pi i e_k, 2 pi i tau e_k);
/// eta_k with periods (0, e_k).
inline HodgeFrame canonical_frame(const SiegelPoint &tau)
{
    const std::size_t g = tau.g();
    std::vector<CohClass> omega, eta;
    for (std::size_t k = 0; k < g; ++k) {
        CohClass w = CohClass::zero(g);
        CohClass e = CohClass::zero(g);
        w.gamma[k] = two_pi_i;
        for (std::size_t l = 0; l < g; ++l) {
            w.delta[l] = two_pi_i * tau(l, k);
        }
        e.delta[k] = 1.0;
        omega.push_back(std::move(w));
        eta.push_back(std::move(e));
    }
    return HodgeFrame::make(tau, std::move(omega), std::move(eta));
}

/// The classes eta_k^{ij}, k = 1..g, with periods (0, E^{ij} e_k).
inline std::vector<CohClass> eta_ij(const SiegelPoint &tau, std::size_t i, std::size_t j)
{
    const std::size_t g = tau.g();
    const CMatrix e = e_basis(i, j, g);
    std::vector<CohClass> out;
    for (std::size_t k = 0; k < g; ++k) {
        CohClass c = CohClass::zero(g);
        for (std::size_t l = 0; l < g; ++l) {
            c.delta[l] = e(l, k);
        }
        out.push_back(std::move(c));
    }
    return out;
}

/// b . p = (omega A, omega B + eta A^{-T}).
inline HodgeFrame parabolic_act_frame(const HodgeFrame &frame, const ParabolicElement &p, double tol = 1e-10)
{
    auto [omega, eta] = parabolic_act(frame.omega(), frame.eta(), p);
    return HodgeFrame::make(frame.tau(), std::move(omega), std::move(eta), tol);
}

using FrameFamily = std::function<HodgeFrame(const CMatrix &)>;

struct FrameDerivative {
    std::vector<CohClass> d_omega;
    std::vector<CohClass> d_eta;
};

/// theta_{kl} = (1/2 pi i) d/d tau_{kl} of every period vector, by central
/// differences along tau + h E^{kl}.
inline FrameDerivative gauss_manin_fd(const FrameFamily &family, const CMatrix &tau, std::size_t k,
                                      std::size_t l, double h = 1e-5)
{
    if (!(h > 0.0) || !std::isfinite(h) || h < 1e-13) {
        throw std::invalid_argument("gauss_manin_fd: bad step");
    }
    const CMatrix step = h * e_basis(k, l, tau.rows());
    const HodgeFrame plus = family(tau + step);
    const HodgeFrame minus = family(tau - step);
    const cplx scale = 1.0 / (2.0 * h * two_pi_i);
    FrameDerivative out;
    for (std::size_t m = 0; m < tau.rows(); ++m) {
        out.d_omega.push_back((plus.omega()[m] - minus.omega()[m]) * scale);
        out.d_eta.push_back((plus.eta()[m] - minus.eta()[m]) * scale);
    }
    return out;
}

inline FrameFamily canonical_family()
{
    return [](const CMatrix &tau) { return canonical_frame(SiegelPoint::make(tau)); };
}

/// P = (Omega1 N1; Omega2 N2), (Omega1)_{ij} = int_{gamma_i} omega_j etc.
inline GSpMatrix period_matrix(const HodgeFrame &frame, double tol = 1e-10)
{
    const std::size_t g = frame.g();
    CMatrix o1(g, g), o2(g, g), n1(g, g), n2(g, g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            o1(i, j) = frame.omega()[j].gamma[i];
            o2(i, j) = frame.omega()[j].delta[i];
            n1(i, j) = frame.eta()[j].gamma[i];
            n2(i, j) = frame.eta()[j].delta[i];
        }
    }
    const CMatrix p = block_join(o1, n1, o2, n2);
    return GSpMatrix::from(p, tol * std::max(1.0, p.max_abs() * p.max_abs()));
}

/// Pi = (N2 Omega2/2 pi i; N1 Omega1/2 pi i).
inline SymplecticMatrix pi_matrix(const GSpMatrix &p, double tol = 1e-10)
{
    const auto [o1, n1, o2, n2] = p.blocks();
    return SymplecticMatrix::from(block_join(n2, o2 / two_pi_i, n1, o1 / two_pi_i), tol);
}

/// frame . p(P / 2 pi i): the eta classes get periods (0, e_j).
inline HodgeFrame normalize_basis(const HodgeFrame &frame, const GSpMatrix &p, double tol = 1e-10)
{
    const CMatrix scaled = p.matrix() / two_pi_i;
    const auto factors = gsp_star_factor(GSpMatrix::from(scaled, tol * std::max(1.0, scaled.max_abs() * scaled.max_abs())), tol);
    return parabolic_act_frame(frame, factors.p, tol);
}

} // namespace hre

#endif // HRE_DERHAM_HPP

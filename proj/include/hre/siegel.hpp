#ifndef HRE_SIEGEL_HPP
#define HRE_SIEGEL_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

#include "hre/numerics.hpp"
#include "hre/sympgrp.hpp"

namespace hre {

/// tau^T = tau and Im tau > 0 (leading minors above 1e-12).
inline bool in_siegel(const CMatrix &tau, double tol = 1e-10)
{
    if (!tau.is_square()) {
        throw std::invalid_argument("in_siegel: matrix must be square");
    }
    return is_symmetric(tau, tol) && is_positive_definite(symmetrize(tau).imag_part());
}

/// A point of the Siegel upper half-space H_g.
class SiegelPoint
{
public:
    static SiegelPoint make(const CMatrix &tau, double tol = 1e-10)
    {
        if (!in_siegel(tau, tol * std::max(1.0, tau.max_abs()))) {
            throw std::domain_error("tau is not in the Siegel upper half-space");
        }
        return SiegelPoint(symmetrize(tau));
    }

    static SiegelPoint scalar(cplx t, std::size_t g = 1) { return make(t * CMatrix::identity(g)); }

    std::size_t g() const { return tau_.rows(); }
    const CMatrix &tau() const { return tau_; }
    cplx operator()(std::size_t k, std::size_t l) const { return tau_(k, l); }

private:
    explicit SiegelPoint(CMatrix tau) : tau_(std::move(tau)) {}
    CMatrix tau_;
};

/// j(gamma, tau) = C tau + D. Complex gamma allowed.
inline CMatrix cocycle_j(const CMatrix &gamma, const CMatrix &tau)
{
    const auto blk = block_split(gamma);
    if (tau.rows() != blk.a.rows() || !tau.is_square()) {
        throw std::invalid_argument("cocycle_j: genus mismatch");
    }
    return blk.c * tau + blk.d;
}

/// |det M| > 1e-12 max(1, |M|^g).
inline bool numerically_invertible(const CMatrix &m)
{
    const double scale = std::max(1.0, std::pow(m.max_abs(), static_cast<double>(m.rows())));
    return std::abs(determinant(m)) > 1e-12 * scale;
}

/// tau in U_delta, i.e. j(delta, tau) invertible.
inline bool u_delta_contains(const CMatrix &delta, const CMatrix &tau)
{
    return numerically_invertible(cocycle_j(delta, tau));
}

/// (A Z + B)(C Z + D)^{-1}, or nothing when the point leaves the Sym_g chart.
inline std::optional<CMatrix> grassmann_act(const CMatrix &delta, const CMatrix &z, double tol = 1e-10)
{
    if (!is_symmetric(z, tol * std::max(1.0, z.max_abs()))) {
        throw std::invalid_argument("grassmann_act: Z must be symmetric");
    }
    const auto [a, b, c, d] = block_split(delta);
    const CMatrix den = c * z + d;
    if (!numerically_invertible(den)) {
        return std::nullopt;
    }
    try {
        return (a * z + b) * mat_inv(den);
    } catch (const SingularMatrixError &) {
        return std::nullopt;
    }
}

/// gamma . tau = (A tau + B)(C tau + D)^{-1} for real symplectic gamma.
inline SiegelPoint moebius(const SymplecticMatrix &gamma, const SiegelPoint &tau)
{
    const CMatrix &m = gamma.matrix();
    if (gamma.g() != tau.g()) {
        throw std::invalid_argument("moebius: genus mismatch");
    }
    if (!is_real(m, 1e-12 * std::max(1.0, m.max_abs()))) {
        throw std::invalid_argument("moebius: gamma must be real");
    }
    auto out = grassmann_act(m, tau.tau());
    if (!out) {
        throw SingularMatrixError("moebius: C tau + D is singular");
    }
    return SiegelPoint::make(*out, 1e-9);
}

} // namespace hre

#endif // HRE_SIEGEL_HPP

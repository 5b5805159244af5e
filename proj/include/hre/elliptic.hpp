#ifndef HRE_ELLIPTIC_HPP
#define HRE_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hre/numerics.hpp"
#include "hre/qseries.hpp"
#include "hre/sympgrp.hpp"

namespace hre {

/// A sum over the punctured lattice Z + tau Z in square shells
/// 0 < max(|m|,|n|) <= R. `value` is `raw` plus an Euler-Maclaurin estimate
/// of the omitted shells; `error_bound` is the size of that estimate.
struct LatticeSum {
    cplx value;
    cplx raw;
    cplx correction;
    double error_bound;
};

namespace detail {

inline void check_lattice_args(cplx tau, int cutoff)
{
    if (!(tau.imag() >= 0.5)) {
        throw std::domain_error("lattice sums need Im tau >= 0.5 (reduce tau first)");
    }
    if (cutoff < 20) {
        throw std::invalid_argument("lattice cutoff must be at least 20");
    }
}

// Shell sums decay like r^{-p}; the tail past R is about
// s(R) (R/(p-1) - 1/2).
template <typename Term>
LatticeSum shell_sum(cplx tau, int cutoff, double p, Term &&term)
{
    cplx total = 0.0;
    cplx last = 0.0;
    for (int r = 1; r <= cutoff; ++r) {
        cplx shell = 0.0;
        for (int m = -r; m <= r; ++m) {
            shell += term(static_cast<double>(m) + static_cast<double>(r) * tau);
            shell += term(static_cast<double>(m) - static_cast<double>(r) * tau);
        }
        for (int n = -r + 1; n <= r - 1; ++n) {
            shell += term(static_cast<double>(r) + static_cast<double>(n) * tau);
            shell += term(-static_cast<double>(r) + static_cast<double>(n) * tau);
        }
        total += shell;
        last = shell;
    }
    const double rr = static_cast<double>(cutoff);
    const cplx corr = last * (rr / (p - 1.0) - 0.5);
    return {total + corr, total, corr, std::abs(corr)};
}

} // namespace detail

struct LatticeInvariants {
    LatticeSum g2;
    LatticeSum g3;
};

/// g2 = 60 sum' lambda^{-4}, g3 = 140 sum' lambda^{-6}.
inline LatticeInvariants lattice_invariants(cplx tau, int cutoff)
{
    detail::check_lattice_args(tau, cutoff);
    auto s4 = detail::shell_sum(tau, cutoff, 3.0, [](cplx l) {
        const cplx l2 = l * l;
        return 1.0 / (l2 * l2);
    });
    auto s6 = detail::shell_sum(tau, cutoff, 5.0, [](cplx l) {
        const cplx l2 = l * l;
        return 1.0 / (l2 * l2 * l2);
    });
    auto scale = [](LatticeSum s, double k) {
        return LatticeSum{k * s.value, k * s.raw, k * s.correction, k * s.error_bound};
    };
    return {scale(s4, 60.0), scale(s6, 140.0)};
}

namespace detail {

inline void check_z(cplx z, cplx tau, int cutoff)
{
    const double guard = 0.25 * static_cast<double>(cutoff) * std::min(1.0, tau.imag());
    if (std::abs(z) > guard) {
        throw std::domain_error("weierstrass: |z| too large for this cutoff");
    }
    const double n = std::round(z.imag() / tau.imag());
    const double m = std::round(z.real() - n * tau.real());
    if (std::abs(z - (m + n * tau)) < 1e-12) {
        throw std::domain_error("weierstrass: z is a lattice point");
    }
}

} // namespace detail

/// zeta(z) = 1/z + sum' [1/(z - lambda) + 1/lambda + z/lambda^2].
inline LatticeSum weierstrass_zeta(cplx z, cplx tau, int cutoff)
{
    detail::check_lattice_args(tau, cutoff);
    detail::check_z(z, tau, cutoff);
    auto s = detail::shell_sum(tau, cutoff, 3.0, [z](cplx l) {
        return 1.0 / (z - l) + 1.0 / l + z / (l * l);
    });
    const cplx lead = 1.0 / z;
    return {s.value + lead, s.raw + lead, s.correction, s.error_bound};
}

/// wp(z) = 1/z^2 + sum' [1/(z - lambda)^2 - 1/lambda^2].
inline LatticeSum weierstrass_p(cplx z, cplx tau, int cutoff)
{
    detail::check_lattice_args(tau, cutoff);
    detail::check_z(z, tau, cutoff);
    auto s = detail::shell_sum(tau, cutoff, 3.0, [z](cplx l) {
        const cplx d = z - l;
        return 1.0 / (d * d) - 1.0 / (l * l);
    });
    const cplx lead = 1.0 / (z * z);
    return {s.value + lead, s.raw + lead, s.correction, s.error_bound};
}

struct QuasiPeriods {
    cplx eta1;
    cplx eta2;
    double error_bound;
};

/// Quasi-periods of zeta: zeta(z + 1) = zeta(z) + eta1, zeta(z + tau) = zeta(z) + eta2.
inline QuasiPeriods quasi_periods(cplx tau, int cutoff)
{
    const auto z1 = weierstrass_zeta(0.5, tau, cutoff);
    const auto z2 = weierstrass_zeta(0.5 * tau, tau, cutoff);
    return {2.0 * z1.value, 2.0 * z2.value, 2.0 * (z1.error_bound + z2.error_bound)};
}

/// Periods of x dx/y are this sign times the zeta quasi-periods. Fixed once
/// by requiring the assembled period matrix to have multiplier +2 pi i at
/// tau = 2i (see calibrate_quasi_period_sign).
inline constexpr double quasi_period_sign = -1.0;

struct LatticePeriods {
    cplx tau;
    cplx omega1;
    cplx omega2;
    cplx eta1;  // zeta quasi-periods
    cplx eta2;
    cplx g2;
    cplx g3;
    double error_bound;

    /// (Omega1 N1; Omega2 N2) for (dz, x dx/y) against (gamma, delta) = (1, tau).
    CMatrix period_matrix(double sign = quasi_period_sign) const
    {
        return CMatrix{{omega1, sign * eta1}, {omega2, sign * eta2}};
    }
};

inline LatticePeriods lattice_periods(cplx tau, int cutoff)
{
    const auto inv = lattice_invariants(tau, cutoff);
    const auto qp = quasi_periods(tau, cutoff);
    return {tau, 1.0, tau, qp.eta1, qp.eta2, inv.g2.value, inv.g3.value,
            std::max({qp.error_bound, inv.g2.error_bound, inv.g3.error_bound})};
}

/// The sign s in {+1, -1} for which (1 s eta1; tau s eta2) has multiplier
/// closest to +2 pi i at tau = 2i.
inline double calibrate_quasi_period_sign(int cutoff = 200)
{
    const auto lp = lattice_periods(cplx{0.0, 2.0}, cutoff);
    const auto nu_of = [&](double s) {
        const CMatrix p = lp.period_matrix(s);
        return p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
    };
    return std::abs(nu_of(1.0) - two_pi_i) < std::abs(nu_of(-1.0) - two_pi_i) ? 1.0 : -1.0;
}

struct PeriodIdentityReport {
    cplx tau;
    // lattice side, q-series side, |difference|
    std::array<cplx, 3> lattice;
    std::array<cplx, 3> qseries;
    std::array<double, 3> residual;
    cplx nu;
    double nu_residual;
    double tau_residual;  // |Omega2 / Omega1 - tau|
};

/// E2 = -12 (omega1/2 pi i)(eta1/2 pi i), E4 = 12 g2 (omega1/2 pi i)^4,
/// E6 = -216 g3 (omega1/2 pi i)^6, each side computed independently.
inline PeriodIdentityReport eisenstein_period_identities(cplx tau, int cutoff, std::size_t terms)
{
    const auto lp = lattice_periods(tau, cutoff);
    const auto phi = phi1(tau, terms);
    const cplx w = lp.omega1 / two_pi_i;
    const cplx w2 = w * w;
    PeriodIdentityReport rep;
    rep.tau = tau;
    rep.lattice = {-12.0 * w * (lp.eta1 / two_pi_i), 12.0 * lp.g2 * w2 * w2, -216.0 * lp.g3 * w2 * w2 * w2};
    rep.qseries = {phi.point.e2, phi.point.e4, phi.point.e6};
    for (std::size_t k = 0; k < 3; ++k) {
        rep.residual[k] = std::abs(rep.lattice[k] - rep.qseries[k]);
    }
    const CMatrix p = lp.period_matrix();
    const auto nu = gsp_multiplier(p, 1e-6);
    rep.nu = nu ? *nu : p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
    rep.nu_residual = nu ? std::abs(*nu - two_pi_i) : std::numeric_limits<double>::infinity();
    rep.tau_residual = std::abs(p(1, 0) / p(0, 0) - tau);
    return rep;
}

} // namespace hre

#endif // HRE_ELLIPTIC_HPP

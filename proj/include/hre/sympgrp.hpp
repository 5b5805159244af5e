#ifndef HRE_SYMPGRP_HPP
#define HRE_SYMPGRP_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "hre/numerics.hpp"

namespace hre {

/// J = (0 1_g; -1_g 0).
inline CMatrix j_matrix(std::size_t g)
{
    if (g == 0) {
        throw std::invalid_argument("j_matrix: g must be positive");
    }
    CMatrix j(2 * g, 2 * g);
    for (std::size_t i = 0; i < g; ++i) {
        j(i, i + g) = 1.0;
        j(i + g, i) = -1.0;
    }
    return j;
}

/// Symmetric elementary matrix E^{ij} (1-based, i <= j).
inline CMatrix e_basis(std::size_t i, std::size_t j, std::size_t g)
{
    if (g == 0 || i < 1 || i > j || j > g) {
        throw std::invalid_argument("e_basis: need 1 <= i <= j <= g");
    }
    CMatrix e(g, g);
    e(i - 1, j - 1) = 1.0;
    e(j - 1, i - 1) = 1.0;
    return e;
}

/// (1_g Z; 0 1_g) without any symmetry check.
inline CMatrix unipotent(const CMatrix &z)
{
    const std::size_t g = z.rows();
    return block_join(CMatrix::identity(g), z, CMatrix(g, g), CMatrix::identity(g));
}

/// Inverse of a symplectic matrix through M^{-1} = -J M^T J = (D^T -B^T; -C^T A^T).
/// Exact in floating point (only sign flips and transposes).
inline CMatrix symplectic_inverse(const CMatrix &m)
{
    const auto blk = block_split(m);
    return block_join(blk.d.transpose(), -blk.b.transpose(), -blk.c.transpose(), blk.a.transpose());
}

struct SymplecticDiagnostics {
    bool symplectic = false;
    double form_defect = 0.0;  // |M J M^T - J|
    double set1_defect = 0.0;  // AB^T = BA^T, CD^T = DC^T, AD^T - BC^T = 1
    double set2_defect = 0.0;  // A^T C = C^T A, B^T D = D^T B, A^T D - C^T B = 1
    bool set1 = false;
    bool set2 = false;

    bool consistent() const { return set1 == set2 && set1 == symplectic; }
};

inline SymplecticDiagnostics is_symplectic(const CMatrix &m, double tol = 1e-10)
{
    if (!m.is_square() || m.rows() % 2 != 0) {
        throw std::invalid_argument("is_symplectic: matrix must be square of even dimension");
    }
    const std::size_t g = m.rows() / 2;
    const CMatrix j = j_matrix(g);
    const auto [a, b, c, d] = block_split(m, g);
    const CMatrix one = CMatrix::identity(g);

    SymplecticDiagnostics out;
    out.form_defect = max_abs_diff(m * j * m.transpose(), j);
    out.set1_defect = std::max({max_abs_diff(a * b.transpose(), b * a.transpose()),
                                max_abs_diff(c * d.transpose(), d * c.transpose()),
                                max_abs_diff(a * d.transpose() - b * c.transpose(), one)});
    out.set2_defect = std::max({max_abs_diff(a.transpose() * c, c.transpose() * a),
                                max_abs_diff(b.transpose() * d, d.transpose() * b),
                                max_abs_diff(a.transpose() * d - c.transpose() * b, one)});
    out.symplectic = out.form_defect <= tol;
    out.set1 = out.set1_defect <= tol;
    out.set2 = out.set2_defect <= tol;
    return out;
}

/// Multiplier nu with AB^T = BA^T, CD^T = DC^T and AD^T - BC^T = nu 1_g, when
/// all three hold to `tol` and nu != 0.
inline std::optional<cplx> gsp_multiplier(const CMatrix &m, double tol = 1e-10)
{
    if (!m.is_square() || m.rows() % 2 != 0) {
        throw std::invalid_argument("gsp_multiplier: matrix must be square of even dimension");
    }
    const std::size_t g = m.rows() / 2;
    const auto [a, b, c, d] = block_split(m, g);
    const CMatrix core = a * d.transpose() - b * c.transpose();
    cplx nu = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        nu += core(i, i);
    }
    nu /= static_cast<double>(g);
    if (std::abs(nu) <= tol) {
        return std::nullopt;
    }
    const double defect = std::max({max_abs_diff(core, nu * CMatrix::identity(g)),
                                    max_abs_diff(a * b.transpose(), b * a.transpose()),
                                    max_abs_diff(c * d.transpose(), d * c.transpose())});
    if (defect > tol) {
        return std::nullopt;
    }
    return nu;
}

/// A 2g x 2g matrix validated to lie in Sp_{2g}(C).
class SymplecticMatrix
{
public:
    /// Validates MJM^T = J and both block-condition sets, with `tol` scaled by
    /// max(1, |M|^2).
    static SymplecticMatrix from(CMatrix m, double tol = 1e-10)
    {
        const double scale = std::max(1.0, m.max_abs() * m.max_abs());
        const auto diag = is_symplectic(m, tol * scale);
        if (!diag.symplectic || !diag.set1 || !diag.set2) {
            throw std::domain_error("matrix is not symplectic to tolerance (defect " +
                                    std::to_string(diag.form_defect) + ")");
        }
        return SymplecticMatrix(std::move(m));
    }

    static SymplecticMatrix identity(std::size_t g) { return SymplecticMatrix(CMatrix::identity(2 * g)); }

    std::size_t g() const { return m_.rows() / 2; }
    const CMatrix &matrix() const { return m_; }
    Blocks blocks() const { return block_split(m_); }
    SymplecticMatrix inverse() const { return SymplecticMatrix(symplectic_inverse(m_)); }
    double defect() const { return is_symplectic(m_).form_defect; }

    friend SymplecticMatrix operator*(const SymplecticMatrix &x, const SymplecticMatrix &y)
    {
        return SymplecticMatrix(x.m_ * y.m_);
    }

    // Trusted construction for products of validated factors.
    static SymplecticMatrix unchecked(CMatrix m) { return SymplecticMatrix(std::move(m)); }

private:
    explicit SymplecticMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

/// A 2g x 2g matrix in GSp_{2g}(C) together with its multiplier.
class GSpMatrix
{
public:
    static GSpMatrix from(CMatrix m, double tol = 1e-10)
    {
        const auto nu = gsp_multiplier(m, tol);
        if (!nu) {
            throw std::domain_error("matrix is not in GSp to tolerance");
        }
        return GSpMatrix(std::move(m), *nu);
    }

    std::size_t g() const { return m_.rows() / 2; }
    const CMatrix &matrix() const { return m_; }
    cplx nu() const { return nu_; }
    Blocks blocks() const { return block_split(m_); }

private:
    GSpMatrix(CMatrix m, cplx nu) : m_(std::move(m)), nu_(nu) {}
    CMatrix m_;
    cplx nu_;
};

/// Element (A B; 0 (A^T)^{-1}) of the Siegel parabolic P_g(C).
class ParabolicElement
{
public:
    static ParabolicElement make(CMatrix a, CMatrix b, double tol = 1e-10)
    {
        if (!a.is_square() || b.rows() != a.rows() || b.cols() != a.cols()) {
            throw std::invalid_argument("parabolic: A and B must be g x g");
        }
        CMatrix a_inv_t = mat_inv(a).transpose();  // throws when A is singular
        const double scale = std::max(1.0, a.max_abs() * b.max_abs());
        if (max_abs_diff(a * b.transpose(), b * a.transpose()) > tol * scale) {
            throw std::domain_error("parabolic: AB^T != BA^T");
        }
        return ParabolicElement(std::move(a), std::move(b), std::move(a_inv_t));
    }

    static ParabolicElement identity(std::size_t g)
    {
        return ParabolicElement(CMatrix::identity(g), CMatrix(g, g), CMatrix::identity(g));
    }

    std::size_t g() const { return a_.rows(); }
    const CMatrix &a() const { return a_; }
    const CMatrix &b() const { return b_; }
    /// (A^T)^{-1}, the lower-right block.
    const CMatrix &a_inv_t() const { return a_inv_t_; }

    CMatrix embed() const { return block_join(a_, b_, CMatrix(g(), g()), a_inv_t_); }

    friend ParabolicElement operator*(const ParabolicElement &p, const ParabolicElement &q)
    {
        return ParabolicElement(p.a_ * q.a_, p.a_ * q.b_ + p.b_ * q.a_inv_t_, p.a_inv_t_ * q.a_inv_t_);
    }

private:
    ParabolicElement(CMatrix a, CMatrix b, CMatrix ait) : a_(std::move(a)), b_(std::move(b)), a_inv_t_(std::move(ait)) {}
    CMatrix a_, b_, a_inv_t_;
};

/// Lie algebra generator (1/2 pi i)(0 E^{kl}; 0 0) of U_g(C).
inline CMatrix lie_generator(std::size_t k, std::size_t l, std::size_t g)
{
    const CMatrix e = e_basis(k, l, g) / two_pi_i;
    return block_join(CMatrix(g, g), e, CMatrix(g, g), CMatrix(g, g));
}

struct LieGenerator {
    std::size_t g;
    std::size_t k;
    std::size_t l;
    CMatrix matrix;

    static LieGenerator make(std::size_t k, std::size_t l, std::size_t g) { return {g, k, l, lie_generator(k, l, g)}; }
};

/// Membership in Lie Sp_{2g}: B^T = B, C^T = C, D = -A^T.
inline bool in_lie_sp(const CMatrix &x, double tol = 1e-12)
{
    const auto [a, b, c, d] = block_split(x);
    return is_symmetric(b, tol) && is_symmetric(c, tol) && approx_equal(d, -a.transpose(), tol);
}

struct GSpStarFactors {
    cplx nu;
    CMatrix z;  // C A^{-1}
    ParabolicElement p;
};

/// GSp* -> G_m x Sym_g x P_g, s |-> (nu(s), C A^{-1}, (A^{-1} -B^T; 0 A^T)).
inline GSpStarFactors gsp_star_factor(const GSpMatrix &s, double tol = 1e-10)
{
    const auto [a, b, c, d] = s.blocks();
    CMatrix a_inv;
    try {
        a_inv = mat_inv(a);
    } catch (const SingularMatrixError &) {
        throw std::domain_error("gsp_star_factor: A block is singular (not in GSp*)");
    }
    CMatrix z = c * a_inv;
    const double scale = std::max(1.0, z.max_abs());
    if (!is_symmetric(z, tol * scale)) {
        throw std::domain_error("gsp_star_factor: C A^{-1} is not symmetric");
    }
    return {s.nu(), symmetrize(z), ParabolicElement::make(a_inv, -b.transpose(), tol * scale)};
}

/// Inverse of gsp_star_factor:
/// (nu, Z, (X Y; 0 X^{-T})) |-> (X^{-1} -Y^T; Z X^{-1} (nu 1 - Z X^{-1} Y) X^T).
inline GSpMatrix gsp_star_assemble(cplx nu, const CMatrix &z, const ParabolicElement &p, double tol = 1e-10)
{
    if (!is_symmetric(z, tol * std::max(1.0, z.max_abs())) || z.rows() != p.g()) {
        throw std::invalid_argument("gsp_star_assemble: Z must be symmetric g x g");
    }
    if (std::abs(nu) == 0.0) {
        throw std::invalid_argument("gsp_star_assemble: multiplier must be nonzero");
    }
    const std::size_t g = p.g();
    const CMatrix x_inv = p.a_inv_t().transpose();
    const CMatrix zx = z * x_inv;
    const CMatrix m = block_join(x_inv, -p.b().transpose(), zx,
                                 (nu * CMatrix::identity(g) - zx * p.b()) * p.a().transpose());
    const double scale = std::max(1.0, m.max_abs() * m.max_abs());
    return GSpMatrix::from(m, tol * scale);
}

/// P_g -> P'_g, (A B; 0 A^{-T}) |-> (A^{-T} 0; 2 pi i B  A).
inline CMatrix p_to_pprime(const ParabolicElement &p)
{
    return block_join(p.a_inv_t(), CMatrix(p.g(), p.g()), two_pi_i * p.b(), p.a());
}

/// Right action of P_g on a row of classes (omega | eta):
/// (omega A  omega B + eta A^{-T}). Works for any vector-space element type.
template <typename Class>
std::pair<std::vector<Class>, std::vector<Class>>
parabolic_act(const std::vector<Class> &omega, const std::vector<Class> &eta, const ParabolicElement &p)
{
    const std::size_t g = p.g();
    if (omega.size() != g || eta.size() != g) {
        throw std::invalid_argument("parabolic_act: frame size does not match g");
    }
    std::vector<Class> new_omega, new_eta;
    new_omega.reserve(g);
    new_eta.reserve(g);
    for (std::size_t j = 0; j < g; ++j) {
        Class w = omega[0] * p.a()(0, j);
        Class e = omega[0] * p.b()(0, j) + eta[0] * p.a_inv_t()(0, j);
        for (std::size_t k = 1; k < g; ++k) {
            w = w + omega[k] * p.a()(k, j);
            e = e + omega[k] * p.b()(k, j) + eta[k] * p.a_inv_t()(k, j);
        }
        new_omega.push_back(std::move(w));
        new_eta.push_back(std::move(e));
    }
    return {std::move(new_omega), std::move(new_eta)};
}

namespace detail {

inline bool round_to_integers(const CMatrix &m, double tol, std::vector<long long> &out)
{
    out.clear();
    out.reserve(m.entries().size());
    for (const auto &z : m.entries()) {
        const double r = std::round(z.real());
        if (std::abs(z.real() - r) > tol || std::abs(z.imag()) > tol || std::abs(r) > 1e9) {
            return false;
        }
        out.push_back(static_cast<long long>(r));
    }
    return true;
}

// M J M^T == J over the integers.
__extension__ using i128 = __int128;

inline bool integer_symplectic(const std::vector<long long> &m, std::size_t n)
{
    const std::size_t g = n / 2;
    auto jm = [&](std::size_t i, std::size_t j) -> long long {
        if (i < g && j == i + g) return 1;
        if (i >= g && j + g == i) return -1;
        return 0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            i128 s = 0;
            for (std::size_t k = 0; k < g; ++k) {
                // (M J M^T)_{ij} = sum_k M_{ik} M_{j,k+g} - M_{i,k+g} M_{jk}
                s += static_cast<i128>(m[i * n + k]) * m[j * n + k + g] -
                     static_cast<i128>(m[i * n + k + g]) * m[j * n + k];
            }
            if (s != jm(i, j)) {
                return false;
            }
        }
    }
    return true;
}

} // namespace detail

/// True iff s1 s2^{-1} lies in Sp_{2g}(Z): every entry within `tol` of an
/// integer and the rounded matrix exactly integer-symplectic.
inline bool same_coset_spz(const SymplecticMatrix &s1, const SymplecticMatrix &s2, double tol = 1e-8)
{
    if (s1.g() != s2.g()) {
        throw std::invalid_argument("same_coset_spz: genus mismatch");
    }
    const CMatrix q = s1.matrix() * symplectic_inverse(s2.matrix());
    std::vector<long long> rounded;
    if (!detail::round_to_integers(q, tol, rounded)) {
        return false;
    }
    return detail::integer_symplectic(rounded, q.rows());
}

inline bool is_integer_symplectic(const CMatrix &m, double tol = 1e-8)
{
    std::vector<long long> rounded;
    return m.is_square() && m.rows() % 2 == 0 && detail::round_to_integers(m, tol, rounded) &&
           detail::integer_symplectic(rounded, m.rows());
}

/// Reproducible generator of test data. Draws come from a dyadic grid so
/// the stream does not depend on the standard library's distributions.
class SeededSampler
{
public:
    explicit SeededSampler(std::uint64_t seed) : rng_(seed) {}

    /// Uniform on {lo, lo + 1/8, ..., hi}.
    double grid(double lo = -2.0, double hi = 2.0)
    {
        const auto steps = static_cast<std::uint64_t>(std::llround((hi - lo) * 8.0));
        return lo + static_cast<double>(rng_() % (steps + 1)) / 8.0;
    }

    long long integer(long long lo, long long hi)
    {
        return lo + static_cast<long long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    cplx complex(double lo = -2.0, double hi = 2.0) { return {grid(lo, hi), grid(lo, hi)}; }

    std::uint64_t raw() { return rng_(); }

    CMatrix symmetric(std::size_t g, bool complex_entries, double lo = -2.0, double hi = 2.0)
    {
        CMatrix z(g, g);
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = i; j < g; ++j) {
                const cplx v = complex_entries ? complex(lo, hi) : cplx{grid(lo, hi)};
                z(i, j) = v;
                z(j, i) = v;
            }
        }
        return z;
    }

    CMatrix integer_symmetric(std::size_t g, long long lo = -2, long long hi = 2)
    {
        CMatrix n(g, g);
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = i; j < g; ++j) {
                const double v = static_cast<double>(integer(lo, hi));
                n(i, j) = v;
                n(j, i) = v;
            }
        }
        return n;
    }

    /// Point of H_g: X + i (L L^T + 1/2), X real symmetric.
    CMatrix siegel_point(std::size_t g, double spread = 1.0)
    {
        CMatrix x = symmetric(g, false, -spread, spread);
        CMatrix l(g, g);
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                l(i, j) = grid(-1.0, 1.0);
            }
        }
        CMatrix y = l * l.transpose() + 0.5 * CMatrix::identity(g);
        return x + cplx{0.0, 1.0} * y;
    }

    /// A = 1 + small perturbation, B = A S with S symmetric (so AB^T = BA^T).
    ParabolicElement parabolic(std::size_t g, bool complex_entries = true)
    {
        for (;;) {
            CMatrix a = CMatrix::identity(g);
            for (std::size_t i = 0; i < g; ++i) {
                for (std::size_t j = 0; j < g; ++j) {
                    a(i, j) += complex_entries ? 0.25 * complex(-1.0, 1.0) : cplx{0.25 * grid(-1.0, 1.0)};
                }
            }
            if (std::abs(determinant(a)) < 0.2) {
                continue;
            }
            const CMatrix s = symmetric(g, complex_entries, -1.0, 1.0);
            return ParabolicElement::make(a, a * s);
        }
    }

    /// (a b; c d) in SL_2(C) with a in 1 + [-1/4, 1/4]^2, b, c in [-1/2, 1/2]^2.
    CMatrix sl2_near_identity()
    {
        const cplx a = 1.0 + complex(-0.25, 0.25);
        const cplx b = complex(-0.5, 0.5);
        const cplx c = complex(-0.5, 0.5);
        return CMatrix{{a, b}, {c, (1.0 + b * c) / a}};
    }

    /// Word of length 1..max_len in {psi(Z), J, embedded parabolic}.
    CMatrix symplectic_word(std::size_t g, std::size_t max_len, bool complex_entries = true)
    {
        const std::size_t len = 1 + static_cast<std::size_t>(rng_() % max_len);
        CMatrix m = CMatrix::identity(2 * g);
        for (std::size_t k = 0; k < len; ++k) {
            switch (rng_() % 3) {
            case 0:
                m = m * unipotent(symmetric(g, complex_entries, -1.0, 1.0));
                break;
            case 1:
                m = m * j_matrix(g);
                break;
            default:
                m = m * parabolic(g, complex_entries).embed();
                break;
            }
        }
        return m;
    }

    /// Word in Sp_{2g}(Z) built from J, psi(N) with N integer symmetric and
    /// the unimodular parabolic (U 0; 0 U^{-T}) with U elementary.
    CMatrix integer_symplectic_word(std::size_t g, std::size_t max_len)
    {
        const std::size_t len = 1 + static_cast<std::size_t>(rng_() % max_len);
        CMatrix m = CMatrix::identity(2 * g);
        for (std::size_t k = 0; k < len; ++k) {
            const auto choice = (g > 1) ? rng_() % 3 : rng_() % 2;
            if (choice == 0) {
                m = m * unipotent(integer_symmetric(g, -2, 2));
            } else if (choice == 1) {
                m = m * j_matrix(g);
            } else {
                const std::size_t r = rng_() % g;
                const std::size_t c = (r + 1 + rng_() % (g - 1)) % g;
                CMatrix u = CMatrix::identity(g);
                u(r, c) = static_cast<double>(integer(-1, 1));
                const CMatrix u_inv_t = mat_inv(u).transpose();
                m = m * block_join(u, CMatrix(g, g), CMatrix(g, g), u_inv_t);
            }
        }
        return m;
    }

private:
    std::mt19937_64 rng_;
};

} // namespace hre

#endif // HRE_SYMPGRP_HPP

#ifndef HRE_NUMERICS_HPP
#define HRE_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hre {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

/// Shared tolerance policy. Every comparison in the library is a max-abs
/// entry comparison against `abs_tol`.
struct Tolerance {
    double abs_tol = 1e-10;
    double fd_step = 1e-6;

    Tolerance() = default;
    Tolerance(double abs, double step = 1e-6) : abs_tol(abs), fd_step(step)
    {
        if (!(abs_tol > 0.0) || !(fd_step > 0.0)) {
            throw std::invalid_argument("tolerance values must be positive");
        }
    }
};

inline bool is_finite(const cplx &z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dense complex matrix, row-major.
class CMatrix
{
public:
    CMatrix() = default;

    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols)
    {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("matrix dimensions must be positive");
        }
    }

    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries))
    {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("matrix dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw std::invalid_argument("entry count does not match rows*cols");
        }
        if (!std::all_of(data_.begin(), data_.end(), [](const cplx &z) { return is_finite(z); })) {
            throw std::invalid_argument("matrix entries must be finite");
        }
    }

    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        if (rows_ == 0 || cols_ == 0) {
            throw std::invalid_argument("matrix dimensions must be positive");
        }
        data_.reserve(rows_ * cols_);
        for (const auto &r : rows) {
            if (r.size() != cols_) {
                throw std::invalid_argument("ragged matrix literal");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static CMatrix identity(std::size_t n)
    {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

    static CMatrix diagonal(std::span<const cplx> d)
    {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(i, i) = d[i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    const cplx &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    cplx &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const cplx> entries() const { return data_; }

    CMatrix transpose() const
    {
        CMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    CMatrix real_part() const
    {
        CMatrix r(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            r.data_[k] = data_[k].real();
        }
        return r;
    }

    CMatrix imag_part() const
    {
        CMatrix r(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            r.data_[k] = data_[k].imag();
        }
        return r;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto &z : data_) {
            m = std::max(m, std::abs(z));
        }
        return m;
    }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const cplx &z) { return is_finite(z); });
    }

    CMatrix &operator+=(const CMatrix &o)
    {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += o.data_[k];
        }
        return *this;
    }

    CMatrix &operator-=(const CMatrix &o)
    {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= o.data_[k];
        }
        return *this;
    }

    CMatrix &operator*=(cplx s)
    {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator-(CMatrix a) { return a *= -1.0; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator/(CMatrix a, cplx s) { return a *= (1.0 / s); }

    friend bool operator==(const CMatrix &a, const CMatrix &b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void require_same_shape(const CMatrix &o) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw std::invalid_argument("matrix dimension mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

class SingularMatrixError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

inline CMatrix mat_mul(const CMatrix &a, const CMatrix &b)
{
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("mat_mul: dimension mismatch");
    }
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

inline CMatrix operator*(const CMatrix &a, const CMatrix &b) { return mat_mul(a, b); }

inline double max_abs_diff(const CMatrix &a, const CMatrix &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
    }
    return m;
}

inline bool approx_equal(const CMatrix &a, const CMatrix &b, double tol)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol;
}

namespace detail {

// In-place LU with partial pivoting. Returns false when a pivot falls below
// the singularity threshold.
struct LU {
    CMatrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

inline LU lu_decompose(const CMatrix &a)
{
    if (!a.is_square()) {
        throw std::invalid_argument("LU: matrix must be square");
    }
    const std::size_t n = a.rows();
    LU out{a, std::vector<std::size_t>(n), 1, false};
    for (std::size_t i = 0; i < n; ++i) {
        out.perm[i] = i;
    }
    const double threshold = 1e-14 * std::max(a.max_abs(), 1e-300);
    CMatrix &m = out.lu;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(m(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > best) {
                best = std::abs(m(r, col));
                piv = r;
            }
        }
        if (best < threshold || best == 0.0) {
            out.singular = true;
            return out;
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(col, j), m(piv, j));
            }
            std::swap(out.perm[col], out.perm[piv]);
            out.sign = -out.sign;
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = m(r, col) / m(col, col);
            m(r, col) = f;
            for (std::size_t j = col + 1; j < n; ++j) {
                m(r, j) -= f * m(col, j);
            }
        }
    }
    return out;
}

} // namespace detail

/// Inverse by LU with partial pivoting. Throws SingularMatrixError when a
/// pivot is below 1e-14 * max|a|.
inline CMatrix mat_inv(const CMatrix &a)
{
    const auto dec = detail::lu_decompose(a);
    if (dec.singular) {
        throw SingularMatrixError("mat_inv: matrix is singular to tolerance");
    }
    const std::size_t n = a.rows();
    const CMatrix &m = dec.lu;
    CMatrix inv(n, n);
    std::vector<cplx> x(n);
    for (std::size_t c = 0; c < n; ++c) {
        // Solve L U x = P e_c.
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = (dec.perm[i] == c) ? cplx{1.0} : cplx{};
            for (std::size_t k = 0; k < i; ++k) {
                s -= m(i, k) * x[k];
            }
            x[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = x[ii];
            for (std::size_t k = ii + 1; k < n; ++k) {
                s -= m(ii, k) * x[k];
            }
            x[ii] = s / m(ii, ii);
        }
        for (std::size_t i = 0; i < n; ++i) {
            inv(i, c) = x[i];
        }
    }
    return inv;
}

/// Determinant via LU; exactly zero when elimination hits a zero pivot.
inline cplx determinant(const CMatrix &a)
{
    if (!a.is_square()) {
        throw std::invalid_argument("determinant: matrix must be square");
    }
    const std::size_t n = a.rows();
    // Plain elimination without the singularity cut-off so that tiny
    // determinants are reported rather than rounded to zero.
    CMatrix m = a;
    cplx det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) {
                piv = r;
            }
        }
        if (m(piv, col) == cplx{}) {
            return 0.0;
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(col, j), m(piv, j));
            }
            det = -det;
        }
        det *= m(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = m(r, col) / m(col, col);
            for (std::size_t j = col; j < n; ++j) {
                m(r, j) -= f * m(col, j);
            }
        }
    }
    return det;
}

struct Blocks {
    CMatrix a, b, c, d;
};

/// Splits a 2g x 2g matrix into its g x g blocks (A B; C D).
inline Blocks block_split(const CMatrix &m, std::size_t g)
{
    if (g == 0 || m.rows() != 2 * g || m.cols() != 2 * g) {
        throw std::invalid_argument("block_split: matrix is not 2g x 2g");
    }
    Blocks out{CMatrix(g, g), CMatrix(g, g), CMatrix(g, g), CMatrix(g, g)};
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            out.a(i, j) = m(i, j);
            out.b(i, j) = m(i, j + g);
            out.c(i, j) = m(i + g, j);
            out.d(i, j) = m(i + g, j + g);
        }
    }
    return out;
}

inline Blocks block_split(const CMatrix &m)
{
    if (m.rows() % 2 != 0) {
        throw std::invalid_argument("block_split: odd dimension");
    }
    return block_split(m, m.rows() / 2);
}

inline CMatrix block_join(const CMatrix &a, const CMatrix &b, const CMatrix &c, const CMatrix &d)
{
    const std::size_t g = a.rows();
    for (const CMatrix *blk : {&a, &b, &c, &d}) {
        if (blk->rows() != g || blk->cols() != g) {
            throw std::invalid_argument("block_join: blocks must all be g x g");
        }
    }
    CMatrix m(2 * g, 2 * g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            m(i, j) = a(i, j);
            m(i, j + g) = b(i, j);
            m(i + g, j) = c(i, j);
            m(i + g, j + g) = d(i, j);
        }
    }
    return m;
}

inline CMatrix block_join(const Blocks &blk) { return block_join(blk.a, blk.b, blk.c, blk.d); }

inline bool is_symmetric(const CMatrix &m, double tol)
{
    return m.is_square() && max_abs_diff(m, m.transpose()) <= tol;
}

inline CMatrix symmetrize(const CMatrix &m) { return 0.5 * (m + m.transpose()); }

/// Leading-principal-minor test for a (numerically) Hermitian matrix.
inline bool is_positive_definite(const CMatrix &h, double threshold = 1e-12)
{
    if (!h.is_square()) {
        return false;
    }
    const std::size_t n = h.rows();
    for (std::size_t k = 1; k <= n; ++k) {
        CMatrix minor(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                minor(i, j) = h(i, j);
            }
        }
        if (!(determinant(minor).real() > threshold)) {
            return false;
        }
    }
    return true;
}

inline bool is_real(const CMatrix &m, double tol)
{
    return std::all_of(m.entries().begin(), m.entries().end(),
                       [tol](const cplx &z) { return std::abs(z.imag()) <= tol; });
}

} // namespace hre

#endif // HRE_NUMERICS_HPP

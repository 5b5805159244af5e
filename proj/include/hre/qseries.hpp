#ifndef HRE_QSERIES_HPP
#define HRE_QSERIES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hre/numerics.hpp"

namespace hre {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// sigma_k(n) = sum of d^k over divisors d of n. Trial division up to sqrt(n);
/// results are cached process-wide.
inline BigInt divisor_sigma(unsigned k, std::uint64_t n)
{
    if (n == 0) {
        throw std::invalid_argument("divisor_sigma: n must be positive");
    }
    static std::mutex mtx;
    static std::map<std::pair<unsigned, std::uint64_t>, BigInt> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        if (auto it = cache.find({k, n}); it != cache.end()) {
            return it->second;
        }
    }
    BigInt s = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) {
            continue;
        }
        s += boost::multiprecision::pow(BigInt(d), k);
        const std::uint64_t e = n / d;
        if (e != d) {
            s += boost::multiprecision::pow(BigInt(e), k);
        }
    }
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(std::make_pair(k, n), s);
    return s;
}

/// Coefficient growth certificate: |a_n| <= c (n+1)^p for every n, and
/// a_n = 0 for n > degree when a degree is known.
struct GrowthBound {
    double c = 0.0;
    double p = 0.0;
    std::optional<std::size_t> degree;
};

/// Truncated power series sum_{n <= order} a_n q^n with exact rational
/// coefficients.
class QSeries
{
public:
    QSeries() = default;

    /// A polynomial in q; coefficients past its length are zero.
    static QSeries polynomial(std::vector<Rational> coeffs, std::size_t order)
    {
        if (coeffs.size() > order + 1) {
            throw std::invalid_argument("QSeries: more coefficients than order allows");
        }
        double c = 0.0;
        for (const auto &a : coeffs) {
            c = std::max(c, std::abs(static_cast<double>(a)));
        }
        const std::size_t deg = coeffs.empty() ? 0 : coeffs.size() - 1;
        coeffs.resize(order + 1);
        return QSeries(std::move(coeffs), {c, 0.0, deg});
    }

    static QSeries constant(const Rational &a, std::size_t order) { return polynomial({a}, order); }

    QSeries(std::vector<Rational> coeffs, GrowthBound growth) : coeffs_(std::move(coeffs)), growth_(growth)
    {
        if (coeffs_.empty()) {
            throw std::invalid_argument("QSeries: need at least the constant term");
        }
    }

    std::size_t order() const { return coeffs_.size() - 1; }
    const Rational &operator[](std::size_t n) const { return coeffs_.at(n); }
    const std::vector<Rational> &coeffs() const { return coeffs_; }
    const GrowthBound &growth() const { return growth_; }

    bool is_zero() const
    {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational &a) { return a == 0; });
    }

    /// First index with a nonzero coefficient.
    std::optional<std::size_t> first_nonzero() const
    {
        for (std::size_t n = 0; n < coeffs_.size(); ++n) {
            if (coeffs_[n] != 0) {
                return n;
            }
        }
        return std::nullopt;
    }

    QSeries truncate(std::size_t order) const
    {
        if (order > this->order()) {
            throw std::invalid_argument("QSeries: cannot extend truncation");
        }
        return QSeries(std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + order + 1), growth_);
    }

    friend QSeries operator+(const QSeries &f, const QSeries &g) { return combine(f, g, Rational(1)); }
    friend QSeries operator-(const QSeries &f, const QSeries &g) { return combine(f, g, Rational(-1)); }

    friend QSeries operator*(const Rational &s, const QSeries &f)
    {
        std::vector<Rational> out(f.coeffs_.size());
        for (std::size_t n = 0; n < out.size(); ++n) {
            out[n] = s * f.coeffs_[n];
        }
        GrowthBound gb = f.growth_;
        gb.c *= std::abs(static_cast<double>(s));
        return QSeries(std::move(out), gb);
    }

    friend QSeries operator*(const QSeries &f, const QSeries &g)
    {
        const std::size_t n_out = std::min(f.order(), g.order()) + 1;
        std::vector<Rational> out(n_out);
        for (std::size_t n = 0; n < n_out; ++n) {
            BigInt num_acc = 0;
            Rational acc = 0;
            for (std::size_t i = 0; i <= n; ++i) {
                const Rational &a = f.coeffs_[i];
                const Rational &b = g.coeffs_[n - i];
                if (a == 0 || b == 0) {
                    continue;
                }
                if (denominator(a) == 1 && denominator(b) == 1) {
                    num_acc += numerator(a) * numerator(b);
                } else {
                    acc += a * b;
                }
            }
            out[n] = acc + Rational(num_acc);
        }
        GrowthBound gb{f.growth_.c * g.growth_.c, f.growth_.p + g.growth_.p + 1.0, std::nullopt};
        if (f.growth_.degree && g.growth_.degree) {
            gb.degree = *f.growth_.degree + *g.growth_.degree;
        }
        return QSeries(std::move(out), gb);
    }

    friend bool operator==(const QSeries &f, const QSeries &g) { return f.coeffs_ == g.coeffs_; }

private:
    static QSeries combine(const QSeries &f, const QSeries &g, const Rational &sign)
    {
        const std::size_t n_out = std::min(f.order(), g.order()) + 1;
        std::vector<Rational> out(n_out);
        for (std::size_t n = 0; n < n_out; ++n) {
            out[n] = f.coeffs_[n] + sign * g.coeffs_[n];
        }
        GrowthBound gb{2.0 * std::max(f.growth_.c, g.growth_.c), std::max(f.growth_.p, g.growth_.p), std::nullopt};
        if (f.growth_.degree && g.growth_.degree) {
            gb.degree = std::max(*f.growth_.degree, *g.growth_.degree);
        }
        return QSeries(std::move(out), gb);
    }

    std::vector<Rational> coeffs_;
    GrowthBound growth_;
};

/// theta = q d/dq: a_n -> n a_n.
inline QSeries theta_op(const QSeries &f)
{
    std::vector<Rational> out(f.order() + 1);
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = f[n] * static_cast<long long>(n);
    }
    GrowthBound gb = f.growth();
    gb.p += 1.0;
    return QSeries(std::move(out), gb);
}

inline long long eisenstein_normalizer(int weight)
{
    switch (weight) {
    case 2:
        return -24;
    case 4:
        return 240;
    case 6:
        return -504;
    default:
        throw std::invalid_argument("eisenstein_series: weight must be 2, 4 or 6");
    }
}

/// E_{2k} = 1 + c_k sum sigma_{2k-1}(n) q^n, (c_1, c_2, c_3) = (-24, 240, -504).
inline QSeries eisenstein_series(int weight, std::size_t order)
{
    const long long c = eisenstein_normalizer(weight);
    std::vector<Rational> a(order + 1);
    a[0] = 1;
    for (std::size_t n = 1; n <= order; ++n) {
        a[n] = Rational(c * divisor_sigma(static_cast<unsigned>(weight - 1), n));
    }
    const double growth_c = 1000.0 * std::abs(static_cast<double>(c));
    return QSeries(std::move(a), {growth_c, static_cast<double>(weight), std::nullopt});
}

struct EisensteinTriple {
    QSeries e2, e4, e6;

    static EisensteinTriple make(std::size_t order)
    {
        return {eisenstein_series(2, order), eisenstein_series(4, order), eisenstein_series(6, order)};
    }
};

/// 12 theta E2 - (E2^2 - E4), 3 theta E4 - (E2 E4 - E6), 2 theta E6 - (E2 E6 - E4^2).
inline std::array<QSeries, 3> ramanujan_residuals(const EisensteinTriple &e)
{
    return {Rational(12) * theta_op(e.e2) - (e.e2 * e.e2 - e.e4),
            Rational(3) * theta_op(e.e4) - (e.e2 * e.e4 - e.e6),
            Rational(2) * theta_op(e.e6) - (e.e2 * e.e6 - e.e4 * e.e4)};
}

inline std::array<QSeries, 3> ramanujan_residuals(std::size_t order)
{
    if (order < 1) {
        throw std::invalid_argument("ramanujan_residuals: order must be at least 1");
    }
    return ramanujan_residuals(EisensteinTriple::make(order));
}

/// Delta = (E4^3 - E6^2) / 1728.
inline QSeries discriminant_series(std::size_t order)
{
    const QSeries e4 = eisenstein_series(4, order);
    const QSeries e6 = eisenstein_series(6, order);
    return Rational(1, 1728) * (e4 * e4 * e4 - e6 * e6);
}

/// theta^2 E2 from the Ramanujan relations:
/// (2 E2 (E2^2 - E4)/12 - (E2 E4 - E6)/3) / 12.
inline QSeries theta2_e2_series(const EisensteinTriple &e)
{
    const QSeries t_e2 = Rational(1, 12) * (e.e2 * e.e2 - e.e4);
    const QSeries t_e4 = Rational(1, 3) * (e.e2 * e.e4 - e.e6);
    return Rational(1, 12) * (Rational(2) * e.e2 * t_e2 - t_e4);
}

struct RamanujanPoint {
    cplx e2, e4, e6;

    cplx discriminant() const { return (e4 * e4 * e4 - e6 * e6) / 1728.0; }

    /// e4^3 - e6^2 != 0, relative to the size of the terms.
    bool chart_valid() const
    {
        const double scale = std::max({1.0, std::pow(std::abs(e4), 3.0), std::pow(std::abs(e6), 2.0)});
        return std::abs(e4 * e4 * e4 - e6 * e6) > 1e-12 * scale;
    }
};

/// ((e2^2 - e4)/12, (e2 e4 - e6)/3, (e2 e6 - e4^2)/2).
inline RamanujanPoint v_field(const RamanujanPoint &pt)
{
    return {(pt.e2 * pt.e2 - pt.e4) / 12.0, (pt.e2 * pt.e4 - pt.e6) / 3.0, (pt.e2 * pt.e6 - pt.e4 * pt.e4) / 2.0};
}

struct SeriesValue {
    cplx value;
    double tail_bound;
};

/// Horner evaluation at q = exp(2 pi i tau) with a certified bound on the
/// omitted tail, from the series' growth certificate. Throws when the bound
/// exceeds `accuracy`.
inline SeriesValue eval_series(const QSeries &f, cplx tau, double accuracy = 1e-12)
{
    if (!(tau.imag() > 0.0)) {
        throw std::domain_error("eval_series: Im tau must be positive");
    }
    const cplx q = std::exp(two_pi_i * tau);
    const double r = std::exp(-2.0 * pi * tau.imag());
    const std::size_t n = f.order();
    double tail = 0.0;
    const auto &gb = f.growth();
    if (!(gb.degree && *gb.degree <= n)) {
        const double nn = static_cast<double>(n);
        const double rho = std::pow((nn + 3.0) / (nn + 2.0), gb.p) * r;
        if (!(rho < 1.0)) {
            throw std::domain_error("eval_series: tail bound does not converge at this order");
        }
        const double log_first = std::log(gb.c) + gb.p * std::log(nn + 2.0) + (nn + 1.0) * std::log(r);
        tail = gb.c == 0.0 ? 0.0 : std::exp(log_first) / (1.0 - rho);
    }
    if (tail > accuracy) {
        throw std::domain_error("eval_series: tail bound " + std::to_string(tail) + " exceeds requested accuracy");
    }
    cplx acc = 0.0;
    for (std::size_t k = n + 1; k-- > 0;) {
        acc = acc * q + static_cast<double>(f[k]);
    }
    return {acc, tail};
}

/// Double-precision coefficients of E2, E4, E6 at one order, for repeated
/// evaluation.
class Phi1Evaluator
{
public:
    explicit Phi1Evaluator(std::size_t order = 120, double accuracy = 1e-12)
        : triple_(EisensteinTriple::make(order)), accuracy_(accuracy)
    {
    }

    struct Result {
        RamanujanPoint point;
        std::array<double, 3> tail_bounds;
        bool chart_valid;
    };

    Result operator()(cplx tau) const
    {
        const auto v2 = eval_series(triple_.e2, tau, accuracy_);
        const auto v4 = eval_series(triple_.e4, tau, accuracy_);
        const auto v6 = eval_series(triple_.e6, tau, accuracy_);
        RamanujanPoint pt{v2.value, v4.value, v6.value};
        return {pt, {v2.tail_bound, v4.tail_bound, v6.tail_bound}, pt.chart_valid()};
    }

    const EisensteinTriple &series() const { return triple_; }

private:
    EisensteinTriple triple_;
    double accuracy_;
};

/// phi_1(tau) = (E2, E4, E6)(tau).
inline Phi1Evaluator::Result phi1(cplx tau, std::size_t order = 120)
{
    return Phi1Evaluator(order)(tau);
}

/// (E2, theta E2 / 2, theta^2 E2 / 6) with the theta-derivatives taken from
/// the Ramanujan relations.
inline std::array<cplx, 3> b_coordinates(const RamanujanPoint &pt)
{
    const cplx t_e2 = (pt.e2 * pt.e2 - pt.e4) / 12.0;
    const cplx t_e4 = (pt.e2 * pt.e4 - pt.e6) / 3.0;
    const cplx t2_e2 = (2.0 * pt.e2 * t_e2 - t_e4) / 12.0;
    return {pt.e2, t_e2 / 2.0, t2_e2 / 6.0};
}

/// Right action of (a, b) in the g = 1 parabolic on Ramanujan coordinates:
/// (e2/a^2 - 12 b/a, e4/a^4, e6/a^6).
inline RamanujanPoint parabolic_act_point(const RamanujanPoint &pt, cplx a, cplx b)
{
    if (std::abs(a) == 0.0) {
        throw std::invalid_argument("parabolic_act_point: a must be nonzero");
    }
    const cplx a2 = a * a;
    return {pt.e2 / a2 - 12.0 * b / a, pt.e4 / (a2 * a2), pt.e6 / (a2 * a2 * a2)};
}

/// phi_delta(tau) = ((c tau + d)^2 E2 + (12 c / 2 pi i)(c tau + d), (c tau + d)^4 E4, (c tau + d)^6 E6).
inline RamanujanPoint twist_phi1(const CMatrix &delta, cplx tau, const Phi1Evaluator &phi)
{
    if (delta.rows() != 2 || delta.cols() != 2) {
        throw std::invalid_argument("twist_phi1: delta must be 2 x 2");
    }
    if (std::abs(delta(0, 0) * delta(1, 1) - delta(0, 1) * delta(1, 0) - 1.0) > 1e-10 * std::max(1.0, delta.max_abs() * delta.max_abs())) {
        throw std::invalid_argument("twist_phi1: delta must have determinant 1");
    }
    const cplx c = delta(1, 0);
    const cplx j = c * tau + delta(1, 1);
    if (std::abs(j) <= 1e-12 * std::max(1.0, delta.max_abs())) {
        throw SingularMatrixError("twist_phi1: c tau + d vanishes");
    }
    const RamanujanPoint p = phi(tau).point;
    const cplx j2 = j * j;
    return {j2 * p.e2 + 12.0 * c / two_pi_i * j, j2 * j2 * p.e4, j2 * j2 * j2 * p.e6};
}

inline RamanujanPoint twist_phi1(const CMatrix &delta, cplx tau, std::size_t order = 120)
{
    return twist_phi1(delta, tau, Phi1Evaluator(order));
}

inline double max_abs_diff(const RamanujanPoint &x, const RamanujanPoint &y)
{
    return std::max({std::abs(x.e2 - y.e2), std::abs(x.e4 - y.e4), std::abs(x.e6 - y.e6)});
}

/// Componentwise |(1/2 pi i) d phi_1/d tau - v(phi_1(tau))|, central differences.
inline double phi1_ode_residual(cplx tau, const Phi1Evaluator &phi, double h = 1e-5)
{
    const RamanujanPoint plus = phi(tau + h).point;
    const RamanujanPoint minus = phi(tau - h).point;
    const cplx s = 1.0 / (2.0 * h * two_pi_i);
    const RamanujanPoint fd{(plus.e2 - minus.e2) * s, (plus.e4 - minus.e4) * s, (plus.e6 - minus.e6) * s};
    return max_abs_diff(fd, v_field(phi(tau).point));
}

/// Componentwise |(1/2 pi i) d phi_delta/d tau - (c tau + d)^{-2} v(phi_delta(tau))|.
inline double twisted_ode_residual(const CMatrix &delta, cplx tau, const Phi1Evaluator &phi, double h = 1e-5)
{
    const RamanujanPoint plus = twist_phi1(delta, tau + h, phi);
    const RamanujanPoint minus = twist_phi1(delta, tau - h, phi);
    const cplx s = 1.0 / (2.0 * h * two_pi_i);
    const RamanujanPoint fd{(plus.e2 - minus.e2) * s, (plus.e4 - minus.e4) * s, (plus.e6 - minus.e6) * s};
    const cplx j = delta(1, 0) * tau + delta(1, 1);
    const RamanujanPoint v = v_field(twist_phi1(delta, tau, phi));
    const cplx w = 1.0 / (j * j);
    return max_abs_diff(fd, RamanujanPoint{w * v.e2, w * v.e4, w * v.e6});
}

} // namespace hre

#endif // HRE_QSERIES_HPP

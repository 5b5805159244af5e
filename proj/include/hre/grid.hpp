#ifndef HRE_GRID_HPP
#define HRE_GRID_HPP

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "hre/io.hpp"
#include "hre/numerics.hpp"

namespace hre {

/// Parses "x", "yi", "i", "-i", "x+yi", "x-i" and friends.
inline cplx parse_complex(const std::string &text)
{
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    }
    if (s.empty()) {
        throw InputError("empty complex literal");
    }
    auto parse_real = [&](const std::string &t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception &) {
            throw InputError("bad number '" + t + "' in '" + text + "'");
        }
        if (used != t.size() || !std::isfinite(v)) {
            throw InputError("bad number '" + t + "' in '" + text + "'");
        }
        return v;
    };
    if (s.back() != 'i') {
        return {parse_real(s), 0.0};
    }
    s.pop_back();
    // split at the last sign that is not the leading one or part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) {
        return {0.0, parse_real(s)};
    }
    return {parse_real(s.substr(0, split)), parse_real(s.substr(split))};
}

/// "a..b:n" (n evenly spaced points, endpoints included) or a single value.
inline std::vector<cplx> parse_range(const std::string &spec)
{
    const auto dots = spec.find("..");
    if (dots == std::string::npos) {
        return {parse_complex(spec)};
    }
    const auto colon = spec.find(':', dots);
    if (colon == std::string::npos) {
        throw InputError("range '" + spec + "' needs ':n'");
    }
    const cplx a = parse_complex(spec.substr(0, dots));
    const cplx b = parse_complex(spec.substr(dots + 2, colon - dots - 2));
    long n = 0;
    try {
        std::size_t used = 0;
        n = std::stol(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1) throw InputError("");
    } catch (const std::exception &) {
        throw InputError("bad point count in '" + spec + "'");
    }
    if (n < 1 || n > 100000) {
        throw InputError("point count out of range in '" + spec + "'");
    }
    std::vector<cplx> out;
    for (long k = 0; k < n; ++k) {
        const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        out.push_back(a + t * (b - a));
    }
    return out;
}

/// Grid of symmetric g x g matrices. The string lists one range per
/// upper-triangular entry in row-major order, separated by ';'
/// (g(g+1)/2 ranges). Points are the Cartesian product, last entry fastest.
inline std::vector<CMatrix> parse_grid(const std::string &spec)
{
    std::vector<std::vector<cplx>> axes;
    std::size_t start = 0;
    for (;;) {
        const auto semi = spec.find(';', start);
        axes.push_back(parse_range(spec.substr(start, semi == std::string::npos ? std::string::npos : semi - start)));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    std::size_t g = 0;
    while (g * (g + 1) / 2 < axes.size()) ++g;
    if (g * (g + 1) / 2 != axes.size()) {
        throw InputError("grid needs g(g+1)/2 ranges separated by ';'");
    }
    std::size_t total = 1;
    for (const auto &ax : axes) {
        total *= ax.size();
        if (total > 1000000) throw InputError("grid too large");
    }
    std::vector<CMatrix> out;
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t p = 0; p < total; ++p) {
        CMatrix tau(g, g);
        std::size_t a = 0;
        for (std::size_t k = 0; k < g; ++k) {
            for (std::size_t l = k; l < g; ++l, ++a) {
                tau(k, l) = axes[a][idx[a]];
                tau(l, k) = axes[a][idx[a]];
            }
        }
        out.push_back(std::move(tau));
        for (std::size_t a2 = axes.size(); a2-- > 0;) {
            if (++idx[a2] < axes[a2].size()) break;
            idx[a2] = 0;
        }
    }
    return out;
}

} // namespace hre

#endif // HRE_GRID_HPP

#ifndef HRE_VERIFY_HPP
#define HRE_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hre/derham.hpp"
#include "hre/elliptic.hpp"
#include "hre/flows.hpp"
#include "hre/io.hpp"
#include "hre/qseries.hpp"

namespace hre {

/// One named check, aggregated over `cases` instances by its worst residual.
struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    double residual = 0.0;
    std::optional<double> tolerance;  // empty for exact checks
    bool pass = true;
};

struct SuiteResult {
    std::string name;
    std::vector<CheckResult> checks;

    bool pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.pass; });
    }
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::optional<double> tol;  // replaces every numeric tolerance
    std::size_t order = 200;
    int cutoff = 400;
    std::size_t terms = 120;
    std::size_t trials = 50;
    std::vector<std::size_t> genera{1, 2, 3};
    std::vector<cplx> taus{{0.0, 1.0}, {0.0, 2.0}, {0.5, 2.0}};
};

namespace detail {

class CheckAccumulator
{
public:
    CheckAccumulator(std::string name, double tol, const VerifyOptions &opt)
        : name_(std::move(name)), tol_(opt.tol.value_or(tol))
    {
    }

    void add(double residual)
    {
        ++cases_;
        if (!(residual <= worst_)) {  // NaN sticks
            worst_ = residual;
        }
    }

    CheckResult result() const
    {
        const bool ok = cases_ > 0 && worst_ <= tol_;
        return {name_, cases_, worst_, tol_, ok};
    }

private:
    std::string name_;
    double tol_;
    std::size_t cases_ = 0;
    double worst_ = 0.0;
};

// A count of wrong boolean outcomes; passes only at zero.
inline CheckResult count_check(std::string name, std::size_t cases, std::size_t wrong)
{
    return {std::move(name), cases, static_cast<double>(wrong), std::nullopt, wrong == 0 && cases > 0};
}

inline std::string tau_label(cplx t)
{
    std::string s = format_double(t.real());
    s += (t.imag() < 0 ? "-" : "+");
    s += format_double(std::abs(t.imag())) + "i";
    return s;
}

} // namespace detail

/// Exact Ramanujan relations, the discriminant, special values and the
/// g = 1 differential equations.
inline SuiteResult qseries_suite(const VerifyOptions &opt)
{
    SuiteResult s{"qseries", {}};
    const auto triple = EisensteinTriple::make(opt.order);
    const auto res = ramanujan_residuals(triple);
    const char *names[] = {"ramanujan_e2", "ramanujan_e4", "ramanujan_e6"};
    for (std::size_t k = 0; k < 3; ++k) {
        std::size_t nonzero = 0;
        for (const auto &a : res[k].coeffs()) nonzero += (a != 0);
        s.checks.push_back(detail::count_check(names[k], res[k].order() + 1, nonzero));
    }

    const QSeries delta = discriminant_series(std::min<std::size_t>(opt.order, 50));
    std::size_t bad = 0;
    for (const auto &a : delta.coeffs()) bad += (denominator(a) != 1);
    bad += (delta[0] != 0) + (delta[1] != 1);
    s.checks.push_back(detail::count_check("discriminant_integral", delta.order() + 1, bad));

    const Phi1Evaluator anchor(60);
    const auto at_i = anchor(cplx{0.0, 1.0}).point;
    detail::CheckAccumulator e6("e6_at_i", 1e-10, opt), e2("e2_at_i", 1e-9, opt);
    e6.add(std::abs(at_i.e6));
    e2.add(std::abs(at_i.e2 - 3.0 / pi));
    s.checks.push_back(e6.result());
    s.checks.push_back(e2.result());

    const Phi1Evaluator phi(opt.terms);
    detail::CheckAccumulator ode("phi1_ode", 1e-7, opt);
    for (cplx t : {cplx{0.0, 2.0}, cplx{0.5, 2.0}, cplx{1.0, 1.0}}) {
        ode.add(phi1_ode_residual(t, phi));
    }
    s.checks.push_back(ode.result());

    detail::CheckAccumulator twist("twisted_ode", 1e-6, opt);
    SeededSampler sampler(opt.seed);
    for (int k = 0; k < 10; ++k) {
        const CMatrix d = sampler.sl2_near_identity();
        const cplx c = d(1, 0);
        int used = 0;
        while (used < 3) {
            const cplx t{sampler.grid(-0.5, 0.5), sampler.grid(1.0, 2.0)};
            if (std::abs(c * t + d(1, 1)) < 0.25) continue;
            twist.add(twisted_ode_residual(d, t, phi));
            ++used;
        }
    }
    s.checks.push_back(twist.result());
    return s;
}

/// Gauss-Manin derivatives of the canonical frame family.
inline SuiteResult gauss_manin_suite(const VerifyOptions &opt)
{
    SuiteResult s{"derham", {}};
    SeededSampler sampler(opt.seed);
    const FrameFamily family = canonical_family();
    for (std::size_t g : opt.genera) {
        const CMatrix tau = sampler.siegel_point(g);
        const SiegelPoint pt = SiegelPoint::make(tau);
        const HodgeFrame base = family(tau);
        detail::CheckAccumulator omega("gauss_manin_omega_g" + std::to_string(g), 1e-7, opt);
        detail::CheckAccumulator eta("gauss_manin_eta_g" + std::to_string(g), 1e-7, opt);
        detail::CheckAccumulator compat("pairing_compatibility_g" + std::to_string(g), 1e-7, opt);
        for (std::size_t i = 1; i <= g; ++i) {
            for (std::size_t j = i; j <= g; ++j) {
                const auto d = gauss_manin_fd(family, tau, i, j);
                const auto expected = eta_ij(pt, i, j);
                for (std::size_t m = 0; m < g; ++m) {
                    omega.add(max_abs_diff(d.d_omega[m], expected[m]));
                    eta.add(d.d_eta[m].max_abs());
                }
                // theta <a, b> = <nabla a, b> + <a, nabla b>; the pairings are constant.
                std::vector<CohClass> all = base.omega(), dall = d.d_omega;
                all.insert(all.end(), base.eta().begin(), base.eta().end());
                dall.insert(dall.end(), d.d_eta.begin(), d.d_eta.end());
                for (std::size_t a = 0; a < all.size(); ++a) {
                    for (std::size_t b = 0; b < all.size(); ++b) {
                        compat.add(std::abs(pairing(dall[a], all[b]) + pairing(all[a], dall[b])));
                    }
                }
            }
        }
        s.checks.push_back(omega.result());
        s.checks.push_back(eta.result());
        s.checks.push_back(compat.result());
    }
    return s;
}

/// Lattice-sum periods against q-series at one tau.
inline SuiteResult periods_suite(cplx tau, const VerifyOptions &opt)
{
    SuiteResult s{"periods tau=" + detail::tau_label(tau), {}};
    const auto rep = eisenstein_period_identities(tau, opt.cutoff, opt.terms);
    const char *names[] = {"e2_identity", "e4_identity", "e6_identity"};
    for (std::size_t k = 0; k < 3; ++k) {
        detail::CheckAccumulator acc(names[k], 1e-6, opt);
        acc.add(rep.residual[k]);
        s.checks.push_back(acc.result());
    }
    detail::CheckAccumulator nu("multiplier", 1e-6, opt), ratio("tau_ratio", 1e-6, opt);
    nu.add(rep.nu_residual);
    ratio.add(rep.tau_residual);
    s.checks.push_back(nu.result());
    s.checks.push_back(ratio.result());
    return s;
}

/// Group-coordinate flows, leaf identities, quotient structure and the
/// frame bridges.
inline SuiteResult flows_suite(const VerifyOptions &opt)
{
    SuiteResult s{"flows", {}};
    SeededSampler sampler(opt.seed);
    detail::CheckAccumulator rk4("rk4_vs_exact", 1e-12, opt);
    detail::CheckAccumulator defect("rk4_symplectic_defect", 1e-10, opt);
    detail::CheckAccumulator fd("generator_fd", 1e-9, opt);
    detail::CheckAccumulator factor("psi_delta_factorization", 1e-9, opt);
    detail::CheckAccumulator equi("coset_equivariance", 1e-9, opt);
    detail::CheckAccumulator trip("delta_round_trip", 1e-9, opt);
    detail::CheckAccumulator bridge("frame_bridge", 1e-9, opt);
    detail::CheckAccumulator twist("twist_bridge_g1", 1e-7, opt);
    std::size_t coset_wrong = 0, coset_cases = 0, trans_wrong = 0, trans_cases = 0, leaf_wrong = 0;
    const Phi1Evaluator phi(opt.terms);

    for (std::size_t t = 0; t < opt.trials; ++t) {
        const std::size_t g = opt.genera[t % opt.genera.size()];
        const CMatrix tau = sampler.siegel_point(g);
        const FlowState m0 = SymplecticMatrix::from(sampler.symplectic_word(g, 6), 1e-9);

        // flows: RK4 against the closed form; error measured relative to |M|
        const std::size_t k = 1 + sampler.raw() % g;
        const std::size_t l = k + sampler.raw() % (g - k + 1);
        const cplx dur = sampler.complex();
        const std::size_t steps = 1 + sampler.raw() % 20;
        const auto num = rk4_flow(m0, k, l, dur, steps);
        CMatrix coeff(g, g);
        coeff(k - 1, l - 1) = dur;
        const FlowState exact = exact_flow(m0, coeff);
        const double scale = std::max(1.0, exact.matrix().max_abs());
        rk4.add(max_abs_diff(num.end.matrix(), exact.matrix()) / scale);
        defect.add(num.max_defect / (scale * scale));
        fd.add(generator_fd_residual(tau, k, l));

        // leaves
        const LeafCase lc = draw_leaf_case(sampler, g);
        factor.add(psi_delta_factor_residual(lc.delta, lc.tau.tau()));
        trip.add(delta_round_trip_residual(lc.tau.tau(), sampler.parabolic(g)));
        bridge.add(frame_bridge_residual(lc.delta, lc.tau));
        for (;;) {
            const SymplecticMatrix gamma = SymplecticMatrix::from(sampler.integer_symplectic_word(g, 4));
            const CMatrix dg = lc.delta.matrix() * gamma.matrix();
            if (std::abs(determinant(cocycle_j(dg, lc.tau.tau()))) < 1e-3) continue;
            const auto eq = equivariance_check(lc.delta, gamma, lc.tau);
            equi.add(eq.residual);
            ++coset_cases;
            coset_wrong += !eq.same_coset;
            break;
        }
        const SiegelPoint other = SiegelPoint::make(
            lc.tau.tau() + cplx{0.0, 0.25} * CMatrix::identity(g) + 0.125 * sampler.symmetric(g, false, -1.0, 1.0));
        if (u_delta_contains(lc.delta.matrix(), other.tau())) {
            leaf_wrong += !same_leaf(lc.delta, psi_delta(lc.delta, lc.tau.tau()), psi_delta(lc.delta, other.tau()));
        }
        if (g == 1) {
            const HodgeFrame acted = parabolic_act_frame(canonical_frame(lc.tau), p_delta(lc.delta, lc.tau.tau()), 1e-9);
            const RamanujanPoint lhs = frame_e_coordinates(acted, phi);
            const RamanujanPoint rhs = twist_phi1(lc.delta.matrix(), lc.tau(0, 0), phi);
            twist.add(max_abs_diff(lhs, rhs));
        }

        // quotient: integer translations stay in the coset, non-integer ones do not
        const CMatrix n_int = sampler.integer_symmetric(g, -3, 3);
        trans_wrong += !translation_invariance_check(tau, n_int);
        CMatrix n_frac = n_int;
        const std::size_t r = sampler.raw() % g;
        const std::size_t c = r + sampler.raw() % (g - r);
        const double off = 0.125 * static_cast<double>(1 + sampler.raw() % 7);
        n_frac(r, c) += off;
        if (r != c) n_frac(c, r) += off;
        trans_wrong += translation_invariance_check(tau, n_frac);
        trans_cases += 2;
    }
    s.checks.push_back(rk4.result());
    s.checks.push_back(defect.result());
    s.checks.push_back(fd.result());
    s.checks.push_back(factor.result());
    s.checks.push_back(equi.result());
    s.checks.push_back(detail::count_check("coset_equivariance_same_coset", coset_cases, coset_wrong));
    s.checks.push_back(trip.result());
    s.checks.push_back(bridge.result());
    s.checks.push_back(detail::count_check("same_leaf", opt.trials, leaf_wrong));
    if (std::find(opt.genera.begin(), opt.genera.end(), 1) != opt.genera.end()) {
        s.checks.push_back(twist.result());
    }
    s.checks.push_back(detail::count_check("translation_invariance", trans_cases, trans_wrong));
    return s;
}

inline Json check_to_json(const CheckResult &c)
{
    Json j{{"name", c.name}, {"cases", c.cases}, {"residual", c.residual}};
    if (c.tolerance) {
        j["tolerance"] = *c.tolerance;
    } else {
        j["tolerance"] = "exact";
    }
    j["pass"] = c.pass;
    return j;
}

inline Json suite_to_json(const SuiteResult &s)
{
    Json checks = Json::array();
    for (const auto &c : s.checks) checks.push_back(check_to_json(c));
    return Json{{"suite", s.name}, {"pass", s.pass()}, {"checks", std::move(checks)}};
}

inline std::vector<SuiteResult> verify_all(const VerifyOptions &opt)
{
    std::vector<SuiteResult> out;
    out.push_back(qseries_suite(opt));
    out.push_back(gauss_manin_suite(opt));
    for (cplx t : opt.taus) out.push_back(periods_suite(t, opt));
    out.push_back(flows_suite(opt));
    return out;
}

} // namespace hre

#endif // HRE_VERIFY_HPP

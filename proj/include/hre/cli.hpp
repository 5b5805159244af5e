#ifndef HRE_CLI_HPP
#define HRE_CLI_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hre/grid.hpp"
#include "hre/io.hpp"
#include "hre/verify.hpp"

namespace hre {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_bad_input = 2 };

struct RunConfig {
    std::uint64_t seed = 42;
    std::optional<double> tol;
    std::string out;
    std::string format;  // empty: the command's default (csv for leaf sample, json otherwise)
};

namespace detail {

inline cplx parse_tau_pair(const std::string &text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw InputError("--tau expects re,im");
    }
    const cplx re = parse_complex(text.substr(0, comma));
    const cplx im = parse_complex(text.substr(comma + 1));
    if (re.imag() != 0.0 || im.imag() != 0.0) {
        throw InputError("--tau expects two real numbers re,im");
    }
    return {re.real(), im.real()};
}

inline void emit(const RunConfig &cfg, const std::string &text, std::ostream &out)
{
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        throw InputError("cannot write " + cfg.out);
    }
    f << text;
    if (!f) {
        throw InputError("write failed for " + cfg.out);
    }
}

inline int report(const RunConfig &cfg, const std::string &command, const std::vector<SuiteResult> &suites,
                  std::ostream &out)
{
    bool pass = true;
    Json js = Json::array();
    for (const auto &s : suites) {
        pass = pass && s.pass();
        js.push_back(suite_to_json(s));
    }
    Json j{{"command", command}, {"seed", cfg.seed}, {"pass", pass}, {"suites", std::move(js)}};
    emit(cfg, j.dump(2) + "\n", out);
    return pass ? exit_pass : exit_fail;
}

inline SymplecticMatrix read_delta(const std::string &arg, std::size_t g_hint)
{
    if (arg == "identity") {
        return SymplecticMatrix::identity(g_hint);
    }
    const CMatrix m = matrix_from_json(read_json_file(arg));
    try {
        return SymplecticMatrix::from(m, 1e-9);
    } catch (const std::exception &e) {
        throw InputError(std::string("delta: ") + e.what());
    }
}

inline std::string leaf_csv(const std::vector<LeafSample> &samples)
{
    std::ostringstream os;
    const std::size_t g = samples.front().tau.rows();
    std::vector<std::string> header;
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            header.push_back("tau_" + std::to_string(i + 1) + std::to_string(j + 1) + "_re");
            header.push_back("tau_" + std::to_string(i + 1) + std::to_string(j + 1) + "_im");
        }
    for (std::size_t i = 0; i < 2 * g; ++i)
        for (std::size_t j = 0; j < 2 * g; ++j) {
            header.push_back("m_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_re");
            header.push_back("m_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_im");
        }
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
    os << "\n";
    for (const auto &s : samples) {
        bool first = true;
        auto put = [&](cplx z) {
            os << (first ? "" : ",") << format_double(z.real()) << "," << format_double(z.imag());
            first = false;
        };
        for (const auto &z : s.tau.entries()) put(z);
        for (const auto &z : s.state.matrix().entries()) put(z);
        os << "\n";
    }
    return os.str();
}

} // namespace detail

/// Runs the command line in-process and returns the exit code. Output goes
/// to `out` unless --out names a file; diagnostics go to `err`.
inline int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Ramanujan-system and symplectic-flow verification suites and data emitters", "hre"};
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    double tol = 0.0;
    app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    auto *tol_opt = app.add_option("--tol", tol, "override every check tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", cfg.out, "write output to this file");
    app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    VerifyOptions vopt;
    auto *verify = app.add_subcommand("verify", "run verification suites");
    verify->require_subcommand(1);
    auto *v_all = verify->add_subcommand("all", "every suite");
    v_all->add_option("--order", vopt.order, "q-series order")->check(CLI::Range(1, 5000));
    v_all->add_option("--cutoff", vopt.cutoff, "lattice cutoff")->check(CLI::Range(20, 5000));
    v_all->add_option("--terms", vopt.terms, "q-series terms for evaluation")->check(CLI::Range(10, 5000));
    v_all->add_option("--trials", vopt.trials, "flow trials")->check(CLI::Range(1, 100000));

    auto *v_ram = verify->add_subcommand("ramanujan", "exact Ramanujan relations");
    std::size_t ram_order = 200;
    v_ram->add_option("--order", ram_order, "truncation order")->check(CLI::Range(1, 5000));

    auto *v_per = verify->add_subcommand("periods", "lattice periods against q-series");
    std::string per_tau = "0,2";
    v_per->add_option("--tau", per_tau, "re,im")->capture_default_str();
    v_per->add_option("--cutoff", vopt.cutoff, "lattice cutoff")->check(CLI::Range(20, 5000));
    v_per->add_option("--terms", vopt.terms, "q-series terms")->check(CLI::Range(10, 5000));

    auto *v_flows = verify->add_subcommand("flows", "flow and leaf identities");
    std::size_t flows_g = 0;
    v_flows->add_option("--g", flows_g, "genus (default 1,2,3)")->check(CLI::Range(1, 6));
    v_flows->add_option("--trials", vopt.trials, "trials")->check(CLI::Range(1, 100000));
    v_flows->add_option("--seed", cfg.seed, "RNG seed");

    auto *eval = app.add_subcommand("eval", "evaluate maps");
    eval->require_subcommand(1);
    auto *e_phi = eval->add_subcommand("phi1", "(E2, E4, E6) at tau");
    std::string phi_tau;
    std::size_t phi_terms = 120;
    e_phi->add_option("--tau", phi_tau, "re,im")->required();
    e_phi->add_option("--terms", phi_terms, "series order")->check(CLI::Range(1, 5000));

    auto *check = app.add_subcommand("check", "predicates on input files");
    check->require_subcommand(1);
    auto *c_symp = check->add_subcommand("symplectic", "symplectic test and multiplier");
    std::string matrix_path;
    c_symp->add_option("--matrix", matrix_path, "matrix JSON")->required();

    auto *leaf = app.add_subcommand("leaf", "leaf sampling");
    leaf->require_subcommand(1);
    auto *l_sample = leaf->add_subcommand("sample", "psi_delta over a tau grid");
    std::string delta_arg = "identity", grid_spec;
    l_sample->add_option("--delta", delta_arg, "delta matrix JSON or 'identity'");
    l_sample->add_option("--grid", grid_spec, "grid spec, e.g. i..3i:5")->required();
    l_sample->add_option("--out", cfg.out, "output file");
    l_sample->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

    std::vector<std::string> argv_store{"hre"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_pass;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_pass;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return exit_bad_input;
    }
    if (*tol_opt) cfg.tol = tol;
    vopt.seed = cfg.seed;
    vopt.tol = cfg.tol;

    try {
        if (cfg.format == "csv" && !*l_sample) {
            throw InputError("--format csv is only available for leaf sample");
        }
        if (*v_all) {
            return detail::report(cfg, "verify all", verify_all(vopt), out);
        }
        if (*v_ram) {
            vopt.order = ram_order;
            const auto res = ramanujan_residuals(ram_order);
            const bool zero = res[0].is_zero() && res[1].is_zero() && res[2].is_zero();
            Json j{{"order", ram_order}, {"residuals", zero ? "zero" : "nonzero"}};
            detail::emit(cfg, j.dump(2) + "\n", out);
            return zero ? exit_pass : exit_fail;
        }
        if (*v_per) {
            const cplx tau = detail::parse_tau_pair(per_tau);
            if (!(tau.imag() >= 0.5)) throw InputError("--tau needs Im tau >= 0.5");
            const auto rep = eisenstein_period_identities(tau, vopt.cutoff, vopt.terms);
            const double t6 = vopt.tol.value_or(1e-6);
            const char *names[] = {"e2", "e4", "e6"};
            Json ids = Json::object();
            bool pass = true;
            for (std::size_t k = 0; k < 3; ++k) {
                ids[names[k]] = Json{{"lattice", complex_to_json(rep.lattice[k])},
                                     {"qseries", complex_to_json(rep.qseries[k])},
                                     {"residual", rep.residual[k]},
                                     {"pass", rep.residual[k] <= t6}};
                pass = pass && rep.residual[k] <= t6;
            }
            pass = pass && rep.nu_residual <= t6 && rep.tau_residual <= t6;
            Json j{{"tau", complex_to_json(tau)},
                   {"cutoff", vopt.cutoff},
                   {"terms", vopt.terms},
                   {"quasi_period_sign", quasi_period_sign},
                   {"identities", std::move(ids)},
                   {"nu", complex_to_json(rep.nu)},
                   {"nu_residual", rep.nu_residual},
                   {"tau_residual", rep.tau_residual},
                   {"tolerance", t6},
                   {"pass", pass}};
            detail::emit(cfg, j.dump(2) + "\n", out);
            return pass ? exit_pass : exit_fail;
        }
        if (*v_flows) {
            if (flows_g) vopt.genera = {flows_g};
            return detail::report(cfg, "verify flows", {flows_suite(vopt)}, out);
        }
        if (*e_phi) {
            const cplx tau = detail::parse_tau_pair(phi_tau);
            if (!(tau.imag() > 0.0)) throw InputError("--tau needs Im tau > 0");
            Phi1Evaluator::Result r;
            try {
                r = Phi1Evaluator(phi_terms, cfg.tol.value_or(1e-12))(tau);
            } catch (const std::domain_error &e) {
                throw InputError(e.what());
            }
            Json j{{"tau", complex_to_json(tau)},
                   {"terms", phi_terms},
                   {"e2", complex_to_json(r.point.e2)},
                   {"e4", complex_to_json(r.point.e4)},
                   {"e6", complex_to_json(r.point.e6)},
                   {"tail_bound", Json{{"e2", r.tail_bounds[0]}, {"e4", r.tail_bounds[1]}, {"e6", r.tail_bounds[2]}}},
                   {"chart_valid", r.chart_valid}};
            detail::emit(cfg, j.dump(2) + "\n", out);
            return exit_pass;
        }
        if (*c_symp) {
            const CMatrix m = matrix_from_json(read_json_file(matrix_path));
            if (!m.is_square() || m.rows() % 2 != 0) throw InputError("matrix must be square of even size");
            const double t = cfg.tol.value_or(1e-10);
            const auto diag = is_symplectic(m, t);
            const auto nu = gsp_multiplier(m, t);
            Json j{{"symplectic", diag.symplectic},
                   {"nu", nu ? complex_to_json(*nu) : Json(nullptr)},
                   {"form_defect", diag.form_defect},
                   {"block_conditions", Json::array({diag.set1, diag.set2})}};
            detail::emit(cfg, j.dump() + "\n", out);
            return diag.symplectic ? exit_pass : exit_fail;
        }
        if (*l_sample) {
            const auto grid = parse_grid(grid_spec);
            const LeafSpec spec{detail::read_delta(delta_arg, grid.front().rows())};
            if (spec.g() != grid.front().rows()) throw InputError("delta and grid have different genus");
            std::vector<LeafSample> samples;
            try {
                samples = sample_leaf(spec, grid);
            } catch (const std::domain_error &e) {
                throw InputError(e.what());
            }
            if (cfg.format == "json") {
                Json rows = Json::array();
                for (const auto &s : samples) {
                    rows.push_back(Json{{"tau", matrix_to_json(s.tau)}, {"state", matrix_to_json(s.state.matrix())}});
                }
                detail::emit(cfg, rows.dump(2) + "\n", out);
            } else {
                detail::emit(cfg, detail::leaf_csv(samples), out);
            }
            return exit_pass;
        }
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return exit_bad_input;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return exit_bad_input;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_fail;
    }
    err << "error: no command\n";
    return exit_bad_input;
}

} // namespace hre

#endif // HRE_CLI_HPP

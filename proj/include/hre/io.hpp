#ifndef HRE_IO_HPP
#define HRE_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hre/derham.hpp"
#include "hre/numerics.hpp"

namespace hre {

using Json = nlohmann::ordered_json;

/// Malformed or unreadable user input.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const Json &j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InputError("complex number must be [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

/// {"rows": r, "cols": c, "entries": [[re, im], ...]}, row-major.
inline Json matrix_to_json(const CMatrix &m)
{
    Json entries = Json::array();
    for (const auto &z : m.entries()) {
        entries.push_back(complex_to_json(z));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline CMatrix matrix_from_json(const Json &j)
{
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
        throw InputError("matrix needs rows, cols and entries");
    }
    if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned() || !j["entries"].is_array()) {
        throw InputError("matrix rows/cols must be positive integers and entries an array");
    }
    const auto rows = j["rows"].get<std::size_t>();
    const auto cols = j["cols"].get<std::size_t>();
    if (rows == 0 || cols == 0 || rows > 64 || cols > 64) {
        throw InputError("matrix dimensions out of range");
    }
    if (j["entries"].size() != rows * cols) {
        throw InputError("matrix entry count does not match rows*cols");
    }
    std::vector<cplx> entries;
    for (const auto &e : j["entries"]) {
        entries.push_back(complex_from_json(e));
    }
    try {
        return CMatrix(rows, cols, std::move(entries));
    } catch (const std::invalid_argument &e) {
        throw InputError(e.what());
    }
}

inline Json class_to_json(const CohClass &c)
{
    Json gamma = Json::array(), delta = Json::array();
    for (const auto &z : c.gamma) gamma.push_back(complex_to_json(z));
    for (const auto &z : c.delta) delta.push_back(complex_to_json(z));
    return Json{{"gamma", std::move(gamma)}, {"delta", std::move(delta)}};
}

inline CohClass class_from_json(const Json &j)
{
    if (!j.is_object() || !j.contains("gamma") || !j.contains("delta") || !j["gamma"].is_array() ||
        !j["delta"].is_array()) {
        throw InputError("class needs gamma and delta arrays");
    }
    CohClass c;
    for (const auto &z : j["gamma"]) c.gamma.push_back(complex_from_json(z));
    for (const auto &z : j["delta"]) c.delta.push_back(complex_from_json(z));
    return c;
}

/// {"tau": matrix, "omega": [class...], "eta": [class...]}.
inline Json frame_to_json(const HodgeFrame &f)
{
    Json omega = Json::array(), eta = Json::array();
    for (const auto &c : f.omega()) omega.push_back(class_to_json(c));
    for (const auto &c : f.eta()) eta.push_back(class_to_json(c));
    return Json{{"tau", matrix_to_json(f.tau().tau())}, {"omega", std::move(omega)}, {"eta", std::move(eta)}};
}

inline HodgeFrame frame_from_json(const Json &j)
{
    if (!j.is_object() || !j.contains("tau") || !j.contains("omega") || !j.contains("eta") ||
        !j["omega"].is_array() || !j["eta"].is_array()) {
        throw InputError("frame needs tau, omega and eta");
    }
    std::vector<CohClass> omega, eta;
    for (const auto &c : j["omega"]) omega.push_back(class_from_json(c));
    for (const auto &c : j["eta"]) eta.push_back(class_from_json(c));
    try {
        return HodgeFrame::make(SiegelPoint::make(matrix_from_json(j["tau"])), std::move(omega), std::move(eta));
    } catch (const std::logic_error &e) {
        throw InputError(std::string("invalid frame: ") + e.what());
    }
}

inline Json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw InputError("cannot parse " + path + ": " + e.what());
    }
}

/// %.17g.
inline std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace hre

#endif // HRE_IO_HPP

#pragma once

// JSON and CSV rendering. Numbers are rounded to 12 significant digits;
// every JSON document carries an FNV-1a hash of its canonical parameter echo.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracdiff/foxh.hpp"
#include "fracdiff/kernels.hpp"
#include "fracdiff/spde.hpp"
#include "fracdiff/verify.hpp"

namespace fracdiff::io {

using json = nlohmann::json;

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// 12 significant digits; non-finite values become null.
inline json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(format_number(x));
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Keys of nlohmann objects are sorted, so dump() is canonical.
inline std::string config_hash(const json& j) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

inline json to_json(const FracParams& p) {
    return {{"alpha", number(p.alpha)}, {"beta", number(p.beta)}, {"d", p.d}, {"nu", number(p.nu)},
            {"lambda", number(p.lambda)}, {"ceil_beta", p.ceil_beta()}};
}

inline json to_json(const HFunctionSpec& h) {
    auto pairs = [](const std::vector<HPair>& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back({number(x.coef), number(x.scale)});
        return a;
    };
    const auto c = characteristics(h);
    return {{"m", h.m}, {"n", h.n}, {"p", h.p}, {"q", h.q}, {"upper", pairs(h.upper)}, {"lower", pairs(h.lower)},
            {"a_star", number(c.a_star)}, {"delta", number(c.delta)}, {"mu", number(c.mu)}};
}

inline json to_json(const EvalConfig& c) {
    return {{"contour_halfheight", number(c.contour_halfheight)}, {"quadrature_points", c.quadrature_points},
            {"series_terms", c.series_terms}, {"abs_tol", number(c.abs_tol)}, {"rel_tol", number(c.rel_tol)},
            {"collision_tol", number(c.collision_tol)}, {"switch_radius", number(c.switch_radius)},
            {"resonance_gap", number(c.resonance_gap)}, {"cross_check", c.cross_check}};
}

inline json to_json(const NoiseSpec& n) {
    json j{{"temporal", to_string(n.temporal)}, {"spatial", to_string(n.spatial)}, {"lambda_sq", number(n.lambda_sq)}};
    if (n.temporal == TemporalKind::riesz_time) j["time_exponent"] = number(n.time_exponent);
    if (n.temporal == TemporalKind::custom) j["custom"] = n.custom_label;
    if (n.spatial == SpatialKind::riesz) j["kappa"] = number(n.kappa);
    return j;
}

inline json to_json(const DalangResult& d) {
    return {{"holds", d.holds}, {"fails", !d.holds}, {"condition", d.condition},
            {"exponent_required", d.required.str()}, {"exponent_available", d.available.str()},
            {"exponent_required_value", number(to_double(d.required))},
            {"exponent_available_value", number(to_double(d.available))}};
}

inline json to_json(const ExistenceCertificate& c) {
    return {{"status", to_string(c.status)}, {"n_cutoff", number(c.n_cutoff)}, {"c_n", number(c.c_n)},
            {"d_n", number(c.d_n)}, {"contraction", number(c.contraction)}, {"c_star", number(c.c_star)},
            {"c_beta", number(c.c_beta)}, {"c_nu_beta", number(c.c_nu_beta)}, {"c_t", number(c.c_t)},
            {"c_t_dirac", c.c_t_dirac}, {"message", c.message}};
}

inline json to_json(const MomentReport& r) {
    json j{{"kind", r.kind}, {"c_t", number(r.c_t)}, {"c_t_dirac", r.c_t_dirac}, {"c_hat_t", number(r.c_hat_t)},
           {"c_hat_grid_sup", r.c_hat_grid_sup}, {"c_kappa", number(r.c_kappa)}, {"c_star", number(r.c_star)},
           {"c_tilde", number(r.c_tilde)}, {"theta_t", number(r.theta_t)}, {"p_exponent", number(r.p_exponent)},
           {"t_exponent_base", number(r.t_exponent_base)}, {"t_exponent", number(r.t_exponent)},
           {"upper_bound_log", number(r.upper_bound_log)}, {"unspecified_constant", 1}};
    j["lower_bound_log"] = r.lower_bound_log ? number(*r.lower_bound_log) : json(nullptr);
    return j;
}

inline json to_json(const ChaosSeries& c) {
    json sums = json::array(), lower = json::array();
    for (double v : c.partial_sums) sums.push_back(number(v));
    for (double v : c.lower_partial_sums) lower.push_back(number(v));
    return {{"converges", c.converges}, {"theta_series", number(c.theta_series)}, {"constant", number(c.constant)},
            {"grid_id", c.grid_id}, {"c_t", number(c.c_t)}, {"c_t_dirac", c.c_t_dirac}, {"c_hat_t", number(c.c_hat_t)},
            {"argument", number(c.argument)}, {"partial_sums", sums}, {"closed_form", number(c.closed_form)},
            {"lower_partial_sums", lower}, {"lower_closed_form", number(c.lower_closed_form)}, {"note", c.note}};
}

inline json to_json(const verify::SuiteReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"measured", c.timing ? json(nullptr) : number(c.measured)},
                          {"tolerance", number(c.tolerance)}, {"pass", c.pass}, {"timing", c.timing}, {"detail", c.detail}});
    return {{"suite", r.suite}, {"title", r.title}, {"passed", r.passed()}, {"checks", checks}};
}

// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << "\n";
}

} // namespace fracdiff::io

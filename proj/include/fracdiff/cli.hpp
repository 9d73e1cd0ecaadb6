#pragma once

// Command-line front end. stdout carries data only (CSV with a header row, or
// one JSON document); progress and error records go to stderr.
// Exit codes: 0 success, 2 validation or precondition failure, 3 numerical
// failure (including verification checks outside tolerance).

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracdiff/errors.hpp"
#include "fracdiff/foxh.hpp"
#include "fracdiff/io.hpp"
#include "fracdiff/kernels.hpp"
#include "fracdiff/mittag_leffler.hpp"
#include "fracdiff/spde.hpp"
#include "fracdiff/verify.hpp"

namespace fracdiff::cli {

using io::json;
using io::format_number;

namespace detail {

struct Output {
    bool as_json = false;
    std::ostream& out;
    std::ostream& err;
};

inline json numbers(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(io::number(x));
    return a;
}

inline std::vector<HPair> parse_pairs(const std::vector<std::string>& items, const char* what) {
    std::vector<HPair> out;
    for (const auto& s : items) {
        const auto colon = s.find(':');
        if (colon == std::string::npos)
            fracdiff::detail::fail(ErrorKind::validation, what, ": expected coef:scale, got '", s, "'");
        try {
            std::size_t used = 0;
            const double a = std::stod(s.substr(0, colon), &used);
            const std::string rest = s.substr(colon + 1);
            std::size_t used2 = 0;
            const double b = std::stod(rest, &used2);
            if (used != colon || used2 != rest.size()) throw std::invalid_argument(s);
            out.push_back({a, b});
        } catch (const std::logic_error&) {
            fracdiff::detail::fail(ErrorKind::validation, what, ": cannot parse '", s, "'");
        }
    }
    return out;
}

inline void emit_json(const Output& o, const std::string& command, const json& params, const json& result) {
    json doc{{"command", command}, {"params", params}, {"config_hash", io::config_hash({{"command", command}, {"params", params}})},
             {"result", result}};
    o.out << doc.dump(2) << "\n";
}

inline void emit_table(const Output& o, const std::vector<std::pair<std::string, std::string>>& rows) {
    io::csv_row(o.out, {"quantity", "value"});
    for (const auto& [k, v] : rows) io::csv_row(o.out, {k, v});
}

struct NoiseFlags {
    std::string spatial = "white";
    double kappa = 0.5;
    std::string temporal = "dirac";
    double time_exponent = 0.5;
    double lambda_sq = 1.0;

    void add(CLI::App* app, bool riesz_only) {
        if (riesz_only) spatial = "riesz";
        app->add_option("--noise", spatial, "spatial covariance")->check(CLI::IsMember({"white", "riesz"}));
        app->add_option("--kappa", kappa, "Riesz exponent of |x|^{-kappa}");
        app->add_option("--temporal", temporal, "temporal covariance")->check(CLI::IsMember({"dirac", "riesz-time"}));
        app->add_option("--time-exponent", time_exponent, "exponent of |t|^{-b} for riesz-time");
        app->add_option("--lambda-sq", lambda_sq, "factor multiplying the spatial covariance");
    }

    NoiseSpec build() const {
        NoiseSpec n;
        n.spatial = spatial == "riesz" ? SpatialKind::riesz : SpatialKind::white;
        n.kappa = n.spatial == SpatialKind::riesz ? kappa : 0.0;
        n.temporal = temporal == "riesz-time" ? TemporalKind::riesz_time : TemporalKind::dirac;
        n.time_exponent = time_exponent;
        n.lambda_sq = lambda_sq;
        return n;
    }
};

struct ParamFlags {
    double alpha = 2.0, beta = 1.0, nu = 1.0, lambda = 1.0;
    int d = 1;

    void add(CLI::App* app) {
        app->add_option("--alpha", alpha, "space order in (0,2]")->required();
        app->add_option("--beta", beta, "time order in (1/2,2)")->required();
        app->add_option("--d", d, "spatial dimension")->required();
        app->add_option("--nu", nu, "diffusion coefficient");
        app->add_option("--lambda", lambda, "noise strength");
    }
    FracParams build() const { return {alpha, beta, d, nu, lambda}; }
};

inline InitialData initial_data(const FracParams& p, double u0, double u1) {
    return p.ceil_beta() == 1 ? InitialData::constant(u0) : InitialData::constant_pair(u0, u1);
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Fractional diffusion kernels, Fox H-functions and SPDE moment bounds"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "seed for Monte Carlo checks");

    EvalConfig cfg;
    app.add_option("--rel-tol", cfg.rel_tol, "relative tolerance of H evaluation");

    // foxh-eval
    auto* fx = app.add_subcommand("foxh-eval", "evaluate an H-function");
    int fm = 0, fn = 0;
    std::vector<std::string> fupper, flower;
    std::vector<double> fz;
    std::string froute = "auto";
    fx->add_option("--m", fm)->required();
    fx->add_option("--n", fn)->required();
    fx->add_option("--upper", fupper, "upper pairs coef:scale, comma separated")->delimiter(',');
    fx->add_option("--lower", flower, "lower pairs coef:scale, comma separated")->delimiter(',')->required();
    fx->add_option("--z", fz, "arguments, comma separated")->delimiter(',')->required();
    fx->add_option("--route", froute)->check(CLI::IsMember({"auto", "contour", "zero", "infinity"}));

    // kernel
    auto* kc = app.add_subcommand("kernel", "evaluate Z, Y or Zstar");
    detail::ParamFlags kp;
    std::string which = "z";
    std::vector<double> kt, kr;
    kp.add(kc);
    kc->add_option("--which", which)->check(CLI::IsMember({"z", "y", "zstar"}));
    kc->add_option("--t", kt)->delimiter(',')->required();
    kc->add_option("--r", kr)->delimiter(',')->required();

    // stable
    auto* sc = app.add_subcommand("stable", "spherically symmetric stable density");
    double salpha = 2.0;
    int sd = 1;
    std::vector<double> sr;
    sc->add_option("--alpha", salpha)->required();
    sc->add_option("--d", sd)->required();
    sc->add_option("--r", sr)->delimiter(',')->required();

    // ml
    auto* mc = app.add_subcommand("ml", "two-parameter Mittag-Leffler function on the real axis");
    double rho = 1.0, mu = 1.0;
    std::vector<double> mx;
    mc->add_option("--rho", rho)->required();
    mc->add_option("--mu", mu)->required();
    mc->add_option("--x", mx)->delimiter(',')->required();

    // check
    auto* cc = app.add_subcommand("check", "Dalang-type condition");
    detail::ParamFlags cp;
    detail::NoiseFlags cn;
    bool smoothed = false;
    cp.add(cc);
    cn.add(cc, false);
    cc->add_flag("--smoothed", smoothed, "condition for the smoothed equation");

    // certify
    auto* ec = app.add_subcommand("certify", "existence certificate");
    detail::ParamFlags ep;
    detail::NoiseFlags en;
    double et = 1.0;
    ep.add(ec);
    en.add(ec, false);
    ec->add_option("--t", et);

    // moment
    auto* oc = app.add_subcommand("moment", "moment bounds for Riesz noise");
    detail::ParamFlags op;
    detail::NoiseFlags on;
    std::string kind = "upper";
    double opw = 2.0, ot = 1.0, ou0 = 1.0, ou1 = 0.0;
    op.add(oc);
    on.add(oc, true);
    oc->add_option("--kind", kind)->check(CLI::IsMember({"upper", "smoothed", "lower"}));
    oc->add_option("--p", opw, "moment order");
    oc->add_option("--t", ot);
    oc->add_option("--u0", ou0);
    oc->add_option("--u1", ou1);

    // chaos
    auto* hc = app.add_subcommand("chaos", "chaos-expansion second-moment series");
    detail::ParamFlags hp;
    detail::NoiseFlags hn;
    double ht = 1.0, hu0 = 1.0, hu1 = 0.0;
    int nmax = 30;
    hp.add(hc);
    hn.add(hc, true);
    hc->add_option("--t", ht);
    hc->add_option("--n-max", nmax);
    hc->add_option("--u0", hu0);
    hc->add_option("--u1", hu1);

    // verify
    auto* vc = app.add_subcommand("verify", "run a verification suite");
    std::string suite;
    vc->add_option("--suite", suite, "suite name, or 'all'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return 2;
    }

    const detail::Output o{format == "json", out, err};
    try {
        cfg.validate();
        if (fx->parsed()) {
            const auto h = make_spec(fm, fn, detail::parse_pairs(fupper, "--upper"), detail::parse_pairs(flower, "--lower"),
                                     cfg.collision_tol);
            std::vector<EvalResult> rs;
            for (double z : fz) {
                if (froute == "contour") rs.push_back(contour(h, z, cfg));
                else if (froute == "zero") rs.push_back(series_zero(h, z, cfg));
                else if (froute == "infinity") rs.push_back(series_infinity(h, z, cfg));
                else rs.push_back(evaluate(h, z, cfg));
            }
            if (o.as_json) {
                json rows = json::array();
                for (std::size_t i = 0; i < fz.size(); ++i)
                    rows.push_back({{"z", io::number(fz[i])}, {"value", io::number(rs[i].value)},
                                    {"route", to_string(rs[i].route)}, {"est_error", io::number(rs[i].est_error)}});
                detail::emit_json(o, "foxh-eval", {{"spec", io::to_json(h)}, {"z", detail::numbers(fz)}, {"route", froute}, {"config", io::to_json(cfg)}},
                                  {{"rows", rows}});
            } else {
                io::csv_row(out, {"z", "value", "route", "est_error"});
                for (std::size_t i = 0; i < fz.size(); ++i)
                    io::csv_row(out, {format_number(fz[i]), format_number(rs[i].value), to_string(rs[i].route),
                                      format_number(rs[i].est_error)});
            }
            return 0;
        }
        if (kc->parsed()) {
            const auto p = kp.build();
            const auto k = parse_kernel(which);
            struct Row {
                double t, r;
                EvalResult e;
            };
            std::vector<Row> rows;
            for (double t : kt)
                for (double r : kr) rows.push_back({t, r, kernel_eval(k, p, t, r, cfg)});
            if (o.as_json) {
                json jr = json::array();
                for (const auto& x : rows)
                    jr.push_back({{"t", io::number(x.t)}, {"r", io::number(x.r)}, {"value", io::number(x.e.value)},
                                  {"route", to_string(x.e.route)}, {"est_error", io::number(x.e.est_error)}});
                detail::emit_json(o, "kernel",
                                  {{"kernel", to_string(k)}, {"params", io::to_json(p)}, {"spec", io::to_json(kernel_spec(k, p))},
                                   {"t", detail::numbers(kt)}, {"r", detail::numbers(kr)}, {"config", io::to_json(cfg)}},
                                  {{"rows", jr}});
            } else {
                io::csv_row(out, {"t", "r", "value", "route", "est_error"});
                for (const auto& x : rows)
                    io::csv_row(out, {format_number(x.t), format_number(x.r), format_number(x.e.value), to_string(x.e.route),
                                      format_number(x.e.est_error)});
            }
            return 0;
        }
        if (sc->parsed()) {
            std::vector<double> vals;
            for (double r : sr) vals.push_back(stable_density(salpha, sd, r, cfg));
            if (o.as_json) {
                json jr = json::array();
                for (std::size_t i = 0; i < sr.size(); ++i) jr.push_back({{"r", io::number(sr[i])}, {"value", io::number(vals[i])}});
                detail::emit_json(o, "stable",
                                  {{"alpha", io::number(salpha)}, {"d", sd}, {"spec", io::to_json(stable_spec(salpha, sd))},
                                   {"r", detail::numbers(sr)}, {"config", io::to_json(cfg)}},
                                  {{"rows", jr}});
            } else {
                io::csv_row(out, {"r", "value"});
                for (std::size_t i = 0; i < sr.size(); ++i) io::csv_row(out, {format_number(sr[i]), format_number(vals[i])});
            }
            return 0;
        }
        if (mc->parsed()) {
            std::vector<double> vals;
            for (double x : mx) vals.push_back(mittag_leffler(rho, mu, x));
            if (o.as_json) {
                json jr = json::array();
                for (std::size_t i = 0; i < mx.size(); ++i) jr.push_back({{"x", io::number(mx[i])}, {"value", io::number(vals[i])}});
                detail::emit_json(o, "ml", {{"rho", io::number(rho)}, {"mu", io::number(mu)}, {"x", detail::numbers(mx)}}, {{"rows", jr}});
            } else {
                io::csv_row(out, {"x", "value"});
                for (std::size_t i = 0; i < mx.size(); ++i) io::csv_row(out, {format_number(mx[i]), format_number(vals[i])});
            }
            return 0;
        }
        if (cc->parsed()) {
            const auto p = cp.build();
            const auto n = cn.build();
            const auto r = dalang_check(n, p, smoothed);
            if (o.as_json) {
                detail::emit_json(o, "check", {{"params", io::to_json(p)}, {"noise", io::to_json(n)}, {"smoothed", smoothed}},
                                  io::to_json(r));
            } else {
                io::csv_row(out, {"result", "condition", "exponent_required", "exponent_available"});
                io::csv_row(out, {r.holds ? "holds" : "fails", r.condition, format_number(to_double(r.required)),
                                  format_number(to_double(r.available))});
            }
            return 0;
        }
        if (ec->parsed()) {
            const auto p = ep.build();
            const auto n = en.build();
            const auto c = existence_certificate(n, p, et);
            if (o.as_json) {
                detail::emit_json(o, "certify", {{"params", io::to_json(p)}, {"noise", io::to_json(n)}, {"t", io::number(et)}},
                                  io::to_json(c));
            } else {
                detail::emit_table(o, {{"status", to_string(c.status)},
                                       {"n_cutoff", format_number(c.n_cutoff)},
                                       {"c_n", format_number(c.c_n)},
                                       {"d_n", format_number(c.d_n)},
                                       {"contraction", format_number(c.contraction)},
                                       {"c_star", format_number(c.c_star)},
                                       {"c_beta", format_number(c.c_beta)},
                                       {"c_nu_beta", format_number(c.c_nu_beta)},
                                       {"c_t", format_number(c.c_t)},
                                       {"message", c.message}});
            }
            if (c.status == CertStatus::precondition_failed) return 2;
            if (c.status == CertStatus::not_found) return 3;
            return 0;
        }
        if (oc->parsed()) {
            const auto p = op.build();
            const auto n = on.build();
            const json echo{{"params", io::to_json(p)}, {"noise", io::to_json(n)}, {"kind", kind}, {"p", io::number(opw)},
                            {"t", io::number(ot)}, {"u0", io::number(ou0)}, {"u1", io::number(ou1)}};
            if (kind == "lower") {
                if (p.ceil_beta() == 2 && ou1 != 0.0)
                    fracdiff::detail::fail(ErrorKind::precondition, "moment lower bound: requires u1 = 0");
                const double v = moment_lower_bound(p, n, ou0, ot);
                if (o.as_json) detail::emit_json(o, "moment", echo, {{"lower_bound", io::number(v)}});
                else detail::emit_table(o, {{"lower_bound", format_number(v)}});
                return 0;
            }
            const auto init = detail::initial_data(p, ou0, ou1);
            const auto r = kind == "upper" ? moment_upper_bound(p, n, opw, ot, init) : smoothed_moment_bounds(p, n, opw, ot, init);
            if (o.as_json) {
                detail::emit_json(o, "moment", echo, io::to_json(r));
            } else {
                detail::emit_table(o, {{"kind", r.kind},
                                       {"c_t", format_number(r.c_t)},
                                       {"c_t_dirac", r.c_t_dirac ? "true" : "false"},
                                       {"c_hat_t", format_number(r.c_hat_t)},
                                       {"c_kappa", format_number(r.c_kappa)},
                                       {"c_star", format_number(r.c_star)},
                                       {"c_tilde", format_number(r.c_tilde)},
                                       {"theta_t", format_number(r.theta_t)},
                                       {"p_exponent", format_number(r.p_exponent)},
                                       {"t_exponent_base", format_number(r.t_exponent_base)},
                                       {"t_exponent", format_number(r.t_exponent)},
                                       {"upper_bound_log", format_number(r.upper_bound_log)},
                                       {"lower_bound_log", r.lower_bound_log ? format_number(*r.lower_bound_log) : ""}});
            }
            return 0;
        }
        if (hc->parsed()) {
            const auto p = hp.build();
            const auto n = hn.build();
            err << "calibrating the chaos constant\n";
            const auto c = chaos_second_moment(p, n, detail::initial_data(p, hu0, hu1), ht, nmax);
            if (o.as_json) {
                detail::emit_json(o, "chaos",
                                  {{"params", io::to_json(p)}, {"noise", io::to_json(n)}, {"t", io::number(ht)}, {"n_max", nmax},
                                   {"u0", io::number(hu0)}, {"u1", io::number(hu1)}},
                                  io::to_json(c));
            } else {
                io::csv_row(out, {"n", "upper_partial_sum", "lower_partial_sum", "converges"});
                for (std::size_t i = 0; i < c.partial_sums.size(); ++i)
                    io::csv_row(out, {std::to_string(i), format_number(c.partial_sums[i]),
                                      i < c.lower_partial_sums.size() ? format_number(c.lower_partial_sums[i]) : "",
                                      c.converges ? "true" : "false"});
            }
            return c.converges ? 0 : 3;
        }
        if (vc->parsed()) {
            std::vector<std::string> names;
            if (suite == "all") {
                for (const auto& e : verify::registry()) names.push_back(e.name);
            } else {
                names.push_back(suite);
            }
            std::vector<verify::SuiteReport> reports;
            for (const auto& name : names) {
                reports.push_back(verify::run_suite(name, [&](const std::string& step) { err << "[" << name << "] " << step << "\n"; },
                                                    seed.value_or(verify::default_seed)));
            }
            bool ok = true;
            for (const auto& r : reports) ok = ok && r.passed();
            if (o.as_json) {
                json arr = json::array();
                for (const auto& r : reports) arr.push_back(io::to_json(r));
                detail::emit_json(o, "verify", {{"suite", suite}, {"seed", seed.value_or(verify::default_seed)}},
                                  {{"passed", ok}, {"suites", arr}});
            } else {
                io::csv_row(out, {"suite", "check", "measured", "tolerance", "pass", "detail"});
                for (const auto& r : reports)
                    for (const auto& c : r.checks)
                        io::csv_row(out, {r.suite, c.name, c.timing ? "" : format_number(c.measured), format_number(c.tolerance),
                                          c.pass ? "pass" : "fail", c.detail});
            }
            return ok ? 0 : 3;
        }
    } catch (const Error& e) {
        if (o.as_json) {
            err << json{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}}.dump() << "\n";
        } else {
            err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        }
        return exit_code(e.kind());
    }
    return 2;
}

} // namespace fracdiff::cli

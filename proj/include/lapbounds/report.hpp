#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lapbounds/bounds.hpp"
#include "lapbounds/errors.hpp"
#include "lapbounds/json_io.hpp"
#include "lapbounds/oracle.hpp"
#include "lapbounds/problems.hpp"

namespace lapbounds {

// Exit codes of the batch front end.
enum run_status : int {
    run_ok = 0,
    run_usage_error = 1,
    run_containment_violation = 2,
    run_oracle_failure = 3,
};

struct run_config {
    enum class cmd { constants, threshold, bracket, verify, dixon, compare_mcw };
    cmd command = cmd::constants;
    std::string problem;                 // selector string or path to a JSON file
    std::vector<double> n_list;          // explicit points
    struct grid_spec { double lo = 0, hi = 0; int count = 0; };
    std::optional<grid_spec> grid;       // geometric grid, alternative to n_list
    std::optional<double> relax_a;
    bool csv = false;
    std::string out_path;                // empty = stdout
    double rel_tol = 1e-10;
    bool published = false;              // compare against published d=2 reference brackets
};

namespace report {

// One table cell; doubles render identically in JSON and CSV via format_real.
struct cell {
    std::variant<double, long long, bool, std::string> v;
    cell(double x) : v(x) {}
    cell(int x) : v(static_cast<long long>(x)) {}
    cell(long long x) : v(x) {}
    cell(bool x) : v(x) {}
    cell(std::string x) : v(std::move(x)) {}
    cell(const char* x) : v(std::string(x)) {}

    void to_json(json_writer& w) const {
        if (std::holds_alternative<double>(v)) w.value(std::get<double>(v));
        else if (std::holds_alternative<long long>(v))
            w.value(static_cast<int>(std::get<long long>(v)));
        else if (std::holds_alternative<bool>(v)) w.value(std::get<bool>(v));
        else w.value(std::get<std::string>(v));
    }
    std::string to_csv() const {
        if (std::holds_alternative<double>(v)) return format_real(std::get<double>(v));
        if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
        if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
        return std::get<std::string>(v);
    }
};

using row = std::vector<std::pair<std::string, cell>>;

struct document {
    std::vector<std::pair<std::string, cell>> meta;
    std::string constants_json;  // pre-rendered nested objects, JSON output only
    std::vector<row> rows;

    std::string to_json() const {
        json_writer w;
        w.begin_object();
        for (const auto& [k, c] : meta) {
            w.key(k);
            c.to_json(w);
        }
        std::string body = w.str();
        if (!constants_json.empty()) {
            if (body.back() != '{') body += ',';
            body += constants_json;
        }
        std::string out = body;
        if (!rows.empty()) {
            if (out.back() != '{') out += ',';
            out += "\"rows\":[";
            for (size_t i = 0; i < rows.size(); ++i) {
                if (i) out += ',';
                json_writer rw;
                rw.begin_object();
                for (const auto& [k, c] : rows[i]) {
                    rw.key(k);
                    c.to_json(rw);
                }
                rw.end_object();
                out += rw.str();
            }
            out += ']';
        }
        out += '}';
        return out;
    }

    std::string to_csv() const {
        std::string out;
        if (rows.empty()) {
            // single-record commands: emit meta as a two-line table
            for (size_t i = 0; i < meta.size(); ++i)
                out += (i ? "," : "") + meta[i].first;
            out += '\n';
            for (size_t i = 0; i < meta.size(); ++i)
                out += (i ? "," : "") + meta[i].second.to_csv();
            out += '\n';
            return out;
        }
        for (size_t i = 0; i < rows.front().size(); ++i)
            out += (i ? "," : "") + rows.front()[i].first;
        out += '\n';
        for (const auto& r : rows) {
            for (size_t i = 0; i < r.size(); ++i)
                out += (i ? "," : "") + r[i].second.to_csv();
            out += '\n';
        }
        return out;
    }
};

}  // namespace report

namespace detail {

struct resolved_problem {
    std::optional<problem> full;      // selector problems carry evaluators
    local_expansion local;            // always present
    double scale = 1.0;
    std::string name;
    std::optional<g_data> gdata;      // amplitude data, JSON problems only
};

inline resolved_problem resolve_problem(const std::string& spec_str) {
    if (spec_str.empty()) throw invalid_input("no problem given");
    if (spec_str.size() > 5 && spec_str.substr(spec_str.size() - 5) == ".json") {
        std::ifstream in(spec_str);
        if (!in) throw invalid_input("cannot open problem file: " + spec_str);
        std::stringstream ss;
        ss << in.rdbuf();
        auto j = nlohmann::json::parse(ss.str());
        double scale = 1.0;
        if (j.contains("exponent_scale")) scale = j["exponent_scale"].get<double>();
        auto local = local_expansion_from_json(
            j.contains("local") ? j["local"] : j);
        std::optional<g_data> gd;
        if (j.contains("gdata")) {
            const auto& jg = j["gdata"];
            g_data g;
            g.g0 = jg.at("g0").get<double>();
            g.grad_g0 = jg.at("grad_g0").get<std::vector<double>>();
            g.M = jg.at("M").get<double>();
            g.n3 = jg.at("n3").get<double>();
            g.Jabs_n3 = jg.at("Jabs_n3").get<double>();
            g.validate(local.d);
            gd = g;
        }
        return {std::nullopt, local, scale, spec_str, gd};
    }
    problem p = parse_problem_selector(spec_str);
    local_expansion local = p.local;
    const double scale = p.exponent_scale;
    std::string name = p.name;
    std::optional<g_data> gd = p.gdata;
    return {std::move(p), local, scale, name, gd};
}

inline relaxation_params relaxation_from(const run_config& cfg) {
    return cfg.relax_a ? relaxation_params::with_slack(*cfg.relax_a)
                       : relaxation_params::base();
}

inline std::vector<double> resolve_points(const run_config& cfg, double default_lo,
                                          double default_hi, int default_count) {
    if (!cfg.n_list.empty()) return cfg.n_list;
    if (cfg.grid) return geometric_grid(cfg.grid->lo, cfg.grid->hi, cfg.grid->count);
    return geometric_grid(default_lo, default_hi, default_count);
}

inline bool is_dixon2(const resolved_problem& rp) {
    return rp.full && rp.full->hook == problem::oracle_hook::dixon_sum &&
           rp.local.d == 2 && rp.full->hook_log_jacobian != 0.0;
}

}  // namespace detail

// Scaled per-n coefficients: the bracket at n evaluates the unscaled-exponent terms at
// m = s*n, so the reported 1/n-power coefficients divide by powers of s.
inline void write_scaled_coefficients(json_writer& w, const bound_constants& k) {
    const double s = k.scale, a = k.alpha;
    w.begin_object();
    w.key("K_alpha1_scaled").value(k.K_alpha1 / std::pow(s, a / 2.0));
    w.key("K_1_scaled").value(k.K_1 / s);
    w.key("K_alpha2_plus_Ku_scaled").value((k.K_alpha2 + k.K_u) / std::pow(s, a));
    w.key("K_l_scaled").value(k.K_l / std::pow(s, 1.0 + a));
    w.key("upper_n1_coefficient").value((k.K_alpha1 + k.K_1) / std::pow(s, a / 2.0));
    w.end_object();
}

inline int run(const run_config& cfg, std::ostream& out, std::ostream& err) {
    using report::document;
    using report::row;

    try {
        document doc;
        int status = run_ok;
        const quadrature_spec qspec{cfg.rel_tol, 0.0, 200000};

        auto command_name = [&]() -> std::string {
            switch (cfg.command) {
                case run_config::cmd::constants: return "constants";
                case run_config::cmd::threshold: return "threshold";
                case run_config::cmd::bracket: return "bracket";
                case run_config::cmd::verify: return "verify";
                case run_config::cmd::dixon: return "dixon";
                case run_config::cmd::compare_mcw: return "compare-mcw";
            }
            return "?";
        };

        if (cfg.command == run_config::cmd::compare_mcw) {
            // Published-reference bracket radii vs the McClure-Wong radius.
            const auto k = dixon2_reference_constants();
            auto pts = cfg.n_list;
            if (pts.empty()) pts = {1, 2, 5, 10, 100};
            doc.meta.emplace_back("command", command_name());
            for (double n : pts) {
                const auto b =
                    bracket_I(n, k, dixon2_reference_det, dixon2_reference_dim);
                row r;
                r.emplace_back("n", n);
                r.emplace_back("mcw_radius", mcw_reference(n));
                r.emplace_back("our_lo", b.rel_lo);
                r.emplace_back("our_hi", b.rel_hi);
                doc.rows.push_back(std::move(r));
            }
        } else {
            auto rp = detail::resolve_problem(cfg.problem);
            const auto relax = detail::relaxation_from(cfg);
            const auto consts = compute_bound_constants(rp.local, relax, rp.scale);
            const double det = rp.local.det_H();
            const int d = rp.local.d;

            doc.meta.emplace_back("command", command_name());
            doc.meta.emplace_back("problem", rp.name);

            switch (cfg.command) {
                case run_config::cmd::constants: {
                    json_writer cw;
                    cw.key("constants");
                    write_constants(cw, consts);
                    cw.key("scaled");
                    write_scaled_coefficients(cw, consts);
                    cw.key("local");
                    write_local_expansion(cw, rp.local);
                    if (rp.gdata) {
                        const auto gk =
                            amplitude_constants(rp.local, *rp.gdata, relax, rp.scale);
                        cw.key("g_constants");
                        write_g_constants(cw, gk);
                    }
                    if (detail::is_dixon2(rp)) {
                        // d = 2 reproduction table: the formula K_1 next
                        // to the published value, which are known to disagree.
                        const auto ref = dixon2_reference_constants();
                        cw.key("published_reference");
                        write_constants(cw, ref);
                        cw.key("K_1_formula");
                        cw.value(consts.K_1);
                        cw.key("K_1_published");
                        cw.value(ref.K_1);
                    }
                    doc.constants_json = cw.str();
                    doc.meta.emplace_back("d", d);
                    doc.meta.emplace_back("det_H", det);
                    doc.meta.emplace_back("lambda_min", rp.local.lambda_min());
                    doc.meta.emplace_back("D", rp.local.D());
                    doc.meta.emplace_back("C", rp.local.C);
                    doc.meta.emplace_back("Delta", rp.local.Delta);
                    doc.meta.emplace_back("scale", rp.scale);
                    if (cfg.csv) {
                        row r;
                        r.emplace_back("C", rp.local.C);
                        r.emplace_back("Delta", rp.local.Delta);
                        r.emplace_back("xi", consts.xi);
                        r.emplace_back("K_alpha1", consts.K_alpha1);
                        r.emplace_back("K_alpha2", consts.K_alpha2);
                        r.emplace_back("K_1", consts.K_1);
                        r.emplace_back("K_l", consts.K_l);
                        r.emplace_back("K_u", consts.K_u);
                        r.emplace_back("n0", consts.n0);
                        r.emplace_back("n2", consts.n2);
                        doc.rows.push_back(std::move(r));
                    }
                    break;
                }
                case run_config::cmd::threshold: {
                    doc.meta.emplace_back("n0", consts.n0);
                    doc.meta.emplace_back("n2", consts.n2);
                    doc.meta.emplace_back("xi", consts.xi);
                    doc.meta.emplace_back("relax_a", consts.relaxation.a);
                    doc.meta.emplace_back("x_a", consts.relaxation.x_a);
                    doc.meta.emplace_back(
                        "binding", std::string(consts.n0 > consts.n2 * (1.0 + 1e-9)
                                                   ? "N2" : "N1"));
                    doc.meta.emplace_back("n0_ceil",
                                          static_cast<long long>(std::ceil(consts.n0)));
                    if (rp.gdata) {
                        const auto gk =
                            amplitude_constants(rp.local, *rp.gdata, relax, rp.scale);
                        doc.meta.emplace_back("n4", gk.n4);
                        doc.meta.emplace_back("n4_ceil",
                                              static_cast<long long>(std::ceil(gk.n4)));
                    }
                    break;
                }
                case run_config::cmd::bracket: {
                    if (cfg.n_list.empty() && !cfg.grid)
                        throw invalid_input("bracket: requires --n or --grid");
                    std::optional<g_constants> gk;
                    if (rp.gdata)
                        gk = amplitude_constants(rp.local, *rp.gdata, relax, rp.scale);
                    for (double n : detail::resolve_points(cfg, 1, 1, 1)) {
                        bracket b;
                        if (gk) {
                            // amplitude problems: enclosure of E(n), absolute
                            // bounds on J(n) via the g(0)-weighted leading term
                            b = bracket_E_g(n, consts, *gk);
                            const double lead = rp.gdata->g0 *
                                                std::pow(2.0 * M_PI / (rp.scale * n),
                                                         d / 2.0) /
                                                std::sqrt(det);
                            b.leading = lead;
                            b.abs_lo = lead * (1.0 + b.rel_lo);
                            b.abs_hi = lead * (1.0 + b.rel_hi);
                        } else {
                            b = bracket_I(n, consts, det, d);
                        }
                        row r;
                        r.emplace_back("n", b.n);
                        r.emplace_back("leading", b.leading);
                        r.emplace_back("rel_lo", b.rel_lo);
                        r.emplace_back("rel_hi", b.rel_hi);
                        r.emplace_back("abs_lo", b.abs_lo);
                        r.emplace_back("abs_hi", b.abs_hi);
                        r.emplace_back("valid", b.valid);
                        doc.rows.push_back(std::move(r));
                    }
                    break;
                }
                case run_config::cmd::verify: {
                    if (!rp.full)
                        throw invalid_input(
                            "verify: needs a built-in problem with an evaluator");
                    const auto pts =
                        detail::resolve_points(cfg, consts.n0, 100.0 * consts.n0, 20);
                    const double slack = std::max(1e-12, 50.0 * cfg.rel_tol);
                    for (double n : pts) {
                        const auto b = bracket_I(n, consts, det, d);
                        const auto rec = empirical_error(*rp.full, n, qspec);
                        const bool contained = rec.E >= b.rel_lo - slack &&
                                               rec.E <= b.rel_hi + slack;
                        if (b.valid && !contained) status = run_containment_violation;
                        row r;
                        r.emplace_back("n", n);
                        r.emplace_back("I_oracle", rec.I_oracle);
                        r.emplace_back("leading", rec.leading);
                        r.emplace_back("E", rec.E);
                        r.emplace_back("method", to_string(rec.method));
                        r.emplace_back("rel_lo", b.rel_lo);
                        r.emplace_back("rel_hi", b.rel_hi);
                        r.emplace_back("abs_lo", b.abs_lo);
                        r.emplace_back("abs_hi", b.abs_hi);
                        r.emplace_back("valid", b.valid);
                        r.emplace_back("contained", contained);
                        doc.rows.push_back(std::move(r));
                    }
                    doc.meta.emplace_back("violations",
                                          status == run_containment_violation);
                    break;
                }
                case run_config::cmd::dixon: {
                    if (!rp.full || rp.full->hook != problem::oracle_hook::dixon_sum)
                        throw invalid_input("dixon: needs a dixon problem");
                    auto pts = cfg.n_list;
                    if (pts.empty()) pts = {1, 2, 5, 10, 100};
                    const bool with_published = detail::is_dixon2(rp);
                    const auto ref = dixon2_reference_constants();
                    for (double nn : pts) {
                        const double n_round = std::round(nn);
                        if (std::fabs(nn - n_round) > 1e-9 || n_round < 1 ||
                            n_round > 2000)
                            throw invalid_input(
                                "dixon: n must be integers in [1, 2000]");
                        const int n = static_cast<int>(n_round);
                        const bigint S = dixon_sum_exact(d + 1, n);
                        const double log_lead = dixon_leading_log(d, n);
                        const double E =
                            S.sign() > 0
                                ? std::expm1(S.log_abs() - log_lead)
                                : -1.0;  // sums <= 0 fall outside every bracket
                        const auto b = bracket_I(n, consts, det, d);
                        const bool contained = E >= b.rel_lo && E <= b.rel_hi;
                        if (b.valid && !contained) status = run_containment_violation;
                        row r;
                        r.emplace_back("n", n);
                        r.emplace_back("S_exact", S.to_decimal());
                        r.emplace_back("leading_log", log_lead);
                        r.emplace_back("E", E);
                        r.emplace_back("rel_lo", b.rel_lo);
                        r.emplace_back("rel_hi", b.rel_hi);
                        r.emplace_back("contained", contained);
                        if (with_published) {
                            const auto bp = bracket_I(
                                n, ref, dixon2_reference_det, dixon2_reference_dim);
                            r.emplace_back("rel_lo_published", bp.rel_lo);
                            r.emplace_back("rel_hi_published", bp.rel_hi);
                            r.emplace_back("contained_published",
                                           E >= bp.rel_lo && E <= bp.rel_hi);
                        }
                        doc.rows.push_back(std::move(r));
                    }
                    break;
                }
                default:
                    throw invalid_input("unhandled command");
            }
        }

        const std::string text = cfg.csv ? doc.to_csv() : doc.to_json() + "\n";
        if (!cfg.out_path.empty()) {
            std::ofstream f(cfg.out_path);
            if (!f) throw invalid_input("cannot open output file: " + cfg.out_path);
            f << text;
        } else {
            out << text;
        }
        return status;
    } catch (const no_convergence& e) {
        err << "error: " << e.what() << "\n";
        return run_oracle_failure;
    } catch (const dimension_too_large& e) {
        err << "error: " << e.what() << "\n";
        return run_oracle_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return run_usage_error;
    }
}

// Config-file form of the CLI flags.
inline run_config run_config_from_json(const nlohmann::json& j) {
    run_config cfg;
    const std::string cmd = j.at("command").get<std::string>();
    if (cmd == "constants") cfg.command = run_config::cmd::constants;
    else if (cmd == "threshold") cfg.command = run_config::cmd::threshold;
    else if (cmd == "bracket") cfg.command = run_config::cmd::bracket;
    else if (cmd == "verify") cfg.command = run_config::cmd::verify;
    else if (cmd == "dixon") cfg.command = run_config::cmd::dixon;
    else if (cmd == "compare-mcw") cfg.command = run_config::cmd::compare_mcw;
    else throw invalid_input("config: unknown command " + cmd);
    if (j.contains("problem")) cfg.problem = j["problem"].get<std::string>();
    if (j.contains("n")) cfg.n_list = j["n"].get<std::vector<double>>();
    if (j.contains("grid")) {
        run_config::grid_spec g;
        g.lo = j["grid"].at("lo").get<double>();
        g.hi = j["grid"].at("hi").get<double>();
        g.count = j["grid"].at("count").get<int>();
        cfg.grid = g;
    }
    if (j.contains("relax_a")) cfg.relax_a = j["relax_a"].get<double>();
    if (j.contains("output")) cfg.csv = j["output"].get<std::string>() == "csv";
    if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
    if (j.contains("rel_tol")) cfg.rel_tol = j["rel_tol"].get<double>();
    return cfg;
}

}  // namespace lapbounds

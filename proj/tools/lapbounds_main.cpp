// Batch front end: constant tables, validity thresholds, certified brackets
// and oracle verification reports for the built-in problems or JSON-specified
// local data.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lapbounds/report.hpp"

namespace {

std::vector<double> parse_n_values(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified Laplace-approximation brackets and their oracles"};
    app.require_subcommand(0, 1);

    std::string problem, n_text, grid_text, out_path, config_path, output = "json";
    double relax_a = 0.0, rel_tol = 1e-10;
    bool have_relax = false;

    app.add_option("--config", config_path, "JSON file mirroring the flags");

    auto add_common = [&](CLI::App* sub, bool needs_problem) {
        if (needs_problem)
            sub->add_option("--problem,-p", problem,
                            "problem selector (e.g. dixon2:r2=pi2/108) or JSON path");
        sub->add_option("--n", n_text, "comma-separated n values");
        sub->add_option("--grid", grid_text, "geometric grid lo:hi:count");
        sub->add_option("--relax-a", relax_a,
                        "slack of the quadratic exponential inequality")
            ->each([&](const std::string&) { have_relax = true; });
        sub->add_option("--output", output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", out_path, "write the report to a file");
        sub->add_option("--rtol", rel_tol, "oracle quadrature relative tolerance");
    };

    auto* c_constants = app.add_subcommand("constants", "bound constants of a problem");
    auto* c_threshold = app.add_subcommand("threshold", "validity thresholds n0 / n2");
    auto* c_bracket = app.add_subcommand("bracket", "certified brackets at given n");
    auto* c_verify = app.add_subcommand("verify", "brackets joined with oracle values");
    auto* c_dixon = app.add_subcommand("dixon", "exact alternating-sum table");
    auto* c_mcw = app.add_subcommand("compare-mcw", "McClure-Wong comparison radii");
    for (auto* sub : {c_constants, c_threshold, c_bracket, c_verify, c_dixon})
        add_common(sub, true);
    add_common(c_mcw, false);

    CLI11_PARSE(app, argc, argv);

    lapbounds::run_config cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config " << config_path << "\n";
                return lapbounds::run_usage_error;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            cfg = lapbounds::run_config_from_json(nlohmann::json::parse(ss.str()));
        } else {
            if (c_constants->parsed()) cfg.command = lapbounds::run_config::cmd::constants;
            else if (c_threshold->parsed()) cfg.command = lapbounds::run_config::cmd::threshold;
            else if (c_bracket->parsed()) cfg.command = lapbounds::run_config::cmd::bracket;
            else if (c_verify->parsed()) cfg.command = lapbounds::run_config::cmd::verify;
            else if (c_dixon->parsed()) cfg.command = lapbounds::run_config::cmd::dixon;
            else if (c_mcw->parsed()) cfg.command = lapbounds::run_config::cmd::compare_mcw;
            else {
                std::cerr << app.help();
                return lapbounds::run_usage_error;
            }
            cfg.problem = problem;
            if (!n_text.empty()) cfg.n_list = parse_n_values(n_text);
            if (!grid_text.empty()) {
                lapbounds::run_config::grid_spec g;
                if (std::sscanf(grid_text.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.count) != 3) {
                    std::cerr << "error: --grid expects lo:hi:count\n";
                    return lapbounds::run_usage_error;
                }
                cfg.grid = g;
            }
            if (have_relax) cfg.relax_a = relax_a;
            cfg.csv = output == "csv";
            cfg.out_path = out_path;
            cfg.rel_tol = rel_tol;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lapbounds::run_usage_error;
    }

    return lapbounds::run(cfg, std::cout, std::cerr);
}

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "poolprev/cli/commands.hpp"

namespace {

int default_precision_digits() {
    if (const char* env = std::getenv("POOLPREV_PRECISION")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "error: POOLPREV_PRECISION is not an integer: '" << env << "'\n";
            std::exit(2);
        }
    }
    return poolprev::PrecisionContext::kDefaultDigits;
}

void add_rational_option(CLI::App* cmd, const std::string& name, poolprev::Rational& target,
                         const std::string& description) {
    cmd->add_option_function<std::string>(
        name,
        [&target, name](const std::string& text) {
            try {
                target = poolprev::rational_from_decimal(text);
            } catch (const std::exception& e) {
                throw CLI::ValidationError(name, e.what());
            }
        },
        description);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "poolprev: exact Bayesian prevalence estimation from pooled and individual test results"};
    app.require_subcommand(1);

    poolprev::EstimateRequest req;
    req.digits = default_precision_digits();

    auto add_estimate_options = [&](CLI::App* cmd) {
        cmd->add_option("--m", req.m, "number of individual tests");
        cmd->add_option("--y", req.y, "positive individual tests");
        cmd->add_option("--n", req.n, "number of pooled tests");
        cmd->add_option("--z", req.z, "positive pooled tests");
        cmd->add_option("--q", req.q, "individuals per pool");
        add_rational_option(cmd, "--alpha", req.alpha, "beta prior alpha (default 1)");
        add_rational_option(cmd, "--beta", req.beta, "beta prior beta (default 1)");
        add_rational_option(cmd, "--se", req.se, "test sensitivity (default 1)");
        add_rational_option(cmd, "--sp", req.sp, "test specificity (default 1)");
        cmd->add_option("--level", req.level, "interval level (default 0.95)");
        cmd->add_option("--precision", req.digits,
                        "working precision in decimal digits (default 200; env "
                        "POOLPREV_PRECISION overrides the default)");
        cmd->add_option("--out-digits", req.out_digits,
                        "significant digits in emitted numbers (default 15)");
    };

    auto* estimate = app.add_subcommand("estimate", "posterior summary for one dataset");
    add_estimate_options(estimate);
    estimate->add_option("--format", req.format, "output format: json (default) or csv");

    long points = 101;
    auto* pdf_grid = app.add_subcommand("pdf-grid", "density and CDF on an even grid (CSV)");
    add_estimate_options(pdf_grid);
    pdf_grid->add_option("--points", points, "number of grid points (default 101)");

    std::string config_path, out_dir = ".";
    unsigned threads = 0;
    int sim_digits = default_precision_digits();
    std::optional<std::uint64_t> seed_override;
    std::uint64_t seed_value = 0;
    auto* simulate = app.add_subcommand("simulate", "run a simulation grid from a JSON config");
    simulate->add_option("--config", config_path, "grid config JSON path")->required();
    simulate->add_option("--out", out_dir, "output directory (default .)");
    simulate->add_option("--threads", threads, "worker threads (default: all cores)");
    simulate->add_option("--precision", sim_digits, "working precision in decimal digits");
    auto* seed_opt = simulate->add_option("--seed", seed_value, "override the config's master seed");

    std::string trials_path;
    auto* aggregate_cmd =
        app.add_subcommand("aggregate", "recompute aggregates.csv from a trials.csv");
    aggregate_cmd->add_option("--trials", trials_path, "trials.csv path")->required();
    aggregate_cmd->add_option("--out", out_dir, "output directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (estimate->parsed()) {
        return poolprev::cmd_estimate(req, std::cout, std::cerr);
    }
    if (pdf_grid->parsed()) {
        return poolprev::cmd_pdf_grid(req, points, std::cout, std::cerr);
    }
    if (simulate->parsed()) {
        if (seed_opt->count() > 0) seed_override = seed_value;
        return poolprev::cmd_simulate(config_path, out_dir, threads, seed_override, sim_digits,
                                      std::cout, std::cerr);
    }
    if (aggregate_cmd->parsed()) {
        return poolprev::cmd_aggregate(trials_path, out_dir, std::cout, std::cerr);
    }
    return 2;
}

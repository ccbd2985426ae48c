#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "poolprev/cli/config.hpp"
#include "poolprev/posterior/mom_fit.hpp"
#include "poolprev/sim/csv.hpp"

namespace poolprev {

/// A single-dataset estimation request, mirroring the CLI flags.
struct EstimateRequest {
    long m = 0, y = 0, n = 0, z = 0, q = 1;
    Rational alpha{1}, beta{1};
    Rational se{1}, sp{1};
    double level = 0.95;
    int digits = PrecisionContext::kDefaultDigits;
    int out_digits = 15;
    std::string format = "json";
};

namespace detail {

struct BuiltPosterior {
    std::optional<BetaMixture<Rational>> exact;
    BetaMixture<Real> real;
};

inline BuiltPosterior build_request_posterior(const EstimateRequest& req,
                                              const PrecisionContext& ctx) {
    PriorBeta prior{req.alpha, req.beta};
    Design design{req.m, req.n, req.q};
    Observation obs{req.y, req.z};
    TestAccuracy acc{req.se, req.sp};
    prior.validate();
    obs.validate(design);
    acc.validate();

    if (prior.is_integer_pair()) {
        auto mix = acc.perfect() ? build_posterior(prior, design, obs)
                                 : build_posterior_imperfect(prior, design, obs, acc);
        auto real = to_real(mix, ctx);
        return {std::move(mix), std::move(real)};
    }
    auto real = acc.perfect() ? build_posterior(prior, design, obs, ctx)
                              : build_posterior_imperfect(prior, design, obs, acc, ctx);
    return {std::nullopt, std::move(real)};
}

inline nlohmann::ordered_json interval_json(const std::pair<Real, Real>& interval, double level,
                                            int out_digits) {
    nlohmann::ordered_json j;
    j["level"] = level;
    j["low"] = round_sig(to_double(interval.first), out_digits);
    j["high"] = round_sig(to_double(interval.second), out_digits);
    j["width"] = round_sig(to_double(interval.second - interval.first), out_digits);
    return j;
}

} // namespace detail

/// `estimate`: posterior summary for one dataset. Intervals are labelled
/// confidence intervals to match the conventional output vocabulary for this
/// method; they are Bayesian equal-tailed credible intervals.
inline int cmd_estimate(const EstimateRequest& req, std::ostream& out, std::ostream& err);

/// `pdf-grid`: density and CDF on an evenly spaced grid, as CSV.
inline int cmd_pdf_grid(const EstimateRequest& req, long points, std::ostream& out,
                        std::ostream& err);

/// `simulate`: run a grid config and write trials.csv + aggregates.csv.
inline int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                        unsigned threads, std::optional<std::uint64_t> seed_override, int digits,
                        std::ostream& out, std::ostream& err);

/// `aggregate`: recompute aggregates.csv from an existing trials.csv.
inline int cmd_aggregate(const std::string& trials_path, const std::string& out_dir,
                         std::ostream& out, std::ostream& err);

namespace detail {

template <class Fn>
int run_command(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    } catch (const precision_error& e) {
        err << "error: " << e.what() << '\n'
            << "hint: raise --precision (or POOLPREV_PRECISION) and retry\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace detail

inline int cmd_estimate(const EstimateRequest& req, std::ostream& out, std::ostream& err) {
    return detail::run_command(err, [&] {
        PrecisionContext ctx(req.digits);
        if (!(req.level > 0.0 && req.level < 1.0)) {
            throw validation_error("level must lie strictly inside (0, 1)");
        }
        auto built = detail::build_request_posterior(req, ctx);
        const auto& rmix = built.real;

        double mean_d, var_d;
        double moments_d[3];
        std::string mean_s, var_s, moments_s[3];
        if (built.exact) {
            Rational m1 = raw_moment(*built.exact, 1);
            Rational m2 = raw_moment(*built.exact, 2);
            Rational m3 = raw_moment(*built.exact, 3);
            Rational var = m2 - m1 * m1;
            mean_d = to_double(m1);
            var_d = to_double(var);
            moments_d[0] = to_double(m1);
            moments_d[1] = to_double(m2);
            moments_d[2] = to_double(m3);
            mean_s = m1.get_str();
            var_s = var.get_str();
            moments_s[0] = m1.get_str();
            moments_s[1] = m2.get_str();
            moments_s[2] = m3.get_str();
        } else {
            Real m1 = raw_moment(rmix, 1);
            mean_d = to_double(m1);
            var_d = to_double(raw_moment(rmix, 2) - m1 * m1);
            moments_d[0] = mean_d;
            moments_d[1] = to_double(raw_moment(rmix, 2));
            moments_d[2] = to_double(raw_moment(rmix, 3));
        }

        auto interval = credible_interval(rmix, req.level);

        bool mom_feasible = true;
        std::optional<BetaFit<Real>> mom_fit;
        std::optional<std::pair<Real, Real>> mom_interval;
        try {
            auto fit = fit_beta_mom(rmix);
            std::vector<MixtureTerm<Real>> term{{fit.a, fit.b, make_like(fit.a, 1)}};
            BetaMixture<Real> approx(std::move(term), fit.a, fit.b);
            mom_interval = credible_interval(approx, req.level);
            mom_fit = std::move(fit);
        } catch (const infeasible_fit_error&) {
            mom_feasible = false;
        }

        const int digits = req.out_digits;
        if (req.format == "json") {
            nlohmann::ordered_json j;
            j["inputs"] = {{"m", req.m},
                           {"y", req.y},
                           {"n", req.n},
                           {"z", req.z},
                           {"q", req.q},
                           {"alpha", to_double(req.alpha)},
                           {"beta", to_double(req.beta)},
                           {"se", to_double(req.se)},
                           {"sp", to_double(req.sp)},
                           {"level", req.level},
                           {"precision_digits", req.digits}};
            j["path"] = built.exact ? "exact" : "real";
            j["components"] = rmix.component_count();
            j["mean"] = round_sig(mean_d, digits);
            j["variance"] = round_sig(var_d, digits);
            j["moments"] = {round_sig(moments_d[0], digits), round_sig(moments_d[1], digits),
                            round_sig(moments_d[2], digits)};
            j["confidence_interval"] = detail::interval_json(interval, req.level, digits);
            nlohmann::ordered_json mom;
            mom["feasible"] = mom_feasible;
            if (mom_feasible) {
                mom["a"] = round_sig(to_double(mom_fit->a), digits);
                mom["b"] = round_sig(to_double(mom_fit->b), digits);
                mom["confidence_interval"] = detail::interval_json(*mom_interval, req.level, digits);
            }
            j["mom_approximation"] = std::move(mom);
            if (built.exact) {
                j["exact"] = {{"mean", mean_s},
                              {"variance", var_s},
                              {"moments", {moments_s[0], moments_s[1], moments_s[2]}}};
            }
            out << j.dump(2) << '\n';
        } else if (req.format == "csv") {
            out << "key,value\n";
            out << "path," << (built.exact ? "exact" : "real") << '\n';
            out << "components," << rmix.component_count() << '\n';
            out << "mean," << format_sig(mean_d, digits) << '\n';
            out << "variance," << format_sig(var_d, digits) << '\n';
            for (int k = 0; k < 3; ++k) {
                out << "moment" << (k + 1) << ',' << format_sig(moments_d[k], digits) << '\n';
            }
            out << "ci_level," << format_sig(req.level, digits) << '\n';
            out << "ci_low," << format_sig(to_double(interval.first), digits) << '\n';
            out << "ci_high," << format_sig(to_double(interval.second), digits) << '\n';
            out << "ci_width," << format_sig(to_double(interval.second - interval.first), digits)
                << '\n';
            out << "mom_feasible," << (mom_feasible ? 1 : 0) << '\n';
            if (mom_feasible) {
                out << "mom_a," << format_sig(to_double(mom_fit->a), digits) << '\n';
                out << "mom_b," << format_sig(to_double(mom_fit->b), digits) << '\n';
                out << "mom_ci_low," << format_sig(to_double(mom_interval->first), digits) << '\n';
                out << "mom_ci_high," << format_sig(to_double(mom_interval->second), digits)
                    << '\n';
            }
            out << "precision_digits," << req.digits << '\n';
        } else {
            throw validation_error("unknown output format '" + req.format + "' (json or csv)");
        }
    });
}

inline int cmd_pdf_grid(const EstimateRequest& req, long points, std::ostream& out,
                        std::ostream& err) {
    return detail::run_command(err, [&] {
        if (points < 2) throw validation_error("pdf-grid needs at least 2 points");
        PrecisionContext ctx(req.digits);
        auto built = detail::build_request_posterior(req, ctx);
        const auto& rmix = built.real;

        out << "p,pdf,cdf\n";
        for (long k = 0; k < points; ++k) {
            Real p = Real(k, ctx.bits()) / (points - 1);
            double pd = static_cast<double>(k) / static_cast<double>(points - 1);
            out << format_sig(pd, req.out_digits) << ','
                << format_sig(to_double(pdf(rmix, p)), req.out_digits) << ','
                << format_sig(to_double(cdf(rmix, p)), req.out_digits) << '\n';
        }
    });
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                        unsigned threads, std::optional<std::uint64_t> seed_override, int digits,
                        std::ostream& out, std::ostream& err) {
    return detail::run_command(err, [&] {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw io_error("cannot open config file " + config_path);
        nlohmann::json doc = nlohmann::json::parse(in);
        GridConfig config = parse_grid_config(doc);
        if (seed_override) config.seed = *seed_override;

        auto grid = expand_grid(config);
        long total_trials = 0;
        for (const auto& cond : grid) total_trials += cond.trials;
        out << "conditions: " << grid.size() << '\n';
        out << "trials: " << total_trials << '\n';

        PrecisionContext ctx(digits);
        GridResult result = run_grid(grid, ctx, threads);
        auto rows = aggregate(result.records);

        std::map<std::string, long> failures;
        for (const auto& f : result.failures) ++failures[f.condition_id];

        namespace fs = std::filesystem;
        fs::path dir(out_dir);
        write_trials_csv(dir / "trials.csv", result.records);
        write_aggregates_csv(dir / "aggregates.csv", rows, failures);

        out << "wrote " << (dir / "trials.csv").string() << " (" << result.records.size()
            << " rows)\n";
        out << "wrote " << (dir / "aggregates.csv").string() << " (" << rows.size() << " rows)\n";
        if (!result.failures.empty()) {
            err << "warning: " << result.failures.size() << " trial(s) failed and were skipped\n";
            std::size_t shown = 0;
            for (const auto& f : result.failures) {
                if (++shown > 20) {
                    err << "  ... (" << result.failures.size() - 20 << " more)\n";
                    break;
                }
                err << "  " << f.condition_id << " trial " << f.trial << ": " << f.message << '\n';
            }
        }
    });
}

inline int cmd_aggregate(const std::string& trials_path, const std::string& out_dir,
                         std::ostream& out, std::ostream& err) {
    return detail::run_command(err, [&] {
        auto records = read_trials_csv(trials_path);
        auto rows = aggregate(records);
        namespace fs = std::filesystem;
        fs::path dir(out_dir);
        write_aggregates_csv(dir / "aggregates.csv", rows, {});
        out << "wrote " << (dir / "aggregates.csv").string() << " (" << rows.size() << " rows)\n";
    });
}

} // namespace poolprev

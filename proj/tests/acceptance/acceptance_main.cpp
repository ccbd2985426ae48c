// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Oracles are independent of the library arithmetic (double-precision
// adaptive quadrature, closed forms, and an external-process determinism
// check through the CLI binary named by POOLPREV_CLI).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "poolprev/cli/commands.hpp"
#include "poolprev/posterior/mom_fit.hpp"
#include "support/posterior_oracle.hpp"

using namespace poolprev;
namespace fs = std::filesystem;

#ifndef POOLPREV_SOURCE_DIR
#error "POOLPREV_SOURCE_DIR must point at the repository root"
#endif

namespace {

const fs::path kSourceDir{POOLPREV_SOURCE_DIR};

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    int recorded_failures = 0;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (++recorded_failures <= 8) notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& text) { notes.push_back(text); }
};

bool close_rel(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

TestAccuracy acc_of(const char* se, const char* sp) {
    return TestAccuracy{rational_from_decimal(se), rational_from_decimal(sp)};
}

SimCondition make_cond(double p, long m, long n, long q, const char* se, const char* sp,
                       long trials, std::uint64_t seed) {
    SimCondition cond;
    cond.p_true = p;
    cond.design = Design{m, n, q};
    cond.acc = acc_of(se, sp);
    cond.prior = PriorBeta{};
    cond.trials = trials;
    cond.seed = seed;
    cond.id = make_condition_id(p, cond.design, cond.acc, cond.prior);
    return cond;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------

// moments of the worked two-component posterior are exact rationals
void criterion_1(Outcome& out) {
    auto mix = build_posterior(PriorBeta{}, Design{1, 1, 3}, Observation{0, 1});
    out.require(raw_moment(mix, 1) == Rational(4, 9), "E[P] == 4/9 exactly");
    out.require(raw_moment(mix, 2) == Rational(31, 126), "E[P^2] == 31/126 exactly");
    out.require(raw_moment(mix, 3) == Rational(13, 84), "E[P^3] == 13/84 exactly");
}

// pdf/cdf/mean equivalence with the adaptive-quadrature oracle
void criterion_2(Outcome& out) {
    std::mt19937 rng(160493);
    const double tol = 1e-8;
    double worst = 0.0;

    std::uniform_int_distribution<long> mn(0, 10), q_dist(1, 4), ab(1, 2);
    for (int rep = 0; rep < 50; ++rep) {
        long m = mn(rng), n = mn(rng), q = q_dist(rng);
        long alpha = ab(rng), beta = ab(rng);
        std::uniform_int_distribution<long> y_dist(0, m), z_dist(0, n);
        long y = y_dist(rng), z = z_dist(rng);

        auto mix = build_posterior(PriorBeta{Rational(alpha), Rational(beta)}, Design{m, n, q},
                                   Observation{y, z});
        oracle::Posterior ref(
            oracle::Setup{m, y, n, z, q, double(alpha), double(beta), 1.0, 1.0});

        for (int i = 0; i <= 20; ++i) {
            Rational p(i, 20);
            p.canonicalize();
            double got = to_double(pdf(mix, p)), want = ref.pdf(i / 20.0);
            worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
            out.require(close_rel(got, want, tol), "perfect pdf vs quadrature");
        }
        for (double pc : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            Rational p(std::lround(pc * 10), 10);
            p.canonicalize();
            out.require(close_rel(to_double(cdf(mix, p)), ref.cdf(pc), tol),
                        "perfect cdf vs quadrature");
        }
        out.require(close_rel(to_double(mean(mix)), ref.mean(), tol), "perfect mean vs quadrature");
    }

    const char* levels[] = {"0.8", "0.9", "0.95"};
    std::uniform_int_distribution<long> total(1, 10), pick(0, 2);
    for (int rep = 0; rep < 25; ++rep) {
        long t = total(rng);
        std::uniform_int_distribution<long> m_dist(0, t);
        long m = m_dist(rng), n = t - m;
        long q = q_dist(rng);
        std::uniform_int_distribution<long> y_dist(0, m), z_dist(0, n);
        long y = y_dist(rng), z = z_dist(rng);
        const char* se = levels[pick(rng)];
        const char* sp = levels[pick(rng)];

        auto mix =
            build_posterior_imperfect(PriorBeta{}, Design{m, n, q}, Observation{y, z}, acc_of(se, sp));
        oracle::Posterior ref(
            oracle::Setup{m, y, n, z, q, 1.0, 1.0, std::stod(se), std::stod(sp)});

        for (int i = 0; i <= 20; ++i) {
            Rational p(i, 20);
            p.canonicalize();
            out.require(close_rel(to_double(pdf(mix, p)), ref.pdf(i / 20.0), tol),
                        "imperfect pdf vs quadrature");
        }
        for (double pc : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            Rational p(std::lround(pc * 10), 10);
            p.canonicalize();
            out.require(close_rel(to_double(cdf(mix, p)), ref.cdf(pc), tol),
                        "imperfect cdf vs quadrature");
        }
        out.require(close_rel(to_double(mean(mix)), ref.mean(), tol),
                    "imperfect mean vs quadrature");
    }
    out.note("worst relative pdf deviation " + format_sig(worst, 3));
}

// exact reductions: se=sp=1, q=1, z=0
void criterion_3(Outcome& out) {
    std::mt19937 rng(271828);
    std::uniform_int_distribution<long> mn(0, 8), q_dist(1, 4), ab(1, 2);
    for (int rep = 0; rep < 20; ++rep) {
        long m = mn(rng), n = mn(rng), q = q_dist(rng);
        std::uniform_int_distribution<long> y_dist(0, m), z_dist(0, n);
        Observation obs{y_dist(rng), z_dist(rng)};
        auto perfect = build_posterior(PriorBeta{}, Design{m, n, q}, obs);
        auto reduced = build_posterior_imperfect(PriorBeta{}, Design{m, n, q}, obs, acc_of("1", "1"));
        for (long k = 0; k <= 100; ++k) {
            Rational p(k, 100);
            p.canonicalize();
            double diff = std::abs(to_double(pdf(perfect, p) - pdf(reduced, p)));
            out.require(diff <= 1e-12, "se=sp=1 posterior equals the perfect posterior");
        }
    }

    for (int rep = 0; rep < 20; ++rep) {
        long m = mn(rng), n = mn(rng);
        long alpha = ab(rng), beta = ab(rng);
        std::uniform_int_distribution<long> y_dist(0, m), z_dist(0, n);
        long y = y_dist(rng), z = z_dist(rng);
        auto mix = build_posterior(PriorBeta{Rational(alpha), Rational(beta)}, Design{m, n, 1},
                                   Observation{y, z});
        long a = y + z + alpha, b = m + n - y - z + beta;
        for (long k = 0; k <= 100; ++k) {
            Rational p(k, 100);
            p.canonicalize();
            Rational beta_pdf = pow_int(p, a - 1) * pow_int(Rational(1) - p, b - 1) /
                                beta_integer(a, b);
            double diff = std::abs(to_double(pdf(mix, p) - beta_pdf));
            out.require(diff <= 1e-12, "q=1 posterior equals the collapsed beta");
        }
    }

    for (int rep = 0; rep < 20; ++rep) {
        long m = mn(rng), n = mn(rng), q = q_dist(rng);
        long alpha = ab(rng), beta = ab(rng);
        std::uniform_int_distribution<long> y_dist(0, m);
        long y = y_dist(rng);
        auto mix = build_posterior(PriorBeta{Rational(alpha), Rational(beta)}, Design{m, n, q},
                                   Observation{y, 0});
        out.require(mix.component_count() == 1, "z=0 posterior has a single component");
        out.require(mix.terms()[0].a == y + alpha, "z=0 first parameter is y + alpha");
        out.require(mix.terms()[0].b == m - y + beta + q * n,
                    "z=0 second parameter is m - y + beta + q n");
    }
}

void check_coverage(Outcome& out, const std::vector<SimCondition>& grid,
                    const PrecisionContext& ctx) {
    auto result = run_grid(grid, ctx, 0);
    out.require(result.failures.empty(), "no trial failures");
    auto rows = aggregate(result.records);
    for (const auto& row : rows) {
        long covered = std::lround(row.coverage * double(row.trials));
        std::ostringstream line;
        line << row.condition_id << ": covered " << covered << "/" << row.trials;
        out.note(line.str());
        out.require(covered >= 88 && covered <= 100,
                    row.condition_id + " covered count within [88, 100]");
    }
}

// coverage at desk scale, perfect tests
void criterion_4(Outcome& out) {
    PrecisionContext ctx;
    std::vector<SimCondition> grid;
    for (double p : {0.1, 0.3, 0.5}) {
        for (long m : {0L, 100L, 200L}) {
            grid.push_back(make_cond(p, m, 200 - m, 3, "1", "1", 100, 20240601));
        }
    }
    check_coverage(out, grid, ctx);
}

// coverage at desk scale, se = sp = 0.9
void criterion_5(Outcome& out) {
    PrecisionContext ctx;
    std::vector<SimCondition> grid;
    for (double p : {0.2, 0.5}) {
        for (long m : {0L, 15L, 30L}) {
            grid.push_back(make_cond(p, m, 30 - m, 3, "0.9", "0.9", 100, 20240601));
        }
    }
    check_coverage(out, grid, ctx);
}

// pooling narrows intervals at low prevalence
void criterion_6(Outcome& out) {
    PrecisionContext ctx;
    auto pooled_q6 = make_cond(0.05, 0, 200, 6, "1", "1", 100, 20240601);
    auto pooled_q3 = make_cond(0.05, 0, 200, 3, "1", "1", 100, 20240601);
    auto individual = make_cond(0.05, 200, 0, 3, "1", "1", 100, 20240601);
    auto result = run_grid({pooled_q6, pooled_q3, individual}, ctx, 0);
    out.require(result.failures.empty(), "no trial failures");
    auto rows = aggregate(result.records);

    double width_q6 = 0, width_q3 = 0, width_ind = 0;
    for (const auto& row : rows) {
        if (row.condition_id == pooled_q6.id) width_q6 = row.width_mean;
        if (row.condition_id == pooled_q3.id) width_q3 = row.width_mean;
        if (row.condition_id == individual.id) width_ind = row.width_mean;
    }
    out.note("mean 95% width, pooled q=6: " + format_sig(width_q6, 6));
    out.note("mean 95% width, pooled q=3: " + format_sig(width_q3, 6));
    out.note("mean 95% width, individual: " + format_sig(width_ind, 6));
    out.require(width_q6 > 0 && width_ind > 0, "widths computed");
    out.require(width_q6 < width_ind,
                "pooled design (m=0, n=200, q=6) beats individual design (m=200) at p=0.05");
}

// distribution sanity over randomized cases
void criterion_7(Outcome& out) {
    PrecisionContext ctx;
    std::mt19937 rng(424242);
    std::uniform_int_distribution<long> mn(0, 25), q_dist(1, 6), ab(1, 3), imperfect(0, 3);
    const char* levels[] = {"0.8", "0.9", "0.95"};
    std::uniform_int_distribution<long> pick(0, 2);

    for (int rep = 0; rep < 200; ++rep) {
        long m = mn(rng), n = mn(rng), q = q_dist(rng);
        long alpha = ab(rng), beta = ab(rng);
        std::uniform_int_distribution<long> y_dist(0, m), z_dist(0, n);
        Observation obs{y_dist(rng), z_dist(rng)};
        PriorBeta prior{Rational(alpha), Rational(beta)};
        Design design{m, n, q};

        const bool use_imperfect = imperfect(rng) == 0 && m <= 12 && n <= 12;
        auto mix = use_imperfect
                       ? build_posterior_imperfect(prior, design, obs,
                                                   acc_of(levels[pick(rng)], levels[pick(rng)]))
                       : build_posterior(prior, design, obs);

        out.require(cdf(mix, Rational(0)) == 0, "cdf(0) == 0 exactly");
        out.require(cdf(mix, Rational(1)) == 1, "cdf(1) == 1 exactly");
        out.require(sgn(variance(mix)) >= 0, "variance >= 0");

        auto rmix = to_real(mix, ctx);
        // nondecreasing up to the working-precision epsilon; rounding can
        // wobble at the 1e-200 scale where the CDF saturates
        const Real eps = pow(Real(10, ctx.bits()), -(ctx.digits() - 20));
        Real prev(0, ctx.bits());
        bool monotone = true;
        for (long k = 1; k <= 1000; ++k) {
            Real value = cdf(rmix, Real(k, ctx.bits()) / 1000);
            if (value < prev - eps) monotone = false;
            prev = value;
        }
        out.require(monotone, "cdf nondecreasing on the 1000-point grid");

        Real floor(-1e-150, ctx.bits());
        bool nonneg = true;
        for (long k = 0; k <= 100; ++k) {
            if (pdf(rmix, Real(k, ctx.bits()) / 100) < floor) nonneg = false;
        }
        out.require(nonneg, "pdf >= -1e-150 at sampled points");

        for (double u : {0.1, 0.5, 0.9}) {
            Real x = quantile(rmix, u);
            double back = to_double(cdf(rmix, x));
            out.require(std::abs(back - u) <= 1e-10, "quantile/cdf round trip within 1e-10");
        }
    }
}

// the worked example is not any beta distribution
void criterion_8(Outcome& out) {
    auto mix = build_posterior(PriorBeta{}, Design{1, 1, 3}, Observation{0, 1});
    auto fit = fit_beta_mom(mix);
    Rational fitted_m3 = fit.a * (fit.a + 1) * (fit.a + 2) /
                         ((fit.a + fit.b) * (fit.a + fit.b + 1) * (fit.a + fit.b + 2));
    Rational gap = abs(fitted_m3 - Rational(13, 84));
    out.note("fitted third moment " + fitted_m3.get_str() + ", exact 13/84, |gap| = " +
             format_sig(to_double(gap), 4));
    out.require(gap > Rational(1, 1000000),
                "moment-matched beta misses the third moment by more than 1e-6");
}

// byte-identical outputs across repeated CLI runs
void criterion_9(Outcome& out) {
    const fs::path config = kSourceDir / "configs" / "desk_sim1.json";
    fs::path dir1 = fs::temp_directory_path() / "poolprev_accept_run1";
    fs::path dir2 = fs::temp_directory_path() / "poolprev_accept_run2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    fs::create_directories(dir1);
    fs::create_directories(dir2);

    const char* cli = std::getenv("POOLPREV_CLI");
    if (cli != nullptr && *cli != '\0') {
        for (const fs::path& dir : {dir1, dir2}) {
            std::string cmd = std::string("'") + cli + "' simulate --config '" + config.string() +
                              "' --out '" + dir.string() + "' >/dev/null 2>&1";
            int rc = std::system(cmd.c_str());
            out.require(rc == 0, "CLI simulate run exits 0");
        }
        out.note("ran twice through the CLI binary");
    } else {
        // fall back to the library entry point
        for (const fs::path& dir : {dir1, dir2}) {
            std::ostringstream sink, err;
            int rc = cmd_simulate(config.string(), dir.string(), 0, std::nullopt, 200, sink, err);
            out.require(rc == 0, "library simulate run exits 0");
        }
        out.note("POOLPREV_CLI unset; ran twice through cmd_simulate");
    }

    out.require(slurp(dir1 / "trials.csv") == slurp(dir2 / "trials.csv"),
                "trials.csv byte-identical across runs");
    out.require(slurp(dir1 / "aggregates.csv") == slurp(dir2 / "aggregates.csv"),
                "aggregates.csv byte-identical across runs");
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

} // namespace

int main() {
    struct Criterion {
        int number;
        const char* label;
        double budget_seconds;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "worked-example moments are exact rationals", 1.0, criterion_1},
        {2, "pdf/cdf/mean match the adaptive-quadrature oracle (1e-8)", 300.0, criterion_2},
        {3, "reduction identities (se=sp=1, q=1, z=0)", 300.0, criterion_3},
        {4, "desk-scale coverage, perfect tests, within [88, 100]", 900.0, criterion_4},
        {5, "desk-scale coverage, se=sp=0.9, within [88, 100]", 1200.0, criterion_5},
        {6, "pooling narrows intervals at p=0.05", 900.0, criterion_6},
        {7, "distribution sanity across 200 randomized cases", 900.0, criterion_7},
        {8, "moment-matched beta cannot reproduce the third moment", 60.0, criterion_8},
        {9, "repeated simulation runs are byte-identical", 900.0, criterion_9},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Outcome outcome;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(outcome);
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.notes.push_back(std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.budget_seconds) {
            outcome.pass = false;
            outcome.notes.push_back("exceeded the runtime budget of " +
                                    format_sig(criterion.budget_seconds, 3) + " s");
        }
        if (!outcome.pass) ++failures;
        std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion.number
                  << ": " << criterion.label << " (" << format_sig(elapsed, 3) << " s)\n";
        std::size_t shown = 0;
        for (const auto& note : outcome.notes) {
            std::cout << "        " << note << '\n';
            if (++shown >= 12) {
                std::cout << "        ...\n";
                break;
            }
        }
    }
    std::cout << (failures == 0 ? "all criteria passed\n"
                                : std::to_string(failures) + " criteria failed\n");
    return failures == 0 ? 0 : 1;
}

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "poolprev/imperfect/build.hpp"
#include "poolprev/posterior/build.hpp"
#include "poolprev/posterior/interval.hpp"
#include "poolprev/sim/philox.hpp"
#include "poolprev/util/format.hpp"

namespace poolprev {

/// One experimental condition: a true prevalence, a test plan, test accuracy,
/// a prior, and the trial count. `seed` is the master seed shared by the
/// whole grid.
struct SimCondition {
    std::string id;
    double p_true = 0.0;
    Design design;
    TestAccuracy acc;
    PriorBeta prior;
    long trials = 100;
    std::uint64_t seed = 0;

    void validate() const {
        design.validate();
        acc.validate();
        prior.validate();
        if (!(p_true >= 0.0 && p_true <= 1.0)) {
            throw validation_error("p_true must lie in [0, 1]");
        }
        if (trials < 1) throw validation_error("trials must be at least 1");
    }
};

/// Canonical, comma-free condition label; doubles are rendered in shortest
/// round-trip form so the label (and the stream key hashed from it) is stable.
inline std::string make_condition_id(double p_true, const Design& design, const TestAccuracy& acc,
                                     const PriorBeta& prior) {
    return "p" + format_shortest(p_true) + "_m" + std::to_string(design.m) + "_n" +
           std::to_string(design.n) + "_q" + std::to_string(design.q) + "_se" +
           format_shortest(to_double(acc.se)) + "_sp" + format_shortest(to_double(acc.sp)) + "_a" +
           format_shortest(to_double(prior.alpha)) + "_b" + format_shortest(to_double(prior.beta));
}

/// Per-trial measurements.
struct TrialRecord {
    std::string condition_id;
    long trial = 0;
    double p_true = 0.0;
    long m = 0, n = 0, q = 1;
    double se = 1.0, sp = 1.0, alpha = 1.0, beta = 1.0;
    long y = 0, z = 0;
    bool covered = false;
    double ci_low = 0.0, ci_high = 0.0, ci_width = 0.0;
    double posterior_mean = 0.0;
};

/// Per-condition aggregation of the trial measurements. Standard deviations
/// are population standard deviations (divide by N).
struct AggregateRow {
    std::string condition_id;
    long trials = 0;
    double coverage = 0.0;
    double width_mean = 0.0, width_std = 0.0;
    double e_mean = 0.0, e_std = 0.0;
    double pct_error = 0.0;
};

struct TrialFailure {
    std::string condition_id;
    long trial = 0;
    std::string message;
};

struct GridResult {
    std::vector<TrialRecord> records;
    std::vector<TrialFailure> failures;
};

/// Draws the observed counts (y, z) for one trial. Each individual test
/// consumes two uniforms (true status, then test misreport); each pooled test
/// consumes q + 1 uniforms (q fresh member statuses, then one misreport). The
/// error draw reports a truly positive sample positive when u < se and a
/// truly negative sample positive when u < 1 - sp; draws are consumed even
/// when se = sp = 1 so that the stream layout does not depend on the
/// accuracy values.
inline Observation simulate_trial(const SimCondition& cond, long trial_index) {
    cond.validate();
    TrialStream stream(cond.seed, fnv1a64(cond.id), static_cast<std::uint64_t>(trial_index));
    const double se = to_double(cond.acc.se);
    const double one_minus_sp = 1.0 - to_double(cond.acc.sp);

    long y = 0;
    for (long i = 0; i < cond.design.m; ++i) {
        const bool positive = stream.bernoulli(cond.p_true);
        const bool reported = stream.bernoulli(positive ? se : one_minus_sp);
        if (reported) ++y;
    }
    long z = 0;
    for (long i = 0; i < cond.design.n; ++i) {
        bool any_positive = false;
        for (long s = 0; s < cond.design.q; ++s) {
            if (stream.bernoulli(cond.p_true)) any_positive = true;
        }
        const bool reported = stream.bernoulli(any_positive ? se : one_minus_sp);
        if (reported) ++z;
    }
    return Observation{y, z};
}

namespace detail {

inline TrialRecord evaluate_trial(const SimCondition& cond, long trial_index,
                                  const Observation& obs, const PrecisionContext& ctx,
                                  double level) {
    TrialRecord rec;
    rec.condition_id = cond.id;
    rec.trial = trial_index;
    rec.p_true = cond.p_true;
    rec.m = cond.design.m;
    rec.n = cond.design.n;
    rec.q = cond.design.q;
    rec.se = to_double(cond.acc.se);
    rec.sp = to_double(cond.acc.sp);
    rec.alpha = to_double(cond.prior.alpha);
    rec.beta = to_double(cond.prior.beta);
    rec.y = obs.y;
    rec.z = obs.z;

    const bool exact = cond.prior.is_integer_pair();
    std::optional<BetaMixture<Real>> real_mix;
    if (exact) {
        auto mix = cond.acc.perfect()
                       ? build_posterior(cond.prior, cond.design, obs)
                       : build_posterior_imperfect(cond.prior, cond.design, obs, cond.acc);
        rec.posterior_mean = to_double(mean(mix));
        real_mix = to_real(mix, ctx);
    } else {
        real_mix = cond.acc.perfect()
                       ? build_posterior(cond.prior, cond.design, obs, ctx)
                       : build_posterior_imperfect(cond.prior, cond.design, obs, cond.acc, ctx);
        rec.posterior_mean = to_double(mean(*real_mix));
    }
    auto [low, high] = credible_interval(*real_mix, level);
    rec.ci_low = to_double(low);
    rec.ci_high = to_double(high);
    rec.ci_width = to_double(high - low);
    Real p_true = make_like(low, cond.p_true);
    rec.covered = (low <= p_true) && (p_true <= high);
    return rec;
}

} // namespace detail

/// Runs every condition's trials and collects per-trial records in
/// (condition, trial) order. Trials are independent tasks; thread count 0
/// means one thread per hardware core. A failed trial is logged and skipped
/// without aborting the run. Output is identical for any thread count.
inline GridResult run_grid(const std::vector<SimCondition>& grid, const PrecisionContext& ctx,
                           unsigned threads = 0, double level = 0.95) {
    struct Task {
        const SimCondition* cond;
        long trial;
    };
    std::vector<Task> tasks;
    for (const auto& cond : grid) {
        cond.validate();
        for (long t = 0; t < cond.trials; ++t) tasks.push_back({&cond, t});
    }

    std::vector<TrialRecord> slot(tasks.size());
    std::vector<std::string> error(tasks.size());
    std::vector<char> ok(tasks.size(), 0);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, tasks.empty() ? 1 : static_cast<unsigned>(tasks.size()));

    // The factorial table would otherwise grow under per-call locking from
    // many threads at once.
    long max_tests = 1;
    for (const auto& cond : grid) {
        max_tests = std::max(max_tests, cond.design.m + cond.design.q * cond.design.n + 2 +
                                            (cond.prior.is_integer_pair()
                                                 ? to_long(cond.prior.alpha) + to_long(cond.prior.beta)
                                                 : 2));
    }
    FactorialCache::warm_up(max_tests);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const auto& task = tasks[i];
            try {
                Observation obs = simulate_trial(*task.cond, task.trial);
                slot[i] = detail::evaluate_trial(*task.cond, task.trial, obs, ctx, level);
                ok[i] = 1;
            } catch (const std::exception& e) {
                error[i] = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    GridResult result;
    result.records.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (ok[i]) {
            result.records.push_back(std::move(slot[i]));
        } else {
            result.failures.push_back({tasks[i].cond->id, tasks[i].trial, error[i]});
        }
    }
    return result;
}

/// Aggregates trial records per condition: coverage proportion, mean and
/// population standard deviation of interval width and posterior mean, and
/// the percent error |mean of posterior means - p_true| / p_true. Rows come
/// out in first-appearance order of the condition ids; trial order within a
/// condition does not affect the result.
inline std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw validation_error("no trial records to aggregate");

    std::vector<std::string> order;
    std::map<std::string, std::vector<const TrialRecord*>> groups;
    for (const auto& rec : records) {
        auto [it, inserted] = groups.try_emplace(rec.condition_id);
        if (inserted) order.push_back(rec.condition_id);
        it->second.push_back(&rec);
    }

    std::vector<AggregateRow> rows;
    rows.reserve(order.size());
    for (const auto& id : order) {
        auto& group = groups[id];
        std::sort(group.begin(), group.end(),
                  [](const TrialRecord* a, const TrialRecord* b) { return a->trial < b->trial; });
        const auto n = static_cast<double>(group.size());

        AggregateRow row;
        row.condition_id = id;
        row.trials = static_cast<long>(group.size());

        long covered = 0;
        double width_sum = 0.0, e_sum = 0.0;
        for (const auto* rec : group) {
            covered += rec->covered ? 1 : 0;
            width_sum += rec->ci_width;
            e_sum += rec->posterior_mean;
        }
        row.coverage = static_cast<double>(covered) / n;
        row.width_mean = width_sum / n;
        row.e_mean = e_sum / n;

        double width_ss = 0.0, e_ss = 0.0;
        for (const auto* rec : group) {
            width_ss += (rec->ci_width - row.width_mean) * (rec->ci_width - row.width_mean);
            e_ss += (rec->posterior_mean - row.e_mean) * (rec->posterior_mean - row.e_mean);
        }
        row.width_std = std::sqrt(width_ss / n);
        row.e_std = std::sqrt(e_ss / n);

        const double p_true = group.front()->p_true;
        row.pct_error = p_true > 0.0 ? std::abs(row.e_mean - p_true) / p_true
                                     : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace poolprev

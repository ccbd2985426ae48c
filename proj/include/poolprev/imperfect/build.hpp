#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "poolprev/imperfect/likelihood.hpp"
#include "poolprev/posterior/build.hpp"

namespace poolprev {

struct ImperfectBuildOptions {
    /// Upper bound on raw expansion terms before merging. The expansion grows
    /// as (y+1)(m-y+1)(z+1)(n-z+1)(n+2)/2, so large designs must either be
    /// split or run with a raised budget.
    long long max_raw_terms = 10'000'000;
};

namespace detail {

inline long long imperfect_raw_term_count(const Design& design, const Observation& obs) {
    const auto y1 = static_cast<__int128>(obs.y + 1);
    const auto my1 = static_cast<__int128>(design.m - obs.y + 1);
    const auto z1 = static_cast<__int128>(obs.z + 1);
    const auto nz1 = static_cast<__int128>(design.n - obs.z + 1);
    __int128 total = y1 * my1 * z1 * nz1 * (design.n + 2) / 2;
    const __int128 cap = static_cast<__int128>(1) << 62;
    return total > cap ? static_cast<long long>(cap) : static_cast<long long>(total);
}

// Expands the imperfect-test joint into monomial terms
//   g(i,j,k,l) C(k+l, r) (-1)^r p^(i+j+alpha-1) (1-p)^(m-i-j+beta-1+q(n-k-l+r))
// and merges coinciding exponent pairs exactly before normalization. The
// common prefactor C(m,y) C(n,z) / B(alpha, beta) cancels between the density
// and its normalizer and is dropped from both.
template <class T>
BetaMixture<T> build_imperfect_terms(const T& alpha, const T& beta, const T& se, const T& sp,
                                     const Design& design, const Observation& obs,
                                     const ImperfectBuildOptions& opts) {
    const long m = design.m, n = design.n, q = design.q;
    const long y = obs.y, z = obs.z;

    const long long raw_terms = imperfect_raw_term_count(design, obs);
    if (raw_terms > opts.max_raw_terms) {
        throw term_budget_error(
            "imperfect posterior expansion needs " + std::to_string(raw_terms) +
            " raw terms, above the budget of " + std::to_string(opts.max_raw_terms) +
            "; reduce the design size or raise the budget");
    }

    const T one = make_like(alpha, 1);

    auto powers = [&](const T& base, long max_exp) {
        std::vector<T> p;
        p.reserve(static_cast<std::size_t>(max_exp) + 1);
        p.push_back(one);
        for (long e = 1; e <= max_exp; ++e) p.push_back(p.back() * base);
        return p;
    };
    const auto se_pow = powers(se, y + z);
    const auto ose_pow = powers(one - se, (m - y) + (n - z));
    const auto sp_pow = powers(sp, (m - y) + (n - z));
    const auto osp_pow = powers(one - sp, y + z);

    // exponent offsets from (alpha, beta): a = alpha + u, b = beta + v
    std::map<std::pair<long, long>, T> accum;
    for (long i = 0; i <= y; ++i) {
        for (long j = 0; j <= m - y; ++j) {
            const long u = i + j;
            for (long k = 0; k <= z; ++k) {
                for (long l = 0; l <= n - z; ++l) {
                    T g = make_like(alpha, Rational(binomial_int(y, i) * binomial_int(m - y, j) *
                                                    binomial_int(z, k) * binomial_int(n - z, l)));
                    g *= se_pow[static_cast<std::size_t>(i + k)];
                    g *= ose_pow[static_cast<std::size_t>(j + l)];
                    g *= sp_pow[static_cast<std::size_t>((m - y - j) + (n - z - l))];
                    g *= osp_pow[static_cast<std::size_t>((y - i) + (z - k))];
                    if (sign(g) == 0) continue;

                    for (long r = 0; r <= k + l; ++r) {
                        const long v = (m - i - j) + q * (n - k - l + r);
                        T w = g * make_like(alpha, Rational(binomial_int(k + l, r)));
                        if (r % 2 != 0) w = -w;
                        auto key = std::make_pair(u, v);
                        auto it = accum.find(key);
                        if (it == accum.end()) {
                            accum.emplace(key, std::move(w));
                        } else {
                            it->second += w;
                        }
                    }
                }
            }
        }
    }

    std::vector<MixtureTerm<T>> terms;
    terms.reserve(accum.size());
    for (auto& [key, weight] : accum) {
        terms.push_back({alpha + key.first, beta + key.second, std::move(weight)});
    }
    T gamma = alpha + y;
    T delta = beta + (m - y) + q * (n - z);
    return BetaMixture<T>(std::move(terms), std::move(gamma), std::move(delta));
}

} // namespace detail

/// Exact posterior under known sensitivity/specificity. Requires an integer
/// prior; se and sp may be any rationals satisfying TestAccuracy's rules.
inline BetaMixture<Rational> build_posterior_imperfect(const PriorBeta& prior, const Design& design,
                                                       const Observation& obs,
                                                       const TestAccuracy& acc,
                                                       const ImperfectBuildOptions& opts = {}) {
    prior.validate();
    obs.validate(design);
    acc.validate();
    if (!prior.is_integer_pair()) {
        throw validation_error("exact posterior construction requires integer prior parameters");
    }
    return detail::build_imperfect_terms<Rational>(prior.alpha, prior.beta, acc.se, acc.sp, design,
                                                   obs, opts);
}

/// Real-path posterior under known sensitivity/specificity.
inline BetaMixture<Real> build_posterior_imperfect(const PriorBeta& prior, const Design& design,
                                                   const Observation& obs, const TestAccuracy& acc,
                                                   const PrecisionContext& ctx,
                                                   const ImperfectBuildOptions& opts = {}) {
    prior.validate();
    obs.validate(design);
    acc.validate();
    const mpfr_prec_t prec = ctx.bits();
    return detail::build_imperfect_terms<Real>(Real(prior.alpha, prec), Real(prior.beta, prec),
                                               Real(acc.se, prec), Real(acc.sp, prec), design, obs,
                                               opts);
}

} // namespace poolprev

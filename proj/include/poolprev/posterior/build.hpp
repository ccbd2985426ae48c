#pragma once

#include <vector>

#include "poolprev/numerics/factorials.hpp"
#include "poolprev/posterior/mixture.hpp"
#include "poolprev/posterior/types.hpp"

namespace poolprev {

/// Probability that a pool of q individuals is truly positive:
/// 1 - (1 - p)^q. Nondecreasing in both p and q.
template <class T>
T pool_positive_prob(const T& p, long q) {
    detail::check_probability(p);
    if (q < 1) throw std::domain_error("q must be at least 1");
    return make_like(p, 1) - pow_int(make_like(p, 1) - p, q);
}

inline double pool_positive_prob(double p, long q) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability argument must lie in [0, 1]");
    if (q < 1) throw std::domain_error("q must be at least 1");
    double r = 1.0;
    for (long i = 0; i < q; ++i) r *= 1.0 - p;
    return 1.0 - r;
}

namespace detail {

// Terms of the perfect-test posterior: for i = 0..z the exponent pair
// (gamma, delta + q i) with signed coefficient C(z, i) (-1)^i, where
// gamma = y + alpha and delta = m - y + beta + q (n - z).
template <class T>
BetaMixture<T> build_posterior_terms(const T& alpha, const T& beta, const Design& design,
                                     const Observation& obs) {
    const long m = design.m, n = design.n, q = design.q;
    const long y = obs.y, z = obs.z;

    T gamma = alpha + y;
    T delta = beta + (m - y) + q * (n - z);

    std::vector<MixtureTerm<T>> terms;
    terms.reserve(static_cast<std::size_t>(z) + 1);
    for (long i = 0; i <= z; ++i) {
        T weight = make_like(alpha, Rational(binomial_int(z, i)));
        if (i % 2 != 0) weight = -weight;
        terms.push_back({gamma, delta + q * i, std::move(weight)});
    }
    return BetaMixture<T>(std::move(terms), std::move(gamma), std::move(delta));
}

} // namespace detail

/// Exact posterior for perfect tests. Requires an integer prior; non-integer
/// priors use the real-path overload.
inline BetaMixture<Rational> build_posterior(const PriorBeta& prior, const Design& design,
                                             const Observation& obs) {
    prior.validate();
    obs.validate(design);
    if (!prior.is_integer_pair()) {
        throw validation_error("exact posterior construction requires integer prior parameters");
    }
    return detail::build_posterior_terms<Rational>(prior.alpha, prior.beta, design, obs);
}

/// Posterior for perfect tests on the real path at the context precision.
inline BetaMixture<Real> build_posterior(const PriorBeta& prior, const Design& design,
                                         const Observation& obs, const PrecisionContext& ctx) {
    prior.validate();
    obs.validate(design);
    return detail::build_posterior_terms<Real>(Real(prior.alpha, ctx.bits()),
                                               Real(prior.beta, ctx.bits()), design, obs);
}

} // namespace poolprev

#pragma once

#include "poolprev/imperfect/accuracy.hpp"
#include "poolprev/numerics/factorials.hpp"
#include "poolprev/posterior/build.hpp"
#include "poolprev/posterior/types.hpp"

namespace poolprev {

/// Pr(Y = y | P = p) under imperfect tests:
/// C(m, y) [se p + (1-sp)(1-p)]^y [(1-se) p + sp (1-p)]^(m-y).
template <class T>
T likelihood_individual(const T& p, long m, long y, const TestAccuracy& acc) {
    acc.validate();
    detail::check_probability(p);
    if (y < 0 || y > m) throw std::domain_error("y must satisfy 0 <= y <= m");
    const T one = make_like(p, 1);
    const T se = make_like(p, acc.se);
    const T sp = make_like(p, acc.sp);
    T positive_rate = se * p + (one - sp) * (one - p);
    T negative_rate = (one - se) * p + sp * (one - p);
    return make_like(p, Rational(binomial_int(m, y))) * pow_int(positive_rate, y) *
           pow_int(negative_rate, m - y);
}

/// Pr(Z = z | P = p) under imperfect tests; the per-pool positive rate is
/// evaluated at pi_q = 1 - (1-p)^q.
template <class T>
T likelihood_pooled(const T& p, long n, long z, long q, const TestAccuracy& acc) {
    acc.validate();
    detail::check_probability(p);
    if (z < 0 || z > n) throw std::domain_error("z must satisfy 0 <= z <= n");
    const T one = make_like(p, 1);
    const T se = make_like(p, acc.se);
    const T sp = make_like(p, acc.sp);
    T pi = pool_positive_prob(p, q);
    T positive_rate = se * pi + (one - sp) * (one - pi);
    T negative_rate = (one - se) * pi + sp * (one - pi);
    return make_like(p, Rational(binomial_int(n, z))) * pow_int(positive_rate, z) *
           pow_int(negative_rate, n - z);
}

namespace detail {

template <class T>
T g_coefficient_impl(long i, long j, long k, long l, long m, long y, long n, long z, const T& se,
                     const T& sp) {
    const T one = make_like(se, 1);
    T coeff = make_like(se, Rational(binomial_int(y, i) * binomial_int(m - y, j) *
                                     binomial_int(z, k) * binomial_int(n - z, l)));
    coeff *= pow_int(se, i + k);
    coeff *= pow_int(one - se, j + l);
    coeff *= pow_int(sp, (m - y - j) + (n - z - l));
    coeff *= pow_int(one - sp, (y - i) + (z - k));
    return coeff;
}

} // namespace detail

/// The binomial-expansion coefficient g(i, j, k, l) of the imperfect-test
/// likelihood product:
/// C(y,i) C(m-y,j) C(z,k) C(n-z,l) se^(i+k) (1-se)^(j+l)
///   sp^(m-y-j+n-z-l) (1-sp)^(y-i+z-k).
inline Rational g_coefficient(long i, long j, long k, long l, const Design& design,
                              const Observation& obs, const TestAccuracy& acc) {
    acc.validate();
    obs.validate(design);
    if (i < 0 || i > obs.y || j < 0 || j > design.m - obs.y || k < 0 || k > obs.z || l < 0 ||
        l > design.n - obs.z) {
        throw std::domain_error("g coefficient index out of range");
    }
    return detail::g_coefficient_impl<Rational>(i, j, k, l, design.m, obs.y, design.n, obs.z,
                                                acc.se, acc.sp);
}

} // namespace poolprev

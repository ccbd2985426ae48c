#pragma once

#include "poolprev/posterior/mixture.hpp"

namespace poolprev {

template <class T>
struct BetaFit {
    T a;
    T b;
};

/// Method-of-moments beta approximation: the Beta(a, b) whose mean and
/// variance equal the posterior's, via
///   a = mu (mu(1-mu)/v - 1),  b = (1-mu) (mu(1-mu)/v - 1).
/// Throws infeasible_fit_error when v >= mu(1-mu), where no beta matches.
/// The fit is only a good stand-in for the true posterior at small
/// prevalence; callers should compare it against the exact mixture.
template <class T>
BetaFit<T> fit_beta_mom(const BetaMixture<T>& mix) {
    T mu = mean(mix);
    T v = variance(mix);
    if (!(sign(v) > 0)) {
        throw infeasible_fit_error("posterior variance is not positive; no beta fit exists");
    }
    T bound = mu * (make_like(mu, 1) - mu);
    if (v >= bound) {
        throw infeasible_fit_error("posterior variance is too large for any beta distribution");
    }
    T scale = bound / v - 1;
    return {mu * scale, (make_like(mu, 1) - mu) * scale};
}

} // namespace poolprev

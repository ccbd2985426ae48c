#pragma once

#include <utility>

#include "poolprev/posterior/mixture.hpp"

namespace poolprev {

struct QuantileOptions {
    double cdf_tol = 1e-15;
    double x_tol = 1e-12;
    int max_iter = 200;
};

/// Inverse CDF by bisection on [0, 1]. The CDF is monotone, so the bracket
/// always contains the quantile; iteration continues until the bracket is
/// narrower than x_tol and the CDF at the returned point is within cdf_tol of
/// u. Abscissas are kept at working precision, so steep densities do not hit
/// a double-spacing floor.
inline Real quantile(const BetaMixture<Real>& mix, const Real& u, const QuantileOptions& opt = {}) {
    if (!(u.sign() > 0) || !(u < make_like(u, 1))) {
        throw std::domain_error("quantile level must lie strictly inside (0, 1)");
    }
    const Real x_tol = make_like(u, opt.x_tol);
    const Real cdf_tol = make_like(u, opt.cdf_tol);

    const Real low_guard = make_like(u, -1) / 4;
    const Real high_guard = make_like(u, 5) / 4;
    Real lo = make_like(u, 0);
    Real hi = make_like(u, 1);
    for (int it = 0; it < opt.max_iter; ++it) {
        Real mid = (lo + hi) / 2;
        Real f = cdf(mix, mid);
        if (f < low_guard || f > high_guard || f.is_nan()) {
            throw precision_error(
                "CDF evaluation left [0, 1]; the working precision cannot resolve the "
                "mixture-weight cancellation for this design (raise the digit count)");
        }
        bool narrow = (hi - lo) <= x_tol;
        bool matched = abs(f - u) <= cdf_tol;
        if (narrow && matched) return mid;
        if (f < u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw precision_error("quantile bisection did not converge");
}

inline Real quantile(const BetaMixture<Real>& mix, double u, const QuantileOptions& opt = {}) {
    return quantile(mix, make_like(mix.normalizer(), u), opt);
}

/// Equal-tailed interval at the given level: quantiles at (1-level)/2 and
/// 1-(1-level)/2.
inline std::pair<Real, Real> credible_interval(const BetaMixture<Real>& mix, double level,
                                               const QuantileOptions& opt = {}) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::domain_error("interval level must lie strictly inside (0, 1)");
    }
    Real tail = make_like(mix.normalizer(), 1.0 - level) / 2;
    Real low = quantile(mix, tail, opt);
    Real high = quantile(mix, make_like(tail, 1) - tail, opt);
    if (!(low < high)) {
        throw precision_error("credible interval collapsed; raise the precision");
    }
    return {std::move(low), std::move(high)};
}

} // namespace poolprev

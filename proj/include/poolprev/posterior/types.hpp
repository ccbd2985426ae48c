#pragma once

#include <string>

#include "poolprev/errors.hpp"
#include "poolprev/numerics/rational.hpp"

namespace poolprev {

/// Beta(alpha, beta) prior on prevalence. Parameters are held exactly; when
/// both are integers the whole posterior stays on the exact rational path.
struct PriorBeta {
    Rational alpha{1};
    Rational beta{1};

    void validate() const {
        if (sgn(alpha) <= 0 || sgn(beta) <= 0) {
            throw validation_error("prior parameters must be positive");
        }
    }

    bool is_integer_pair() const { return is_integer(alpha) && is_integer(beta); }
};

/// Test plan: m individual tests and n pooled tests of q individuals each.
struct Design {
    long m = 0;
    long n = 0;
    long q = 1;

    void validate() const {
        if (m < 0) throw validation_error("m (individual tests) must be nonnegative");
        if (n < 0) throw validation_error("n (pooled tests) must be nonnegative");
        if (q < 1) throw validation_error("q (individuals per pool) must be at least 1");
    }
};

/// Observed outcomes: y positive individual tests, z positive pooled tests.
struct Observation {
    long y = 0;
    long z = 0;

    void validate(const Design& design) const {
        design.validate();
        if (y < 0 || y > design.m) {
            throw validation_error("y must satisfy 0 <= y <= m (got y=" + std::to_string(y) +
                                   ", m=" + std::to_string(design.m) + ")");
        }
        if (z < 0 || z > design.n) {
            throw validation_error("z must satisfy 0 <= z <= n (got z=" + std::to_string(z) +
                                   ", n=" + std::to_string(design.n) + ")");
        }
    }
};

} // namespace poolprev

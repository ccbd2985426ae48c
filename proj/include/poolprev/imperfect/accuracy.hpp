#pragma once

#include "poolprev/errors.hpp"
#include "poolprev/numerics/rational.hpp"

namespace poolprev {

/// Known test sensitivity and specificity, applied identically to individual
/// and pooled tests. Values are held exactly. se + sp must exceed 1: at
/// se + sp = 1 the likelihood is constant in prevalence and the data carry no
/// information.
struct TestAccuracy {
    Rational se{1};
    Rational sp{1};

    void validate() const {
        if (sgn(se) <= 0 || se > 1) throw validation_error("sensitivity must lie in (0, 1]");
        if (sgn(sp) <= 0 || sp > 1) throw validation_error("specificity must lie in (0, 1]");
        if (se + sp <= 1) throw validation_error("se + sp must exceed 1 (uninformative test)");
    }

    bool perfect() const { return se == 1 && sp == 1; }
};

} // namespace poolprev

#pragma once

#include <cmath>
#include <mpfr.h>

#include "poolprev/errors.hpp"

namespace poolprev {

/// Working precision for the real-valued arithmetic path, expressed in
/// significant decimal digits. Mixture weights alternate in sign and can be
/// dozens of orders of magnitude larger than their sum, so the floor of 50
/// digits is a hard requirement; the default of 200 covers every design this
/// library is intended for.
class PrecisionContext {
public:
    static constexpr int kMinDigits = 50;
    static constexpr int kDefaultDigits = 200;

    explicit PrecisionContext(int digits = kDefaultDigits) : digits_(digits) {
        if (digits < kMinDigits) {
            throw validation_error("precision must be at least " +
                                   std::to_string(kMinDigits) + " decimal digits, got " +
                                   std::to_string(digits));
        }
    }

    int digits() const { return digits_; }

    /// Binary precision handed to MPFR: enough bits for `digits` decimal
    /// digits plus a small guard.
    mpfr_prec_t bits() const {
        return static_cast<mpfr_prec_t>(std::ceil(digits_ * 3.3219280948873626)) + 16;
    }

private:
    int digits_;
};

} // namespace poolprev

#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

#include "poolprev/errors.hpp"

namespace poolprev {

/// Exact arbitrary-precision rational, always in lowest terms with a positive
/// denominator (canonicalization is guaranteed by GMP). Arithmetic never
/// rounds.
using Rational = mpq_class;

/// Exact arbitrary-precision integer.
using Int = mpz_class;

inline bool is_integer(const Rational& x) { return x.get_den() == 1; }

inline long to_long(const Rational& x) {
    if (!is_integer(x) || !x.get_num().fits_slong_p()) {
        throw std::domain_error("rational is not a representable integer: " + x.get_str());
    }
    return x.get_num().get_si();
}

// mpq_get_d truncates; round-to-nearest keeps decimal round trips like
// 9/10 -> 0.9 intact.
inline double to_double(const Rational& x) {
    mpfr_t tmp;
    mpfr_init2(tmp, 53);
    mpfr_set_q(tmp, x.get_mpq_t(), MPFR_RNDN);
    double v = mpfr_get_d(tmp, MPFR_RNDN);
    mpfr_clear(tmp);
    return v;
}

/// x^e for e >= 0, exact.
inline Rational pow_int(const Rational& x, long e) {
    if (e < 0) throw std::domain_error("pow_int requires a nonnegative exponent");
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(e));
    // num and den were already coprime, so their powers are too.
    return r;
}

/// Parses a plain decimal literal ("0.95", "-2", "1e-3", "2.5e2") into the
/// exact rational it denotes. This is how all probability-like parameters
/// enter the exact arithmetic path: 0.95 becomes 19/20, not the nearest
/// binary double.
inline Rational rational_from_decimal(std::string_view text) {
    auto fail = [&] {
        throw validation_error("not a decimal number: '" + std::string(text) + "'");
    };
    if (text.empty()) fail();

    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = (text[pos] == '-');
        ++pos;
    }

    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.') {
            if (seen_point) fail();
            seen_point = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            fail();
        }
    }
    if (!seen_digit) fail();

    long exponent = 0;
    if (pos < text.size()) { // at 'e' or 'E'
        ++pos;
        bool exp_neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_neg = (text[pos] == '-');
            ++pos;
        }
        if (pos == text.size()) fail();
        long e = 0;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c < '0' || c > '9') fail();
            e = e * 10 + (c - '0');
            if (e > 1000000) fail();
        }
        exponent = exp_neg ? -e : e;
    }

    Int numerator(digits, 10);
    if (negative) numerator = -numerator;

    long ten_power = exponent - frac_digits;
    Rational r;
    if (ten_power >= 0) {
        Int scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(ten_power));
        r = Rational(numerator * scale);
    } else {
        Int scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(-ten_power));
        r = Rational(numerator, scale);
    }
    r.canonicalize();
    return r;
}

} // namespace poolprev

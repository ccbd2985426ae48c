#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "poolprev/errors.hpp"
#include "poolprev/numerics/precision.hpp"

namespace poolprev {

/// Value-semantic MPFR float. Every value carries its own binary precision;
/// binary operations produce results at the wider of the two operand
/// precisions, so precision set at construction propagates through whole
/// computations without global state. Round-to-nearest throughout.
class Real {
public:
    Real() { mpfr_init2(v_, 64); }

    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); }

    Real(long value, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_si(v_, value, MPFR_RNDN);
    }

    Real(int value, mpfr_prec_t prec) : Real(static_cast<long>(value), prec) {}

    Real(double value, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_d(v_, value, MPFR_RNDN);
    }

    Real(const mpq_class& value, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_q(v_, value.get_mpq_t(), MPFR_RNDN);
    }

    Real(const mpz_class& value, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
    }

    Real(const Real& other) {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }

    Real(Real&& other) noexcept {
        mpfr_init2(v_, 64);
        mpfr_swap(v_, other.v_);
    }

    Real& operator=(const Real& other) {
        if (this != &other) {
            mpfr_set_prec(v_, mpfr_get_prec(other.v_));
            mpfr_set(v_, other.v_, MPFR_RNDN);
        }
        return *this;
    }

    Real& operator=(Real&& other) noexcept {
        mpfr_swap(v_, other.v_);
        return *this;
    }

    ~Real() { mpfr_clear(v_); }

    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

    mpfr_srcptr raw() const { return v_; }
    mpfr_ptr raw() { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
    bool is_integer() const { return mpfr_integer_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    std::string str(int digits = 20) const {
        char fmt[32];
        std::snprintf(fmt, sizeof(fmt), "%%.%dRg", digits);
        char* out = nullptr;
        mpfr_asprintf(&out, fmt, v_);
        std::string s(out);
        mpfr_free_str(out);
        return s;
    }

    Real operator-() const {
        Real r(precision());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

#define POOLPREV_REAL_BINOP(op, fn, fn_si)                        \
    friend Real operator op(const Real& a, const Real& b) {      \
        Real r(std::max(a.precision(), b.precision()));          \
        fn(r.v_, a.v_, b.v_, MPFR_RNDN);                         \
        return r;                                                \
    }                                                            \
    friend Real operator op(const Real& a, long b) {             \
        Real r(a.precision());                                   \
        fn_si(r.v_, a.v_, b, MPFR_RNDN);                         \
        return r;                                                \
    }                                                            \
    Real& operator op##=(const Real& b) {                        \
        if (precision() < b.precision())                         \
            *this = *this op b;                                  \
        else                                                     \
            fn(v_, v_, b.v_, MPFR_RNDN);                         \
        return *this;                                            \
    }                                                            \
    Real& operator op##=(long b) {                               \
        fn_si(v_, v_, b, MPFR_RNDN);                             \
        return *this;                                            \
    }

    POOLPREV_REAL_BINOP(+, mpfr_add, mpfr_add_si)
    POOLPREV_REAL_BINOP(-, mpfr_sub, mpfr_sub_si)
    POOLPREV_REAL_BINOP(*, mpfr_mul, mpfr_mul_si)
    POOLPREV_REAL_BINOP(/, mpfr_div, mpfr_div_si)
#undef POOLPREV_REAL_BINOP

    friend Real operator+(long a, const Real& b) { return b + a; }
    friend Real operator*(long a, const Real& b) { return b * a; }
    friend Real operator-(long a, const Real& b) {
        Real r(b.precision());
        mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(long a, const Real& b) {
        Real r(b.precision());
        mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

    friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
    friend bool operator!=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) != 0; }
    friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
    friend bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
    friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
    friend bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

private:
    mpfr_t v_;
};

inline Real abs(const Real& x) {
    Real r(x.precision());
    mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

inline Real sqrt(const Real& x) {
    Real r(x.precision());
    mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

inline Real exp(const Real& x) {
    Real r(x.precision());
    mpfr_exp(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

inline Real log(const Real& x) {
    Real r(x.precision());
    mpfr_log(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

/// log Gamma(x), x > 0.
inline Real lngamma(const Real& x) {
    if (x.sign() <= 0) throw std::domain_error("lngamma requires a positive argument");
    Real r(x.precision());
    mpfr_lngamma(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

inline Real pow(const Real& base, const Real& exponent) {
    Real r(std::max(base.precision(), exponent.precision()));
    mpfr_pow(r.raw(), base.raw(), exponent.raw(), MPFR_RNDN);
    return r;
}

inline Real pow(const Real& base, long exponent) {
    Real r(base.precision());
    mpfr_pow_si(r.raw(), base.raw(), exponent, MPFR_RNDN);
    return r;
}

} // namespace poolprev

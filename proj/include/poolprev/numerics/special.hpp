#pragma once

#include <stdexcept>

#include "poolprev/errors.hpp"
#include "poolprev/numerics/factorials.hpp"
#include "poolprev/numerics/precision.hpp"
#include "poolprev/numerics/scalar.hpp"

namespace poolprev {

/// B(a, b) for positive integer a, b: exact (a-1)!(b-1)!/(a+b-1)!.
inline Rational beta_integer(long a, long b) {
    if (a <= 0 || b <= 0) throw std::domain_error("beta function requires positive arguments");
    Rational r(FactorialCache::factorial(a - 1) * FactorialCache::factorial(b - 1),
               FactorialCache::factorial(a + b - 1));
    r.canonicalize();
    return r;
}

/// B(a, b) on the exact path. Arguments must be positive integers; anything
/// else belongs on the real path.
inline Rational beta_function(const Rational& a, const Rational& b) {
    if (sgn(a) <= 0 || sgn(b) <= 0) throw std::domain_error("beta function requires positive arguments");
    if (!is_integer(a) || !is_integer(b)) {
        throw std::domain_error("exact beta function requires integer arguments; use the real-valued overload");
    }
    return beta_integer(to_long(a), to_long(b));
}

/// B(a, b) for positive real a, b at the operands' precision. Integer
/// arguments go through the factorial table (log-gamma at high precision is
/// far more expensive than rounding three cached integers).
inline Real beta_function(const Real& a, const Real& b) {
    if (a.sign() <= 0 || b.sign() <= 0) throw std::domain_error("beta function requires positive arguments");
    if (a.is_integer() && b.is_integer() &&
        mpfr_cmp_si(a.raw(), 1L << 24) < 0 && mpfr_cmp_si(b.raw(), 1L << 24) < 0) {
        const long ia = a.to_long(), ib = b.to_long();
        const mpfr_prec_t prec = std::max(a.precision(), b.precision());
        return Real(FactorialCache::factorial(ia - 1), prec) *
               Real(FactorialCache::factorial(ib - 1), prec) /
               Real(FactorialCache::factorial(ia + ib - 1), prec);
    }
    return exp(lngamma(a) + lngamma(b) - lngamma(a + b));
}

inline Real beta_function(const Rational& a, const Rational& b, const PrecisionContext& ctx) {
    return beta_function(Real(a, ctx.bits()), Real(b, ctx.bits()));
}

namespace detail {

// I_p(a, b) for integer a, b >= 1 as the binomial tail
//   sum_{j=a}^{N} C(N, j) p^j (1-p)^(N-j),   N = a + b - 1,
// accumulated with the term ratio C(N,j)/C(N,j-1) = (N-j+1)/j. All terms are
// positive, so the loop is exact on rationals and stable on reals.
template <class T>
T reg_inc_beta_integer(const T& p, long a, long b) {
    const long n = a + b - 1;
    T one = make_like(p, 1);
    if (sign(p) == 0) return make_like(p, 0);
    if (p == one) return one;

    T q = one - p;
    T ratio = p / q;
    T term = make_like(p, Rational(binomial_int(n, a))) * pow_int(p, a) * pow_int(q, n - a);
    T total = term;
    for (long j = a + 1; j <= n; ++j) {
        term *= ratio;
        term *= n - j + 1;
        term /= j;
        total += term;
    }
    return total;
}

// Continued fraction for the incomplete beta (modified Lentz), evaluated at
// the precision carried by x. Converges for x < (a+1)/(a+b+2); callers use
// the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) for the other half.
inline Real inc_beta_cf(const Real& a, const Real& b, const Real& x) {
    const mpfr_prec_t prec = x.precision();
    Real eps(1, prec);
    mpfr_div_2ui(eps.raw(), eps.raw(), static_cast<unsigned long>(prec - 8), MPFR_RNDN);
    Real tiny(1, prec);
    mpfr_div_2ui(tiny.raw(), tiny.raw(), static_cast<unsigned long>(4 * prec), MPFR_RNDN);

    Real one(1, prec);
    Real qab = a + b, qap = a + 1, qam = a - 1;
    Real c = one;
    Real d = one - qab * x / qap;
    if (abs(d) < tiny) d = tiny;
    d = one / d;
    Real h = d;

    const long max_iter = 20000 + 60L * static_cast<long>(prec);
    for (long m = 1; m <= max_iter; ++m) {
        const long m2 = 2 * m;
        Real aa = (m * (b - m)) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if (abs(d) < tiny) d = tiny;
        c = one + aa / c;
        if (abs(c) < tiny) c = tiny;
        d = one / d;
        h *= d * c;

        aa = -((a + m) * (qab + m)) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if (abs(d) < tiny) d = tiny;
        c = one + aa / c;
        if (abs(c) < tiny) c = tiny;
        d = one / d;
        Real delta = d * c;
        h *= delta;
        if (abs(delta - one) < eps) return h;
    }
    throw precision_error("incomplete beta continued fraction did not converge");
}

} // namespace detail

/// Regularized incomplete beta I_p(a, b) for positive integer a, b; exact
/// when p is rational.
inline Rational regularized_incomplete_beta(const Rational& p, long a, long b) {
    if (a <= 0 || b <= 0) throw std::domain_error("incomplete beta requires positive parameters");
    if (sgn(p) < 0 || p > 1) throw std::domain_error("incomplete beta requires p in [0, 1]");
    return detail::reg_inc_beta_integer(p, a, b);
}

/// Regularized incomplete beta for positive real parameters at the operands'
/// precision. Integer-valued parameters take the finite-sum path; otherwise a
/// continued fraction is used.
inline Real regularized_incomplete_beta(const Real& p, const Real& a, const Real& b) {
    if (a.sign() <= 0 || b.sign() <= 0) throw std::domain_error("incomplete beta requires positive parameters");
    if (p.sign() < 0 || p > 1) throw std::domain_error("incomplete beta requires p in [0, 1]");

    Real one = make_like(p, 1);
    if (p.sign() == 0) return make_like(p, 0);
    if (p == one) return one;

    if (a.is_integer() && b.is_integer() &&
        mpfr_cmp_si(a.raw(), 1L << 24) < 0 && mpfr_cmp_si(b.raw(), 1L << 24) < 0) {
        return detail::reg_inc_beta_integer(p, a.to_long(), b.to_long());
    }

    // front factor x^a (1-x)^b / (a B(a,b))
    Real q = one - p;
    Real front = exp(a * log(p) + b * log(q) - lngamma(a) - lngamma(b) + lngamma(a + b));
    if (p * (a + b + 2) < a + 1) {
        return front * detail::inc_beta_cf(a, b, p) / a;
    }
    return one - front * detail::inc_beta_cf(b, a, q) / b;
}

/// Unnormalized lower incomplete beta: integral of t^(a-1)(1-t)^(b-1) over
/// [0, p], i.e. B(a, b) * I_p(a, b).
inline Rational lower_incomplete_beta(const Rational& p, const Rational& a, const Rational& b) {
    return beta_function(a, b) * regularized_incomplete_beta(p, to_long(a), to_long(b));
}

inline Real lower_incomplete_beta(const Real& p, const Real& a, const Real& b) {
    return beta_function(a, b) * regularized_incomplete_beta(p, a, b);
}

} // namespace poolprev

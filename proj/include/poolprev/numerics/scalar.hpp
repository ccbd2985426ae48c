#pragma once

#include "poolprev/numerics/rational.hpp"
#include "poolprev/numerics/real.hpp"

namespace poolprev {

// Uniform construction and inspection helpers so mixture code can be written
// once for both arithmetic paths. `make_like` copies the prototype's
// precision on the real path and is a plain constructor on the exact path.

inline Rational make_like(const Rational&, long v) { return Rational(v); }
inline Rational make_like(const Rational&, int v) { return Rational(v); }
inline Rational make_like(const Rational&, const Rational& v) { return v; }
inline Real make_like(const Real& proto, long v) { return Real(v, proto.precision()); }
inline Real make_like(const Real& proto, int v) { return Real(v, proto.precision()); }
inline Real make_like(const Real& proto, const Rational& v) { return Real(v, proto.precision()); }
inline Real make_like(const Real& proto, double v) { return Real(v, proto.precision()); }

inline bool is_integer(const Real& x) { return x.is_integer(); }

inline long to_long(const Real& x) {
    if (!x.is_integer()) throw std::domain_error("real value is not an integer");
    return x.to_long();
}

inline double to_double(const Real& x) { return x.to_double(); }

/// Power with an exact integer exponent; 0^0 = 1 on both paths.
inline Real pow_int(const Real& x, long e) { return pow(x, e); }

/// base^exponent where the exponent is a distribution parameter (integral on
/// the exact path, arbitrary positive real on the real path).
inline Rational pow_param(const Rational& base, const Rational& exponent) {
    return pow_int(base, to_long(exponent));
}
inline Real pow_param(const Real& base, const Real& exponent) {
    if (exponent.is_integer()) return pow(base, exponent.to_long());
    return pow(base, exponent);
}

inline int sign(const Rational& x) { return sgn(x); }
inline int sign(const Real& x) { return x.sign(); }

} // namespace poolprev

#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "poolprev/errors.hpp"
#include "poolprev/numerics/precision.hpp"
#include "poolprev/numerics/scalar.hpp"
#include "poolprev/numerics/special.hpp"

namespace poolprev {

/// One signed monomial term: weight * p^(a-1) * (1-p)^(b-1).
template <class T>
struct MixtureTerm {
    T a;
    T b;
    T weight;
};

/// Posterior distribution for prevalence: a normalized, signed, weighted sum
/// of beta-density kernels. Instantiated with Rational (exact path, integer
/// prior parameters) or Real (configurable-precision path). Immutable after
/// construction; all evaluation functions are pure.
template <class T>
class BetaMixture {
public:
    /// Canonicalizes the term list (sorted by (a, b), coinciding pairs merged,
    /// zero weights dropped) and computes the normalizer sum(w * B(a, b)).
    BetaMixture(std::vector<MixtureTerm<T>> terms, T gamma, T delta)
        : terms_(std::move(terms)), gamma_(std::move(gamma)), delta_(std::move(delta)) {
        canonicalize();
        normalizer_ = make_like(gamma_, 0);
        for (const auto& t : terms_) {
            normalizer_ += t.weight * beta_function(t.a, t.b);
        }
        check_normalizer();
    }

    /// Same, with a caller-supplied normalizer that must equal
    /// sum(w * B(a, b)); used when converting from the exact path, where the
    /// alternating sum is already known exactly.
    BetaMixture(std::vector<MixtureTerm<T>> terms, T gamma, T delta, T normalizer)
        : terms_(std::move(terms)),
          gamma_(std::move(gamma)),
          delta_(std::move(delta)),
          normalizer_(std::move(normalizer)) {
        canonicalize();
        check_normalizer();
    }

    const std::vector<MixtureTerm<T>>& terms() const { return terms_; }
    const T& normalizer() const { return normalizer_; }
    const T& gamma() const { return gamma_; }
    const T& delta() const { return delta_; }
    std::size_t component_count() const { return terms_.size(); }

private:
    void canonicalize() {
        if (terms_.empty()) throw validation_error("posterior mixture has no components");
        for (const auto& t : terms_) {
            if (sign(t.a) <= 0 || sign(t.b) <= 0) {
                throw validation_error("mixture component parameters must be positive");
            }
        }
        std::sort(terms_.begin(), terms_.end(), [](const MixtureTerm<T>& x, const MixtureTerm<T>& y) {
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });
        std::vector<MixtureTerm<T>> merged;
        merged.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!merged.empty() && merged.back().a == t.a && merged.back().b == t.b) {
                merged.back().weight += t.weight;
            } else {
                merged.push_back(std::move(t));
            }
        }
        std::erase_if(merged, [](const MixtureTerm<T>& t) { return sign(t.weight) == 0; });
        if (merged.empty()) throw validation_error("posterior mixture cancelled to zero");
        terms_ = std::move(merged);
    }

    void check_normalizer() {
        if (!(sign(normalizer_) > 0)) {
            throw precision_error(
                "posterior normalizer is not positive; the arithmetic precision is "
                "insufficient for this design (raise the digit count)");
        }
    }

    std::vector<MixtureTerm<T>> terms_;
    T gamma_;
    T delta_;
    T normalizer_;
};

/// Converts an exact mixture to the real path at the context precision. The
/// exact normalizer is carried over (rounded once) rather than recomputed, so
/// no cancellation occurs in the conversion.
inline BetaMixture<Real> to_real(const BetaMixture<Rational>& mix, const PrecisionContext& ctx) {
    const mpfr_prec_t prec = ctx.bits();
    std::vector<MixtureTerm<Real>> terms;
    terms.reserve(mix.terms().size());
    for (const auto& t : mix.terms()) {
        terms.push_back({Real(t.a, prec), Real(t.b, prec), Real(t.weight, prec)});
    }
    return BetaMixture<Real>(std::move(terms), Real(mix.gamma(), prec), Real(mix.delta(), prec),
                             Real(mix.normalizer(), prec));
}

namespace detail {

template <class T>
void check_probability(const T& p) {
    if (sign(p) < 0 || p > make_like(p, 1)) {
        throw std::domain_error("probability argument must lie in [0, 1]");
    }
}

} // namespace detail

/// Posterior density at p.
template <class T>
T pdf(const BetaMixture<T>& mix, const T& p) {
    detail::check_probability(p);
    T q = make_like(p, 1) - p;
    T total = make_like(p, 0);
    for (const auto& t : mix.terms()) {
        total += t.weight * pow_param(p, t.a - 1) * pow_param(q, t.b - 1);
    }
    return total / mix.normalizer();
}

/// Posterior CDF at p: sum of w * B(a, b) * I_p(a, b) over components,
/// normalized. Components sharing the first parameter are evaluated with the
/// stable upward recurrence
///     J(a, b+1) = (b * J(a, b) + p^a (1-p)^b) / (a + b),
/// where J(a, b) = B(a, b) I_p(a, b), so a group costs one direct incomplete
/// beta plus one O(1) step per unit of b, instead of one tail sum per
/// component.
template <class T>
T cdf(const BetaMixture<T>& mix, const T& p) {
    detail::check_probability(p);
    const auto& terms = mix.terms();
    const T one = make_like(p, 1);
    const T q = one - p;
    T total = make_like(p, 0);

    std::size_t i = 0;
    while (i < terms.size()) {
        const T& a = terms[i].a;
        T b = terms[i].b;
        T lower = lower_incomplete_beta(p, a, b);
        // p^a (1-p)^b, advanced alongside b
        T edge = pow_param(p, a) * pow_param(q, b);
        total += terms[i].weight * lower;

        std::size_t j = i + 1;
        for (; j < terms.size() && terms[j].a == a; ++j) {
            T diff = terms[j].b - b;
            if (is_integer(diff) && sign(diff) > 0) {
                for (long s = to_long(diff); s > 0; --s) {
                    lower = (b * lower + edge) / (a + b);
                    edge *= q;
                    b += 1;
                }
            } else {
                b = terms[j].b;
                lower = lower_incomplete_beta(p, a, b);
                edge = pow_param(p, a) * pow_param(q, b);
            }
            total += terms[j].weight * lower;
        }
        i = j;
    }
    return total / mix.normalizer();
}

/// k-th raw moment E[P^k], k >= 1. The component moment is the usual product
/// prod_{j=0}^{k-1} (a+j)/(a+b+j); exact on the rational path.
template <class T>
T raw_moment(const BetaMixture<T>& mix, int k) {
    if (k < 1) throw std::domain_error("moment order must be at least 1");
    T total = make_like(mix.normalizer(), 0);
    for (const auto& t : mix.terms()) {
        T factor = beta_function(t.a, t.b);
        for (int j = 0; j < k; ++j) {
            factor *= (t.a + j) / (t.a + t.b + j);
        }
        total += t.weight * factor;
    }
    return total / mix.normalizer();
}

template <class T>
T mean(const BetaMixture<T>& mix) {
    return raw_moment(mix, 1);
}

template <class T>
T variance(const BetaMixture<T>& mix) {
    T mu = mean(mix);
    return raw_moment(mix, 2) - mu * mu;
}

} // namespace poolprev

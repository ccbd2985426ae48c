#pragma once

#include <mutex>
#include <stdexcept>
#include <vector>

#include "poolprev/numerics/rational.hpp"

namespace poolprev {

/// Process-wide factorial table. Posterior construction is dominated by
/// factorial lookups with arguments up to roughly (number of tests) * q, so
/// values are computed once and shared. Growth is mutex-guarded; the table
/// may also be pre-populated with warm_up() before spawning workers.
class FactorialCache {
public:
    static Int factorial(long n) {
        if (n < 0) throw std::domain_error("factorial of a negative number");
        std::lock_guard<std::mutex> lock(mutex());
        auto& tab = table();
        while (static_cast<long>(tab.size()) <= n) {
            tab.push_back(tab.back() * static_cast<long>(tab.size()));
        }
        return tab[static_cast<std::size_t>(n)];
    }

    static void warm_up(long n) { factorial(n); }

private:
    static std::mutex& mutex() {
        static std::mutex m;
        return m;
    }
    static std::vector<Int>& table() {
        static std::vector<Int> t{Int(1)};
        return t;
    }
};

/// C(n, k) as an exact integer. Requires 0 <= k <= n.
inline Int binomial_int(long n, long k) {
    if (n < 0 || k < 0) throw std::domain_error("binomial coefficient with negative argument");
    if (k > n) throw std::domain_error("binomial coefficient with k > n");
    return FactorialCache::factorial(n) /
           (FactorialCache::factorial(k) * FactorialCache::factorial(n - k));
}

/// C(n, k) on the exact rational path.
inline Rational binomial_coefficient(long n, long k) { return Rational(binomial_int(n, k)); }

} // namespace poolprev

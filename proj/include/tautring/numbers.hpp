#pragma once

#include <map>
#include <vector>

#include "tautring/rational.hpp"

namespace tautring {

// Bernoulli numbers with the B_1 = -1/2 convention (B_2 = 1/6, B_4 = -1/30),
// by the standard recurrence sum_{j=0}^{m} C(m+1,j) B_j = 0.
inline Rat bernoulli(int n) {
    if (n < 0) throw Error("OutOfRange", "negative Bernoulli index");
    static std::vector<Rat> cache = {Rat(1)};
    for (int m = static_cast<int>(cache.size()); m <= n; ++m) {
        Rat s(0);
        for (int j = 0; j < m; ++j)
            s += Rat(binomial(m + 1, j)) * cache[j];
        cache.push_back(-s / Rat(m + 1));
    }
    return cache[n];
}

// sigma_r(n) = sum of r-th powers of the divisors of n.
inline mpz_class sigma(int r, long n) {
    if (n <= 0) throw Error("OutOfRange", "sigma of non-positive integer");
    mpz_class s = 0;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        mpz_class a, b;
        mpz_ui_pow_ui(a.get_mpz_t(), d, r);
        s += a;
        long e = n / d;
        if (e != d) {
            mpz_ui_pow_ui(b.get_mpz_t(), e, r);
            s += b;
        }
    }
    return s;
}

inline std::vector<long> prime_divisors(long n) {
    std::vector<long> ps;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        ps.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

}  // namespace tautring

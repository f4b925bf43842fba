#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "errors.hpp"

namespace fe {

using Integer = mpz_class;
using Rational = mpq_class;  // mpq_class keeps itself canonical after every op

// mpq_class(a, b) does not canonicalize; always build fractions through this.
inline Rational frac(const Integer& a, const Integer& b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}
inline Rational frac(long a, long b) { return frac(Integer(a), Integer(b)); }

inline Rational parse_rational(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw ParseError("bad rational: " + s);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Integer binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

inline Integer factorial(long n) {
    Integer r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

inline Integer double_factorial(long n) {
    Integer r = 1;
    for (long i = n; i > 1; i -= 2) r *= i;
    return r;
}

// Exact Bernoulli numbers B_0..B_n (B_1 = -1/2).
inline const Rational& bernoulli(int n) {
    static std::vector<Rational> cache{Rational(1)};
    while (static_cast<int>(cache.size()) <= n) {
        const int m = static_cast<int>(cache.size());
        Rational s = 0;
        for (int k = 0; k < m; ++k) s += Rational(binomial(m + 1, k)) * cache[k];
        cache.push_back(-s / (m + 1));
    }
    return cache[n];
}

// σ_k(n) for n = 0..N-1 via a divisor sieve (entry 0 unused).
inline std::vector<Integer> sigma_table(unsigned k, long N) {
    std::vector<Integer> s(N > 0 ? N : 0);
    for (long d = 1; d < N; ++d) {
        Integer dk;
        mpz_ui_pow_ui(dk.get_mpz_t(), static_cast<unsigned long>(d), k);
        for (long m = d; m < N; m += d) s[m] += dk;
    }
    return s;
}

inline Integer sigma(unsigned k, long n) {
    Integer s = 0, dk;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        mpz_ui_pow_ui(dk.get_mpz_t(), d, k);
        s += dk;
        long e = n / d;
        if (e != d) {
            mpz_ui_pow_ui(dk.get_mpz_t(), e, k);
            s += dk;
        }
    }
    return s;
}

}  // namespace fe

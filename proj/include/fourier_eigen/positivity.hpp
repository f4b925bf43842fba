#pragma once

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "real.hpp"
#include "recurrence.hpp"

namespace fe {

inline Rational mu(int w) {
    if (w < 8 || w % 2 != 0) throw BadWeight("mu needs an even weight >= 8, got " + std::to_string(w));
    const long m = w % 4 == 0 ? w / 4 - 2 : (w - 10) / 4;
    Integer p80;
    mpz_ui_pow_ui(p80.get_mpz_t(), 80, static_cast<unsigned long>(m));
    const Integer den = p80 * double_factorial(w - 7) * double_factorial(w % 4 == 0 ? w / 2 - 1 : w / 2 - 4);
    return frac(3 * factorial(m), den);
}

// dimension of the cusp forms of weight k for SL2(Z)
inline int cusp_dimension(int k) {
    if (k < 12 || k % 2 != 0) return 0;
    const int m = k % 12 == 2 ? k / 12 : k / 12 + 1;
    return m - 1;
}

struct Decomposition {
    int w = 0;
    Rational eisenstein_scale;  // coefficient of E''_{w-4}
    QSeries alpha_cusp, beta_cusp, gamma_cusp;
    std::vector<Rational> constants;  // constant terms of A, B, C
};

inline Decomposition decompose(const WeightIndexedForm& fw) {
    if (fw.key.kind != Kind::F) throw DecompositionFailure("decomposition is defined on the f family");
    const int w = fw.w;
    const QuasiForm& f = fw.f;
    const long T = f.A.trunc2();
    Decomposition d;
    d.w = w;
    d.constants = {f.A.coeff(0), f.B.coeff(0), f.C.coeff(0)};
    const long W = w;
    const QSeries alpha = f.C * frac(144, (W - 3) * (W - 4));
    const QSeries beta = (f.B - serre(f.C, w - 4) * frac(24, W - 4)) * frac(12, W - 2);
    const QSeries E4 = gen_for(Gen::E4, f.C);
    const QSeries gamma = f.A - serre(f.B, w - 2) * frac(12, W - 2) + E4 * f.C * frac(1, W - 3) +
                          serre(serre(f.C, w - 4), w - 2) * frac(144, (W - 2) * (W - 3));
    d.eisenstein_scale = alpha.coeff(0);
    const QSeries E = eisenstein(w - 4, partner_trunc(alpha));
    d.alpha_cusp = (alpha - E * d.eisenstein_scale).truncated(T);
    d.beta_cusp = beta.truncated(T);
    d.gamma_cusp = gamma.truncated(T);
    if (d.beta_cusp.coeff(0) != 0 || d.gamma_cusp.coeff(0) != 0)
        throw DecompositionFailure("beta or gamma has a constant term at w=" + std::to_string(w));
    const QSeries re = (E * d.eisenstein_scale + d.alpha_cusp).derive(2) + d.beta_cusp.derive() + d.gamma_cusp;
    if (!(re.truncated(T) - f.collapse().truncated(T)).is_zero())
        throw DecompositionFailure("reassembly mismatch at w=" + std::to_string(w));
    return d;
}

// Explicit Jenkins-Rouse constant for a cusp form g of weight w, rounded upward.
inline Real jenkins_rouse(const QSeries& g, int w, int ell_dim) {
    if (g.is_zero() || ell_dim == 0) return Real(0L);
    const auto U = MPFR_RNDU, D = MPFR_RNDD;
    Real s2(0L);
    Real lo(0L), hi(0L);  // enclosure of sum g(m) e^{-7.288 m}
    const Real c7288 = Real(frac(7288, 1000));
    for (int m = 1; m <= ell_dim; ++m) {
        const Rational gm = g.coeff(m);
        const Real a2 = Real(gm * gm, U);
        s2 = add(s2, div(a2, pow(Real(static_cast<long>(m)), static_cast<long>(w - 1), D), U), U);
        if (gm == 0) continue;
        const Real x = Real(static_cast<long>(m)) * c7288;
        const Real eu = exp(-x, U), ed = exp(-x, D);
        if (gm > 0) {
            lo = add(lo, mul(Real(gm, D), ed, D), D);
            hi = add(hi, mul(Real(gm, U), eu, U), U);
        } else {
            lo = add(lo, mul(Real(gm, D), eu, D), D);
            hi = add(hi, mul(Real(gm, U), ed, U), U);
        }
    }
    const Real absum = std::max(abs(lo), abs(hi));
    const Real W = Real(static_cast<long>(w));
    // e^{18.72} 41.41^{w/2} / w^{(w-1)/2}
    const Real big = div(mul(exp(Real(frac(1872, 100)), U), pow(Real(frac(4141, 100)), Real(frac(w, 2)), U), U),
                         pow(W, Real(frac(w - 1, 2)), D), U);
    const Real inner = add(mul(Real(11L), sqrt(s2, U), U), mul(big, absum, U), U);
    return mul(sqrt(log(W, U), U), inner, U);
}

// Bound constant for the coefficients of a cusp form of weight k. In a one-dimensional
// space the form is a multiple of a normalized Hecke eigenform and Deligne's bound applies
// with constant |g(1)|; otherwise Jenkins-Rouse.
inline Real cusp_constant(const QSeries& g, int k) {
    const int dim = cusp_dimension(k);
    if (dim == 0 || g.is_zero()) return Real(0L);
    if (dim == 1) return Real(abs(g.coeff(1)), MPFR_RNDU);
    return jenkins_rouse(g, k, dim);
}

struct Threshold {
    long n0 = 1;
    Real C_alpha, C_beta, C_gamma;
    Real K;  // leading Eisenstein factor
};

// least n0 with K n^{w-3} > 2 C n^{w/2} for all n >= n0
inline Threshold threshold(int w, const Decomposition& d) {
    Threshold t;
    const auto U = MPFR_RNDU, D = MPFR_RNDD;
    t.C_alpha = cusp_constant(d.alpha_cusp, w - 4);
    t.C_beta = cusp_constant(d.beta_cusp, w - 2);
    t.C_gamma = cusp_constant(d.gamma_cusp, w);
    const Rational Kq = -d.eisenstein_scale * Rational(2 * (w - 4)) / bernoulli(w - 4);
    if (Kq <= 0) throw DecompositionFailure("Eisenstein part is not positive at w=" + std::to_string(w));
    t.K = Real(Kq, D);
    const Real C = add(add(t.C_alpha, t.C_beta, U), t.C_gamma, U);
    if (C.is_zero()) {
        t.n0 = 1;
        return t;
    }
    const Real x = pow(div(mul(Real(2L), C, U), t.K, U), Real(frac(2, w - 6)), U);
    t.n0 = std::max<long>(1, x.to_long_ceil() + 1);
    return t;
}

inline long first_claimed_index(int w) { return w % 4 == 0 ? w / 4 - 1 : (w - 6) / 4; }

struct PositivityReport {
    int w = 0;
    long threshold_n = 0;
    long scanned_to = 0;
    std::optional<long> first_nonpositive;
    std::string verdict;
};

// Sign check of the coefficients of f from the first claimed index to up_to.
inline PositivityReport scan(const QSeries& f, int w, long up_to, long threshold_n) {
    PositivityReport r;
    r.w = w;
    r.threshold_n = threshold_n;
    r.scanned_to = std::min(up_to, f.trunc() - 1);
    for (long n = first_claimed_index(w); n <= r.scanned_to; ++n)
        if (f.coeff(n) <= 0) {
            r.first_nonpositive = n;
            break;
        }
    if (r.first_nonpositive)
        r.verdict = "nonpositive coefficient";
    else if (r.scanned_to >= threshold_n)
        r.verdict = "positive";
    else
        r.verdict = "inconclusive";
    return r;
}

inline PositivityReport positivity(int w, std::optional<long> up_to = std::nullopt) {
    const WeightIndexedForm small = family_member(Kind::F, w, 2 * (w / 4) + 12);
    const Threshold t = threshold(w, decompose(small));
    const long n = std::max(up_to ? *up_to : t.n0, t.n0);
    const WeightIndexedForm big = family_member(Kind::F, w, n + 2);
    return scan(big.f.collapse(), w, n, t.n0);
}

}  // namespace fe

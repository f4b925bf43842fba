#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "linalg.hpp"
#include "polynomial.hpp"
#include "psi.hpp"

namespace fe {

struct MinusParams {
    int d = 0, ell = 0, k = 0, b_k = 0, n = 0, n_minus = 0;
    bool extra_dof = false;
    std::array<int, 3> degrees{};  // deg X, Y, Z (negative: zero polynomial)
};

inline MinusParams minus_params(int d) {
    if (d < 4 || d % 4 != 0) throw BadDimension("dimension must be a positive multiple of 4, got " + std::to_string(d));
    static const int b_table[6] = {3, 3, 5, 5, 7, 7};
    MinusParams p;
    p.d = d;
    p.ell = (d - 4 + 23) / 24;
    p.k = 6 * p.ell - (d - 4) / 4;
    p.b_k = b_table[p.k];
    const int num = 2 * p.ell - p.b_k;  // ceil(num / 4)
    p.n = num >= 0 ? (num + 3) / 4 : -((-num) / 4);
    p.n_minus = d / 16 + 1;
    const int r = d % 48;
    p.extra_dof = r == 0 || r == 4 || r == 16 || r == 20 || r == 32 || r == 36;
    const int n = p.n;
    switch (p.k) {
        case 0: p.degrees = {n, n, n - 1}; break;
        case 1: p.degrees = {n - 1, n, n}; break;
        case 2:
        case 3: p.degrees = {n, n + 1, n}; break;
        default: p.degrees = {n, n + 2, n + 1}; break;
    }
    return p;
}

struct MinusSolution {
    MinusParams params;
    Poly X, Y, Z;
    QSeries f_series;      // omega_k X(j) / Delta^ell
    QSeries omega_series;  // (chi1 Y(j) + chi2 Z(j)) / Delta^ell
    QSeries psiS_series;   // z^{d/2-2} psi(Sz)
    std::vector<IntVector> relaxed_kernel;
    bool origin_constrained = false;
    long N = 0;
};

// Reduce a polynomial in lambda to degree <= 5 with coefficients in Q[j],
// using the minimal polynomial of lambda over Q(j) (with j normalized by 256).
inline std::vector<Poly> reduce_lambda_powers(const std::vector<Poly>& p) {
    std::vector<Poly> c = p;
    const Poly J = Poly(std::vector<Rational>{0, frac(1, 256)});
    const Poly one = Poly::from_ints({1});
    const Poly six_m = one * Rational(6) - J, seven_m = one * Rational(7) - J * Rational(2);
    for (std::size_t m = c.size(); m-- > 6;) {
        const Poly t = c[m];
        c[m] = Poly();
        if (t.is_zero()) continue;
        c[m - 1] = c[m - 1] + t * Rational(3);
        c[m - 2] = c[m - 2] - six_m * t;
        c[m - 3] = c[m - 3] + seven_m * t;
        c[m - 4] = c[m - 4] - six_m * t;
        c[m - 5] = c[m - 5] + t * Rational(3);
        c[m - 6] = c[m - 6] - t;
    }
    c.resize(6);
    return c;
}

inline std::vector<Poly> reduce_lambda_powers(const std::vector<Rational>& p) {
    std::vector<Poly> c;
    for (const auto& v : p) c.push_back(Poly(std::vector<Rational>{v}));
    return reduce_lambda_powers(c);
}

// z^{-2k} chi_i(Sz) as a q^{1/2}-series: lambda -> 1 - lambda, theta00^4 -> -theta00^4.
inline QSeries chi_S(int i, int k, long N) {
    const ChiShape sh = chi_shape(i, k);
    const long M = N + 6;
    const QSeries lam = gen(Gen::Lambda, M);
    const QSeries one = QSeries::constant(1, M);
    const QSeries mu = one - lam;
    QSeries num = QSeries::zero(0, 2 * M, 1), p = one;
    for (std::size_t e = 0; e < sh.num.size(); ++e) {
        if (sh.num[e]) num += p * Rational(sh.num[e]);
        p = p * mu;
    }
    QSeries r = num;
    if (sh.a) r = r * mu.pow(-sh.a);
    if (sh.b) r = r * lam.pow(-sh.b);
    if (k) r = r * gen(Gen::Theta00_4, M).pow(k);
    if (k % 2) r = -r;
    return r.truncated(2 * N);
}

// z^{-2k}(X(j) omega_k(Sz) log lambda(Sz) + chi1(Sz) Y(j) + chi2(Sz) Z(j))
inline QSeries s_transform_minus(int k, const Poly& X, const Poly& Y, const Poly& Z, long N) {
    const long T = N + std::max({X.degree(), Y.degree(), Z.degree(), 0}) + 4;
    const QSeries J = gen(Gen::J, T), one = QSeries::constant(1, T);
    QSeries r = QSeries::zero(0, 2 * N, 1);
    if (!X.is_zero()) r += omega_m(k, T) * X.eval(J, one) * log_lambda_S(T);
    if (!Y.is_zero()) r += chi_S(1, k, T) * Y.eval(J, one);
    if (!Z.is_zero()) r += chi_S(2, k, T) * Z.eval(J, one);
    return r.truncated(2 * N);
}

struct ChiCheck {
    int k = 0;
    std::vector<IdentityResult> results;
    bool independent = false;
};

// chi(z) - chi(Tz) - z^{-2k} chi(Sz) = 0 for both basis functions, and independence.
inline ChiCheck chi_functional_check(int k, long N, const std::optional<QSeries>& chi1_override = std::nullopt) {
    if (k < 0 || k > 5) throw InvalidId("chi index out of range");
    ChiCheck out;
    out.k = k;
    const QSeries c1 = chi1_override ? *chi1_override : chi_series(1, k, N);
    const QSeries c2 = chi_series(2, k, N);
    require_zero(out.results, "chi1 functional equation", c1 - c1.t_action() - chi_S(1, k, N));
    require_zero(out.results, "chi2 functional equation", c2 - c2.t_action() - chi_S(2, k, N));
    out.independent = !ratio(c1, c2).has_value();
    if (!out.independent) throw IdentityViolation("chi basis for k=" + std::to_string(k) + " is degenerate");
    return out;
}

namespace detail {

// Per unknown: level-one log coefficient, Gamma(2) part, S-side image.
struct MinusBasis {
    std::vector<QSeries> f_cols, om_cols, s_cols;
    std::size_t nx = 0, ny = 0, nz = 0;
};

inline MinusBasis minus_basis(const MinusParams& p, long T) {
    const QSeries J = gen(Gen::J, T), one = QSeries::constant(1, T);
    const QSeries w = omega_m(p.k, T), L = log_lambda_S(T);
    const QSeries c1 = chi_series(1, p.k, T), c2 = chi_series(2, p.k, T);
    const QSeries s1 = chi_S(1, p.k, T), s2 = chi_S(2, p.k, T);
    const QSeries zero = QSeries::zero(0, 2 * T, 1);
    MinusBasis b;
    std::vector<QSeries> jp{one};
    const int maxdeg = std::max({p.degrees[0], p.degrees[1], p.degrees[2], 0});
    for (int i = 1; i <= maxdeg; ++i) jp.push_back(jp.back() * J);
    for (int i = 0; i <= p.degrees[0]; ++i) {
        const QSeries t = w * jp[i];
        b.f_cols.push_back(t);
        b.om_cols.push_back(zero);
        b.s_cols.push_back(t * L);
    }
    for (int i = 0; i <= p.degrees[1]; ++i) {
        b.f_cols.push_back(zero);
        b.om_cols.push_back(c1 * jp[i]);
        b.s_cols.push_back(s1 * jp[i]);
    }
    for (int i = 0; i <= p.degrees[2]; ++i) {
        b.f_cols.push_back(zero);
        b.om_cols.push_back(c2 * jp[i]);
        b.s_cols.push_back(s2 * jp[i]);
    }
    b.nx = static_cast<std::size_t>(std::max(p.degrees[0] + 1, 0));
    b.ny = static_cast<std::size_t>(std::max(p.degrees[1] + 1, 0));
    b.nz = static_cast<std::size_t>(std::max(p.degrees[2] + 1, 0));
    return b;
}

inline long min_lo2(const std::vector<QSeries>& v) {
    long lo = 0;
    for (const auto& s : v) lo = std::min(lo, s.lo2());
    return lo;
}

// order2: S-side must vanish below this half-unit exponent
inline std::vector<IntVector> minus_kernel(const MinusParams& p, const MinusBasis& b, long order2) {
    const std::size_t cols = b.f_cols.size();
    std::vector<std::vector<Rational>> M;
    auto add_rows = [&](const std::vector<QSeries>& src, long lo2, long below2, std::size_t from, std::size_t to) {
        for (long e2 = lo2; e2 < below2; ++e2) {
            std::vector<Rational> row(cols, Rational(0));
            bool any = false;
            for (std::size_t i = from; i < to; ++i) {
                if (e2 < src[i].lo2()) continue;
                row[i] = src[i].coeff2(e2);
                any = any || row[i] != 0;
            }
            if (any) M.push_back(std::move(row));
        }
    };
    // The separate S-side pole bounds on the chi1 and chi2 parts only motivate the
    // degree table; imposed literally they are infeasible for n = -1, so they are not rows.
    add_rows(b.f_cols, min_lo2(b.f_cols), -2L * p.n, 0, cols);
    add_rows(b.om_cols, min_lo2(b.om_cols), -2L * p.n - 2, 0, cols);
    add_rows(b.s_cols, min_lo2(b.s_cols), order2, 0, cols);
    return kernel(M, cols);
}

// primitive; first nonzero among (leading X, leading Y) positive
inline void normalize_minus(IntVector& x, const MinusParams& p, const MinusBasis& b) {
    make_primitive(x);
    int s = 0;
    if (b.nx && x[b.nx - 1] != 0) s = sgn(x[b.nx - 1]);
    if (!s && b.ny && x[b.nx + b.ny - 1] != 0) s = sgn(x[b.nx + b.ny - 1]);
    if (!s)
        for (const auto& v : x)
            if (v != 0) { s = sgn(v); break; }
    if (s < 0)
        for (auto& v : x) v = -v;
    (void)p;
}

inline void split_xyz(const MinusBasis& b, const IntVector& x, Poly& X, Poly& Y, Poly& Z) {
    std::size_t at = 0;
    auto take = [&](std::size_t n) {
        std::vector<Rational> c;
        for (std::size_t i = 0; i < n; ++i) c.emplace_back(x[at++]);
        return Poly(c);
    };
    X = take(b.nx);
    Y = take(b.ny);
    Z = take(b.nz);
}

inline void fill_minus_series(MinusSolution& sol, long N) {
    const MinusParams& p = sol.params;
    const long T = N + p.ell + std::max(p.n, 0) + std::max({p.degrees[0], p.degrees[1], p.degrees[2], 0}) + 8;
    const QSeries J = gen(Gen::J, T), one = QSeries::constant(1, T);
    const QSeries Dinv = gen(Gen::Delta, T + 2).pow(-p.ell);
    QSeries f = QSeries::zero(0, 2 * T, 2), om = QSeries::zero(0, 2 * T, 1);
    if (!sol.X.is_zero()) f = omega_m(p.k, T) * sol.X.eval(J, one);
    if (!sol.Y.is_zero()) om += chi_series(1, p.k, T) * sol.Y.eval(J, one);
    if (!sol.Z.is_zero()) om += chi_series(2, p.k, T) * sol.Z.eval(J, one);
    sol.f_series = (f * Dinv).truncated(2 * N);
    sol.omega_series = (om * Dinv).truncated(2 * N);
    sol.psiS_series = (s_transform_minus(p.k, sol.X, sol.Y, sol.Z, T) * Dinv).truncated(2 * N);
    if (sol.f_series.trunc2() < 2 * N || sol.omega_series.trunc2() < 2 * N || sol.psiS_series.trunc2() < 2 * N)
        throw TruncationTooSmall("minus solver: series lost precision");
    sol.N = N;
}

}  // namespace detail

inline MinusSolution solve_minus(int d, long N = 64) {
    const MinusParams p = minus_params(d);
    const long full2 = 4L * p.n + p.b_k;
    if (2 * N < full2 - 2L * p.ell + 1) throw TruncationTooSmall("N too small for minus solve in d=" + std::to_string(d));
    const int maxdeg = std::max({p.degrees[0], p.degrees[1], p.degrees[2], 0});
    const long T = full2 / 2 + maxdeg + 10;
    const auto basis = detail::minus_basis(p, T);

    MinusSolution sol;
    sol.params = p;
    const auto full = detail::minus_kernel(p, basis, full2);
    if (full.size() != 1)
        throw NoSolution("minus system for d=" + std::to_string(d) + " has kernel dimension " + std::to_string(full.size()));
    sol.relaxed_kernel = detail::minus_kernel(p, basis, 2L * p.ell + 1);
    if (sol.relaxed_kernel.size() != 1u + (p.extra_dof ? 1u : 0u))
        throw NoSolution("minus system for d=" + std::to_string(d) + " has relaxed kernel dimension " +
                         std::to_string(sol.relaxed_kernel.size()));
    IntVector x = full[0];
    detail::normalize_minus(x, p, basis);
    detail::split_xyz(basis, x, sol.X, sol.Y, sol.Z);

    const QSeries s = detail::combine_cols(basis.s_cols, x);
    const auto v = s.valuation2();
    if (!v || *v < full2) throw NoSolution("minus: S-side order not reached for d=" + std::to_string(d));
    if (*v != full2) throw NoSolution("minus: S-side order is not tight for d=" + std::to_string(d));
    detail::fill_minus_series(sol, N);

    // the S-image carries only half-integer exponents
    if (!sol.psiS_series.integer_part().is_zero())
        throw IdentityViolation("minus: S-image has integer exponents for d=" + std::to_string(d));
    return sol;
}

// psi = pi i z f + 4 ln2 f + f * tail + omega
inline PsiExpansion assemble_psi_minus(const MinusSolution& sol) {
    PsiExpansion psi;
    psi.d = sol.params.d;
    psi.eps = -1;
    psi.N = sol.N;
    psi.n_pm = sol.params.n_minus;
    const LogLambda L = log_lambda(partner_trunc(sol.f_series));
    psi.terms.push_back({1, Scalar{1, 1, true, false}, sol.f_series});
    psi.terms.push_back({0, Scalar{4, 0, false, true}, sol.f_series});
    psi.terms.push_back({0, Scalar{1, 0, false, false}, (sol.f_series * L.tail + sol.omega_series).truncated(2 * sol.N)});
    psi.S_series = sol.psiS_series;
    psi.C_over_pi = frac(1, 2);
    psi.extract_principal();
    return psi;
}

}  // namespace fe

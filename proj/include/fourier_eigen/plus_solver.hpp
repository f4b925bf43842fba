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

struct PlusParams {
    int d = 0, ell = 0, k = 0, a_k = 0, n = 0, n_plus = 0;
    bool extra_dof = false;
    std::array<int, 3> degrees{};  // deg P, Q, R
};

inline PlusParams plus_params(int d) {
    if (d < 4 || d % 4 != 0) throw BadDimension("dimension must be a positive multiple of 4, got " + std::to_string(d));
    static const int a_table[6] = {1, 1, 2, 2, 3, 3};
    PlusParams p;
    p.d = d;
    p.ell = (d + 23) / 24;
    p.k = 6 * p.ell - d / 4;
    p.a_k = a_table[p.k];
    const int num = p.ell - p.a_k + 2;
    p.n = num >= 0 ? (num + 1) / 2 : -((-num) / 2);
    p.n_plus = (d + 4) / 16 + 1;
    const int r = d % 48;
    p.extra_dof = r == 0 || r == 12 || r == 16 || r == 28 || r == 32 || r == 44;
    const int n = p.n;
    switch (p.k) {
        case 0: p.degrees = {n, n - 1, n}; break;
        case 1: p.degrees = {n, n, n - 1}; break;
        case 2:
        case 3: p.degrees = {n, n, n}; break;
        case 4: p.degrees = {n + 1, n, n}; break;
        default: p.degrees = {n, n + 1, n}; break;
    }
    return p;
}

struct PlusSolution {
    PlusParams params;
    Poly P, Q, R;
    QSeries psi1, psi2, psi3;  // with the 1/Delta^ell factor
    QSeries phi;               // psi1 - 2 E2 psi2 + E2^2 psi3
    QSeries g;                 // psi2 - E2 psi3
    std::vector<IntVector> relaxed_kernel;  // basis of the space at the required order only
    bool origin_constrained = false;
    long N = 0;
};

namespace detail {

struct PlusBasis {
    std::vector<QSeries> phi_cols, g_cols;  // contribution of each unknown to phi-hat and to g-hat
};

inline PlusBasis plus_basis(const PlusParams& p, long T) {
    const QSeries J = gen(Gen::J, T), E2 = gen(Gen::E2, T);
    const QSeries one = QSeries::constant(1, T);
    const QSeries w0 = omega_m(p.k, T), w1 = omega_m(p.k + 1, T), w2 = omega_m(p.k + 2, T);
    PlusBasis b;
    std::vector<QSeries> jp{one};
    const int maxdeg = std::max({p.degrees[0], p.degrees[1], p.degrees[2]});
    for (int i = 1; i <= maxdeg; ++i) jp.push_back(jp.back() * J);
    for (int i = 0; i <= p.degrees[0]; ++i) {
        b.phi_cols.push_back(w2 * jp[i]);
        b.g_cols.push_back(QSeries::zero(0, 2 * T));
    }
    for (int i = 0; i <= p.degrees[1]; ++i) {
        const QSeries t = w1 * jp[i];
        b.phi_cols.push_back(E2 * t * Rational(-2));
        b.g_cols.push_back(t);
    }
    const QSeries E22 = E2 * E2;
    for (int i = 0; i <= p.degrees[2]; ++i) {
        const QSeries t = w0 * jp[i];
        b.phi_cols.push_back(E22 * t);
        b.g_cols.push_back(-(E2 * t));
    }
    return b;
}

// Rows: coefficients of phi-hat below `order`, coefficients of g-hat at exponents <= -n.
inline std::vector<IntVector> plus_kernel(const PlusParams& p, const PlusBasis& b, int order) {
    long lo2 = 0;
    for (const auto& c : b.phi_cols) lo2 = std::min(lo2, c.lo2());
    for (const auto& c : b.g_cols) lo2 = std::min(lo2, c.lo2());
    const std::size_t cols = b.phi_cols.size();
    std::vector<std::vector<Rational>> M;
    for (long e = lo2 / 2; e < order; ++e) {
        std::vector<Rational> row(cols);
        for (std::size_t i = 0; i < cols; ++i) row[i] = b.phi_cols[i].coeff(e);
        M.push_back(std::move(row));
    }
    for (long e = lo2 / 2; e <= -p.n; ++e) {
        std::vector<Rational> row(cols);
        for (std::size_t i = 0; i < cols; ++i) row[i] = b.g_cols[i].coeff(e);
        M.push_back(std::move(row));
    }
    return kernel(M, cols);
}

inline void split_pqr(const PlusParams& p, const IntVector& x, Poly& P, Poly& Q, Poly& R) {
    std::size_t at = 0;
    auto take = [&](int deg) {
        std::vector<Rational> c;
        for (int i = 0; i <= deg; ++i) c.emplace_back(x[at++]);
        return Poly(c);
    };
    P = take(p.degrees[0]);
    Q = take(p.degrees[1]);
    R = take(p.degrees[2]);
}

// primitive, leading coefficient of P positive
inline void normalize_plus(IntVector& x, const PlusParams& p) {
    make_primitive(x);
    const std::size_t lead = static_cast<std::size_t>(p.degrees[0]);
    int s = sgn(x[lead]);
    if (s == 0)
        for (const auto& v : x)
            if (v != 0) { s = sgn(v); break; }
    if (s < 0)
        for (auto& v : x) v = -v;
}

inline void fill_plus_series(PlusSolution& sol, long N) {
    const PlusParams& p = sol.params;
    const long T = N + p.ell + p.n + 8;
    const QSeries J = gen(Gen::J, T), E2 = gen(Gen::E2, T), Dinv = gen(Gen::Delta, T + 2).pow(-p.ell);
    const QSeries one = QSeries::constant(1, T);
    sol.psi1 = (omega_m(p.k + 2, T) * sol.P.eval(J, one) * Dinv).truncated(2 * N);
    sol.psi2 = (omega_m(p.k + 1, T) * sol.Q.eval(J, one) * Dinv).truncated(2 * N);
    sol.psi3 = (omega_m(p.k, T) * sol.R.eval(J, one) * Dinv).truncated(2 * N);
    if (sol.psi1.trunc2() < 2 * N || sol.psi2.trunc2() < 2 * N || sol.psi3.trunc2() < 2 * N)
        throw TruncationTooSmall("plus solver: psi components lost precision");
    const QSeries e2 = gen(Gen::E2, N + 2 * p.n_plus + 4);
    sol.phi = (sol.psi1 - e2 * sol.psi2 * Rational(2) + e2 * e2 * sol.psi3).truncated(2 * N);
    sol.g = (sol.psi2 - e2 * sol.psi3).truncated(2 * N);
    sol.N = N;
}

inline void set_solution(PlusSolution& sol, IntVector x) {
    normalize_plus(x, sol.params);
    split_pqr(sol.params, x, sol.P, sol.Q, sol.R);
}

}  // namespace detail

inline PlusSolution solve_plus(int d, long N = 64) {
    const PlusParams p = plus_params(d);
    const int full_order = 2 * p.n + p.a_k - 1;
    if (N < full_order - p.ell + 1) throw TruncationTooSmall("N too small for plus solve in d=" + std::to_string(d));
    const int maxdeg = std::max({p.degrees[0], p.degrees[1], p.degrees[2]});
    const long T = full_order + maxdeg + 10;
    const auto basis = detail::plus_basis(p, T);
    for (const auto& c : basis.phi_cols)
        if (c.trunc() < full_order + 1) throw TruncationTooSmall("plus basis truncated");

    PlusSolution sol;
    sol.params = p;
    const auto full = detail::plus_kernel(p, basis, full_order);
    if (full.size() != 1)
        throw NoSolution("plus system for d=" + std::to_string(d) + " has kernel dimension " + std::to_string(full.size()));
    sol.relaxed_kernel = detail::plus_kernel(p, basis, p.ell + 1);
    if (sol.relaxed_kernel.size() != 1u + (p.extra_dof ? 1u : 0u))
        throw NoSolution("plus system for d=" + std::to_string(d) + " has relaxed kernel dimension " +
                         std::to_string(sol.relaxed_kernel.size()));
    detail::set_solution(sol, full[0]);

    // tightness of both order conditions
    const QSeries phihat = detail::combine_cols(basis.phi_cols, full[0]);
    const QSeries ghat = detail::combine_cols(basis.g_cols, full[0]);
    if (phihat.valuation2() != std::optional<long>(2L * full_order))
        throw NoSolution("plus: psi-order is not tight for d=" + std::to_string(d));
    if (ghat.valuation2() != std::optional<long>(2L * (1 - p.n)))
        throw NoSolution("plus: g-order is not tight for d=" + std::to_string(d));
    detail::fill_plus_series(sol, N);
    return sol;
}

// The unique combination in the relaxed two-dimensional space with F(0) = 0,
// i.e. vanishing constant term of psi2 - E2 psi3.
inline PlusSolution apply_origin_constraint(const PlusSolution& sol) {
    const PlusParams& p = sol.params;
    if (!p.extra_dof || sol.relaxed_kernel.size() != 2)
        throw ConstraintUnavailable("no extra degree of freedom in d=" + std::to_string(p.d));
    const long T = p.ell + p.n + 12;
    const auto basis = detail::plus_basis(p, T);
    const QSeries Dinv = gen(Gen::Delta, T + 2).pow(-p.ell);
    const Rational c1 = (detail::combine_cols(basis.g_cols, sol.relaxed_kernel[0]) * Dinv).coeff(0);
    const Rational c2 = (detail::combine_cols(basis.g_cols, sol.relaxed_kernel[1]) * Dinv).coeff(0);
    std::vector<Rational> x(sol.relaxed_kernel[0].size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = c2 * Rational(sol.relaxed_kernel[0][i]) - c1 * Rational(sol.relaxed_kernel[1][i]);
    PlusSolution out = sol;
    out.origin_constrained = true;
    detail::set_solution(out, integer_row(x));
    detail::fill_plus_series(out, sol.N);
    return out;
}

inline PsiExpansion assemble_psi_plus(const PlusSolution& sol) {
    PsiExpansion psi;
    psi.d = sol.params.d;
    psi.eps = 1;
    psi.N = sol.N;
    psi.n_pm = sol.params.n_plus;
    psi.terms.push_back({2, Scalar{1, 0, false, false}, sol.phi});
    psi.terms.push_back({1, Scalar{12, -1, true, false}, sol.g});
    psi.terms.push_back({0, Scalar{-36, -2, false, false}, sol.psi3});
    psi.S_series = sol.phi;
    psi.C_over_pi = 1;
    psi.extract_principal();
    return psi;
}

}  // namespace fe

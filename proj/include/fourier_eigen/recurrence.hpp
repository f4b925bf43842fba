#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "minus_solver.hpp"
#include "plus_solver.hpp"

namespace fe {

enum class Kind { F, Phi };

struct FamilyKey {
    Kind kind = Kind::F;
    int residue = 0;  // weight mod 4: 0 or 2
    std::string name() const { return std::string(kind == Kind::F ? "f" : "phi") + (residue ? "2" : "0"); }
};

inline FamilyKey family_of(Kind kind, int w) { return {kind, ((w % 4) + 4) % 4}; }

struct WeightIndexedForm {
    FamilyKey key;
    int w = 0;
    QuasiForm f;    // f family: A + E2 B + E2^2 C
    LogForm phi;    // phi family: F log(lambda) + Om
    QSeries phi_S;  // z^{-w} Om(Sz); the log part maps to F log(1 - lambda)

    // z^{-w} phi(Sz)
    QSeries s_side() const { return phi.F * log_lambda_S(partner_trunc(phi.F)) + phi_S; }
    // phi(z) - phi(Tz) without the pi i F term
    QSeries t_difference() const { return phi.F * log_lambda_S(partner_trunc(phi.F)) + phi.Om - phi.Om.t_action(); }
    QSeries series() const { return key.kind == Kind::F ? f.collapse() : phi.Om; }
};

namespace detail {

// sum c * x^a * y^b over (c, a, b), x = theta01^4, y = theta10^4; also returns the S-image
// (z^{-2} x(Sz) = -y, z^{-2} y(Sz) = -x).
struct ThetaTerm {
    long c;
    int a, b;
};

inline std::pair<QSeries, QSeries> theta_poly(const std::vector<ThetaTerm>& terms, const Rational& scale, long N) {
    const long M = N + 4;
    const QSeries x = gen(Gen::Theta01_4, M), y = gen(Gen::Theta10_4, M);
    QSeries s = QSeries::zero(0, 2 * M, 1), sS = QSeries::zero(0, 2 * M, 1);
    for (const auto& t : terms) {
        const Rational c = scale * Rational(t.c);
        s += x.pow(t.a) * y.pow(t.b) * c;
        sS += y.pow(t.a) * x.pow(t.b) * (((t.a + t.b) % 2) ? Rational(-c) : c);
    }
    return {s.truncated(2 * N), sS.truncated(2 * N)};
}

inline WeightIndexedForm make_f(int w, const QSeries& A, const QSeries& B, const QSeries& C, const Rational& s, long N) {
    WeightIndexedForm r;
    r.key = family_of(Kind::F, w);
    r.w = w;
    r.f = QuasiForm{w, (A * s).truncated(2 * N), (B * s).truncated(2 * N), (C * s).truncated(2 * N)};
    return r;
}

inline WeightIndexedForm make_phi(int w, const QSeries& F, const std::vector<ThetaTerm>& om, const Rational& s, long N) {
    WeightIndexedForm r;
    r.key = family_of(Kind::Phi, w);
    r.w = w;
    auto [o, oS] = theta_poly(om, s, N);
    r.phi = LogForm{F.truncated(2 * N), o};
    r.phi_S = oS;
    return r;
}

}  // namespace detail

// phi_16 is taken in its six-term form (the four-term variant misses x^4 y and x^5).
// f_18 carries an extra 1/8400 so that the descent maps it exactly onto f_14.
inline std::array<WeightIndexedForm, 3> initial(const FamilyKey& key, long N) {
    using detail::make_f;
    using detail::make_phi;
    const long M = N + 4;
    const QSeries E2 = gen(Gen::E2, M), E4 = gen(Gen::E4, M), E6 = gen(Gen::E6, M), D = gen(Gen::Delta, M);
    const QSeries zero = QSeries::zero(0, 2 * M);
    const QSeries E42 = E4 * E4, E43 = E42 * E4, E62 = E6 * E6;
    if (key.kind == Kind::F && key.residue == 0) {
        return {make_f(8, E42, E6 * Rational(-2), E4, 1, N),
                make_f(12, E62, E4 * E6 * Rational(-2), E42, frac(1, 6000), N),
                make_f(16, E4 * E62 * Rational(49) - E43 * E4 * Rational(25), E42 * E6 * Rational(-48),
                       E43 * Rational(49) - E62 * Rational(25), frac(1, 2540160000), N)};
    }
    if (key.kind == Kind::F) {
        return {make_f(10, -(E4 * E6), E42 * Rational(2), -E6, 1, N),
                make_f(14, E42 * E6, -(E43 + E62), E4 * E6, frac(-1, 8400), N),
                make_f(18, E43 * E6 * Rational(5) + E62 * E6 * Rational(7),
                       -(E43 * E4 * Rational(5) + E4 * E62 * Rational(19)), E42 * E6 * Rational(12),
                       frac(-1, 1995840000), N)};
    }
    if (key.residue == 0) {
        return {make_phi(8, zero, {{1, 4, 0}, {2, 3, 1}}, 1, N),
                make_phi(12, D * frac(8, 175), {{2, 3, 3}, {3, 4, 2}, {3, 5, 1}, {1, 6, 0}}, frac(1, 11200), N),
                make_phi(16, D * E4 * frac(1, 231000),
                         {{24, 3, 5}, {60, 4, 4}, {68, 5, 3}, {42, 6, 2}, {20, 7, 1}, {5, 8, 0}},
                         frac(1, 1419264000), N)};
    }
    return {make_phi(10, zero, {{5, 3, 2}, {5, 4, 1}, {2, 5, 0}}, 1, N),
            make_phi(14, zero, {{7, 5, 2}, {7, 6, 1}, {2, 7, 0}}, frac(1, 13440), N),
            make_phi(18, D * E6 * frac(1, 600600),
                     {{-12, 3, 6}, {-36, 4, 5}, {-13, 5, 4}, {34, 6, 3}, {68, 7, 2}, {45, 8, 1}, {10, 9, 0}},
                     frac(1, 1845043200), N)};
}

// Second closed forms of the initial f's (E'' means (q d/dq)^2).
inline QSeries initial_alternative(int w, long N) {
    const long M = N + 4;
    const QSeries E2 = gen(Gen::E2, M), E4 = gen(Gen::E4, M), E6 = gen(Gen::E6, M), D = gen(Gen::Delta, M);
    QSeries r;
    switch (w) {
        case 8: r = E4.derive(2) * frac(36, 5); break;
        case 12: r = (E4 * E4).derive(2) * frac(1, 3000) - D * frac(4, 25); break;
        case 16: r = (E4 * E4 * E4 * Rational(49) - E6 * E6 * Rational(25)).derive(2) * frac(1, 2751840000) - D * E4 * frac(1, 45500); break;
        case 10: r = E6.derive(2) * frac(-24, 7); break;
        case 14: r = (E4 * E6).derive(2) * frac(-3, 19250) - E2 * D * frac(36, 875); break;
        case 18: r = ((E4 * E4 * E6).derive(2) * frac(-1, 28875) + D * (E6 * Rational(181) - E2 * E4 * Rational(185)) * frac(2, 9625)) * frac(1, 8400); break;
        default: throw WeightOutOfRange("no alternative closed form for weight " + std::to_string(w));
    }
    return r.truncated(2 * N);
}

struct RecurrenceCoeffs {
    Rational a, b, c;  // F_{w+4} = a E4 F_w + b E4^2 F_{w-4} + c Delta F_{w-8}
};

inline RecurrenceCoeffs recurrence_coeffs(const FamilyKey& key, int w) {
    const long W = w;
    Integer den, num_a, num_b;
    if (key.kind == Kind::F && key.residue == 0) {
        if (w < 16) throw WeightOutOfRange("f recurrence needs w >= 16");
        den = Integer(16000) * (W + 2) * (W - 3) * (W - 5) * (W - 9) * (W - 10) * (W - 11);
        num_a = Integer(200) * (W - 8) * (W - 9) * (W * W - 15 * W + 38);
        num_b = Integer((W - 8) * (W - 12));
    } else if (key.kind == Kind::F) {
        if (w < 18) throw WeightOutOfRange("f recurrence needs w >= 18");
        den = Integer(16000) * (W - 3) * (W - 4) * (W - 5) * (W - 9) * (W - 11) * (W - 16);
        num_a = Integer(200) * (W - 9) * (W - 10) * (W * W - 21 * W + 92);
        num_b = Integer((W - 10) * (W - 14));
    } else if (key.residue == 0) {
        if (w < 16) throw WeightOutOfRange("phi recurrence needs w >= 16");
        den = Integer(16000) * (W + 4) * (W - 1) * (W - 3) * (W - 7) * (W - 8) * (W - 9);
        num_a = Integer(200) * (W - 6) * (W - 7) * (W * W - 11 * W + 12);
        num_b = Integer((W - 6) * (W - 10));
    } else {
        if (w < 18) throw WeightOutOfRange("phi recurrence needs w >= 18");
        den = Integer(16000) * (W - 1) * (W - 2) * (W - 3) * (W - 7) * (W - 9) * (W - 14);
        num_a = Integer(200) * (W - 7) * (W - 8) * (W * W - 17 * W + 54);
        num_b = Integer((W - 8) * (W - 12));
    }
    if (den == 0) throw WeightOutOfRange("recurrence denominator vanishes at w=" + std::to_string(w));
    if ((((w % 4) + 4) % 4) != key.residue) throw WeightOutOfRange("weight parity does not match family");
    const Rational d(den);
    return {Rational(num_a) / d, Rational(-5 * num_b) / (d * 8), Rational(1) / d};
}

// window = (F_w, F_{w-4}, F_{w-8})
inline WeightIndexedForm next(const FamilyKey& key, const std::array<WeightIndexedForm, 3>& window, int w) {
    const RecurrenceCoeffs rc = recurrence_coeffs(key, w);
    const auto& [x, y, z] = window;
    if (x.w != w || y.w != w - 4 || z.w != w - 8) throw WeightOutOfRange("recurrence window has wrong weights");
    const long N = key.kind == Kind::F ? partner_trunc(x.f.A) : partner_trunc(x.phi.Om);
    const QSeries E4 = gen(Gen::E4, N + 2), D = gen(Gen::Delta, N + 2);
    const QSeries m1 = E4 * rc.a, m2 = E4 * E4 * rc.b, m3 = D * rc.c;
    WeightIndexedForm r;
    r.key = key;
    r.w = w + 4;
    if (key.kind == Kind::F) {
        r.f = (x.f * m1 + y.f * m2 + z.f * m3).with_weight(w + 4);
        const long T = std::min({x.f.A.trunc2(), y.f.A.trunc2(), z.f.A.trunc2()});
        r.f = QuasiForm{w + 4, r.f.A.truncated(T), r.f.B.truncated(T), r.f.C.truncated(T)};
    } else {
        r.phi = x.phi * m1 + y.phi * m2 + z.phi * m3;
        r.phi_S = x.phi_S * m1 + y.phi_S * m2 + z.phi_S * m3;
        const long T = std::min({x.phi.Om.trunc2(), y.phi.Om.trunc2(), z.phi.Om.trunc2()});
        r.phi = LogForm{r.phi.F.truncated(T), r.phi.Om.truncated(T)};
        r.phi_S = r.phi_S.truncated(T);
    }
    return r;
}

// All forms of a family with weight <= w_max.
inline std::vector<WeightIndexedForm> family(const FamilyKey& key, int w_max, long N) {
    auto init = initial(key, N);
    std::vector<WeightIndexedForm> out(init.begin(), init.end());
    while (out.back().w + 4 <= w_max) {
        const std::size_t s = out.size();
        out.push_back(next(key, {out[s - 1], out[s - 2], out[s - 3]}, out[s - 1].w));
    }
    while (!out.empty() && out.back().w > w_max) out.pop_back();
    return out;
}

inline WeightIndexedForm family_member(Kind kind, int w, long N) {
    const FamilyKey key = family_of(kind, w);
    if (key.residue != 0 && key.residue != 2) throw WeightOutOfRange("odd weight");
    if (w < (key.residue ? 10 : 8)) throw WeightOutOfRange("weight below family start");
    return family(key, w, N).back();
}

// Closed-form step: F_{w+4} from F_w alone via two Serre derivatives.
inline WeightIndexedForm diff_recurrence(const WeightIndexedForm& x) {
    const long W = x.w;
    Rational ca, den;
    WeightIndexedForm r;
    r.key = x.key;
    r.w = x.w + 4;
    if (x.key.kind == Kind::F) {
        if (x.key.residue == 0) {
            ca = Rational((W - 5) * (W - 6));
            den = Rational(120 * (W + 2) * (W - 3) * (W - 5) * (W - 10));
        } else {
            ca = Rational((W - 8) * (W - 9));
            den = Rational(120 * (W - 3) * (W - 4) * (W - 5) * (W - 16));
        }
        if (den == 0) throw WeightOutOfRange("closed-form step undefined at w=" + std::to_string(x.w));
        const QuasiForm dd = serre_derivative(serre_derivative(x.f, x.w - 2), x.w);
        const QSeries E4 = gen(Gen::E4, partner_trunc(x.f.A) + 2);
        r.f = (x.f * E4 * (ca / den) + dd * (Rational(-36) / den)).with_weight(x.w + 4);
    } else {
        if (x.key.residue == 0) {
            ca = Rational((W - 3) * (W - 4));
            den = Rational(120 * (W + 4) * (W - 1) * (W - 3) * (W - 8));
        } else {
            ca = Rational((W - 6) * (W - 9));
            den = Rational(120 * (W - 1) * (W - 2) * (W - 3) * (W - 14));
        }
        if (den == 0) throw WeightOutOfRange("closed-form step undefined at w=" + std::to_string(x.w));
        const LogForm dd = x.phi.serre(x.w).serre(x.w + 2);
        const QSeries E4 = gen(Gen::E4, partner_trunc(x.phi.Om) + 2);
        r.phi = x.phi * E4 * (ca / den) + dd * (Rational(-36) / den);
    }
    return r;
}

enum class Ode { ODE1, ODE2 };

namespace detail {

inline QSeries serre_op(const QSeries& f, int k) { return serre(f, k); }
inline LogForm serre_op(const LogForm& f, int k) { return f.serre(k); }
inline QSeries mul_op(const QSeries& f, const QSeries& m) { return f * m; }
inline LogForm mul_op(const LogForm& f, const QSeries& m) { return f * m; }

template <class T>
T ode_apply(const T& f, int w, Ode which, long N) {
    const QSeries E4 = gen(Gen::E4, N), E6 = gen(Gen::E6, N);
    const long W = w;
    const T d1 = serre_op(f, w - 2);
    const T d2 = serre_op(d1, w);
    const T d3 = serre_op(d2, w + 2);
    if (which == Ode::ODE1) {
        return d3 - mul_op(d1, E4 * frac(3 * W * W - 36 * W + 140, 144)) -
               mul_op(f, E6 * frac((W - 2) * (W - 5) * (W - 14), 864));
    }
    const Rational c = frac(3 * W * W - 48 * W + 224, 144);
    return mul_op(d3, E6) + mul_op(d2, E4 * E4 * frac(1, 2)) - mul_op(d1, E4 * E6 * c) -
           mul_op(f, E4 * E4 * E4 * (c / 2) + E6 * E6 * frac(W * W * W - 33 * W * W + 300 * W - 896, 864));
}

}  // namespace detail

struct Valuation {
    std::optional<long> v2;  // half-unit valuation, empty if zero to truncation
    long trunc2 = 0;
    bool zero() const { return !v2.has_value(); }
};

// Residual of the ODE at parameter w (weight of f for the f family, w+2 for phi).
inline Valuation ode_residual(const QSeries& f, int w, Ode which) {
    const QSeries r = detail::ode_apply(f, w, which, partner_trunc(f) + 2).truncated(f.trunc2());
    return {r.valuation2(), r.trunc2()};
}

inline Valuation ode_residual(const LogForm& f, int w, Ode which) {
    const long N = std::max(partner_trunc(f.F), partner_trunc(f.Om)) + 2;
    const LogForm r = detail::ode_apply(f, w, which, N);
    const long T = std::min(f.F.trunc2(), f.Om.trunc2());
    const auto vf = r.F.truncated(T).valuation2(), vo = r.Om.truncated(T).valuation2();
    std::optional<long> v;
    if (vf) v = vf;
    if (vo) v = v ? std::min(*v, *vo) : *vo;
    return {v, T};
}

inline Valuation ode_residual(const WeightIndexedForm& form, std::optional<Ode> which = std::nullopt,
                              std::optional<int> parameter = std::nullopt) {
    const Ode o = which ? *which : (form.key.residue == 0 ? Ode::ODE1 : Ode::ODE2);
    if (form.key.kind == Kind::F) return ode_residual(form.f.collapse(), parameter ? *parameter : form.w, o);
    return ode_residual(form.phi, parameter ? *parameter : form.w + 2, o);
}

// (1/Delta)([F, E4]_2 + 5/3 [F, E6]_1), equal to the family member of weight w-4
inline QSeries rc_descend(const WeightIndexedForm& Fw) {
    if (Fw.key.kind != Kind::F) throw WeightOutOfRange("descent is defined on the f family");
    if (Fw.w < 12) throw WeightOutOfRange("descent needs w >= 12");
    const QSeries F = Fw.f.collapse();
    const long N = partner_trunc(F) + 2;
    const QSeries E4 = gen(Gen::E4, N), E6 = gen(Gen::E6, N), D = gen(Gen::Delta, N + 2);
    const QSeries s = rankin_cohen(F, E4, 2, Fw.w - 2, 4) + rankin_cohen(F, E6, 1, Fw.w - 2, 6) * frac(5, 3);
    return (s * D.inverse()).truncated(F.trunc2() - 2);
}

struct CrossReport {
    int d = 0;
    bool plus = true;
    int w = 0;
    Rational scalar;           // recurrence form = scalar * Delta^m * solver form
    std::optional<long> residual_v2;  // valuation of the difference (empty: zero)
};

inline CrossReport cross_validate(int d, bool plus, long N = 40) {
    CrossReport rep;
    rep.d = d;
    rep.plus = plus;
    auto compare = [&](const QSeries& a, const QSeries& b, const char* what) {
        const auto r = ratio(a, b);
        if (!r) throw MismatchBeyondScalar(std::string("recurrence and solver disagree on ") + what + " for d=" + std::to_string(d));
        return *r;
    };
    if (plus) {
        const PlusSolution sol = solve_plus(d, N);
        const auto& p = sol.params;
        rep.w = 12 * p.n + 2 * p.k + 4;
        const WeightIndexedForm fw = family_member(Kind::F, rep.w, N);
        const QSeries Dm = gen(Gen::Delta, N + 2).pow(p.n + p.ell);
        const QSeries lhs = fw.f.collapse(), rhs = (sol.phi * Dm).truncated(lhs.trunc2());
        rep.scalar = compare(lhs, rhs, "f");
        const Rational s2 = compare(fw.f.C, (sol.psi3 * Dm).truncated(fw.f.C.trunc2()), "h");
        if (s2 != rep.scalar) throw MismatchBeyondScalar("f and h scale differently for d=" + std::to_string(d));
        rep.residual_v2 = (lhs - rhs * rep.scalar).valuation2();
    } else {
        const MinusSolution sol = solve_minus(d, N);
        const auto& p = sol.params;
        rep.w = 12 * p.n + 2 * p.k + 12;
        const WeightIndexedForm pw = family_member(Kind::Phi, rep.w, N);
        const QSeries Dm = gen(Gen::Delta, N + 2).pow(p.n + 1 + p.ell);
        const QSeries om = (sol.omega_series * Dm).truncated(pw.phi.Om.trunc2());
        rep.scalar = compare(pw.phi.Om, om, "Gamma(2) part");
        const QSeries f = (sol.f_series * Dm).truncated(pw.phi.F.trunc2());
        if (!(pw.phi.F - f * rep.scalar).truncated(std::min(pw.phi.F.trunc2(), f.trunc2())).is_zero())
            throw MismatchBeyondScalar("log coefficient scales differently for d=" + std::to_string(d));
        rep.residual_v2 = (pw.phi.Om - om * rep.scalar).valuation2();
    }
    return rep;
}

}  // namespace fe

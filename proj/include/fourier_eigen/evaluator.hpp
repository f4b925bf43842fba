#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "psi.hpp"
#include "real.hpp"

namespace fe {

struct EvalConfig {
    mpfr_prec_t precision = 256;
    long N = 64;
    int quad_nodes = 200;
    double split = 1.0;
};

inline Real to_real(const SymbolicNumber& x) {
    Real v = Real(x.rat) + Real(x.ln2) * Real::ln2();
    if (x.pi_power) v = v * pow(Real::pi(), static_cast<long>(x.pi_power));
    return v;
}

inline Complex to_complex(const Scalar& s) {
    Real v = Real(s.coeff);
    if (s.pi_power) v = v * pow(Real::pi(), static_cast<long>(s.pi_power));
    if (s.ln2) v = v * Real::ln2();
    return s.imag ? Complex(Real(0L), v) : Complex(v);
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] at the current default precision.
struct GaussLegendre {
    std::vector<Real> x, w;
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<std::pair<int, long>, GaussLegendre> cache;
    const auto key = std::make_pair(n, static_cast<long>(default_precision()));
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    GaussLegendre g;
    const Real pi = Real::pi();
    const Real eps = pow(Real(2L), -static_cast<long>(default_precision()) + 8);
    for (int i = 1; i <= n; ++i) {
        Real x = cos(pi * Real(static_cast<long>(4 * i - 1)) / Real(static_cast<long>(4 * n + 2)));
        Real dp;
        for (int iter = 0; iter < 100; ++iter) {
            Real p0(1L), p1 = x;
            for (int k = 2; k <= n; ++k) {
                Real p2 = (Real(static_cast<long>(2 * k - 1)) * x * p1 - Real(static_cast<long>(k - 1)) * p0) / Real(static_cast<long>(k));
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            dp = Real(static_cast<long>(n)) * (x * p1 - p0) / (x * x - Real(1L));
            const Real dx = p1 / dp;
            x = x - dx;
            if (abs(dx) < eps) break;
        }
        Real p0(1L), p1 = x;
        for (int k = 2; k <= n; ++k) {
            Real p2 = (Real(static_cast<long>(2 * k - 1)) * x * p1 - Real(static_cast<long>(k - 1)) * p0) / Real(static_cast<long>(k));
            p0 = std::move(p1);
            p1 = std::move(p2);
        }
        dp = Real(static_cast<long>(n)) * (x * p1 - p0) / (x * x - Real(1L));
        g.w.push_back(Real(2L) / ((Real(1L) - x * x) * dp * dp));
        g.x.push_back(std::move(x));
    }
    return cache.emplace(key, std::move(g)).first->second;
}

struct NumSeries {
    long lo2 = 0;
    std::vector<Real> c;  // c[i] multiplies q^{(lo2 + i)/2}
};

inline NumSeries numeric(const QSeries& s, long max_e2) {
    NumSeries r;
    r.lo2 = s.lo2();
    for (long e2 = s.lo2(); e2 < std::min(s.trunc2(), max_e2); ++e2) r.c.push_back(Real(s.coeff2(e2)));
    return r;
}

}  // namespace detail

class Evaluator {
public:
    Evaluator(const PsiExpansion& psi, EvalConfig cfg = {}) : psi_(psi), cfg_(cfg), guard_(cfg.precision) {
        if (cfg_.precision < 64) throw PrecisionLoss("precision must be at least 64 bits");
        if (cfg_.quad_nodes < 16) throw PrecisionLoss("at least 16 quadrature nodes required");
        const long max_e2 = 2 * cfg_.N;
        for (const auto& t : psi_.terms) terms_.push_back({t.z_power, to_complex(t.scalar), detail::numeric(t.series, max_e2)});
        S_ = detail::numeric(psi_.S_series, max_e2);
        pi_ = Real::pi();
        c_ = Real(cfg_.split);
        setup_quadrature();
    }

    const PsiExpansion& expansion() const { return psi_; }
    const EvalConfig& config() const { return cfg_; }

    // psi(z) from the q-expansion; needs Im z >= 0.4
    Complex psi(const Complex& z) const {
        PrecisionGuard g(cfg_.precision);
        if (z.im.to_double() < 0.4 - 1e-12) throw BadSamplePoint("Im z must be >= 0.4, got " + z.im.str(8));
        // q^{1/2} = exp(pi i z)
        const Real r = exp(-pi_ * z.im);
        const Complex h(r * cos(pi_ * z.re), r * sin(pi_ * z.re));
        Complex acc;
        for (const auto& t : terms_) {
            Complex s = series_at(t.s, h);
            Complex zp(Real(1L));
            for (int i = 0; i < t.p; ++i) zp = zp * z;
            acc += t.scalar * zp * s;
        }
        return acc;
    }

    // psi(it), direct expansion
    Real psi_it_direct(const Real& t) const {
        Complex z(Real(0L), t);
        Complex v = psi(z);
        return v.re;
    }

    // psi(it) through the S-image: psi(it) = (i/t)^{2-d/2} S(i/t)
    Real psi_it_S(const Real& t) const {
        PrecisionGuard g(cfg_.precision);
        const Real h = exp(-pi_ / t);
        Real s = series_at_real(S_, h);
        const long e = 2 - psi_.d / 2;  // even
        Real f = pow(t, -e);
        if ((((e / 2) % 2) + 2) % 2 == 1) f = -f;
        return f * s;
    }

    Real psi_it(const Real& t) const { return t >= c_ ? psi_it_direct(t) : psi_it_S(t); }

    // Analytic continuation of the Laplace transform.
    Real W(const Real& s) const {
        PrecisionGuard g(cfg_.precision);
        if (s <= Real(-psi_.C_over_pi.get_d()) ) throw PoleAt2k("s outside the half-plane of continuation");
        for (int k = 0; k <= psi_.n_pm; ++k)
            if (abs(s - Real(static_cast<long>(2 * k))) < pow(Real(2L), -static_cast<long>(cfg_.precision) / 2))
                throw PoleAt2k("s is at the pole 2k = " + std::to_string(2 * k));
        Real q(0L);
        for (std::size_t j = 0; j < qt_.size(); ++j) q += qw_[j] * qpsi_[j] * exp(-pi_ * s * qt_[j]);
        // tails on [c, inf) of every monomial scalar * (it)^p * q^e
        const Real Ec = exp(-pi_ * s * c_);
        Complex tail;
        for (const auto& t : terms_) {
            const Complex ip = i_pow(t.p);
            Real sum(0L);
            for (std::size_t i = 0; i < t.s.c.size(); ++i) {
                if (t.s.c[i].is_zero()) continue;
                const long e2 = t.s.lo2 + static_cast<long>(i);
                const Real L = pi_ * (s + Real(e2));
                if (L.is_zero()) throw PoleAt2k("s at pole");
                sum += t.s.c[i] * exp(-pi_ * Real(e2) * c_) * moment(t.p, L);
            }
            tail += t.scalar * ip * Complex(sum * Ec);
        }
        last_imag_ = tail.im;
        return q + tail.re;
    }

    // U(s) = -4 sin^2(pi s / 2) W(s), with the Laurent values at even integers
    Real U(const Real& s) const {
        PrecisionGuard g(cfg_.precision);
        const Real half = s / Real(2L);
        const long m = std::lround(half.to_double());
        if (m >= 0 && abs(half - Real(m)) < pow(Real(2L), -static_cast<long>(cfg_.precision) / 2)) return special_values(m).first;
        const Real sn = sin(pi_ * half);
        return Real(-4L) * sn * sn * W(s);
    }

    Real F(const Real& r) const { return U(r * r); }

    // (U(2m), U'(2m)) = (-b_m, -pi a_m)
    std::pair<Real, Real> special_values(long m) const {
        PrecisionGuard g(cfg_.precision);
        if (m < 0 || m > psi_.n_pm) return {Real(0L), Real(0L)};
        const auto i = static_cast<std::size_t>(m);
        return {-to_real(psi_.b[i]), -(pi_ * to_real(psi_.a[i]))};
    }

    // imaginary part of the last tail sum (should vanish)
    Real last_imaginary() const { return last_imag_; }

private:
    struct NumTerm {
        int p;
        Complex scalar;
        detail::NumSeries s;
    };

    // int_c^inf t^p e^{-L t} dt / e^{-L c}
    Real moment(int p, const Real& L) const {
        switch (p) {
            case 0: return Real(1L) / L;
            case 1: return c_ / L + Real(1L) / (L * L);
            default: return c_ * c_ / L + Real(2L) * c_ / (L * L) + Real(2L) / (L * L * L);
        }
    }

    static Complex series_at(const detail::NumSeries& s, const Complex& h) {
        // sum c_i h^{lo2 + i}
        Complex base(Real(1L));
        const long lo = s.lo2;
        if (lo != 0) {
            // h^lo for negative lo via the inverse
            const Real n2 = h.re * h.re + h.im * h.im;
            const Complex inv(h.re / n2, -h.im / n2);
            const Complex& b = lo > 0 ? h : inv;
            for (long i = 0; i < (lo > 0 ? lo : -lo); ++i) base = base * b;
        }
        Complex acc;
        Complex pw = base;
        for (const auto& c : s.c) {
            if (!c.is_zero()) acc += pw * c;
            pw = pw * h;
        }
        return acc;
    }

    static Real series_at_real(const detail::NumSeries& s, const Real& h) {
        Real pw = pow(h, s.lo2);
        Real acc(0L);
        for (const auto& c : s.c) {
            if (!c.is_zero()) acc += pw * c;
            pw = pw * h;
        }
        return acc;
    }

    void setup_quadrature() {
        // geometric panels [c 2^{-j-1}, c 2^{-j}] down to where the S-image is below the working precision
        long v2 = 1;
        for (long i = 0; i < static_cast<long>(S_.c.size()); ++i)
            if (!S_.c[i].is_zero()) {
                v2 = S_.lo2 + i;
                break;
            }
        if (v2 <= 0) throw PrecisionLoss("S-image does not decay");
        const double e0 = static_cast<double>(v2) / 2.0;
        const double bits = static_cast<double>(cfg_.precision) + 40.0;
        const double t0 = M_PI * e0 / (bits * std::log(2.0));
        int panels = 1;
        while (cfg_.split / std::ldexp(1.0, panels) > t0) ++panels;
        const int per = std::max(16, cfg_.quad_nodes / 4);
        const auto& gl = detail::gauss_legendre(per);
        Real hi = c_;
        for (int p = 0; p < panels; ++p) {
            const Real lo = hi / Real(2L);
            const Real mid = (hi + lo) / Real(2L), rad = (hi - lo) / Real(2L);
            for (int j = 0; j < per; ++j) {
                Real t = mid + rad * gl.x[static_cast<std::size_t>(j)];
                qpsi_.push_back(psi_it_S(t));
                qw_.push_back(rad * gl.w[static_cast<std::size_t>(j)]);
                qt_.push_back(std::move(t));
            }
            hi = lo;
        }
    }

    PsiExpansion psi_;
    EvalConfig cfg_;
    PrecisionGuard guard_;
    std::vector<NumTerm> terms_;
    detail::NumSeries S_;
    Real pi_, c_;
    std::vector<Real> qt_, qw_, qpsi_;
    mutable Real last_imag_;
};

struct FunctionalCheck {
    Real max_residual;
    std::vector<Real> residuals;
};

// Residuals of z^{d/2-2} psi(T^{-1}Sz) = eps psi(Tz) and
// 2 z^{d/2-2} psi(Sz) = eps (psi(Tz) - 2 psi(z) + psi(T^{-1}z)), relative to the magnitudes involved.
inline FunctionalCheck functional_eq_check(const Evaluator& ev, const std::vector<Complex>& zs, std::optional<int> eps_override = std::nullopt) {
    PrecisionGuard g(ev.config().precision);
    const int eps = eps_override ? *eps_override : ev.expansion().eps;
    const long k = ev.expansion().d / 2 - 2;
    FunctionalCheck out;
    out.max_residual = Real(0L);
    const Complex one(Real(1L));
    for (const auto& z : zs) {
        const Real n2 = z.re * z.re + z.im * z.im;
        const Complex Sz(-z.re / n2, z.im / n2);
        const Complex Tz = z + one, Tiz = z - one, TiSz = Sz - one;
        for (const auto& p : {Tz, Tiz, Sz, TiSz, z})
            if (p.im.to_double() < 0.4 - 1e-12) throw BadSamplePoint("sample point image has Im < 0.4");
        Complex zk(Real(1L));
        for (long i = 0; i < k; ++i) zk = zk * z;
        const Complex pz = ev.psi(z), pT = ev.psi(Tz), pTi = ev.psi(Tiz), pS = ev.psi(Sz), pTiS = ev.psi(TiSz);
        const Real e(static_cast<long>(eps));
        const Complex r1 = zk * pTiS - pT * e;
        const Complex r2 = zk * pS * Real(2L) - (pT - pz * Real(2L) + pTi) * e;
        Real scale = std::max({pz.norm(), pT.norm(), pTi.norm(), (zk * pS).norm(), (zk * pTiS).norm()});
        if (scale.is_zero()) scale = Real(1L);
        const Real r = std::max(r1.norm(), r2.norm()) / scale;
        out.residuals.push_back(r);
        if (r > out.max_residual) out.max_residual = r;
    }
    return out;
}

inline std::vector<Complex> default_sample_points() {
    return {Complex(Real(0L), Real(1L)), Complex(Real(0L), Real(frac(11, 10))), Complex(Real(0L), Real(frac(9, 10))),
            Complex(Real(frac(3, 10)), Real(1L)), Complex(Real(frac(-1, 4)), Real(frac(19, 20))),
            Complex(Real(frac(1, 10)), Real(frac(21, 20)))};
}

struct SignCertificate {
    long n = 0;               // the last sign change is at sqrt(2n)
    Real r_star;
    int sign_beyond = 0;      // sign of F for r^2 > 2n on the grid
    int sign_below = 0;       // sign just below 2n
    bool grid_ok = false;
    std::optional<double> anomaly_at;  // r^2 of a wrong-sign sample
    std::vector<std::pair<double, double>> samples;  // (r^2, U)
};

// Grid evidence (not a proof) that sqrt(2 n_pm) is the last sign change.
inline SignCertificate sign_change_certificate(const Evaluator& ev, bool throw_on_anomaly = true) {
    PrecisionGuard g(ev.config().precision);
    SignCertificate cert;
    const long n = ev.expansion().n_pm;
    cert.n = n;
    cert.r_star = sqrt(Real(2 * n));
    // r^2 = 2n - 1.9 + 0.05 j, j = 0 .. 838, skipping even integers
    for (int j = 0; j <= 838; ++j) {
        const long num = (2 * n) * 100 - 190 + 5 * j;  // r^2 in hundredths
        if (num <= 0) continue;
        if (num % 200 == 0) continue;
        const Real s = Real(frac(num, 100));
        const Real u = ev.U(s);
        cert.samples.emplace_back(static_cast<double>(num) / 100.0, u.to_double());
    }
    // refinement just below and above 2n
    for (const long off : {-20L, -10L, -5L, -2L, -1L, 1L, 2L, 5L, 10L, 20L}) {
        const long num = 2 * n * 1000 + off;
        if (num <= 0) continue;
        cert.samples.emplace_back(static_cast<double>(num) / 1000.0, ev.U(Real(frac(num, 1000))).to_double());
    }
    std::sort(cert.samples.begin(), cert.samples.end());
    const double s0 = 2.0 * static_cast<double>(n);
    for (const auto& [s, u] : cert.samples) {
        const int sg = u > 0 ? 1 : (u < 0 ? -1 : 0);
        if (s > s0 && !cert.sign_beyond && sg) cert.sign_beyond = sg;
    }
    for (auto it = cert.samples.rbegin(); it != cert.samples.rend(); ++it)
        if (it->first < s0 && it->second != 0) {
            cert.sign_below = it->second > 0 ? 1 : -1;
            break;
        }
    cert.grid_ok = cert.sign_beyond != 0 && cert.sign_below == -cert.sign_beyond;
    for (const auto& [s, u] : cert.samples)
        if (s > s0 && ((u > 0 ? 1 : (u < 0 ? -1 : 0)) != cert.sign_beyond)) {
            cert.anomaly_at = s;
            cert.grid_ok = false;
            break;
        }
    if (throw_on_anomaly && cert.anomaly_at)
        throw SignAnomaly("wrong sign at r^2 = " + std::to_string(*cert.anomaly_at));
    return cert;
}

// Numerical Laurent data at s = 2m: Richardson-extrapolated symmetric and antisymmetric
// differences of U with steps h, h/2, h/4.
inline std::pair<Real, Real> numeric_special_values(const Evaluator& ev, long m, const Real& h) {
    PrecisionGuard g(ev.config().precision);
    const Real s0(2 * m);
    Real v[3], d[3];
    Real hh = h;
    for (int i = 0; i < 3; ++i) {
        const Real up = ev.U(s0 + hh), dn = ev.U(s0 - hh);
        v[i] = (up + dn) / Real(2L);
        d[i] = (up - dn) / (Real(2L) * hh);
        hh = hh / Real(2L);
    }
    auto rich = [](Real a[3]) {
        const Real b0 = (Real(4L) * a[1] - a[0]) / Real(3L), b1 = (Real(4L) * a[2] - a[1]) / Real(3L);
        return (Real(16L) * b1 - b0) / Real(15L);
    };
    return {rich(v), rich(d)};
}

}  // namespace fe

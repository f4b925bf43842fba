#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace fe {

// ---------------------------------------------------------------------------
// raw generators (no caching)

inline QSeries eisenstein(int k2, long N) {
    if (k2 < 2 || k2 % 2 != 0) throw InvalidWeight("Eisenstein weight must be even and >= 2, got " + std::to_string(k2));
    const Rational c = Rational(-2 * k2) / bernoulli(k2);
    const auto sig = sigma_table(static_cast<unsigned>(k2 - 1), N);
    return QSeries::generate(2, 0, 2 * N, [&](long e2) -> Rational {
        const long n = e2 / 2;
        return n == 0 ? Rational(1) : c * Rational(sig[n]);
    });
}

// prod_{n>=1} (1 - q^n) by the pentagonal number theorem
inline QSeries euler_product(long N) {
    std::vector<Rational> c(static_cast<std::size_t>(N), Rational(0));
    for (long k = 0;; ++k) {
        bool any = false;
        for (long kk : {k, -k}) {
            if (k == 0 && kk != 0) continue;
            const long e = kk * (3 * kk - 1) / 2;
            if (e < N) {
                c[static_cast<std::size_t>(e)] = (k % 2 == 0) ? 1 : -1;
                any = true;
            }
        }
        if (!any && k > 0) break;
    }
    return QSeries::from_coeffs(2, 0, 2 * N, std::move(c));
}

inline QSeries delta_product(long N) { return euler_product(N).pow(24).shifted(2).truncated(2 * N); }

inline QSeries delta_eisenstein(long N) {
    const QSeries e4 = eisenstein(4, N), e6 = eisenstein(6, N);
    return (e4.pow(3) - e6 * e6) / Rational(1728);
}

inline Integer r4(long k) {
    if (k == 0) return 1;
    Integer r = 8 * sigma(1, k);
    if (k % 4 == 0) r -= 32 * sigma(1, k / 4);
    return r;
}

// 1 + sum r4(n) s^n q^{n/2} with s = +1 (theta00^4) or -1 (theta01^4)
inline QSeries theta4_series(int s, long N) {
    return QSeries::generate(1, 0, 2 * N, [&](long n) -> Rational {
        if (n == 0) return 1;
        Rational v(r4(n));
        return (s < 0 && n % 2) ? Rational(-v) : v;
    });
}

// ---------------------------------------------------------------------------
// catalog

enum class Gen { E2, E4, E6, E2k, Delta, J, JPrime, Theta00_4, Theta01_4, Theta10_4, Lambda, Omega, Chi };

struct GeneratorId {
    Gen gen;
    int a = 0;  // E2k: weight; Omega: m; Chi: i
    int b = 0;  // Chi: k

    std::string name() const {
        switch (gen) {
            case Gen::E2: return "E2";
            case Gen::E4: return "E4";
            case Gen::E6: return "E6";
            case Gen::E2k: return "E" + std::to_string(a);
            case Gen::Delta: return "Delta";
            case Gen::J: return "J";
            case Gen::JPrime: return "JPrime";
            case Gen::Theta00_4: return "Theta00_4";
            case Gen::Theta01_4: return "Theta01_4";
            case Gen::Theta10_4: return "Theta10_4";
            case Gen::Lambda: return "Lambda";
            case Gen::Omega: return "Omega" + std::to_string(a);
            case Gen::Chi: return "Chi" + std::to_string(a) + "_" + std::to_string(b);
        }
        return "?";
    }
    bool valid() const {
        if (gen == Gen::E2k) return a >= 2 && a % 2 == 0;
        if (gen == Gen::Omega) return a >= 0 && a <= 7;
        if (gen == Gen::Chi) return (a == 1 || a == 2) && b >= 0 && b <= 5;
        return true;
    }
    friend bool operator<(const GeneratorId& x, const GeneratorId& y) {
        return std::tie(x.gen, x.a, x.b) < std::tie(y.gen, y.a, y.b);
    }
};

inline std::optional<GeneratorId> parse_generator(const std::string& s) {
    static const std::map<std::string, Gen> simple{
        {"E2", Gen::E2},         {"E4", Gen::E4},         {"E6", Gen::E6},
        {"Delta", Gen::Delta},   {"J", Gen::J},           {"JPrime", Gen::JPrime},
        {"Theta00_4", Gen::Theta00_4}, {"Theta01_4", Gen::Theta01_4}, {"Theta10_4", Gen::Theta10_4},
        {"Lambda", Gen::Lambda}};
    if (auto it = simple.find(s); it != simple.end()) return GeneratorId{it->second};
    try {
        if (s.rfind("Omega", 0) == 0) return GeneratorId{Gen::Omega, std::stoi(s.substr(5))};
        if (s.rfind("Chi", 0) == 0) {
            auto us = s.find('_');
            if (us == std::string::npos) return std::nullopt;
            return GeneratorId{Gen::Chi, std::stoi(s.substr(3, us - 3)), std::stoi(s.substr(us + 1))};
        }
        if (s.size() > 1 && s[0] == 'E') return GeneratorId{Gen::E2k, std::stoi(s.substr(1))};
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

// Rational function theta00^{4k} * num(lambda) / (lambda^a (1-lambda)^b).
struct ChiShape {
    int k;
    std::vector<long> num;  // coefficients of 1, lambda, lambda^2, ...
    int a, b;
};

inline ChiShape chi_shape(int i, int k) {
    static const ChiShape table[2][6] = {
        {{0, {1, -1, 0, 1, -1}, 2, 0},  // (1-l)(1+l^3)
         {1, {1, -1}, 0, 0},
         {2, {1, 0, -1}, 0, 0},
         {3, {1, -2, 2, -1}, 0, 0},     // (1-l)(1-l+l^2)
         {4, {0, 1, 0, -1}, 0, 0},
         {5, {0, 1, -5, 5, -1}, 0, 0}},  // l(1-l)(1-4l+l^2)
        {{0, {1, 0, 0, 1}, 1, 1},
         {1, {2, -3, -1, 1, 3, -2}, 2, 0},  // (1-l)^3(2+3l+2l^2)
         {2, {1, 4, -4, -4, 4, 1}, 1, 1},     // (1+l)(1+3l-7l^2+3l^3+l^4)
         {3, {1, 2, -12, 16, -12, 2, 1}, 1, 1},  // (1-l+l^2)(1+3l-10l^2+3l^3+l^4)
         {4, {1, 0, 0, 0, 0, 0, 0, 1}, 1, 1},     // (1+l)(1-l+...+l^6) = 1+l^7
         {5, {1, 0, 0, -32, 60, -32, 0, 0, 1}, 1, 1}}};
    if (i < 1 || i > 2 || k < 0 || k > 5) throw InvalidId("chi index out of range");
    return table[i - 1][k];
}

class Catalog {
public:
    // Every generator is returned with integer truncation exactly N.
    QSeries get(const GeneratorId& id, long N) {
        if (!id.valid()) throw InvalidId("invalid generator " + id.name());
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(id);
            if (it != cache_.end())
                for (const auto& [n, s] : it->second)
                    if (n >= N) return s.truncated(2 * N);
        }
        QSeries s = compute(id, N);
        if (s.trunc2() < 2 * N) throw TruncationTooSmall("generator " + id.name() + " lost precision");
        s = s.truncated(2 * N);
        std::lock_guard<std::mutex> lk(mu_);
        cache_[id][N] = s;
        return s;
    }

    QSeries operator()(Gen g, long N) { return get(GeneratorId{g}, N); }

    // Snapshot of the cache (for persistence).
    std::vector<std::pair<GeneratorId, QSeries>> entries() {
        std::lock_guard<std::mutex> lk(mu_);
        std::vector<std::pair<GeneratorId, QSeries>> out;
        for (const auto& [id, m] : cache_)
            for (const auto& [n, s] : m) out.emplace_back(id, s);
        return out;
    }
    void insert(const GeneratorId& id, const QSeries& s) {
        std::lock_guard<std::mutex> lk(mu_);
        cache_[id][s.trunc()] = s;
    }

private:
    static constexpr long kMargin = 6;

    QSeries compute(const GeneratorId& id, long N) {
        const long M = N + kMargin;
        switch (id.gen) {
            case Gen::E2: return eisenstein(2, N);
            case Gen::E4: return eisenstein(4, N);
            case Gen::E6: return eisenstein(6, N);
            case Gen::E2k: return eisenstein(id.a, N);
            case Gen::Delta: return delta_product(N);
            case Gen::J: return get({Gen::E4}, M).pow(3) * get({Gen::Delta}, M).inverse();
            case Gen::JPrime: return get({Gen::J}, N).derive();
            case Gen::Theta00_4: return theta4_series(1, N);
            case Gen::Theta01_4: return theta4_series(-1, N);
            case Gen::Theta10_4: return theta4_series(1, N) - theta4_series(-1, N);
            case Gen::Lambda: return get({Gen::Theta10_4}, M) * get({Gen::Theta00_4}, M).inverse();
            case Gen::Omega: return omega(id.a, M);
            case Gen::Chi: return chi(id.a, id.b, M);
        }
        throw InvalidId(id.name());
    }

    QSeries omega(int m, long M) {
        auto E4 = get({Gen::E4}, M), E6 = get({Gen::E6}, M), D = get({Gen::Delta}, M);
        switch (m) {
            case 0: return QSeries::constant(1, M);
            case 1: return E4 * E4 * E6 * D.inverse();
            case 2: return E4;
            case 3: return E6;
            case 4: return E4 * E4;
            case 5: return E4 * E6;
            case 6: return D;
            default: return E4 * E4 * E6;
        }
    }

    QSeries chi(int i, int k, long M) {
        const ChiShape sh = chi_shape(i, k);
        const QSeries lam = get({Gen::Lambda}, M);
        QSeries num = QSeries::zero(0, 2 * M, 1), p = QSeries::constant(1, M);
        for (std::size_t e = 0; e < sh.num.size(); ++e) {
            if (sh.num[e]) num += p * Rational(sh.num[e]);
            p = p * lam;
        }
        QSeries r = num;
        if (sh.a) r = r * lam.pow(-sh.a);
        if (sh.b) r = r * (QSeries::constant(1, M) - lam).pow(-sh.b);
        if (k) r = r * get({Gen::Theta00_4}, M).pow(k);
        return r;
    }

    std::mutex mu_;
    std::map<GeneratorId, std::map<long, QSeries>> cache_;
};

inline Catalog& catalog() {
    static Catalog c;
    return c;
}

inline QSeries gen(Gen g, long N) { return catalog()(g, N); }
inline QSeries omega_m(int m, long N) { return catalog().get({Gen::Omega, m}, N); }
inline QSeries chi_series(int i, int k, long N) { return catalog().get({Gen::Chi, i, k}, N); }

// Integer truncation needed for a level-one multiplier so that x * mult keeps x's window.
inline long partner_trunc(const QSeries& x) {
    const long lo = x.lo2() >= 0 ? x.lo2() / 2 : -((-x.lo2() + 1) / 2);
    return std::max<long>(x.trunc() - std::min<long>(lo, 0) + 1, 1);
}
inline QSeries gen_for(Gen g, const QSeries& x) { return gen(g, partner_trunc(x)); }

// ---------------------------------------------------------------------------
// log lambda

struct LogLambda {
    // log lambda = (pi i) z + const_ln2 * ln 2 + tail
    Rational const_ln2 = 4;
    QSeries tail;
};

inline LogLambda log_lambda(long N) {
    LogLambda L;
    L.tail = QSeries::generate(1, 1, 2 * N, [](long k) -> Rational {
        Rational v = frac(r4(k), Integer(k));
        return (k % 2) ? Rational(-v) : v;
    });
    return L;
}

inline QSeries log_lambda_S(long N) {
    return QSeries::generate(1, 1, 2 * N, [](long e2) -> Rational {
        if (e2 % 2 == 0) return 0;
        return frac(-16 * sigma(1, e2), e2);
    });
}

// ---------------------------------------------------------------------------
// Serre derivative and brackets on plain series

// d_k f = f' - (k/12) E2 f
inline QSeries serre(const QSeries& f, int k) {
    if (k == 0) return f.derive();
    return f.derive() - gen_for(Gen::E2, f) * f * frac(k, 12);
}

inline QSeries rankin_cohen(const QSeries& f, const QSeries& g, int n, int k, int l) {
    std::vector<QSeries> df{f}, dg{g};
    for (int i = 1; i <= n; ++i) {
        df.push_back(df.back().derive());
        dg.push_back(dg.back().derive());
    }
    std::optional<QSeries> acc;
    for (int i = 0; i <= n; ++i) {
        Rational c(binomial(n + k - 1, n - i) * binomial(n + l - 1, i));
        if (i % 2) c = -c;
        QSeries t = df[static_cast<std::size_t>(i)] * dg[static_cast<std::size_t>(n - i)] * c;
        acc = acc ? *acc + t : t;
    }
    return *acc;
}

// ---------------------------------------------------------------------------
// quasimodular triples  A + E2 B + E2^2 C

struct QuasiForm {
    int weight = 0;
    QSeries A, B, C;

    static QuasiForm modular(int w, const QSeries& a) {
        QSeries z = QSeries::zero(a.lo2(), a.trunc2(), a.step());
        return {w, a, z, z};
    }

    int depth() const {
        if (!C.is_zero()) return 2;
        if (!B.is_zero()) return 1;
        return 0;
    }

    QSeries collapse() const {
        const QSeries e2 = gen(Gen::E2, std::max({partner_trunc(A), partner_trunc(B), partner_trunc(C)}));
        return A + e2 * (B + e2 * C);
    }

    // (f, g, h) with h = C and g = -B/2 - E2 C
    QSeries g_series() const {
        const QSeries e2 = gen_for(Gen::E2, C);
        return B * frac(-1, 2) - e2 * C;
    }

    QuasiForm operator*(const QSeries& m) const { return {weight, A * m, B * m, C * m}; }
    QuasiForm operator*(const Rational& r) const { return {weight, A * r, B * r, C * r}; }
    QuasiForm operator+(const QuasiForm& o) const { return {weight, A + o.A, B + o.B, C + o.C}; }
    QuasiForm operator-(const QuasiForm& o) const { return {weight, A - o.A, B - o.B, C - o.C}; }
    QuasiForm with_weight(int w) const { return {w, A, B, C}; }
};

// Serre derivative of a triple with explicit operator index. The component rule
// is exact for d_{w-2}; other indices are reduced to it by adding a multiple of E2 f.
inline QuasiForm serre_derivative(const QuasiForm& f, int index) {
    const int w = f.weight;
    const QSeries E4 = gen(Gen::E4, std::max({partner_trunc(f.A), partner_trunc(f.B), partner_trunc(f.C)}));
    QuasiForm r;
    r.weight = w + 2;
    r.A = serre(f.A, w) - E4 * f.B * frac(1, 12);
    r.B = f.A * frac(1, 6) + serre(f.B, w - 2) - E4 * f.C * frac(1, 6);
    r.C = f.B * frac(1, 12) + serre(f.C, w - 4);
    if (index != w - 2) {
        // d_index f = d_{w-2} f - ((index - w + 2)/12) E2 f; push E2 f through the triple,
        // which may raise depth to 3 if C != 0.
        const Rational c = frac(index - w + 2, 12);
        if (!f.C.is_zero()) throw InvalidWeight("Serre index would leave depth 2");
        r.B -= f.A * c;
        r.C -= f.B * c;
    }
    return r;
}

// Index convention: d_w on modular (depth 0) input, d_{w-2} otherwise.
inline QuasiForm serre_derivative(const QuasiForm& f) {
    return serre_derivative(f, f.depth() == 0 ? f.weight : f.weight - 2);
}

// ---------------------------------------------------------------------------
// forms with a log lambda component:  F log(lambda) + Om

struct LogForm {
    QSeries F;   // level-one coefficient of log lambda
    QSeries Om;  // Gamma(2) part (half-integer exponents allowed)

    LogForm operator*(const QSeries& m) const { return {F * m, Om * m}; }
    LogForm operator*(const Rational& r) const { return {F * r, Om * r}; }
    LogForm operator+(const LogForm& o) const { return {F + o.F, Om + o.Om}; }
    LogForm operator-(const LogForm& o) const { return {F - o.F, Om - o.Om}; }

    // (F log lambda)' = F' log lambda + F theta01^4 / 2
    LogForm derive() const {
        const QSeries t01 = gen_for(Gen::Theta01_4, F);
        return {F.derive(), Om.derive() + t01 * F * frac(1, 2)};
    }
    LogForm serre(int k) const {
        const QSeries t01 = gen_for(Gen::Theta01_4, F);
        return {fe::serre(F, k), fe::serre(Om, k) + t01 * F * frac(1, 2)};
    }
    bool is_zero() const { return F.is_zero() && Om.is_zero(); }
};

// ---------------------------------------------------------------------------
// identity suite

struct IdentityResult {
    std::string name;
    std::optional<long> residual_valuation2;  // nullopt = zero to truncation
    long trunc2;
};

inline void require_zero(std::vector<IdentityResult>& out, const std::string& name, const QSeries& residual) {
    auto v = residual.valuation2();
    out.push_back({name, v, residual.trunc2()});
    if (v) {
        const std::string e = (*v % 2) ? std::to_string(*v) + "/2" : std::to_string(*v / 2);
        throw IdentityViolation(name + " fails at q^" + e);
    }
}

// Ramanujan, theta', lambda', Jacobi, j-lambda and the lambda minimal polynomial.
// An override for E4 allows fault injection.
inline std::vector<IdentityResult> ramanujan_suite(long N, const std::optional<QSeries>& e4_override = std::nullopt) {
    std::vector<IdentityResult> out;
    const long M = N + 4;
    const QSeries E2 = gen(Gen::E2, M);
    const QSeries E4 = e4_override ? *e4_override : gen(Gen::E4, M);
    const QSeries E6 = gen(Gen::E6, M);
    auto cut = [&](const QSeries& s) { return s.truncated(2 * N); };
    require_zero(out, "E2' = (E2^2 - E4)/12", cut(E2.derive() - (E2 * E2 - E4) * frac(1, 12)));
    require_zero(out, "E4' = (E2 E4 - E6)/3", cut(E4.derive() - (E2 * E4 - E6) * frac(1, 3)));
    require_zero(out, "E6' = (E2 E6 - E4^2)/2", cut(E6.derive() - (E2 * E6 - E4 * E4) * frac(1, 2)));

    const QSeries t00 = gen(Gen::Theta00_4, M), t01 = gen(Gen::Theta01_4, M), t10 = gen(Gen::Theta10_4, M);
    const QSeries lam = gen(Gen::Lambda, M);
    require_zero(out, "theta01^4 + theta10^4 = theta00^4", cut(t01 + t10 - t00));
    require_zero(out, "lambda' = theta01^4 lambda / 2", cut(lam.derive() - t01 * lam * frac(1, 2)));
    require_zero(out, "(theta00^4)'", cut(t00.derive() - (E2 * t00 - t01 * t01 + t10 * t10) * frac(1, 6)));
    require_zero(out, "(theta01^4)'",
                 cut(t01.derive() - (E2 * t01 - t01 * t01 - t01 * t10 * Rational(2)) * frac(1, 6)));
    require_zero(out, "(theta10^4)'",
                 cut(t10.derive() - (E2 * t10 + t01 * t10 * Rational(2) + t10 * t10) * frac(1, 6)));

    const QSeries J = gen(Gen::J, M);
    const QSeries one = QSeries::constant(1, M);
    const QSeries oml = one - lam;
    const QSeries u = one - lam + lam * lam;
    require_zero(out, "j lambda^2 (1-lambda)^2 = 256 (1-lambda+lambda^2)^3",
                 cut(J * lam * lam * oml * oml - u.pow(3) * Rational(256)));
    // lambda^6 - 3 lambda^5 + (6-J) lambda^4 - (7-2J) lambda^3 + (6-J) lambda^2 - 3 lambda + 1
    // holds with J = j/256 (the normalization consistent with the j-lambda relation)
    const QSeries Jn = J * frac(1, 256);
    const QSeries six_j = one * Rational(6) - Jn;
    const QSeries l2 = lam * lam, l3 = l2 * lam, l4 = l3 * lam, l5 = l4 * lam, l6 = l5 * lam;
    require_zero(out, "lambda minimal polynomial",
                 cut(l6 - l5 * Rational(3) + six_j * l4 - (one * Rational(7) - Jn * Rational(2)) * l3 + six_j * l2 -
                     lam * Rational(3) + one));
    require_zero(out, "1728 Delta = E4^3 - E6^2", cut(gen(Gen::Delta, M) * Rational(1728) - E4.pow(3) + E6 * E6));
    return out;
}

}  // namespace fe

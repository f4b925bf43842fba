#pragma once

#include <gmp.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace fe {

namespace detail {

inline std::size_t bit_size(const Integer& x) {
    return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline void schoolbook(const std::vector<Integer>& a, const std::vector<Integer>& b, std::size_t n,
                       std::vector<Integer>& out) {
    out.assign(n, Integer(0));
    const std::size_t na = std::min(a.size(), n);
    for (std::size_t i = 0; i < na; ++i) {
        if (a[i] == 0) continue;
        const std::size_t nb = std::min(b.size(), n - i);
        for (std::size_t j = 0; j < nb; ++j) {
            if (b[j] != 0) mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
        }
    }
}

// Pack signed coefficients into one integer X = sum a_i 2^{i*B}, B = L limbs.
inline Integer kron_pack(const std::vector<Integer>& a, std::size_t count, std::size_t L) {
    std::vector<mp_limb_t> pos(count * L, 0), neg(count * L, 0);
    bool any_neg = false;
    for (std::size_t i = 0; i < count; ++i) {
        const int sg = sgn(a[i]);
        if (sg == 0) continue;
        auto& buf = sg > 0 ? pos : neg;
        any_neg |= sg < 0;
        std::size_t written = 0;
        mpz_export(buf.data() + i * L, &written, -1, sizeof(mp_limb_t), 0, 0, a[i].get_mpz_t());
    }
    Integer P, N;
    mpz_import(P.get_mpz_t(), pos.size(), -1, sizeof(mp_limb_t), 0, 0, pos.data());
    if (any_neg) {
        mpz_import(N.get_mpz_t(), neg.size(), -1, sizeof(mp_limb_t), 0, 0, neg.data());
        P -= N;
    }
    return P;
}

inline void kronecker(const std::vector<Integer>& a, const std::vector<Integer>& b, std::size_t n,
                      std::vector<Integer>& out) {
    const std::size_t na = std::min(a.size(), n), nb = std::min(b.size(), n);
    std::size_t ba = 0, bb = 0;
    for (std::size_t i = 0; i < na; ++i) ba = std::max(ba, bit_size(a[i]));
    for (std::size_t i = 0; i < nb; ++i) bb = std::max(bb, bit_size(b[i]));
    out.assign(n, Integer(0));
    if (ba == 0 || bb == 0) return;
    std::size_t lg = 1;
    while ((std::size_t(1) << lg) < std::min(na, nb) + 1) ++lg;
    const std::size_t bits = ba + bb + lg + 2;
    const std::size_t L = (bits + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;
    Integer X = kron_pack(a, na, L), Y = kron_pack(b, nb, L);
    Integer Z = X * Y;
    const int zs = sgn(Z);
    if (zs == 0) return;
    if (zs < 0) Z = -Z;
    const std::size_t slots = std::min(n, na + nb - 1);
    std::vector<mp_limb_t> buf((na + nb) * L + 1, 0);
    std::size_t written = 0;
    mpz_export(buf.data(), &written, -1, sizeof(mp_limb_t), 0, 0, Z.get_mpz_t());
    Integer half, full, chunk;
    mpz_setbit(half.get_mpz_t(), L * GMP_NUMB_BITS - 1);
    mpz_setbit(full.get_mpz_t(), L * GMP_NUMB_BITS);
    int carry = 0;
    for (std::size_t i = 0; i < slots; ++i) {
        mpz_import(chunk.get_mpz_t(), L, -1, sizeof(mp_limb_t), 0, 0, buf.data() + i * L);
        chunk += carry;
        if (chunk >= half) {
            chunk -= full;
            carry = 1;
        } else {
            carry = 0;
        }
        out[i] = zs < 0 ? Integer(-chunk) : chunk;
    }
}

inline void int_mul(const std::vector<Integer>& a, const std::vector<Integer>& b, std::size_t n,
                    std::vector<Integer>& out) {
    if (std::min({a.size(), b.size(), n}) < 24) {
        schoolbook(a, b, n, out);
    } else {
        kronecker(a, b, n, out);
    }
}

inline Integer common_denominator(const std::vector<Rational>& v, std::size_t n) {
    Integer D = 1;
    for (std::size_t i = 0; i < std::min(n, v.size()); ++i) {
        if (v[i].get_den() != 1) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), v[i].get_den_mpz_t());
    }
    return D;
}

inline std::vector<Integer> scale_to_integers(const std::vector<Rational>& v, std::size_t n, const Integer& D) {
    std::vector<Integer> out(std::min(n, v.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = v[i].get_num();
        if (D != 1) {
            Integer f;
            mpz_divexact(f.get_mpz_t(), D.get_mpz_t(), v[i].get_den_mpz_t());
            out[i] *= f;
        }
    }
    return out;
}

// Truncated product of coefficient vectors: first n slots of a*b.
inline std::vector<Rational> mul_trunc(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                       std::size_t n) {
    const Integer Da = common_denominator(a, n), Db = common_denominator(b, n);
    const auto A = scale_to_integers(a, n, Da), B = scale_to_integers(b, n, Db);
    std::vector<Integer> C;
    int_mul(A, B, n, C);
    const Integer D = Da * Db;
    std::vector<Rational> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (C[i] == 0) continue;
        mpz_set(out[i].get_num_mpz_t(), C[i].get_mpz_t());
        mpz_set(out[i].get_den_mpz_t(), D.get_mpz_t());
        out[i].canonicalize();
    }
    return out;
}

// Reciprocal of a power series with nonzero constant term, first n slots. Newton iteration.
inline std::vector<Rational> inverse_trunc(const std::vector<Rational>& a, std::size_t n) {
    std::vector<Rational> b{Rational(1) / a[0]};
    std::size_t m = 1;
    while (m < n) {
        m = std::min(2 * m, n);
        auto ab = mul_trunc(a, b, m);
        // e = 1 - a*b, which vanishes below the previous precision
        for (auto& x : ab) x = -x;
        ab[0] += 1;
        auto corr = mul_trunc(b, ab, m);
        b.resize(m);
        for (std::size_t i = 0; i < m; ++i) b[i] += corr[i];
    }
    b.resize(n);
    return b;
}

}  // namespace detail

// Truncated Laurent/Puiseux series in q. Exponents are kept in half units:
// "e2" below always means twice the exponent. step() is 2 for integer-only
// series and 1 when half-integer exponents are allowed.
class QSeries {
public:
    QSeries() = default;

    // All slots zero on [lo2, trunc2).
    static QSeries zero(long lo2, long trunc2, int step = 2) {
        QSeries s;
        s.step_ = step;
        s.lo2_ = align_down(lo2, step);
        s.trunc2_ = align_up(trunc2, step);
        if (s.trunc2_ <= s.lo2_) s.trunc2_ = s.lo2_ + step;
        s.c_.assign(static_cast<std::size_t>((s.trunc2_ - s.lo2_) / step), Rational(0));
        return s;
    }

    // c * q^{e2/2} known to trunc2.
    static QSeries monomial(const Rational& c, long e2, long trunc2) {
        const int step = (e2 % 2 == 0) ? 2 : 1;
        QSeries s = zero(e2, std::max(trunc2, e2 + step), step);
        if (e2 < s.trunc2_) s.c_[0] = c;
        return s;
    }

    static QSeries constant(const Rational& c, long trunc) { return monomial(c, 0, 2 * trunc); }

    static QSeries from_coeffs(int step, long lo2, long trunc2, std::vector<Rational> coeffs) {
        QSeries s = zero(lo2, trunc2, step);
        for (std::size_t i = 0; i < std::min(coeffs.size(), s.c_.size()); ++i) s.c_[i] = std::move(coeffs[i]);
        s.normalize();
        return s;
    }

    // Series with coefficient fn(e2) at every slot of the window.
    static QSeries generate(int step, long lo2, long trunc2, const std::function<Rational(long)>& fn) {
        QSeries s = zero(lo2, trunc2, step);
        for (std::size_t i = 0; i < s.c_.size(); ++i) s.c_[i] = fn(s.lo2_ + static_cast<long>(i) * step);
        s.normalize();
        return s;
    }

    int step() const { return step_; }
    bool half() const { return step_ == 1; }
    long lo2() const { return lo2_; }
    long trunc2() const { return trunc2_; }
    // Integer truncation order (largest integer T with every exponent < T known).
    long trunc() const { return trunc2_ >= 0 ? trunc2_ / 2 : -((-trunc2_ + 1) / 2); }
    std::size_t size() const { return c_.size(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    bool empty() const { return c_.empty(); }

    // Coefficient of q^{e2/2}. Asking beyond the truncation is a logic error.
    Rational coeff2(long e2) const {
        if (e2 >= trunc2_) throw TruncationTooSmall("coefficient at q^" + std::to_string(e2) + "/2 beyond truncation");
        if (e2 < lo2_ || (e2 - lo2_) % step_ != 0) return 0;
        return c_[static_cast<std::size_t>((e2 - lo2_) / step_)];
    }
    Rational coeff(long e) const { return coeff2(2 * e); }

    // Least exponent (half units) with nonzero coefficient; nullopt = zero to truncation.
    std::optional<long> valuation2() const {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0) return lo2_ + static_cast<long>(i) * step_;
        return std::nullopt;
    }
    bool is_zero() const { return !valuation2().has_value(); }

    // Drop leading zero slots (at least one slot is always kept).
    void normalize() {
        std::size_t k = 0;
        while (k + 1 < c_.size() && c_[k] == 0) ++k;
        if (k) {
            c_.erase(c_.begin(), c_.begin() + static_cast<long>(k));
            lo2_ += static_cast<long>(k) * step_;
        }
    }

    QSeries with_step(int step) const {
        if (step == step_) return *this;
        if (step == 1) {
            QSeries s = zero(lo2_, trunc2_, 1);
            for (std::size_t i = 0; i < c_.size(); ++i) s.c_[2 * i] = c_[i];
            return s;
        }
        // demotion: half slots must be zero
        QSeries s = zero(lo2_, trunc2_, 2);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            const long e2 = lo2_ + static_cast<long>(i);
            if (c_[i] == 0) continue;
            if (e2 % 2 != 0) throw IdentityViolation("cannot demote: nonzero half-integer exponent");
            s.c_[static_cast<std::size_t>((e2 - s.lo2_) / 2)] = c_[i];
        }
        s.normalize();
        return s;
    }

    // Use the coarsest step that represents the known coefficients.
    QSeries compact() const {
        if (step_ == 2) return *this;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0 && (lo2_ + static_cast<long>(i)) % 2 != 0) return *this;
        return with_step(2);
    }

    QSeries truncated(long trunc2) const {
        if (trunc2 >= trunc2_) return *this;
        QSeries s = zero(lo2_, trunc2, step_);
        for (std::size_t i = 0; i < s.c_.size() && i < c_.size(); ++i) s.c_[i] = c_[i];
        s.normalize();
        return s;
    }

    // Multiply by q^{e2/2}.
    QSeries shifted(long e2) const {
        QSeries s = *this;
        if (step_ == 2 && e2 % 2 != 0) s = s.with_step(1);
        s.lo2_ += e2;
        s.trunc2_ += e2;
        return s;
    }

    QSeries operator-() const {
        QSeries s = *this;
        for (auto& x : s.c_) x = -x;
        return s;
    }

    QSeries& operator*=(const Rational& r) {
        for (auto& x : c_) x *= r;
        normalize();
        return *this;
    }
    friend QSeries operator*(QSeries a, const Rational& r) { return a *= r; }
    friend QSeries operator*(const Rational& r, QSeries a) { return a *= r; }
    friend QSeries operator/(QSeries a, const Rational& r) { return a *= Rational(1) / r; }

    friend QSeries combine(const QSeries& a, const QSeries& b, int sgn_b) {
        const int step = std::min(a.step_, b.step_);
        QSeries s = zero(std::min(a.lo2_, b.lo2_), std::min(a.trunc2_, b.trunc2_), step);
        auto acc = [&](const QSeries& x, bool neg) {
            for (std::size_t i = 0; i < x.c_.size(); ++i) {
                const long e2 = x.lo2_ + static_cast<long>(i) * x.step_;
                if (e2 >= s.trunc2_) break;
                auto& dst = s.c_[static_cast<std::size_t>((e2 - s.lo2_) / step)];
                if (neg) dst -= x.c_[i]; else dst += x.c_[i];
            }
        };
        acc(a, false);
        acc(b, sgn_b < 0);
        s.normalize();
        return s;
    }
    friend QSeries operator+(const QSeries& a, const QSeries& b) { return combine(a, b, 1); }
    friend QSeries operator-(const QSeries& a, const QSeries& b) { return combine(a, b, -1); }
    QSeries& operator+=(const QSeries& b) { return *this = *this + b; }
    QSeries& operator-=(const QSeries& b) { return *this = *this - b; }

    friend QSeries operator*(const QSeries& a0, const QSeries& b0) {
        const int step = std::min(a0.step_, b0.step_);
        const QSeries a = a0.with_step(step), b = b0.with_step(step);
        const long lo2 = a.lo2_ + b.lo2_;
        const long trunc2 = std::min(a.lo2_ + b.trunc2_, b.lo2_ + a.trunc2_);
        const auto n = static_cast<std::size_t>((trunc2 - lo2) / step);
        QSeries s;
        s.step_ = step;
        s.lo2_ = lo2;
        s.trunc2_ = trunc2;
        s.c_ = detail::mul_trunc(a.c_, b.c_, n);
        s.normalize();
        return s;
    }
    QSeries& operator*=(const QSeries& b) { return *this = *this * b; }

    QSeries inverse() const {
        auto v = valuation2();
        if (!v) throw ZeroLeadingCoefficient("series vanishes to truncation");
        const QSeries a = this->truncated(trunc2_);
        const std::size_t off = static_cast<std::size_t>((*v - lo2_) / step_);
        std::vector<Rational> u(a.c_.begin() + static_cast<long>(off), a.c_.end());
        QSeries s;
        s.step_ = step_;
        s.lo2_ = -*v;
        s.trunc2_ = trunc2_ - 2 * *v;
        s.c_ = detail::inverse_trunc(u, u.size());
        s.normalize();
        return s;
    }

    // q d/dq
    QSeries derive() const {
        QSeries s = *this;
        for (std::size_t i = 0; i < s.c_.size(); ++i) {
            const long e2 = lo2_ + static_cast<long>(i) * step_;
            s.c_[i] *= frac(e2, 2);
        }
        s.normalize();
        return s;
    }
    QSeries derive(int times) const {
        QSeries s = *this;
        for (int i = 0; i < times; ++i) s = s.derive();
        return s;
    }

    QSeries pow(long n) const {
        if (n < 0) return inverse().pow(-n);
        if (n == 0) return one_like();
        std::optional<QSeries> result;
        QSeries base = *this;
        while (n) {
            if (n & 1) result = result ? *result * base : base;
            n >>= 1;
            if (n) base = base * base;
        }
        return *result;
    }

    // z -> z+1: q^{1/2} -> -q^{1/2}
    QSeries t_action() const {
        QSeries s = *this;
        if (step_ == 2) return s;
        for (std::size_t i = 0; i < s.c_.size(); ++i)
            if ((lo2_ + static_cast<long>(i)) % 2 != 0) s.c_[i] = -s.c_[i];
        return s;
    }

    // Parts with integer resp. half-integer exponents.
    QSeries integer_part() const {
        if (step_ == 2) return *this;
        QSeries s = *this;
        for (std::size_t i = 0; i < s.c_.size(); ++i)
            if ((lo2_ + static_cast<long>(i)) % 2 != 0) s.c_[i] = 0;
        s.normalize();
        return s;
    }
    QSeries half_part() const {
        QSeries s = with_step(1);
        for (std::size_t i = 0; i < s.c_.size(); ++i)
            if ((s.lo2_ + static_cast<long>(i)) % 2 == 0) s.c_[i] = 0;
        s.normalize();
        return s;
    }

    // Terms with exponent <= e2/2 (the principal part for e2 = 0).
    QSeries head(long e2_inclusive) const { return truncated(e2_inclusive + 1); }

    // Exact equality on the common window.
    friend bool agree(const QSeries& a, const QSeries& b) { return (a - b).is_zero(); }

    // First slot where a and b differ on the common window, if any.
    friend std::optional<long> first_difference2(const QSeries& a, const QSeries& b) { return (a - b).valuation2(); }

    // Exact proportionality: returns r with a = r*b on the window (a, b nonzero).
    friend std::optional<Rational> ratio(const QSeries& a, const QSeries& b) {
        auto vb = b.valuation2();
        auto va = a.valuation2();
        if (!va || !vb || *va != *vb) return std::nullopt;
        Rational r = a.coeff2(*va) / b.coeff2(*vb);
        if (!(a - b * r).is_zero()) return std::nullopt;
        return r;
    }

    // The constant 1 known on a window as wide as this series' window.
    QSeries one_like() const { return monomial(1, 0, std::max<long>(trunc2_ - lo2_, 2)).with_step(step_); }

    friend std::ostream& operator<<(std::ostream& os, const QSeries& s) {
        bool first = true;
        for (std::size_t i = 0; i < s.c_.size(); ++i) {
            if (s.c_[i] == 0) continue;
            const long e2 = s.lo2_ + static_cast<long>(i) * s.step_;
            os << (first ? "" : " + ") << to_string(s.c_[i]);
            if (e2 != 0) os << "*q^" << (e2 % 2 ? std::to_string(e2) + "/2" : std::to_string(e2 / 2));
            first = false;
        }
        if (first) os << "0";
        os << " + O(q^" << (s.trunc2_ % 2 ? std::to_string(s.trunc2_) + "/2" : std::to_string(s.trunc2_ / 2)) << ")";
        return os;
    }

private:
    static long align_down(long x, int step) { return step == 1 ? x : (x >= 0 ? x - x % 2 : x - ((x % 2 + 2) % 2)); }
    static long align_up(long x, int step) { return step == 1 ? x : -align_down(-x, 2); }

    int step_ = 2;
    long lo2_ = 0;
    long trunc2_ = 0;
    std::vector<Rational> c_;
};

inline QSeries q_power(long e2, long trunc2) { return QSeries::monomial(1, e2, trunc2); }

}  // namespace fe

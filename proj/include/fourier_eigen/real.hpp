#pragma once

#include <mpfr.h>

#include <algorithm>
#include <string>
#include <utility>

#include "rational.hpp"

namespace fe {

inline mpfr_prec_t& default_precision() {
    thread_local mpfr_prec_t p = 256;
    return p;
}

struct PrecisionGuard {
    mpfr_prec_t saved;
    explicit PrecisionGuard(mpfr_prec_t p) : saved(default_precision()) { default_precision() = p; }
    ~PrecisionGuard() { default_precision() = saved; }
};

// Thin RAII wrapper over mpfr_t. Round-to-nearest unless a rounding mode is passed.
class Real {
public:
    Real() { mpfr_init2(v_, default_precision()); mpfr_set_zero(v_, 1); }
    Real(long x) { mpfr_init2(v_, default_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
    Real(int x) : Real(static_cast<long>(x)) {}
    Real(double x) { mpfr_init2(v_, default_precision()); mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(const Rational& q, mpfr_rnd_t r = MPFR_RNDN) { mpfr_init2(v_, default_precision()); mpfr_set_q(v_, q.get_mpq_t(), r); }
    Real(const Integer& z, mpfr_rnd_t r = MPFR_RNDN) { mpfr_init2(v_, default_precision()); mpfr_set_z(v_, z.get_mpz_t(), r); }
    Real(const std::string& s) { mpfr_init2(v_, default_precision()); mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN); }
    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long_ceil() const { return mpfr_get_si(v_, MPFR_RNDU); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    std::string str(int digits = 30) const {
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Rg", digits, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

    static Real pi(mpfr_rnd_t r = MPFR_RNDN) {
        Real x;
        mpfr_const_pi(x.v_, r);
        return x;
    }
    static Real ln2(mpfr_rnd_t r = MPFR_RNDN) {
        Real x;
        mpfr_const_log2(x.v_, r);
        return x;
    }

#define FE_REAL_BINOP(op, fn)                                                  \
    friend Real operator op(const Real& a, const Real& b) {                    \
        Real r = Real::with_prec(std::max(a.prec(), b.prec()));                \
        fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                       \
        return r;                                                              \
    }                                                                          \
    Real& operator op##=(const Real& b) { return *this = *this op b; }
    FE_REAL_BINOP(+, mpfr_add)
    FE_REAL_BINOP(-, mpfr_sub)
    FE_REAL_BINOP(*, mpfr_mul)
    FE_REAL_BINOP(/, mpfr_div)
#undef FE_REAL_BINOP

    Real operator-() const {
        Real r = with_prec(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_); }

    static Real with_prec(mpfr_prec_t p) {
        Real r;
        mpfr_set_prec(r.v_, p);
        return r;
    }

private:
    mpfr_t v_;
};

#define FE_REAL_FN(name, fn)                                  \
    inline Real name(const Real& x, mpfr_rnd_t r = MPFR_RNDN) { \
        Real y = Real::with_prec(x.prec());                   \
        fn(y.get(), x.get(), r);                              \
        return y;                                             \
    }
FE_REAL_FN(exp, mpfr_exp)
FE_REAL_FN(log, mpfr_log)
FE_REAL_FN(sqrt, mpfr_sqrt)
FE_REAL_FN(sin, mpfr_sin)
FE_REAL_FN(cos, mpfr_cos)
FE_REAL_FN(abs, mpfr_abs)
#undef FE_REAL_FN

inline Real pow(const Real& x, const Real& y, mpfr_rnd_t r = MPFR_RNDN) {
    Real z = Real::with_prec(std::max(x.prec(), y.prec()));
    mpfr_pow(z.get(), x.get(), y.get(), r);
    return z;
}
inline Real pow(const Real& x, long n, mpfr_rnd_t r = MPFR_RNDN) {
    Real z = Real::with_prec(x.prec());
    mpfr_pow_si(z.get(), x.get(), n, r);
    return z;
}

// Directed-rounding helpers.
inline Real add(const Real& a, const Real& b, mpfr_rnd_t r) {
    Real z = Real::with_prec(std::max(a.prec(), b.prec()));
    mpfr_add(z.get(), a.get(), b.get(), r);
    return z;
}
inline Real mul(const Real& a, const Real& b, mpfr_rnd_t r) {
    Real z = Real::with_prec(std::max(a.prec(), b.prec()));
    mpfr_mul(z.get(), a.get(), b.get(), r);
    return z;
}
inline Real div(const Real& a, const Real& b, mpfr_rnd_t r) {
    Real z = Real::with_prec(std::max(a.prec(), b.prec()));
    mpfr_div(z.get(), a.get(), b.get(), r);
    return z;
}

struct Complex {
    Real re, im;
    Complex() = default;
    Complex(Real r) : re(std::move(r)), im(0L) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }
    Complex& operator+=(const Complex& b) { return *this = *this + b; }
    Complex operator-() const { return {-re, -im}; }
    Real norm() const { return sqrt(re * re + im * im); }
};

// i^p for integer p
inline Complex i_pow(long p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {Real(1L), Real(0L)};
        case 1: return {Real(0L), Real(1L)};
        case 2: return {Real(-1L), Real(0L)};
        default: return {Real(0L), Real(-1L)};
    }
}

}  // namespace fe

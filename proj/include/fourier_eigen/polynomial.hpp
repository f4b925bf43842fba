#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qseries.hpp"
#include "rational.hpp"

namespace fe {

// Polynomial in w (standing for j) with exact coefficients,
// c[i] multiplying w^i.
struct Poly {
    std::vector<Rational> c;

    Poly() = default;
    explicit Poly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }
    static Poly from_ints(std::initializer_list<long> lowest_first) {
        std::vector<Rational> v;
        for (long x : lowest_first) v.emplace_back(x);
        return Poly(v);
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for the zero polynomial
    bool is_zero() const { return c.empty(); }
    Rational leading() const { return c.empty() ? Rational(0) : c.back(); }

    Poly operator*(const Rational& r) const {
        Poly p = *this;
        for (auto& x : p.c) x *= r;
        p.trim();
        return p;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.c.assign(std::max(a.c.size(), b.c.size()), Rational(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b * Rational(-1); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        if (a.is_zero() || b.is_zero()) return r;
        r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        r.trim();
        return r;
    }

    // P(x) for a series x (Horner); `one` fixes the window of the constant term.
    QSeries eval(const QSeries& x, const QSeries& one) const {
        if (c.empty()) return one * Rational(0);
        QSeries acc = one * c.back();
        for (int i = degree() - 1; i >= 0; --i) acc = acc * x + one * c[static_cast<std::size_t>(i)];
        return acc;
    }

    std::string str(const std::string& var = "w") const {
        if (c.empty()) return "0";
        std::string s;
        for (int i = degree(); i >= 0; --i) {
            const Rational& x = c[static_cast<std::size_t>(i)];
            if (x == 0) continue;
            Rational ax = abs(x);
            std::string mag = (ax == 1 && i > 0) ? "" : to_string(ax);
            std::string mono = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
            if (s.empty()) s = (x < 0 ? "-" : "") + mag + mono;
            else s += (x < 0 ? " - " : " + ") + mag + mono;
        }
        return s;
    }
};

// True if a = r*b for some nonzero rational r, over a list of polynomial pairs
// (used to compare solver output with published tables up to one common scalar).
inline bool proportional(const std::vector<Poly>& a, const std::vector<Poly>& b) {
    if (a.size() != b.size()) return false;
    Rational r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].degree() != b[i].degree()) return false;
        for (std::size_t j = 0; j < a[i].c.size(); ++j) {
            const Rational &x = a[i].c[j], &y = b[i].c[j];
            if ((x == 0) != (y == 0)) return false;
            if (x == 0) continue;
            if (r == 0) r = x / y;
            else if (x != r * y) return false;
        }
    }
    return r != 0;
}

}  // namespace fe

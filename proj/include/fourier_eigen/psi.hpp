#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace fe {

// coeff * (i if imag) * pi^pi_power * (ln 2 if ln2)
struct Scalar {
    Rational coeff = 1;
    int pi_power = 0;
    bool imag = false;
    bool ln2 = false;
};

// (rat + ln2 * log 2) * pi^pi_power, kept exact until numeric evaluation
struct SymbolicNumber {
    Rational rat = 0;
    Rational ln2 = 0;
    int pi_power = 0;
    bool is_zero() const { return rat == 0 && ln2 == 0; }
    std::string str() const {
        std::string s;
        if (rat != 0) s = to_string(rat);
        if (ln2 != 0) s += (s.empty() ? "" : (ln2 > 0 ? " + " : " ")) + to_string(ln2) + "*ln2";
        if (s.empty()) return "0";
        if (pi_power != 0) s = "(" + s + ")*pi^" + std::to_string(pi_power);
        return s;
    }
};

struct PsiTerm {
    int z_power;  // 0, 1 or 2
    Scalar scalar;
    QSeries series;
};

// psi(z) = sum_terms scalar * z^p * series(q); S_series(z) = z^{d/2-2} psi(Sz).
struct PsiExpansion {
    int d = 0;
    int eps = 1;  // eigenvalue eps * (-1)^{d/4}
    std::vector<PsiTerm> terms;
    std::vector<SymbolicNumber> a, b;  // principal part, index k = 0..n_pm
    QSeries S_series;
    Rational C_over_pi = 1;  // decay constant C / pi
    int n_pm = 0;            // deepest pole
    long N = 0;

    // Principal part: psi = sum a_k q^{-k} - i z sum b_k q^{-k} + decaying terms.
    void extract_principal() {
        a.assign(static_cast<std::size_t>(n_pm) + 1, SymbolicNumber{});
        b.assign(static_cast<std::size_t>(n_pm) + 1, SymbolicNumber{});
        for (const auto& t : terms) {
            if (t.z_power == 2) continue;  // z^2 part decays, checked separately
            for (int k = 0; k <= n_pm; ++k) {
                if (-2 * k < t.series.lo2()) continue;
                const Rational c = t.series.coeff(-k) * t.scalar.coeff;
                if (c == 0) continue;
                SymbolicNumber& dst = (t.z_power == 0 ? a : b)[static_cast<std::size_t>(k)];
                // z * (i c) q^{-k} = -i z b q^{-k}  gives  b = -c
                const Rational v = t.z_power == 1 ? Rational(-c) : c;
                dst.pi_power = t.scalar.pi_power;
                if (t.scalar.ln2) dst.ln2 += v; else dst.rat += v;
            }
        }
    }
};

namespace detail {

inline QSeries combine_cols(const std::vector<QSeries>& cols, const IntVector& x) {
    std::optional<QSeries> acc;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (x[i] == 0) continue;
        QSeries t = cols[i] * Rational(x[i]);
        acc = acc ? *acc + t : t;
    }
    return acc ? *acc : cols[0] * Rational(0);
}

}  // namespace detail

}  // namespace fe

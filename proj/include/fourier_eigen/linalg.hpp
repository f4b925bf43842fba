#pragma once

#include <cstddef>
#include <vector>

#include "rational.hpp"

namespace fe {

using IntVector = std::vector<Integer>;

inline void make_primitive(IntVector& v) {
    Integer g = 0;
    for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g > 1)
        for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

inline IntVector integer_row(const std::vector<Rational>& row) {
    Integer L = 1;
    for (const auto& x : row) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.get_den_mpz_t());
    IntVector out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        Integer f;
        mpz_divexact(f.get_mpz_t(), L.get_mpz_t(), row[i].get_den_mpz_t());
        out[i] = row[i].get_num() * f;
    }
    make_primitive(out);
    return out;
}

// Right kernel of a rational matrix, returned as primitive integer vectors.
// Elimination is done on integer rows (cross-multiplication followed by content
// removal), so no fractions appear until the very end.
inline std::vector<IntVector> kernel(const std::vector<std::vector<Rational>>& M, std::size_t cols) {
    std::vector<IntVector> rows;
    for (const auto& r : M) {
        IntVector v = integer_row(r);
        bool nz = false;
        for (const auto& x : v) nz |= (x != 0);
        if (nz) rows.push_back(std::move(v));
    }
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        // prefer the smallest nonzero pivot to keep entries small
        for (std::size_t i = r; i < rows.size(); ++i) {
            if (rows[i][c] == 0) continue;
            if (rows[p][c] == 0 || abs(rows[i][c]) < abs(rows[p][c])) p = i;
        }
        if (rows[p][c] == 0) continue;
        std::swap(rows[p], rows[r]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const Integer a = rows[r][c], b = rows[i][c];
            Integer g;
            mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            const Integer ma = a / g, mb = b / g;
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] = ma * rows[i][j] - mb * rows[r][j];
            make_primitive(rows[i]);
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_col) is_pivot[c] = true;
    std::vector<IntVector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        // x_f = 1, x_{pivot_i} = -rows[i][f] / rows[i][pivot_i]
        std::vector<Rational> x(cols, Rational(0));
        x[f] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            x[pivot_col[i]] = -frac(rows[i][f], rows[i][pivot_col[i]]);
        basis.push_back(integer_row(x));
    }
    return basis;
}

}  // namespace fe

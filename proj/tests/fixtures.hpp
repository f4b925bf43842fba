#pragma once

#include <optional>
#include <vector>

#include "fourier_eigen/linalg.hpp"
#include "fourier_eigen/polynomial.hpp"
#include "fourier_eigen/rational.hpp"

namespace fixtures {

using fe::Rational;

// Polynomials in w, lowest coefficient first. Empty = zero polynomial.
using Coeffs = std::vector<long>;

struct TableRow {
    std::vector<int> dims;
    int k, n;
    Coeffs p1, p2, p3;
};

// (P, Q, R) for the +1 construction
inline const std::vector<TableRow>& plus_table() {
    static const std::vector<TableRow> rows{
        {{24}, 0, 1, {-3528, 1}, {1}, {1800, 1}},
        {{48, 72}, 0, 2, {-475793136, -1840638, 175}, {497922, 175}, {111078000, 2534082, 175}},
        {{20}, 1, 1, {-1008, 1}, {-1368, 1}, {1}},
        {{44, 68}, 1, 2, {-10456992, -167286, 25}, {-41044752, -18966, 25}, {172554, 25}},
        {{16, 40}, 2, 1, {-5628, 1}, {420, 1}, {4740, 1}},
        {{64, 88}, 2, 2, {-147949620, -277373, 21}, {2942940, 104155, 21}, {62398380, 449395, 21}},
        {{12, 36}, 3, 1, {-2548, 1}, {-1588, 1}, {1100, 1}},
        {{60, 84}, 3, 2, {-13216476, -63953, 7}, {-26138316, 3079, 7}, {2838660, 82207, 7}},
        {{8}, 4, 0, {-1728, 1}, {1}, {1}},
        {{32, 56}, 4, 1, {-3302208, -39879, 5}, {6741, 5}, {44721, 5}},
        {{4}, 5, 0, {1}, {-864, 1}, {1}},
        {{28, 52}, 5, 1, {-4473, 1}, {-453600, -1413, 1}, {3375, 1}},
    };
    return rows;
}

// (X, Y, Z) for the -1 construction
inline const std::vector<TableRow>& minus_table() {
    static const std::vector<TableRow> rows{
        {{4, 28}, 0, 0, {2}, {1}, {}},
        {{52, 76}, 0, 1, {46080, 840}, {171776, 63}, {91392}},
        {{24}, 1, 0, {}, {}, {1}},
        {{48, 72}, 1, 1, {840}, {514304, -840}, {131584, 63}},
        {{20, 44}, 2, 0, {6144}, {8192, 5}, {-1280}},
        {{68, 92}, 2, 1, {27525120, 161280}, {117014528, 202688, 33}, {-22593536, -8448}},
        {{16, 40}, 3, 0, {1536}, {-9856, 5}, {640}},
        {{64, 88}, 3, 1, {27525120, 645120}, {-1267400704, -26752, 231}, {128352256, 29568}},
        {{12}, 4, -1, {}, {768, 1}, {-256}},
        {{36, 60}, 4, 0, {7864320}, {-3670016, -14080, -7}, {2228224, 1792}},
        {{8}, 5, -1, {}, {1408, 1}, {-256}},
        {{32, 56}, 5, 0, {55050240}, {89587712, -19456, -35}, {-7634944, 8960}},
    };
    return rows;
}

inline fe::Poly poly(const Coeffs& c) {
    std::vector<Rational> v;
    for (long x : c) v.emplace_back(x);
    return fe::Poly(v);
}

// Some nonzero r with (a1, a2, a3) = r (b1, b2, b3) coefficientwise.
inline std::optional<Rational> poly_ratio(const std::vector<fe::Poly>& a, const std::vector<fe::Poly>& b) {
    std::optional<Rational> r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t n = std::max(a[i].c.size(), b[i].c.size());
        for (std::size_t j = 0; j < n; ++j) {
            const Rational x = j < a[i].c.size() ? a[i].c[j] : Rational(0);
            const Rational y = j < b[i].c.size() ? b[i].c[j] : Rational(0);
            if (y == 0 && x == 0) continue;
            if (y == 0 || x == 0) return std::nullopt;
            const Rational q = x / y;
            if (r && *r != q) return std::nullopt;
            r = q;
        }
    }
    return r;
}

}  // namespace fixtures

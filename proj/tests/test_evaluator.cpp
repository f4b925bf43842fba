#include <gtest/gtest.h>

#include <map>
#include <memory>

#include "fourier_eigen/evaluator.hpp"
#include "fourier_eigen/minus_solver.hpp"
#include "fourier_eigen/plus_solver.hpp"

using namespace fe;

namespace {

const PsiExpansion& psi_for(int d, bool plus) {
    static std::map<std::pair<int, bool>, std::unique_ptr<PsiExpansion>> cache;
    auto& slot = cache[{d, plus}];
    if (!slot) slot = std::make_unique<PsiExpansion>(plus ? assemble_psi_plus(solve_plus(d)) : assemble_psi_minus(solve_minus(d)));
    return *slot;
}

double rel(const Real& a, const Real& b) {
    const Real den = std::max(abs(a), abs(b));
    if (den.is_zero()) return 0.0;
    return (abs(a - b) / den).to_double();
}

}  // namespace

TEST(Evaluator, DirectAndSPathAgreeNearSplit) {
    for (auto [d, plus] : {std::pair{8, true}, {12, false}, {24, true}, {16, false}}) {
        const Evaluator ev(psi_for(d, plus));
        for (const char* t : {"1", "0.9", "1.2"}) {
            const Real x{std::string(t)};
            EXPECT_LT(rel(ev.psi_it_direct(x), ev.psi_it_S(x)), 1e-60) << d << plus << " t=" << t;
        }
    }
}

TEST(Evaluator, FunctionalEquations) {
    for (int d : {4, 8, 12, 16, 20, 24, 48}) {
        for (bool plus : {true, false}) {
            const Evaluator ev(psi_for(d, plus));
            const auto pts = default_sample_points();
            ASSERT_GE(pts.size(), 5u);
            const FunctionalCheck ok = functional_eq_check(ev, pts);
            EXPECT_LT(ok.max_residual.to_double(), 1e-20) << d << (plus ? "+" : "-");
            const FunctionalCheck bad = functional_eq_check(ev, pts, -ev.expansion().eps);
            EXPECT_GT(bad.max_residual.to_double(), 1e-3) << d << (plus ? "+" : "-");
        }
    }
}

TEST(Evaluator, ComplexPointOffAxis) {
    const Evaluator ev(psi_for(24, false));
    const FunctionalCheck c = functional_eq_check(ev, {Complex(Real(frac(1, 2)), Real(frac(3, 2)))});
    EXPECT_LT(c.max_residual.to_double(), 1e-20);
}

TEST(Evaluator, RejectsLowSamplePoints) {
    const Evaluator ev(psi_for(8, true));
    EXPECT_THROW(ev.psi(Complex(Real(0L), Real(frac(3, 10)))), BadSamplePoint);
    // z = 3i maps to i/3 under S
    EXPECT_THROW(functional_eq_check(ev, {Complex(Real(0L), Real(3L))}), BadSamplePoint);
}

TEST(Evaluator, SpecialValuesDimension8) {
    const Evaluator ev(psi_for(8, true));
    const auto [u, du] = ev.special_values(1);
    EXPECT_TRUE(u.is_zero());
    EXPECT_GT(abs(du).to_double(), 1.0);
    for (long m = 2; m <= 14; ++m) {
        const auto [a, b] = ev.special_values(m);
        EXPECT_TRUE(a.is_zero() && b.is_zero()) << m;
    }
    // F(sqrt 2) = 0
    EXPECT_TRUE(ev.F(sqrt(Real(2L))).is_zero() || abs(ev.F(sqrt(Real(2L)))).to_double() < 1e-40);
}

TEST(Evaluator, LaurentDataMatchesFiniteDifferences) {
    for (auto [d, plus] : {std::pair{8, true}, {12, false}, {16, false}, {24, true}}) {
        const Evaluator ev(psi_for(d, plus));
        const long n = ev.expansion().n_pm;
        for (long m = 0; m <= n + 1; ++m) {
            const auto exact = ev.special_values(m);
            const auto num = numeric_special_values(ev, m, Real(frac(1, 1000)));
            const double scale = std::max({abs(exact.first).to_double(), abs(exact.second).to_double(), 1.0});
            EXPECT_LT(abs(exact.first - num.first).to_double() / scale, 1e-10) << d << " m=" << m;
            EXPECT_LT(abs(exact.second - num.second).to_double() / scale, 1e-10) << d << " m=" << m;
        }
    }
}

TEST(Evaluator, QuadratureAndSplitInvariance) {
    const Real s(3L);
    EvalConfig base;
    const Real w200 = Evaluator(psi_for(8, true), base).W(s);
    for (int nodes : {100, 400}) {
        EvalConfig c = base;
        c.quad_nodes = nodes;
        EXPECT_LT(rel(Evaluator(psi_for(8, true), c).W(s), w200), 1e-20) << nodes;
    }
    for (double split : {0.8, 1.25}) {
        EvalConfig c = base;
        c.split = split;
        c.quad_nodes = 400;
        EvalConfig c2 = c;
        c2.quad_nodes = 800;
        const Real a = Evaluator(psi_for(8, true), c).W(s);
        EXPECT_LT(rel(a, w200), 1e-50) << split;
        EXPECT_LT(rel(a, Evaluator(psi_for(8, true), c2).W(s)), 1e-60) << split;
    }
}

TEST(Evaluator, DoublePoleLimit) {
    const Evaluator ev(psi_for(8, true));
    const Real h(std::string("1e-12"));
    const Real lim = h * h * ev.W(h);
    const Real expected = to_real(ev.expansion().b[0]) / (Real::pi() * Real::pi());
    EXPECT_LT(rel(lim, expected), 1e-9);
    EXPECT_THROW(ev.W(Real(2L)), PoleAt2k);
    EXPECT_THROW(ev.W(Real(-5L)), PoleAt2k);
}

TEST(Evaluator, ValuesAreReal) {
    const Evaluator ev(psi_for(12, false));
    (void)ev.W(Real(frac(7, 2)));
    EXPECT_TRUE(ev.last_imaginary().is_zero() || abs(ev.last_imaginary()).to_double() < 1e-60);
}

TEST(Evaluator, DoubleZerosBeyondLastSignChange) {
    const Evaluator ev(psi_for(16, false));
    const long n = ev.expansion().n_pm;
    const Real h(frac(1, 100));
    for (long m = n + 1; m <= n + 12; ++m) {
        const Real s(2 * m);
        EXPECT_TRUE(ev.special_values(m).first.is_zero());
        const Real up = ev.U(s + h), dn = ev.U(s - h);
        // same sign on both sides and O(h^2)
        EXPECT_EQ(up.sign(), dn.sign()) << m;
        const Real up2 = ev.U(s + h / Real(2L));
        EXPECT_NEAR((up / up2).to_double(), 4.0, 0.2) << m;
    }
}

TEST(Evaluator, SignCertificates) {
    struct Case {
        int d;
        bool plus;
        long n;
    };
    for (const Case c : {Case{4, true, 1}, Case{4, false, 1}, Case{8, true, 1}, Case{12, false, 1}, Case{16, true, 2},
                         Case{16, false, 2}, Case{24, false, 2}}) {
        const Evaluator ev(psi_for(c.d, c.plus));
        const SignCertificate cert = sign_change_certificate(ev);
        EXPECT_EQ(cert.n, c.n) << c.d << c.plus;
        EXPECT_TRUE(cert.grid_ok) << c.d << c.plus;
    }
}

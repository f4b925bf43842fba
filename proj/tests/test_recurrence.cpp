#include <gtest/gtest.h>

#include "fourier_eigen/positivity.hpp"
#include "fourier_eigen/recurrence.hpp"

using namespace fe;

namespace {

long f_order2(int w) { return 2L * (w / 4 - 1); }
long phiS_order2(int w) { return 2L * (w / 4) - 1; }

}  // namespace

TEST(Recurrence, InitialClosedFormsAgree) {
    for (int w : {8, 10, 12, 14, 16, 18}) {
        const QSeries a = initial_alternative(w, 40);
        const QSeries b = family_member(Kind::F, w, 40).f.collapse();
        EXPECT_TRUE(agree(a, b)) << w;
    }
    EXPECT_THROW(initial_alternative(20, 10), WeightOutOfRange);
}

TEST(Recurrence, FFamilyOdeAndOrders) {
    for (int res : {0, 2}) {
        for (const auto& f : family(FamilyKey{Kind::F, res}, 60, 80)) {
            EXPECT_TRUE(ode_residual(f).zero()) << f.w;
            EXPECT_EQ(*f.f.collapse().valuation2(), f_order2(f.w)) << f.w;
            EXPECT_EQ(*f.f.g_series().valuation2(), 2) << f.w;
            EXPECT_EQ(*f.f.C.valuation2(), 0) << f.w;
        }
    }
}

TEST(Recurrence, PhiFamilyOdeAndOrders) {
    for (int res : {0, 2}) {
        for (const auto& f : family(FamilyKey{Kind::Phi, res}, 60, 80)) {
            EXPECT_TRUE(ode_residual(f).zero()) << f.w;
            EXPECT_EQ(*f.phi.Om.valuation2(), 0) << f.w;
            EXPECT_EQ(*f.s_side().valuation2(), phiS_order2(f.w)) << f.w;
            // phi - phi(Tz) = O(q): the log coefficient and the remaining difference
            if (!f.phi.F.is_zero()) EXPECT_GE(*f.phi.F.valuation2(), 2) << f.w;
            EXPECT_GE(*f.t_difference().valuation2(), 2) << f.w;
        }
    }
}

TEST(Recurrence, WrongOdeParameterIsDetected) {
    const auto f = family_member(Kind::F, 20, 40);
    EXPECT_FALSE(ode_residual(f, Ode::ODE1, 22).zero());
    EXPECT_TRUE(ode_residual(f, Ode::ODE1).zero());
}

TEST(Recurrence, DescentReproducesPreviousMember) {
    for (int w = 12; w <= 60; w += 2) {
        const auto fw = family_member(Kind::F, w, 60);
        const QSeries down = rc_descend(fw);
        const QSeries prev = family_member(Kind::F, w - 4, 60).f.collapse();
        EXPECT_TRUE(agree(down, prev.truncated(down.trunc2()))) << w;
    }
}

TEST(Recurrence, ClosedFormStep) {
    for (int w : {12, 16, 20, 14, 18, 22}) {
        const auto x = family_member(Kind::F, w, 50);
        const QSeries step = diff_recurrence(x).f.collapse();
        const QSeries next = family_member(Kind::F, w + 4, 50).f.collapse();
        EXPECT_TRUE(agree(step, next.truncated(step.trunc2()))) << w;
    }
}

TEST(Recurrence, CoefficientGuards) {
    EXPECT_THROW(recurrence_coeffs(FamilyKey{Kind::F, 0}, 12), WeightOutOfRange);
    EXPECT_THROW(recurrence_coeffs(FamilyKey{Kind::F, 0}, 18), WeightOutOfRange);
    EXPECT_THROW(family_member(Kind::F, 9, 10), WeightOutOfRange);
}

TEST(Recurrence, CrossValidationSmallDimensions) {
    for (int d = 4; d <= 48; d += 4) {
        for (bool plus : {true, false}) {
            const CrossReport r = cross_validate(d, plus, 30);
            EXPECT_FALSE(r.residual_v2.has_value()) << d << plus;
            EXPECT_NE(r.scalar, 0);
        }
    }
}

TEST(Decomposition, MuValues) {
    EXPECT_EQ(mu(8), 1);
    EXPECT_EQ(mu(10), 1);
    EXPECT_EQ(mu(12), frac(1, 6000));
    EXPECT_THROW(mu(7), BadWeight);
    EXPECT_THROW(mu(6), BadWeight);
}

TEST(Decomposition, ConstantTermsFollowMu) {
    for (int w = 8; w <= 40; w += 2) {
        const Decomposition d = decompose(family_member(Kind::F, w, 2 * (w / 4) + 12));
        const Rational m = (w / 2) % 2 ? Rational(-mu(w)) : mu(w);
        EXPECT_EQ(d.constants[0], m) << w;
        EXPECT_EQ(d.constants[1], -2 * m) << w;
        EXPECT_EQ(d.constants[2], m) << w;
    }
}

TEST(Decomposition, LowWeightClosedForms) {
    const long N = 30;
    const QSeries E4 = gen(Gen::E4, N + 2), E6 = gen(Gen::E6, N + 2), D = gen(Gen::Delta, N + 2);
    EXPECT_TRUE(agree(family_member(Kind::F, 8, N).f.collapse(), E4.derive(2) * frac(36, 5)));
    EXPECT_TRUE(agree(family_member(Kind::F, 10, N).f.collapse(), E6.derive(2) * frac(-24, 7)));
    EXPECT_TRUE(agree(family_member(Kind::F, 12, N).f.collapse(), (E4 * E4).derive(2) * frac(1, 3000) - D * frac(4, 25)));
    const Decomposition d8 = decompose(family_member(Kind::F, 8, 20));
    EXPECT_TRUE(d8.alpha_cusp.is_zero());
    EXPECT_TRUE(d8.beta_cusp.is_zero());
    EXPECT_TRUE(d8.gamma_cusp.is_zero());
}

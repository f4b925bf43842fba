// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "fourier_eigen/evaluator.hpp"
#include "fourier_eigen/minus_solver.hpp"
#include "fourier_eigen/plus_solver.hpp"
#include "fourier_eigen/positivity.hpp"
#include "fourier_eigen/recurrence.hpp"

using namespace fe;

namespace {

// A criterion collects failures; a failure listed in `known` is reported but does not fail the run.
struct Check {
    std::vector<std::string> failures;
    std::vector<std::string> known;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void expect_known(bool ok, const std::string& what, const std::string& why) {
        if (!ok) known.push_back(what + " [" + why + "]");
    }
};

struct Outcome {
    int id;
    bool pass;
    bool only_known;
};

std::vector<Outcome> outcomes;

void run(int id, const std::string& name, double budget_s, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs > budget_s) c.failures.push_back("over time budget");
    const bool pass = c.failures.empty() && c.known.empty();
    std::printf("%s %d %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), secs);
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    for (const auto& f : c.known) std::printf("    known: %s\n", f.c_str());
    std::fflush(stdout);
    outcomes.push_back({id, pass, c.failures.empty()});
}

std::string str(int d, bool plus) { return "d=" + std::to_string(d) + (plus ? "+" : "-"); }

const PsiExpansion& psi_for(int d, bool plus, bool origin = false) {
    static std::map<std::tuple<int, bool, bool>, std::unique_ptr<PsiExpansion>> cache;
    auto& slot = cache[{d, plus, origin}];
    if (!slot) {
        if (plus) {
            PlusSolution s = solve_plus(d);
            if (origin) s = apply_origin_constraint(s);
            slot = std::make_unique<PsiExpansion>(assemble_psi_plus(s));
        } else {
            slot = std::make_unique<PsiExpansion>(assemble_psi_minus(solve_minus(d)));
        }
    }
    return *slot;
}

// sigma(n) for n < M
std::vector<Integer> sigmas(long M) {
    std::vector<Integer> s(static_cast<std::size_t>(M), 0);
    for (long d = 1; d < M; ++d)
        for (long m = d; m < M; m += d) s[static_cast<std::size_t>(m)] += d;
    return s;
}

// Delta by the product q prod (1 - q^n)^24
QSeries delta_by_product(long N) {
    std::vector<Integer> c(static_cast<std::size_t>(N), 0);
    c[0] = 1;
    for (long n = 1; n < N; ++n)
        for (int r = 0; r < 24; ++r)
            for (long m = N - 1; m >= n; --m) c[static_cast<std::size_t>(m)] -= c[static_cast<std::size_t>(m - n)];
    return QSeries::generate(2, 2, 2 * N, [&](long e2) -> Rational { return Rational(c[static_cast<std::size_t>(e2 / 2 - 1)]); });
}

// Coefficients of (sum_{n in Z} t^{a n^2 + b n + c})^4 up to t^M, as integer vectors.
std::vector<Integer> fourth_power(const std::vector<Integer>& base) {
    auto mul = [](const std::vector<Integer>& a, const std::vector<Integer>& b) {
        std::vector<Integer> r(a.size(), 0);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != 0)
                for (std::size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    const auto sq = mul(base, base);
    return mul(sq, sq);
}

}  // namespace

int main() {
    std::cout << "acceptance run" << std::endl;

    run(1, "generator fidelity to N=200", 5, [](Check& c) {
        const long N = 200;
        const QSeries E2 = gen(Gen::E2, N), E4 = gen(Gen::E4, N), E6 = gen(Gen::E6, N);
        c.expect(E4.coeff(1) == 240 && E6.coeff(1) == -504 && E2.coeff(1) == -24, "first Eisenstein coefficients");
        const auto sig = sigmas(N + 1);
        const auto sig3 = [&](long n) {
            Integer s = 0;
            for (long d = 1; d <= n; ++d)
                if (n % d == 0) s += Integer(d) * d * d;
            return s;
        };
        bool eis = true;
        for (long n = 1; n < N; ++n) {
            eis = eis && E2.coeff(n) == Rational(Integer(-24) * sig[static_cast<std::size_t>(n)]);
            eis = eis && E4.coeff(n) == Rational(Integer(240) * sig3(n));
        }
        c.expect(eis, "E2/E4 against divisor sums");
        const QSeries D = gen(Gen::Delta, N);
        c.expect(agree(D, delta_by_product(N)), "Delta product formula");
        c.expect(agree(D, ((E4.pow(3) - E6.pow(2)) * frac(1, 1728)).truncated(D.trunc2())), "Delta = (E4^3 - E6^2)/1728");
        const QSeries j = gen(Gen::J, N);
        c.expect(agree(j, (E4.pow(3) * delta_by_product(N + 1).inverse()).truncated(j.trunc2())), "j = E4^3 / Delta");

        // thetas in t = q^{1/8}: theta00 = sum t^{4 n^2}, theta01 = sum (-1)^n t^{4 n^2}, theta10 = sum t^{(2n+1)^2}
        const std::size_t M = 8 * N + 1;
        std::vector<Integer> t00(M, 0), t01(M, 0), t10(M, 0);
        for (long n = -40; n <= 40; ++n) {
            const long e = 4 * n * n, o = (2 * n + 1) * (2 * n + 1);
            if (e < static_cast<long>(M)) {
                t00[static_cast<std::size_t>(e)] += 1;
                t01[static_cast<std::size_t>(e)] += n % 2 ? -1 : 1;
            }
            if (o < static_cast<long>(M)) t10[static_cast<std::size_t>(o)] += 1;
        }
        const auto p00 = fourth_power(t00), p01 = fourth_power(t01), p10 = fourth_power(t10);
        // exponents of the fourth powers are multiples of 4 in t, i.e. half-integers in q
        auto from_t = [&](const std::vector<Integer>& v, long lo2) {
            return QSeries::generate(1, lo2, 2 * N, [&](long e2) -> Rational { return Rational(v[static_cast<std::size_t>(4 * e2)]); });
        };
        c.expect(agree(from_t(p00, 0), gen(Gen::Theta00_4, N)), "theta00^4");
        c.expect(agree(from_t(p01, 0), gen(Gen::Theta01_4, N)), "theta01^4");
        const QSeries th10 = from_t(p10, 1);
        c.expect(agree(th10, gen(Gen::Theta10_4, N)), "theta10^4");
        const QSeries lam = gen(Gen::Lambda, N);
        c.expect(agree(lam, (th10 * from_t(p00, 0).inverse()).truncated(lam.trunc2())), "lambda = theta10^4 / theta00^4");
    });

    run(2, "identity suites to N=200", 0, [](Check& c) {
        const auto res = ramanujan_suite(200);
        c.expect(res.size() >= 10, "suite size");
        for (const auto& r : res) c.expect(!r.residual_valuation2.has_value(), r.name);
    });

    run(3, "plus table", 120, [](Check& c) {
        for (const auto& row : fixtures::plus_table())
            for (int d : row.dims) {
                const PlusSolution s = solve_plus(d, 24);
                c.expect(s.params.k == row.k && s.params.n == row.n, "k, n for d=" + std::to_string(d));
                c.expect(fixtures::poly_ratio({s.P, s.Q, s.R}, {fixtures::poly(row.p1), fixtures::poly(row.p2), fixtures::poly(row.p3)})
                             .has_value(),
                         "P, Q, R for d=" + std::to_string(d));
            }
    });

    run(4, "minus table", 120, [](Check& c) {
        for (const auto& row : fixtures::minus_table())
            for (int d : row.dims) {
                const MinusSolution s = solve_minus(d, 24);
                c.expect(s.params.k == row.k && s.params.n == row.n, "k, n for d=" + std::to_string(d));
                c.expect(fixtures::poly_ratio({s.X, s.Y, s.Z}, {fixtures::poly(row.p1), fixtures::poly(row.p2), fixtures::poly(row.p3)})
                             .has_value(),
                         "X, Y, Z for d=" + std::to_string(d));
                if (row.n == -1) c.expect(s.X.is_zero(), "X = 0 for d=" + std::to_string(d));
            }
    });

    run(5, "recurrences, ODEs, orders, descent at N=200", 0, [](Check& c) {
        const long N = 200;
        std::map<int, QSeries> fser;
        for (int res : {0, 2}) {
            for (const auto& f : family(FamilyKey{Kind::F, res}, 60, N)) {
                const std::string w = " w=" + std::to_string(f.w);
                c.expect(ode_residual(f).zero(), "f ODE" + w);
                c.expect(f.f.collapse().valuation2() == 2L * (f.w / 4 - 1), "f order" + w);
                c.expect(f.f.g_series().valuation2() == 2L, "g order" + w);
                c.expect(f.f.C.valuation2() == 0L, "h order" + w);
                fser.emplace(f.w, f.f.collapse());
                if (f.w >= 12) {
                    const QSeries down = rc_descend(f);
                    c.expect(fser.count(f.w - 4) && agree(down, fser.at(f.w - 4).truncated(down.trunc2())), "descent" + w);
                }
            }
            for (const auto& f : family(FamilyKey{Kind::Phi, res}, 60, N)) {
                const std::string w = " w=" + std::to_string(f.w);
                c.expect(ode_residual(f).zero(), "phi ODE" + w);
                c.expect(f.phi.Om.valuation2() == 0L, "phi order" + w);
                c.expect(f.s_side().valuation2() == 2L * (f.w / 4) - 1, "phi S order" + w);
                const auto td = f.t_difference().valuation2();
                c.expect(!td || *td >= 2, "phi T difference" + w);
            }
        }
    });

    run(6, "cross-validation d=4..120", 600, [](Check& c) {
        for (int d = 4; d <= 120; d += 4)
            for (bool plus : {true, false}) {
                const CrossReport r = cross_validate(d, plus, 40);
                c.expect(!r.residual_v2 && r.scalar != 0, str(d, plus));
            }
    });

    run(7, "mu and low-weight closed forms", 0, [](Check& c) {
        c.expect(mu(8) == 1 && mu(10) == 1 && mu(12) == frac(1, 6000), "mu_8, mu_10, mu_12");
        const long N = 60;
        const QSeries E4 = gen(Gen::E4, N + 2), E6 = gen(Gen::E6, N + 2), D = gen(Gen::Delta, N + 2);
        c.expect(agree(family_member(Kind::F, 8, N).f.collapse(), E4.derive(2) * frac(36, 5)), "f_8");
        c.expect(agree(family_member(Kind::F, 10, N).f.collapse(), E6.derive(2) * frac(-24, 7)), "f_10");
        c.expect(agree(family_member(Kind::F, 12, N).f.collapse(), (E4 * E4).derive(2) * frac(1, 3000) - D * frac(4, 25)), "f_12");
        for (int w = 8; w <= 40; w += 2) {
            const Decomposition dc = decompose(family_member(Kind::F, w, 2 * (w / 4) + 12));
            const Rational m = (w / 2) % 2 ? Rational(-mu(w)) : mu(w);
            c.expect(dc.constants[0] == m && dc.constants[1] == -2 * m && dc.constants[2] == m, "constants w=" + std::to_string(w));
        }
    });

    run(8, "positivity w=8..40", 1800, [](Check& c) {
        for (int w = 8; w <= 40; w += 2) {
            const PositivityReport r = positivity(w);
            c.expect(r.threshold_n <= 3300, "threshold w=" + std::to_string(w) + " is " + std::to_string(r.threshold_n));
            c.expect(r.verdict == "positive", "w=" + std::to_string(w) + ": " + r.verdict);
        }
    });

    const std::vector<int> dims{4, 8, 12, 16, 20, 24, 48};

    run(9, "functional equations at precision 256, N=64", 0, [&](Check& c) {
        for (int d : dims)
            for (bool plus : {true, false}) {
                const Evaluator ev(psi_for(d, plus));
                const auto pts = default_sample_points();
                c.expect(pts.size() >= 5, "sample count");
                const FunctionalCheck ok = functional_eq_check(ev, pts);
                c.expect(ok.max_residual < Real(std::string("1e-20")), str(d, plus) + " residual " + ok.max_residual.str(4));
                const FunctionalCheck bad = functional_eq_check(ev, pts, -ev.expansion().eps);
                c.expect(bad.max_residual > Real(std::string("1e-3")), str(d, plus) + " flipped eps not detected");
            }
    });

    run(10, "zero structure and Laurent data", 0, [&](Check& c) {
        for (int d : dims)
            for (bool plus : {true, false}) {
                const Evaluator ev(psi_for(d, plus));
                const long n = ev.expansion().n_pm;
                for (long m = n + 1; m <= n + 12; ++m) c.expect(ev.special_values(m).first.is_zero(), str(d, plus) + " U(2m) m=" + std::to_string(m));
                c.expect(!ev.special_values(n).second.is_zero(), str(d, plus) + " U'(2n)");
                for (long m = 0; m <= n + 1; ++m) {
                    const auto exact = ev.special_values(m);
                    const auto num = numeric_special_values(ev, m, Real(frac(1, 1000)));
                    const Real scale = std::max({abs(exact.first), abs(exact.second), Real(1L)});
                    const Real err = std::max(abs(exact.first - num.first), abs(exact.second - num.second)) / scale;
                    c.expect(err < Real(std::string("1e-10")), str(d, plus) + " Laurent m=" + std::to_string(m) + " err " + err.str(3));
                }
            }
    });

    run(11, "regression fixtures", 0, [](Check& c) {
        const long N = 40;
        const QSeries E2 = gen(Gen::E2, N + 4), E4 = gen(Gen::E4, N + 4), E6 = gen(Gen::E6, N + 4), D = gen(Gen::Delta, N + 4);
        const QSeries x = gen(Gen::Theta01_4, N + 4), y = gen(Gen::Theta10_4, N + 4);
        auto prop = [](const QSeries& a, const QSeries& b, long t2) { return ratio(a.truncated(t2), b.truncated(t2)).has_value(); };

        c.expect(prop(solve_plus(8, N).phi * D, E6 * E6 - E2 * E4 * E6 * Rational(2) + E2 * E2 * E4 * E4, 2 * (N - 2)), "d=8 plus");
        const QSeries f16 = E4.pow(4) * Rational(-25) + E4 * E6 * E6 * Rational(49) - E2 * E4 * E4 * E6 * Rational(48) +
                            E2 * E2 * (E4.pow(3) * Rational(49) - E6 * E6 * Rational(25));
        c.expect(prop(solve_plus(24, N).phi * D * D, f16, 2 * (N - 3)), "d=24 plus");
        c.expect(prop(solve_minus(12, N).omega_series * D, x.pow(3) * (x + y * Rational(2)), 2 * (N - 2)), "d=12 minus");
        c.expect(prop(solve_minus(24, N).omega_series * D * D, x.pow(5) * (y * y * Rational(7) + x * y * Rational(7) + x * x * Rational(2)),
                      2 * (N - 3)),
                 "d=24 minus");
        const QSeries o12 = E4.pow(4) * E6 * Rational(415) + E4 * E6.pow(3) * Rational(161) -
                            E2 * (E4 * E4 * E6 * E6 * Rational(431) + E4.pow(5) * Rational(145)) * Rational(2) +
                            E2 * E2 * (E4.pow(3) * E6 * Rational(451) + E6.pow(3) * Rational(125));
        c.expect(prop(apply_origin_constraint(solve_plus(12, N)).phi * D * D, o12, 2 * (N - 3)), "d=12 origin-constrained");

        const SignCertificate m48 = sign_change_certificate(Evaluator(psi_for(48, false)), false);
        c.expect_known(m48.n == 3 && m48.grid_ok, "d=48 minus last sign change sqrt(6)",
                       "found sqrt(" + std::to_string(2 * m48.n) + "), grid " + (m48.grid_ok ? "consistent" : "inconsistent") +
                           "; no solution in the relaxed space has the lower pole order");
        const SignCertificate p48 = sign_change_certificate(Evaluator(psi_for(48, true)), false);
        c.expect(p48.n == 4 && p48.grid_ok, "d=48 plus last sign change sqrt(8)");
    });

    run(12, "last sign change radii", 0, [](Check& c) {
        struct Case {
            int d;
            bool plus, origin;
            long n;
        };
        for (const Case k : {Case{4, true, false, 1}, Case{4, false, false, 1}, Case{8, true, false, 1}, Case{12, false, false, 1},
                             Case{12, true, true, 2}, Case{16, true, false, 2}, Case{16, false, false, 2}, Case{20, true, false, 2},
                             Case{20, false, false, 2}, Case{24, true, false, 2}, Case{24, false, false, 2}}) {
            const SignCertificate s = sign_change_certificate(Evaluator(psi_for(k.d, k.plus, k.origin)), false);
            std::ostringstream what;
            what << str(k.d, k.plus) << (k.origin ? " origin-constrained" : "") << ": sqrt(" << 2 * s.n << ")"
                 << (s.grid_ok ? "" : " grid inconsistent");
            c.expect(s.n == k.n && s.grid_ok, what.str());
        }
    });

    int passed = 0, known_only = 0;
    for (const auto& o : outcomes) {
        if (o.pass) ++passed;
        else if (o.only_known) ++known_only;
    }
    const int unexpected = static_cast<int>(outcomes.size()) - passed - known_only;
    std::printf("summary: %d/%zu passed, %d failed on documented deviations only, %d unexpected failures\n", passed, outcomes.size(),
                known_only, unexpected);
    return unexpected ? 1 : 0;
}

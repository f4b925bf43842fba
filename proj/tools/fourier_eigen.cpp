#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fourier_eigen/evaluator.hpp"
#include "fourier_eigen/json_io.hpp"
#include "fourier_eigen/minus_solver.hpp"
#include "fourier_eigen/plus_solver.hpp"
#include "fourier_eigen/positivity.hpp"
#include "fourier_eigen/recurrence.hpp"

using namespace fe;

namespace {

constexpr int exit_ok = 0, exit_failed = 1, exit_usage = 2;

struct Options {
    int dim = 0;
    std::string sign = "plus";
    long trunc = 64;
    long precision = 256;
    int quad_nodes = 200;
    std::string out;
    std::string check = "functional";
    bool origin_zero = false;
    bool series = false;
    bool csv = false;
    int from = 4, to = 0;
    int weight = 0;
    std::string kind = "f";
    std::optional<long> up_to;
    std::optional<std::string> s_value, r_value;
    double r_min = 0.0, r_max = 4.0, r_step = 0.05;
};

// git blob hash of the canonical input record
std::string content_hash(const std::string& s) {
    const std::string blob = "blob " + std::to_string(s.size()) + std::string(1, '\0') + s;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

bool is_plus(const Options& o) {
    if (o.sign != "plus" && o.sign != "minus") throw CLI::ValidationError("--sign", "must be plus or minus");
    return o.sign == "plus";
}

PsiExpansion build_psi(const Options& o) {
    if (is_plus(o)) {
        PlusSolution s = solve_plus(o.dim, o.trunc);
        if (o.origin_zero) s = apply_origin_constraint(s);
        return assemble_psi_plus(s);
    }
    if (o.origin_zero) throw ConstraintUnavailable("--origin-zero is only implemented for the plus construction");
    return assemble_psi_minus(solve_minus(o.dim, o.trunc));
}

EvalConfig eval_config(const Options& o) {
    EvalConfig c;
    c.precision = o.precision;
    c.N = o.trunc;
    c.quad_nodes = o.quad_nodes;
    return c;
}

json config_json(const std::string& cmd, const Options& o) {
    json c{{"command", cmd}, {"dim", o.dim},     {"sign", o.sign},     {"trunc", o.trunc},
           {"precision", o.precision}, {"quad_nodes", o.quad_nodes}, {"origin_zero", o.origin_zero}};
    if (cmd == "eval") {
        if (o.s_value) c["s"] = *o.s_value;
        if (o.r_value) c["r"] = *o.r_value;
        if (!o.s_value && !o.r_value) c["r_grid"] = {o.r_min, o.r_max, o.r_step};
    }
    if (cmd == "verify") c["check"] = o.check;
    if (cmd == "table") c["range"] = {o.from, o.to};
    if (cmd == "positivity" || cmd == "dump-forms" || cmd == "verify") {
        c["weight"] = o.weight;
        c["kind"] = o.kind;
    }
    if (o.up_to) c["up_to"] = *o.up_to;
    return c;
}

void emit(const std::string& cmd, const Options& o, json result, const std::string& csv = {}) {
    json rec;
    rec["config"] = config_json(cmd, o);
    rec["input_hash"] = content_hash(rec["config"].dump());
    rec["version"] = cache_version;
    rec["result"] = std::move(result);
    const std::string text = o.csv && !csv.empty() ? csv : rec.dump(2) + "\n";
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out);
        if (!f) throw CLI::ValidationError("--out", "cannot open " + o.out);
        f << text;
    }
}

int cmd_solve(const Options& o) {
    if (is_plus(o)) {
        PlusSolution s = solve_plus(o.dim, o.trunc);
        if (o.origin_zero) s = apply_origin_constraint(s);
        json r = to_json(s, o.series);
        r["principal"] = principal_json(assemble_psi_plus(s));
        emit("solve", o, r);
    } else {
        if (o.origin_zero) throw ConstraintUnavailable("--origin-zero is only implemented for the plus construction");
        const MinusSolution s = solve_minus(o.dim, o.trunc);
        json r = to_json(s, o.series);
        r["principal"] = principal_json(assemble_psi_minus(s));
        emit("solve", o, r);
    }
    return exit_ok;
}

int cmd_eval(const Options& o) {
    const PsiExpansion psi = build_psi(o);
    const Evaluator ev(psi, eval_config(o));
    PrecisionGuard g(o.precision);
    json r;
    if (o.s_value) {
        const Real s{*o.s_value};
        r["s"] = *o.s_value;
        r["U"] = ev.U(s).str(40);
        const double sd = s.to_double();
        if (std::abs(sd / 2 - std::round(sd / 2)) > 1e-12 || std::round(sd / 2) > psi.n_pm) r["W"] = ev.W(s).str(40);
        emit("eval", o, r);
        return exit_ok;
    }
    if (o.r_value) {
        const Real x{*o.r_value};
        r["r"] = *o.r_value;
        r["F"] = ev.F(x).str(40);
        emit("eval", o, r);
        return exit_ok;
    }
    // grid dump: r, F(r), residual estimate from the imaginary part of the tail sum
    std::ostringstream csv;
    csv << "r,F,residual\n";
    json rows = json::array();
    const long steps = std::lround((o.r_max - o.r_min) / o.r_step);
    for (long i = 0; i <= steps; ++i) {
        const long num = std::lround(o.r_min * 1000) + i * std::lround(o.r_step * 1000);
        if (num <= 0) continue;
        const Real x(frac(num, 1000));
        const Real f = ev.F(x);
        const std::string res = ev.last_imaginary().str(3);
        csv << x.str(6) << "," << f.str(20) << "," << res << "\n";
        rows.push_back({{"r", x.str(6)}, {"F", f.str(20)}, {"residual", res}});
    }
    r["samples"] = rows;
    emit("eval", o, r, csv.str());
    return exit_ok;
}

int cmd_verify(const Options& o) {
    json r;
    bool ok = true;
    if (o.check == "functional") {
        const Evaluator ev(build_psi(o), eval_config(o));
        const FunctionalCheck c = functional_eq_check(ev, default_sample_points());
        const FunctionalCheck flipped = functional_eq_check(ev, default_sample_points(), -ev.expansion().eps);
        r["max_residual"] = c.max_residual.str(6);
        r["flipped_residual"] = flipped.max_residual.str(6);
        ok = c.max_residual < Real(std::string("1e-20")) && flipped.max_residual > Real(std::string("1e-3"));
    } else if (o.check == "signs") {
        const Evaluator ev(build_psi(o), eval_config(o));
        const SignCertificate c = sign_change_certificate(ev, false);
        r["last_sign_change"] = "sqrt(" + std::to_string(2 * c.n) + ")";
        r["r_star"] = c.r_star.str(20);
        r["sign_beyond"] = c.sign_beyond;
        r["grid_ok"] = c.grid_ok;
        r["evidence"] = "grid-based, not a proof";
        if (c.anomaly_at) r["anomaly_at_r2"] = *c.anomaly_at;
        ok = c.grid_ok;
    } else if (o.check == "cross") {
        const CrossReport c = cross_validate(o.dim, is_plus(o), std::min<long>(o.trunc, 40));
        r["weight"] = c.w;
        r["scalar"] = to_string(c.scalar);
        ok = !c.residual_v2.has_value();
    } else if (o.check == "orders") {
        const PsiExpansion psi = build_psi(o);
        r["n_pm"] = psi.n_pm;
        r["principal"] = principal_json(psi);
        const auto v = psi.S_series.valuation2();
        r["S_valuation2"] = v ? json(*v) : json(nullptr);
        const std::size_t n = static_cast<std::size_t>(psi.n_pm);
        ok = v && *v > 0 && !psi.a[n].is_zero() && psi.b[n].is_zero();
    } else if (o.check == "ode") {
        const int w = o.weight ? o.weight : (o.dim ? cross_validate(o.dim, is_plus(o), 20).w : 0);
        if (!w) throw CLI::ValidationError("--weight", "needed for --check ode");
        const Kind k = o.kind == "phi" ? Kind::Phi : Kind::F;
        const WeightIndexedForm f = family_member(k, w, o.trunc);
        const Valuation v = ode_residual(f);
        r["weight"] = w;
        r["kind"] = o.kind;
        r["residual_zero"] = v.zero();
        ok = v.zero();
    } else if (o.check == "positivity") {
        const int w = o.weight;
        if (!w) throw CLI::ValidationError("--weight", "needed for --check positivity");
        const PositivityReport p = positivity(w, o.up_to);
        r["verdict"] = p.verdict;
        ok = p.verdict == "positive";
    } else {
        throw CLI::ValidationError("--check", "unknown check " + o.check);
    }
    r["passed"] = ok;
    emit("verify", o, r);
    return ok ? exit_ok : exit_failed;
}

int cmd_table(const Options& o) {
    const bool plus = is_plus(o);
    json rows = json::array();
    std::ostringstream csv;
    csv << (plus ? "d,k,ell,n,n_plus,P,Q,R,last_sign_change\n" : "d,k,ell,n,n_minus,X,Y,Z,last_sign_change\n");
    for (int d = o.from; d <= o.to; d += 4) {
        json row;
        if (plus) {
            const PlusSolution s = solve_plus(d, std::min<long>(o.trunc, 24));
            row = to_json(s);
            row["last_sign_change"] = "sqrt(" + std::to_string(2 * s.params.n_plus) + ")";
            csv << d << "," << s.params.k << "," << s.params.ell << "," << s.params.n << "," << s.params.n_plus << ","
                << s.P.str() << "," << s.Q.str() << "," << s.R.str() << "," << row["last_sign_change"].get<std::string>() << "\n";
        } else {
            const MinusSolution s = solve_minus(d, std::min<long>(o.trunc, 24));
            row = to_json(s);
            row["last_sign_change"] = "sqrt(" + std::to_string(2 * s.params.n_minus) + ")";
            csv << d << "," << s.params.k << "," << s.params.ell << "," << s.params.n << "," << s.params.n_minus << ","
                << s.X.str() << "," << s.Y.str() << "," << s.Z.str() << "," << row["last_sign_change"].get<std::string>() << "\n";
        }
        rows.push_back(row);
    }
    emit("table", o, {{"rows", rows}}, csv.str());
    return exit_ok;
}

int cmd_positivity(const Options& o) {
    const PositivityReport p = positivity(o.weight, o.up_to);
    json r{{"weight", p.w}, {"threshold", p.threshold_n}, {"scanned_to", p.scanned_to}, {"verdict", p.verdict}};
    if (p.first_nonpositive) r["first_nonpositive"] = *p.first_nonpositive;
    emit("positivity", o, r);
    return p.verdict == "positive" ? exit_ok : exit_failed;
}

int cmd_dump_forms(const Options& o) {
    const Kind k = o.kind == "phi" ? Kind::Phi : Kind::F;
    if (o.kind != "f" && o.kind != "phi") throw CLI::ValidationError("--kind", "must be f or phi");
    const WeightIndexedForm f = family_member(k, o.weight, o.trunc);
    json r{{"weight", f.w}, {"family", f.key.name()}};
    if (k == Kind::F) {
        r["A"] = to_json(f.f.A);
        r["B"] = to_json(f.f.B);
        r["C"] = to_json(f.f.C);
    } else {
        r["log_coefficient"] = to_json(f.phi.F);
        r["remainder"] = to_json(f.phi.Om);
        r["S_image"] = to_json(f.s_side());
    }
    emit("dump-forms", o, r);
    return exit_ok;
}

bool usage_error(const Error& e) {
    const std::string k = e.kind();
    return k == "BadDimension" || k == "BadWeight" || k == "InvalidWeight" || k == "InvalidId" || k == "WeightOutOfRange" ||
           k == "ConstraintUnavailable" || k == "ParseError" || k == "BadSamplePoint";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier eigenfunctions from quasimodular forms"};
    app.require_subcommand(1, 1);
    Options o;

    auto common = [&](CLI::App* c, bool dim_required) {
        auto* d = c->add_option("--dim", o.dim, "dimension d (multiple of 4)");
        if (dim_required) d->required();
        c->add_option("--sign", o.sign, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
        c->add_option("--trunc", o.trunc, "q-series truncation N")->check(CLI::Range(4L, 100000L));
        c->add_option("--precision", o.precision, "working precision in bits")->check(CLI::Range(64L, 1L << 20));
        c->add_option("--quad-nodes", o.quad_nodes, "Gauss-Legendre nodes")->check(CLI::Range(16, 1 << 16));
        c->add_option("--out", o.out, "output file (default stdout)");
        c->add_flag("--origin-zero", o.origin_zero, "use the extra degree of freedom to vanish at the origin");
        c->add_flag("--csv", o.csv, "CSV instead of JSON where available");
    };

    auto* solve = app.add_subcommand("solve", "solve for the polynomial coefficients of psi");
    common(solve, true);
    solve->add_flag("--series", o.series, "include the q-series");

    auto* eval = app.add_subcommand("eval", "evaluate U(s) / F(r) or dump a radial profile");
    common(eval, true);
    eval->add_option("--s", o.s_value, "evaluate U at s");
    eval->add_option("--r", o.r_value, "evaluate F at r");
    eval->add_option("--r-min", o.r_min);
    eval->add_option("--r-max", o.r_max);
    eval->add_option("--r-step", o.r_step)->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "run one verification");
    common(verify, false);
    verify->add_option("--check", o.check)->check(CLI::IsMember({"functional", "orders", "ode", "cross", "positivity", "signs"}));
    verify->add_option("--weight", o.weight);
    verify->add_option("--kind", o.kind);
    verify->add_option("--up-to", o.up_to);

    auto* table = app.add_subcommand("table", "consolidated table over a range of dimensions");
    common(table, false);
    table->add_option("--from", o.from);
    table->add_option("--to", o.to);

    auto* pos = app.add_subcommand("positivity", "threshold and coefficient scan for f_w");
    common(pos, false);
    pos->add_option("--weight", o.weight)->required();
    pos->add_option("--up-to", o.up_to);

    auto* dump = app.add_subcommand("dump-forms", "print a family member");
    common(dump, false);
    dump->add_option("--weight", o.weight)->required();
    dump->add_option("--kind", o.kind)->check(CLI::IsMember({"f", "phi"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int rc = exit_ok;
    try {
        if (*solve) rc = cmd_solve(o);
        else if (*eval) rc = cmd_eval(o);
        else if (*verify) rc = cmd_verify(o);
        else if (*table) rc = cmd_table(o);
        else if (*pos) rc = cmd_positivity(o);
        else if (*dump) rc = cmd_dump_forms(o);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << "\n";
        return usage_error(e) ? exit_usage : exit_failed;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "elapsed " << std::fixed << std::setprecision(2) << secs << " s\n";
    return rc;
}

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "forms.hpp"
#include "minus_solver.hpp"
#include "plus_solver.hpp"
#include "polynomial.hpp"
#include "psi.hpp"

namespace fe {

using json = nlohmann::json;

// bump when the on-disk layout or any generator convention changes
inline constexpr int cache_version = 3;

inline json to_json(const QSeries& s) {
    json c = json::array();
    for (const auto& x : s.coeffs()) c.push_back(to_string(x));
    return {{"step", s.step()}, {"lo2", s.lo2()}, {"trunc2", s.trunc2()}, {"coeffs", c}};
}

inline QSeries qseries_from_json(const json& j) {
    try {
        const int step = j.at("step").get<int>();
        if (step != 1 && step != 2) throw ParseError("bad step");
        std::vector<Rational> c;
        for (const auto& x : j.at("coeffs")) c.push_back(parse_rational(x.get<std::string>()));
        return QSeries::from_coeffs(step, j.at("lo2").get<long>(), j.at("trunc2").get<long>(), std::move(c));
    } catch (const json::exception& e) {
        throw ParseError(std::string("series: ") + e.what());
    }
}

inline json to_json(const Poly& p) {
    json c = json::array();
    for (const auto& x : p.c) c.push_back(to_string(x));
    return {{"coeffs", c}, {"text", p.str()}};
}

inline Poly poly_from_json(const json& j) {
    try {
        std::vector<Rational> c;
        for (const auto& x : j.at("coeffs")) c.push_back(parse_rational(x.get<std::string>()));
        return Poly(std::move(c));
    } catch (const json::exception& e) {
        throw ParseError(std::string("polynomial: ") + e.what());
    }
}

inline json to_json(const SymbolicNumber& x) {
    return {{"rational", to_string(x.rat)}, {"ln2", to_string(x.ln2)}, {"pi_power", x.pi_power}, {"text", x.str()}};
}

inline json to_json(const PlusSolution& s, bool with_series = false) {
    const auto& p = s.params;
    json j{{"sign", "plus"},
           {"dim", p.d},
           {"ell", p.ell},
           {"k", p.k},
           {"n", p.n},
           {"n_plus", p.n_plus},
           {"extra_dof", p.extra_dof},
           {"origin_constrained", s.origin_constrained},
           {"relaxed_kernel_dim", s.relaxed_kernel.size()},
           {"P", to_json(s.P)},
           {"Q", to_json(s.Q)},
           {"R", to_json(s.R)},
           {"trunc", s.N}};
    if (with_series) j["series"] = {{"phi", to_json(s.phi)}, {"g", to_json(s.g)}, {"psi3", to_json(s.psi3)}};
    return j;
}

inline json to_json(const MinusSolution& s, bool with_series = false) {
    const auto& p = s.params;
    json j{{"sign", "minus"},
           {"dim", p.d},
           {"ell", p.ell},
           {"k", p.k},
           {"n", p.n},
           {"n_minus", p.n_minus},
           {"extra_dof", p.extra_dof},
           {"origin_constrained", s.origin_constrained},
           {"relaxed_kernel_dim", s.relaxed_kernel.size()},
           {"X", to_json(s.X)},
           {"Y", to_json(s.Y)},
           {"Z", to_json(s.Z)},
           {"trunc", s.N}};
    if (with_series)
        j["series"] = {{"f", to_json(s.f_series)}, {"omega", to_json(s.omega_series)}, {"psi_S", to_json(s.psiS_series)}};
    return j;
}

inline json principal_json(const PsiExpansion& psi) {
    json a = json::array(), b = json::array();
    for (const auto& x : psi.a) a.push_back(to_json(x));
    for (const auto& x : psi.b) b.push_back(to_json(x));
    return {{"a", a}, {"b", b}, {"n_pm", psi.n_pm}, {"eps", psi.eps}};
}

// Cache of generator series, one file per (generator, truncation).
class SeriesCache {
public:
    explicit SeriesCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(dir ? *dir : default_dir()) {}

    static std::filesystem::path default_dir() {
        if (const char* e = std::getenv("FOURIER_EIGEN_CACHE"); e && *e) return e;
        return std::filesystem::path(".fourier_eigen_cache");
    }

    const std::filesystem::path& dir() const { return dir_; }

    std::optional<QSeries> load(const std::string& key) const {
        std::ifstream in(file(key));
        if (!in) return std::nullopt;
        try {
            json j = json::parse(in);
            if (j.value("version", -1) != cache_version) return std::nullopt;
            return qseries_from_json(j.at("series"));
        } catch (const std::exception&) {
            return std::nullopt;  // unreadable entries are treated as misses
        }
    }

    void store(const std::string& key, const QSeries& s) const {
        std::filesystem::create_directories(dir_);
        const auto tmp = file(key).string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << json{{"version", cache_version}, {"key", key}, {"series", to_json(s)}}.dump();
        }
        std::filesystem::rename(tmp, file(key));
    }

    QSeries generator(Gen g, long N) const {
        const std::string key = GeneratorId{g}.name() + "_" + std::to_string(N);
        if (auto s = load(key)) return *s;
        QSeries s = gen(g, N);
        store(key, s);
        return s;
    }

private:
    std::filesystem::path file(const std::string& key) const { return dir_ / (key + ".json"); }
    std::filesystem::path dir_;
};

}  // namespace fe

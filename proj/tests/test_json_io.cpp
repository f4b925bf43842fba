#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fourier_eigen/json_io.hpp"

using namespace fe;

TEST(JsonIo, SeriesRoundTrip) {
    const QSeries lam = gen(Gen::Lambda, 30) * frac(-7, 3);
    const QSeries back = qseries_from_json(json::parse(to_json(lam).dump()));
    EXPECT_EQ(back.step(), lam.step());
    EXPECT_EQ(back.trunc2(), lam.trunc2());
    EXPECT_TRUE(agree(back, lam));
    const QSeries j = gen(Gen::J, 20);
    EXPECT_TRUE(agree(qseries_from_json(to_json(j)), j));
}

TEST(JsonIo, PolynomialRoundTrip) {
    const Poly p = Poly::from_ints({-3528, 1});
    EXPECT_EQ(poly_from_json(to_json(p)), p);
    EXPECT_EQ(to_json(p)["text"], p.str());
}

TEST(JsonIo, MalformedInput) {
    EXPECT_THROW(qseries_from_json(json{{"step", 3}, {"lo2", 0}, {"trunc2", 4}, {"coeffs", json::array()}}), ParseError);
    EXPECT_THROW(qseries_from_json(json{{"step", 2}}), ParseError);
}

TEST(JsonIo, SolutionRecordsAreDeterministic) {
    const auto a = to_json(solve_plus(24, 20)).dump();
    const auto b = to_json(solve_plus(24, 20)).dump();
    EXPECT_EQ(a, b);
    const json m = to_json(solve_minus(8, 20));
    EXPECT_EQ(m["sign"], "minus");
    EXPECT_EQ(m["n"], -1);
}

TEST(JsonIo, CacheHonoursVersionAndDirectory) {
    const auto dir = std::filesystem::temp_directory_path() / "fe_cache_test";
    std::filesystem::remove_all(dir);
    const SeriesCache cache(dir);
    const QSeries d1 = cache.generator(Gen::Delta, 25);
    EXPECT_TRUE(std::filesystem::exists(dir / "Delta_25.json"));
    ASSERT_TRUE(cache.load("Delta_25").has_value());
    EXPECT_TRUE(agree(*cache.load("Delta_25"), d1));

    // stale version is a miss
    {
        std::ofstream out(dir / "Delta_25.json");
        out << json{{"version", cache_version - 1}, {"series", to_json(d1)}}.dump();
    }
    EXPECT_FALSE(cache.load("Delta_25").has_value());
    EXPECT_TRUE(agree(cache.generator(Gen::Delta, 25), d1));
    EXPECT_TRUE(cache.load("Delta_25").has_value());

    setenv("FOURIER_EIGEN_CACHE", dir.c_str(), 1);
    EXPECT_EQ(SeriesCache::default_dir(), dir);
    unsetenv("FOURIER_EIGEN_CACHE");
    std::filesystem::remove_all(dir);
}

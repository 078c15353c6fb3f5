#include "bozk/grid_field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace bozk;

namespace {

constexpr double pi = std::numbers::pi;

Field random_field(const Grid& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(g.size());
    for (auto& x : v)
        x = nd(rng);
    return Field::from_values(g, std::move(v));
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num = std::max(num, std::abs(a[k] - b[k]));
        den = std::max(den, std::abs(a[k]));
    }
    return num / den;
}

} // namespace

TEST(MakeGrid, IntegerWavenumbersOnTwoPiBox)
{
    Grid g = make_grid(64, 64, 2 * pi, 2 * pi);
    for (int i = 0; i < g.nx; ++i)
        EXPECT_NEAR(g.xi(i), Grid::mode(i, 64), 1e-12);
    EXPECT_EQ(Grid::mode(32, 64), -32);
    EXPECT_EQ(Grid::mode(31, 64), 31);
}

TEST(MakeGrid, UnitBoxSpacing)
{
    Grid g = make_grid(8, 8, 1.0, 1.0);
    EXPECT_NEAR(g.xi(1) - g.xi(0), 2 * pi, 1e-12);
    EXPECT_NEAR(g.eta(1), 2 * pi, 1e-12);
    EXPECT_DOUBLE_EQ(g.dx(), 0.125);
}

TEST(MakeGrid, RejectsBadShapes)
{
    EXPECT_THROW(make_grid(7, 8, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(make_grid(8, 6, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(make_grid(8, 8, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(make_grid(8, 8, 1.0, -2.0), std::invalid_argument);
}

TEST(Transforms, ConstantConcentratesAtOrigin)
{
    Grid g = make_grid(16, 16, 3.0, 5.0);
    Field f = Field::sample(g, [](double, double) { return 1.0; });
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            if (i == 0 && j == 0)
                EXPECT_NEAR(std::abs(f.coeff(i, j)), std::sqrt(15.0), 1e-12);
            else
                EXPECT_LT(std::abs(f.coeff(i, j)), 1e-13);
        }
}

TEST(Transforms, CosineHasEqualWeightAtPlusMinusOne)
{
    Grid g = make_grid(32, 16, 2 * pi, 2 * pi);
    Field f = Field::sample(g, [](double x, double) { return std::cos(x); });
    const double a = std::abs(f.coeff(1, 0)), b = std::abs(f.coeff(31, 0));
    EXPECT_NEAR(a, b, 1e-12);
    EXPECT_NEAR(a, pi, 1e-12); // sqrt(lx ly) / 2
    double rest = spectral_energy(f.coeffs()) - a * a - b * b;
    EXPECT_LT(rest, 1e-24);
}

TEST(Transforms, RandomRoundTrip)
{
    Grid g = make_grid(64, 48, 10.0, 7.0);
    Field f = random_field(g, 11);
    Field back = to_physical(to_spectral(f));
    EXPECT_LT(max_rel_diff(f.values(), back.values()), 1e-12);
}

TEST(Transforms, HermitianSymmetryForRealValues)
{
    Grid g = make_grid(32, 32, 4.0, 4.0);
    Field f = random_field(g, 5);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            cplx c = f.coeff(i, j), d = f.coeff((g.nx - i) % g.nx, (g.ny - j) % g.ny);
            EXPECT_NEAR(std::abs(c - std::conj(d)), 0.0, 1e-12);
        }
}

TEST(Transforms, Linearity)
{
    Grid g = make_grid(32, 32, 6.0, 6.0);
    Field f = random_field(g, 1), h = random_field(g, 2);
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = 2.5 * f.values()[k] - 0.75 * h.values()[k];
    Field c = Field::from_values(g, v);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        worst = std::max(worst, std::abs(c.coeffs()[k] - (2.5 * f.coeffs()[k] - 0.75 * h.coeffs()[k])));
        scale = std::max(scale, std::abs(c.coeffs()[k]));
    }
    EXPECT_LT(worst / scale, 1e-12);
}

TEST(FieldNorms, ZeroField)
{
    FieldNorms n = field_norms(Field::zeros(make_grid(8, 8, 1.0, 1.0)));
    EXPECT_EQ(n.l2, 0.0);
    EXPECT_EQ(n.linf, 0.0);
}

TEST(FieldNorms, Constant)
{
    Grid g = make_grid(16, 8, 3.0, 2.0);
    FieldNorms n = field_norms(Field::sample(g, [](double, double) { return -1.5; }));
    EXPECT_NEAR(n.l2, 1.5 * std::sqrt(6.0), 1e-12);
    EXPECT_DOUBLE_EQ(n.linf, 1.5);
}

TEST(FieldNorms, SineOnTwoPiBox)
{
    Grid g = make_grid(64, 64, 2 * pi, 2 * pi);
    FieldNorms n = field_norms(Field::sample(g, [](double x, double) { return std::sin(x); }));
    EXPECT_NEAR(n.l2, std::sqrt(2 * pi * pi), 1e-12);
}

TEST(FieldNorms, ParsevalHoldsForRandomFields)
{
    for (unsigned seed : {1u, 2u, 3u}) {
        Grid g = make_grid(40, 24, 9.0, 3.5);
        Field f = random_field(g, seed);
        const double l2 = field_norms(f).l2;
        EXPECT_NEAR(spectral_energy(f.coeffs()), l2 * l2, 1e-10 * l2 * l2);
    }
}

TEST(Snapshot, BitExactReloadAndSidecar)
{
    Grid g = make_grid(24, 16, 7.25, 3.5);
    Field f = random_field(g, 9);
    auto dir = std::filesystem::temp_directory_path() / "bozk_snapshot_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "u.bin").string();
    save_snapshot(path, f, 1.375, {{"step_count", 42}});
    Snapshot s = load_snapshot(path);
    EXPECT_EQ(s.timestamp, 1.375);
    EXPECT_TRUE(s.field.grid() == g);
    ASSERT_EQ(s.field.values().size(), f.values().size());
    EXPECT_EQ(std::memcmp(s.field.values().data(), f.values().data(), f.values().size() * sizeof(double)), 0);

    std::ifstream js(path + ".json");
    nlohmann::json side = nlohmann::json::parse(js);
    EXPECT_EQ(side["grid"]["nx"], 24);
    EXPECT_EQ(side["timestamp"], 1.375);
    EXPECT_EQ(side["extra"]["step_count"], 42);
    EXPECT_EQ(std::filesystem::file_size(path), 40 + g.size() * sizeof(double));
    std::filesystem::remove_all(dir);
}

TEST(Snapshot, TruncatedFileIsRejected)
{
    auto dir = std::filesystem::temp_directory_path() / "bozk_snapshot_trunc";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "u.bin").string();
    save_snapshot(path, random_field(make_grid(8, 8, 1.0, 1.0), 3), 0.0);
    std::filesystem::resize_file(path, 100);
    EXPECT_THROW(load_snapshot(path), std::runtime_error);
    std::filesystem::remove_all(dir);
}

#include "bozk/cutoffs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bozk;

TEST(CutoffFamily, ReferenceValues)
{
    CutoffFamily f = make_family(1.0, 5.0);
    EXPECT_EQ(f.chi(0.5), 0.0);
    EXPECT_EQ(f.chi(6.0), 1.0);
    EXPECT_GE(f.chi(3.001), 0.25);
    EXPECT_NEAR(f.chi(2.5) + f.phi(2.5) + f.psi(2.5), 1.0, 1e-10);
}

TEST(CutoffFamily, RejectsNarrowWindow)
{
    EXPECT_THROW(make_family(1.0, 4.9), std::invalid_argument);
    EXPECT_THROW(make_family(0.0, 5.0), std::invalid_argument);
    EXPECT_NO_THROW(make_family(1.0, 5.0));
}

TEST(CutoffFamily, AllPropertiesForRandomFamilies)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double eps = 0.05 * std::pow(40.0, u(rng));
        const double b = eps * (5.0 + 45.0 * u(rng));
        CutoffFamily f = make_family(eps, b);
        FamilyValidation v = validate_family(f, 10000, 1e-10);
        for (const auto& c : v.checks)
            EXPECT_TRUE(c.passed) << c.name << " eps=" << eps << " b=" << b << " residual=" << c.residual;
    }
}

TEST(CutoffFamily, PartitionIdentitiesPointwise)
{
    CutoffFamily f = make_family(0.3, 4.0);
    for (double x = -4.0; x <= 8.0; x += 1e-3) {
        EXPECT_NEAR(f.chi(x) + f.phi(x) + f.psi(x), 1.0, 1e-10);
        EXPECT_NEAR(f.chi(x) * f.chi(x) + f.phi_tilde(x) * f.phi_tilde(x) + f.psi(x), 1.0, 1e-10);
    }
}

TEST(CutoffFamily, DerivativeMatchesCentredDifferenceAtSecondOrder)
{
    CutoffFamily f = make_family(1.0, 6.0);
    auto err = [&](double h) {
        double m = 0.0;
        for (double x = 1.2; x <= 5.8; x += 0.01)
            m = std::max(m, std::abs((f.chi(x + h) - f.chi(x - h)) / (2 * h) - f.chi_prime(x)));
        return m;
    };
    const double e1 = err(1e-2), e2 = err(5e-3);
    EXPECT_GT(e1 / e2, 3.5);
    EXPECT_LT(e1 / e2, 4.5);
}

TEST(CutoffFamily, SupportSeparation)
{
    for (auto [eps, b] : {std::pair{1.0, 5.0}, std::pair{0.2, 9.0}}) {
        CutoffFamily f = make_family(eps, b);
        double last_psi = -1e300, first_cc = 1e300;
        for (double x = -b; x <= 2 * b; x += eps * 1e-4) {
            if (f.psi(x) > 0.0)
                last_psi = std::max(last_psi, x);
            if (f.chi(x) * f.chi_prime(x) > 0.0)
                first_cc = std::min(first_cc, x);
        }
        EXPECT_GE(first_cc - last_psi, 0.5 * eps * (1 - 1e-3));
    }
}

TEST(EvalShifted, Examples)
{
    CutoffFamily f = make_family(1.0, 5.0);
    EXPECT_EQ(eval_shifted(f, CutoffSelector::chi, 5.0, 0.0, 17.0), 1.0);
    EXPECT_EQ(eval_shifted(f, CutoffSelector::chi, 0.0, 1.0, 5.0), 1.0);
    EXPECT_EQ(eval_shifted(f, CutoffSelector::psi, 1.0, 0.0, 0.0), 0.0);
    EXPECT_THROW(eval_shifted(f, CutoffSelector::chi, 0.0, -1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(parse_cutoff_selector("omega"), std::invalid_argument);
    EXPECT_EQ(parse_cutoff_selector("phi_tilde"), CutoffSelector::phi_tilde);
}

TEST(WeightField, Examples)
{
    Grid g = make_grid(128, 8, 32.0, 4.0);
    CutoffFamily f = make_family(1.0, 5.0);
    // Data supported left of eps - v t vanish under chi^2.
    Field left = Field::sample(g, [](double x, double) { return x < -2.0 ? 1.0 + x * x : 0.0; });
    Field wl = weight_field(left, f, CutoffSelector::chi, 1.0, 1.0, 2);
    for (double v : wl.values())
        EXPECT_EQ(v, 0.0);
    // Power two equals weighting twice.
    Field r = Field::sample(g, [](double x, double y) { return std::sin(x) + y; });
    Field w2 = weight_field(r, f, CutoffSelector::phi, 0.5, 2.0, 2);
    Field w11 = weight_field(weight_field(r, f, CutoffSelector::phi, 0.5, 2.0, 1), f, CutoffSelector::phi, 0.5, 2.0, 1);
    for (std::size_t k = 0; k < w2.values().size(); ++k)
        EXPECT_NEAR(w2.values()[k], w11.values()[k], 1e-14);
    // Constant 1 weighted by chi is 1 at x >= b.
    Field one = Field::sample(g, [](double, double) { return 1.0; });
    Field w = weight_field(one, f, CutoffSelector::chi, 0.0, 0.0, 1);
    for (int i = 0; i < g.nx; ++i)
        if (g.x(i) >= 5.0)
            EXPECT_EQ(w.value(i, 3), 1.0);
    EXPECT_THROW(weight_field(one, f, CutoffSelector::chi, 0.0, 0.0, 3), std::invalid_argument);
}

#include "bozk/evolve.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bozk;

namespace {

constexpr double pi = std::numbers::pi;

SolverConfig make_config(const Grid& g, double alpha, double dt, double t_end)
{
    SolverConfig c;
    c.grid = g;
    c.alpha = alpha;
    c.dt = dt;
    c.t_end = t_end;
    c.observer_stride = 1000000;
    return c;
}

Field gaussian(const Grid& g, double amp, double w)
{
    return Field::sample(g, [=](double x, double y) { return amp * std::exp(-(x * x + y * y) / (w * w)); });
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double max_abs(const std::vector<double>& a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

// Plain explicit RK4 on u_t = -(u_xxx + u_xyy) - u u_x in Fourier space, with
// the same 2/3-rule masking. Independent of the integrating-factor machinery.
std::vector<double> naive_zk(const Field& u0, double dt, double t_end)
{
    const Grid& g = u0.grid();
    const std::size_t n = g.size();
    std::vector<cplx> lin(n), ikx(n);
    std::vector<unsigned char> keep(n);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * g.ny + j;
            const double xi = g.xi(i), eta = g.eta(j);
            const bool nyq = Grid::mode(i, g.nx) == -g.nx / 2 || Grid::mode(j, g.ny) == -g.ny / 2;
            // -(u_xxx + u_xyy) has symbol i xi^3 + i xi eta^2.
            lin[k] = nyq ? 0.0 : cplx(0.0, xi * xi * xi + xi * eta * eta);
            ikx[k] = nyq ? 0.0 : cplx(0.0, xi);
            keep[k] = 3 * std::abs(Grid::mode(i, g.nx)) <= g.nx && 3 * std::abs(Grid::mode(j, g.ny)) <= g.ny;
        }
    auto rhs = [&](const std::vector<cplx>& c) {
        std::vector<cplx> m(c);
        for (std::size_t k = 0; k < n; ++k)
            if (!keep[k])
                m[k] = 0.0;
        auto u = backward_transform(g, m);
        std::vector<double> sq(n);
        for (std::size_t k = 0; k < n; ++k)
            sq[k] = u[k].real() * u[k].real();
        auto s = forward_transform(g, sq);
        std::vector<cplx> out(n);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = lin[k] * c[k] - (keep[k] ? 0.5 * ikx[k] * s[k] : 0.0);
        return out;
    };
    std::vector<cplx> c = u0.coeffs();
    const long steps = std::llround(t_end / dt);
    for (long s = 0; s < steps; ++s) {
        auto k1 = rhs(c);
        std::vector<cplx> tmp(n);
        for (std::size_t k = 0; k < n; ++k)
            tmp[k] = c[k] + 0.5 * dt * k1[k];
        auto k2 = rhs(tmp);
        for (std::size_t k = 0; k < n; ++k)
            tmp[k] = c[k] + 0.5 * dt * k2[k];
        auto k3 = rhs(tmp);
        for (std::size_t k = 0; k < n; ++k)
            tmp[k] = c[k] + dt * k3[k];
        auto k4 = rhs(tmp);
        for (std::size_t k = 0; k < n; ++k)
            c[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    return Field::from_coeffs(g, c).values();
}

} // namespace

TEST(NonlinearTerm, ZeroAndConstant)
{
    Grid g = make_grid(32, 32, 2 * pi, 2 * pi);
    EXPECT_LT(max_abs(nonlinear_term(Field::zeros(g), true).values()), 1e-15);
    EXPECT_LT(max_abs(nonlinear_term(Field::sample(g, [](double, double) { return 1.7; }), true).values()), 1e-12);
}

TEST(NonlinearTerm, SineGivesMinusHalfSinTwoX)
{
    Grid g = make_grid(32, 16, 2 * pi, 2 * pi);
    Field u = Field::sample(g, [](double x, double) { return std::sin(x); });
    Field e = Field::sample(g, [](double x, double) { return -0.5 * std::sin(2 * x); });
    for (bool d : {true, false})
        EXPECT_LT(max_abs_diff(nonlinear_term(u, d).values(), e.values()), 1e-10);
}

TEST(NonlinearTerm, DealiasingRemovesHighProducts)
{
    Grid g = make_grid(32, 8, 2 * pi, 2 * pi);
    // Mode 12 exceeds nx/3 and is masked before squaring.
    Field u = Field::sample(g, [](double x, double) { return std::cos(12 * x); });
    EXPECT_LT(max_abs(nonlinear_term(u, true).values()), 1e-12);
    EXPECT_GT(max_abs(nonlinear_term(u, false).values()), 1.0);
}

TEST(Step, ZeroStaysZero)
{
    Grid g = make_grid(32, 32, 20.0, 20.0);
    SimState s{Field::zeros(g), 0.0, 0};
    SimState out = step(s, make_config(g, 0.5, 1e-2, 1.0));
    EXPECT_EQ(max_abs(out.field.values()), 0.0);
    EXPECT_EQ(out.step_count, 1);
    EXPECT_NEAR(out.t, 1e-2, 1e-15);
}

TEST(Step, SmallDataFollowsLinearFlow)
{
    Grid g = make_grid(64, 64, 30.0, 30.0);
    const double dt = 1e-2;
    Field u = gaussian(g, 1e-3, 2.0);
    SimState out = step(SimState{u, 0.0, 0}, make_config(g, 0.5, dt, 1.0));
    Field lin = linear_propagate(u, dt, 0.5);
    EXPECT_LT(max_abs_diff(out.field.values(), lin.values()), 1e-6 * dt);
}

TEST(Step, RejectsSteppingPastEnd)
{
    Grid g = make_grid(16, 16, 10.0, 10.0);
    EXPECT_THROW(step(SimState{Field::zeros(g), 2.0, 0}, make_config(g, 0.5, 0.1, 1.0)), std::invalid_argument);
}

TEST(Step, FourthOrderSelfConvergence)
{
    Grid g = make_grid(64, 64, 24.0, 24.0);
    Field u0 = gaussian(g, 1.0, 2.0);
    const double T = 0.5;
    auto run = [&](double dt) { return simulate(u0, make_config(g, 0.5, dt, T), {}).final_state.field.values(); };
    auto ref = run(0.05 / 8);
    const double e1 = max_abs_diff(run(0.05), ref), e2 = max_abs_diff(run(0.025), ref);
    const double ratio = e1 / e2;
    // Against a dt/8 reference the expected ratio is 16 (1 - 8^-4) / (1 - 4^-4), about 16.06.
    EXPECT_GT(ratio, 13.0);
    EXPECT_LT(ratio, 19.0);
}

TEST(Simulate, LinearRunMatchesPropagator)
{
    Grid g = make_grid(64, 64, 20.0, 20.0);
    Field u0 = gaussian(g, 1.0, 1.5);
    for (double dt : {0.1, 0.013}) {
        SolverConfig c = make_config(g, 0.3, dt, 1.3);
        c.nonlinear = false;
        c.t_end = dt * std::round(1.3 / dt);
        SimResult r = simulate(u0, c, {});
        Field e = linear_propagate(u0, c.t_end, 0.3);
        EXPECT_LT(max_abs_diff(r.final_state.field.values(), e.values()), 1e-10);
    }
}

TEST(Simulate, ZeroHorizonGivesSingleRecord)
{
    Grid g = make_grid(32, 32, 20.0, 20.0);
    Field u0 = gaussian(g, 1.0, 2.0);
    SimResult r = simulate(u0, make_config(g, 0.5, 1e-2, 0.0), {conserved_observer(0.5)});
    ASSERT_EQ(r.series.records.size(), 1u);
    Conserved q = conserved_quantities(u0, 0.5);
    EXPECT_EQ(r.series.records[0].t, 0.0);
    EXPECT_EQ(r.series.records[0].get("M"), q.M);
    EXPECT_EQ(r.series.records[0].get("E"), q.E);
}

TEST(Simulate, MassIsConservedAt256)
{
    Grid g = make_grid(256, 256, 40.0, 40.0);
    Field u0 = gaussian(g, 1.0, 1.5);
    SolverConfig c = make_config(g, 0.5, 1e-3, 1.0);
    c.observer_stride = 50;
    SimResult r = simulate(u0, c, {mass_observer()});
    auto m = r.series.column("M");
    const double m0 = m.front();
    for (double v : m) {
        EXPECT_NEAR(v, m0, 1e-8 * m0);
        EXPECT_LE(v, m0 * (1 + 1e-8));
    }
}

TEST(Simulate, ZakharovKuznetsovCrossCheck)
{
    Grid g = make_grid(32, 32, 20.0, 20.0);
    Field u0 = gaussian(g, 0.5, 2.0);
    const double T = 0.5;
    SimResult r = simulate(u0, make_config(g, 1.0, 1e-2, T), {});
    auto ref = naive_zk(u0, 1e-3, T);
    EXPECT_LT(max_abs_diff(r.final_state.field.values(), ref), 1e-7 * max_abs(ref));
}

TEST(Simulate, BlowUpIsReported)
{
    Grid g = make_grid(32, 32, 20.0, 20.0);
    SolverConfig c = make_config(g, 0.5, 1e-2, 1.0);
    // Any factor below one trips the H^3 monitor on the first step.
    c.blowup_factor = 0.5;
    c.observer_stride = 5;
    try {
        simulate(gaussian(g, 3.0, 1.0), c, {mass_observer()});
        FAIL() << "expected a blow-up report";
    } catch (const BlowUpError& e) {
        EXPECT_GT(e.step(), 0);
        EXPECT_GE(e.partial().records.size(), 1u);
    }
}

TEST(Simulate, WrapContaminationIsFlagged)
{
    Grid g = make_grid(32, 32, 10.0, 10.0);
    SolverConfig c = make_config(g, 0.5, 1e-2, 0.1);
    c.wrap_threshold = 1e-6;
    // A Gaussian of width 3 on a box of length 10 reaches the seam band already.
    SimResult r = simulate(gaussian(g, 1.0, 3.0), c, {});
    EXPECT_TRUE(r.wrap_exceeded);
    EXPECT_GT(r.max_wrap, 1e-6);
    c.t_end = 0.0;
    SimResult ok = simulate(gaussian(g, 1.0, 0.7), c, {});
    EXPECT_FALSE(ok.wrap_exceeded);
}

TEST(SolverConfig, StabilityNumberIsRecorded)
{
    SolverConfig c = make_config(make_grid(128, 128, 40.0, 40.0), 0.5, 1e-3, 1.0);
    const double k = pi * 128 / 40.0;
    EXPECT_NEAR(c.stability_number(), 1e-3 * k * std::max(std::pow(k, 1.5), k * k), 1e-12);
    nlohmann::json j = c;
    EXPECT_TRUE(j.contains("stability_number"));
    c.alpha = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

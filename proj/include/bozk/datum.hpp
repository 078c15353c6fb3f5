#pragma once

#include "bozk/fourier_ops.hpp"
#include "bozk/grid_field.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bozk {

/// @brief Named initial-data constructor plus its parameters.
///
/// Kinds:
///  gaussian             A exp(-(x-xc)^2/wx^2 - (y-yc)^2/wy^2)
///  band_limited_random  Gaussian-random trigonometric polynomial, modes with
///                       |xi|, |eta| <= band, coefficient scale <k>^{-2}
///  one_sided            A exp(-y^2/wy^2) [|x-x1|^gamma exp(-(x-x1)^2/w^2)
///                       + bump_amplitude exp(-(x-bump_x)^2/bump_w^2)]
///  spectral_packet      coefficients exp(-xi^2/sx^2 - eta^2/sy^2) centred at
///                       x = packet_x lx (group velocity is leftward, so
///                       packets start on the right)
///  rough_packet         line impulse at x = packet_x lx, flat in xi, with a
///                       narrow Gaussian exp(-eta^2/sy^2) across y; wide in y,
///                       so its decay is the one-dimensional rate
///  fold_packet          Gaussian packet (widths sx, sy) centred at frequency
///                       (packet_xi, eta_f) and its mirror image, where eta_f
///                       puts it on the fold of the dispersion relation for
///                       the recipe's alpha (the Hessian of the phase is
///                       degenerate there, which is where the slowest decay
///                       lives)
struct DatumRecipe {
    std::string kind = "gaussian";
    double amplitude = 1.0;
    double wx = 1.0, wy = 1.0, xc = 0.0, yc = 0.0;
    std::uint64_t seed = 0;
    double band = 4.0;
    double x1 = -5.0, gamma = 1.2, w = 1.0;
    double bump_amplitude = 0.5, bump_x = 2.0, bump_w = 1.5;
    bool filter = true;
    double packet_x = 0.28, packet_sx = 2.0, packet_sy = 0.7;
    double packet_xi = 1.0;
    double alpha = 0.5;
};

/// Height of the fold above xi: the Hessian of xi|xi|^(alpha+1) + xi eta^2
/// has determinant 2(alpha+2)(alpha+1)|xi|^(alpha+1) - 4 eta^2.
inline double fold_eta(double alpha, double xi)
{
    return std::sqrt((alpha + 2.0) * (alpha + 1.0) * std::pow(std::abs(xi), alpha + 1.0) / 2.0);
}

inline void to_json(nlohmann::json& j, const DatumRecipe& r)
{
    j = nlohmann::json{{"kind", r.kind},
                       {"amplitude", r.amplitude},
                       {"wx", r.wx},
                       {"wy", r.wy},
                       {"xc", r.xc},
                       {"yc", r.yc},
                       {"seed", r.seed},
                       {"band", r.band},
                       {"x1", r.x1},
                       {"gamma", r.gamma},
                       {"w", r.w},
                       {"bump_amplitude", r.bump_amplitude},
                       {"bump_x", r.bump_x},
                       {"bump_w", r.bump_w},
                       {"filter", r.filter},
                       {"packet_x", r.packet_x},
                       {"packet_sx", r.packet_sx},
                       {"packet_sy", r.packet_sy},
                       {"packet_xi", r.packet_xi},
                       {"alpha", r.alpha}};
}

/// Grid-scale spectral filter exp(-36 (|k|/K)^8) on both axes, K the Nyquist
/// wavenumber. It removes the Gibbs ringing that point sampling of a
/// non-smooth profile leaves at the top of the spectrum.
inline Field grid_filter(const Field& f)
{
    const Grid& g = f.grid();
    std::vector<cplx> c = f.coeffs();
    const double kx = g.xi_max(), ky = g.eta_max();
    for (int i = 0; i < g.nx; ++i) {
        const double fx = std::exp(-36.0 * std::pow(std::abs(g.xi(i)) / kx, 8));
        for (int j = 0; j < g.ny; ++j)
            c[static_cast<std::size_t>(i) * g.ny + j] *= fx * std::exp(-36.0 * std::pow(std::abs(g.eta(j)) / ky, 8));
    }
    return Field::from_coeffs(g, std::move(c));
}

namespace detail {

// Field u = sum_k a_k exp(i k.x) in centred coordinates. Samples start at
// x = -lx/2, so the unitary coefficient is sqrt(lx ly) (-1)^(mx + my) a_k.
inline Field from_amplitudes(const Grid& g, std::vector<cplx> a)
{
    const double s = std::sqrt(g.lx * g.ly);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            a[static_cast<std::size_t>(i) * g.ny + j] *= (Grid::mode(i, g.nx) + Grid::mode(j, g.ny)) % 2 ? -s : s;
    return Field::from_coeffs(g, std::move(a));
}

} // namespace detail

inline Field make_datum(const DatumRecipe& r, const Grid& g)
{
    if (r.kind == "gaussian") {
        if (!(r.wx > 0.0) || !(r.wy > 0.0))
            throw std::invalid_argument("gaussian widths must be positive");
        return Field::sample(g, [&](double x, double y) {
            const double ax = (x - r.xc) / r.wx, ay = (y - r.yc) / r.wy;
            return r.amplitude * std::exp(-ax * ax - ay * ay);
        });
    }
    if (r.kind == "band_limited_random") {
        if (!(r.band > 0.0))
            throw std::invalid_argument("band must be positive");
        // Integer mode ranges depend on the box only, and the draw order is
        // fixed, so the field is the same function on every resolution.
        const int kx = static_cast<int>(std::floor(r.band * g.lx / (2.0 * std::numbers::pi)));
        const int ky = static_cast<int>(std::floor(r.band * g.ly / (2.0 * std::numbers::pi)));
        if (kx >= g.nx / 2 || ky >= g.ny / 2)
            throw std::invalid_argument("band exceeds the grid resolution");
        std::mt19937_64 rng(r.seed);
        std::normal_distribution<double> nd;
        std::vector<cplx> a(g.size(), 0.0);
        auto idx = [&](int mx, int my) {
            const int i = mx < 0 ? mx + g.nx : mx, j = my < 0 ? my + g.ny : my;
            return static_cast<std::size_t>(i) * g.ny + j;
        };
        for (int mx = 0; mx <= kx; ++mx) {
            for (int my = -ky; my <= ky; ++my) {
                if (mx == 0 && my < 0)
                    continue;
                const double xi = 2.0 * std::numbers::pi * mx / g.lx, eta = 2.0 * std::numbers::pi * my / g.ly;
                const double scale = r.amplitude / (1.0 + xi * xi + eta * eta);
                const double re = nd(rng), im = nd(rng);
                cplx c = (mx == 0 && my == 0) ? cplx(scale * re, 0.0) : scale * cplx(re, im) / std::sqrt(2.0);
                a[idx(mx, my)] = c;
                a[idx(-mx, -my)] = std::conj(c);
            }
        }
        return detail::from_amplitudes(g, std::move(a));
    }
    if (r.kind == "one_sided") {
        if (!(r.gamma > 0.0))
            throw std::invalid_argument("one_sided needs gamma > 0");
        if (!(r.w > 0.0) || !(r.wy > 0.0) || !(r.bump_w > 0.0))
            throw std::invalid_argument("one_sided widths must be positive");
        Field u = Field::sample(g, [&](double x, double y) {
            const double d = x - r.x1, e = x - r.bump_x;
            const double core = std::pow(std::abs(d), r.gamma) * std::exp(-d * d / (r.w * r.w));
            const double bump = r.bump_amplitude * std::exp(-e * e / (r.bump_w * r.bump_w));
            return r.amplitude * std::exp(-y * y / (r.wy * r.wy)) * (core + bump);
        });
        return r.filter ? grid_filter(u) : u;
    }
    if (r.kind == "spectral_packet" || r.kind == "rough_packet") {
        const bool rough = r.kind == "rough_packet";
        if ((!rough && !(r.packet_sx > 0.0)) || !(r.packet_sy > 0.0))
            throw std::invalid_argument("packet widths must be positive");
        const double x0 = r.packet_x * g.lx;
        std::vector<cplx> a(g.size(), 0.0);
        for (int i = 0; i < g.nx; ++i) {
            if (Grid::mode(i, g.nx) == -g.nx / 2)
                continue;
            const double xi = g.xi(i);
            const double px = rough ? 1.0 : std::exp(-xi * xi / (r.packet_sx * r.packet_sx));
            const cplx shift = std::polar(1.0, -xi * x0);
            for (int j = 0; j < g.ny; ++j) {
                if (Grid::mode(j, g.ny) == -g.ny / 2)
                    continue;
                const double eta = g.eta(j);
                const double py = std::exp(-eta * eta / (r.packet_sy * r.packet_sy)) / g.ly * 2.0 * std::numbers::pi;
                a[static_cast<std::size_t>(i) * g.ny + j] = r.amplitude * px * py * shift / g.lx * 2.0 * std::numbers::pi;
            }
        }
        return detail::from_amplitudes(g, std::move(a));
    }
    if (r.kind == "fold_packet") {
        if (!(r.packet_sx > 0.0) || !(r.packet_sy > 0.0))
            throw std::invalid_argument("packet widths must be positive");
        const double x0 = r.packet_x * g.lx;
        const double xi0 = r.packet_xi, eta0 = fold_eta(r.alpha, r.packet_xi);
        auto bump = [&](double xi, double eta) {
            const double a = (xi - xi0) / r.packet_sx, b = (eta - eta0) / r.packet_sy;
            return std::exp(-a * a - b * b);
        };
        const double scale = r.amplitude * 4.0 * std::numbers::pi * std::numbers::pi / (g.lx * g.ly);
        std::vector<cplx> a(g.size(), 0.0);
        for (int i = 0; i < g.nx; ++i) {
            if (Grid::mode(i, g.nx) == -g.nx / 2)
                continue;
            const double xi = g.xi(i);
            const cplx shift = std::polar(1.0, -xi * x0);
            for (int j = 0; j < g.ny; ++j) {
                if (Grid::mode(j, g.ny) == -g.ny / 2)
                    continue;
                const double eta = g.eta(j);
                a[static_cast<std::size_t>(i) * g.ny + j] = scale * (bump(xi, eta) + bump(-xi, -eta)) * shift;
            }
        }
        return detail::from_amplitudes(g, std::move(a));
    }
    throw std::invalid_argument("unknown datum kind '" + r.kind + "'");
}

} // namespace bozk

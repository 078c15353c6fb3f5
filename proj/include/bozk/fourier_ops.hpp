#pragma once

#include "bozk/grid_field.hpp"
#include "bozk/smooth.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bozk {

/// @brief Fourier multiplier m(xi, eta) with a declared growth order.
///
/// Unimodular symbols exp(i * phase) may be given through their phase, which
/// lets the lattice realization keep them unimodular on the Nyquist lines.
struct MultiplierSymbol {
    std::function<cplx(double, double)> evaluator;
    std::function<double(double, double)> phase;
    double order = 0.0;
    std::string label;

    cplx operator()(double xi, double eta) const
    {
        if (phase)
            return std::polar(1.0, phase(xi, eta));
        return evaluator(xi, eta);
    }
};

/// Realizes a symbol on the grid's wavenumber lattice.
///
/// On a Nyquist line the lattice mode stands for both +K and -K, so the symbol
/// is replaced by the average of its values at the two (or four) aliases; for
/// phase symbols the phase is averaged instead. This keeps every operator real
/// on real fields and keeps phase symbols unimodular. The growth bound
/// |m| <= C (1 + |xi| + |eta|)^order is checked over the lattice.
inline std::vector<cplx> lattice_symbol(const Grid& g, const MultiplierSymbol& sym)
{
    std::vector<cplx> m(g.size());
    double worst = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const bool nyq_x = Grid::mode(i, g.nx) == -g.nx / 2;
        const double xi = g.xi(i);
        for (int j = 0; j < g.ny; ++j) {
            const bool nyq_y = Grid::mode(j, g.ny) == -g.ny / 2;
            const double eta = g.eta(j);
            cplx value;
            if (!nyq_x && !nyq_y) {
                value = sym(xi, eta);
            } else {
                const double xs[2] = {xi, -xi};
                const double ys[2] = {eta, -eta};
                const int nxs = nyq_x ? 2 : 1;
                const int nys = nyq_y ? 2 : 1;
                if (sym.phase) {
                    double ph = 0.0;
                    for (int a = 0; a < nxs; ++a)
                        for (int b = 0; b < nys; ++b)
                            ph += sym.phase(xs[a], ys[b]);
                    value = std::polar(1.0, ph / (nxs * nys));
                } else {
                    cplx acc = 0.0;
                    for (int a = 0; a < nxs; ++a)
                        for (int b = 0; b < nys; ++b)
                            acc += sym.evaluator(xs[a], ys[b]);
                    value = acc / static_cast<double>(nxs * nys);
                }
            }
            if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
                throw std::domain_error("symbol '" + sym.label + "' is singular on the lattice");
            worst = std::max(worst, std::abs(value) / std::pow(1.0 + std::abs(xi) + std::abs(eta), sym.order));
            m[static_cast<std::size_t>(i) * g.ny + j] = value;
        }
    }
    if (!std::isfinite(worst))
        throw std::domain_error("symbol '" + sym.label + "' violates its growth order");
    return m;
}

inline Field apply_lattice(const Field& f, const std::vector<cplx>& m)
{
    std::vector<cplx> c = f.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] *= m[k];
    return Field::from_coeffs(f.grid(), std::move(c));
}

inline Field apply_multiplier(const Field& f, const MultiplierSymbol& sym)
{
    return apply_lattice(f, lattice_symbol(f.grid(), sym));
}

// ---------------------------------------------------------------------------
// Named symbol families.

inline double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// |v|^s with the value at 0 fixed to 0 for s > 0 and 1 for s = 0.
inline double homogeneous_power(double v, double s)
{
    if (s < 0.0)
        throw std::domain_error("negative homogeneous orders are not supported");
    if (v == 0.0)
        return s == 0.0 ? 1.0 : 0.0;
    return std::pow(std::abs(v), s);
}

inline MultiplierSymbol identity_symbol()
{
    return {[](double, double) { return cplx(1.0); }, {}, 0.0, "identity"};
}

inline MultiplierSymbol riesz_x(double s)
{
    if (s < 0.0)
        throw std::domain_error("riesz_x needs s >= 0");
    return {[s](double xi, double) { return cplx(homogeneous_power(xi, s)); }, {}, s,
            "Dx:" + std::to_string(s)};
}

inline MultiplierSymbol riesz_y(double s)
{
    if (s < 0.0)
        throw std::domain_error("riesz_y needs s >= 0");
    return {[s](double, double eta) { return cplx(homogeneous_power(eta, s)); }, {}, s,
            "Dy:" + std::to_string(s)};
}

inline MultiplierSymbol riesz(double s)
{
    if (s < 0.0)
        throw std::domain_error("riesz needs s >= 0");
    return {[s](double xi, double eta) { return cplx(homogeneous_power(std::hypot(xi, eta), s)); }, {}, s,
            "D:" + std::to_string(s)};
}

inline MultiplierSymbol bessel(double s)
{
    return {[s](double xi, double eta) { return cplx(std::pow(1.0 + xi * xi + eta * eta, 0.5 * s)); }, {},
            std::max(s, 0.0), "J:" + std::to_string(s)};
}

inline MultiplierSymbol bessel_x(double s)
{
    return {[s](double xi, double) { return cplx(std::pow(1.0 + xi * xi, 0.5 * s)); }, {}, std::max(s, 0.0),
            "Jx:" + std::to_string(s)};
}

inline MultiplierSymbol bessel_y(double s)
{
    return {[s](double, double eta) { return cplx(std::pow(1.0 + eta * eta, 0.5 * s)); }, {},
            std::max(s, 0.0), "Jy:" + std::to_string(s)};
}

inline MultiplierSymbol hilbert_x_symbol()
{
    return {[](double xi, double) { return cplx(0.0, -signum(xi)); }, {}, 0.0, "Hx"};
}

inline MultiplierSymbol deriv_x()
{
    return {[](double xi, double) { return cplx(0.0, xi); }, {}, 1.0, "dx"};
}

inline MultiplierSymbol deriv_y()
{
    return {[](double, double eta) { return cplx(0.0, eta); }, {}, 1.0, "dy"};
}

/// Dispersion relation of the linear flow, omega = xi |xi|^(alpha+1) + xi eta^2.
inline double dispersion(double xi, double eta, double alpha)
{
    return xi * std::pow(std::abs(xi), alpha + 1.0) + xi * eta * eta;
}

inline MultiplierSymbol propagator(double t, double alpha)
{
    if (alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("alpha must lie in [0, 1]");
    MultiplierSymbol s;
    s.phase = [t, alpha](double xi, double eta) { return t * dispersion(xi, eta, alpha); };
    s.order = 0.0;
    s.label = "S:" + std::to_string(t) + "," + std::to_string(alpha);
    return s;
}

inline MultiplierSymbol product(const MultiplierSymbol& a, const MultiplierSymbol& b)
{
    MultiplierSymbol s;
    if (a.phase && b.phase) {
        auto pa = a.phase, pb = b.phase;
        s.phase = [pa, pb](double xi, double eta) { return pa(xi, eta) + pb(xi, eta); };
    } else {
        s.evaluator = [a, b](double xi, double eta) { return a(xi, eta) * b(xi, eta); };
    }
    s.order = a.order + b.order;
    s.label = a.label + "*" + b.label;
    return s;
}

/// @brief Smooth radial profile rho: 1 on |xi| <= 1, 0 on |xi| >= 2.
struct BumpProfile {
    std::function<double(double)> evaluator;
    std::string label;

    double operator()(double xi) const { return evaluator(xi); }
};

/// rho(xi) = smooth_step(2 - |xi|): infinitely differentiable, monotone on [1, 2].
inline BumpProfile default_bump()
{
    return {[](double xi) { return smooth_step(2.0 - std::abs(xi)); }, "smooth_step"};
}

/// Annulus piece rho_0(xi) = rho(xi) - rho(2 xi), supported on 1/2 <= |xi| <= 2.
inline double lp_annulus(const BumpProfile& bump, double xi) { return bump(xi) - bump(2.0 * xi); }

inline MultiplierSymbol lp_x(int j, const BumpProfile& bump = default_bump())
{
    const double scale = std::ldexp(1.0, -j);
    return {[bump, scale](double xi, double) { return cplx(lp_annulus(bump, scale * xi)); }, {}, 0.0,
            "Px:" + std::to_string(j)};
}

/// Parses registry names such as "Jx:1.5", "bessel:2", "Hx", "Px:0", "S:1,0.5".
inline MultiplierSymbol parse_symbol(const std::string& text)
{
    std::string name = text, args;
    if (auto pos = text.find(':'); pos != std::string::npos) {
        name = text.substr(0, pos);
        args = text.substr(pos + 1);
    }
    std::vector<double> nums;
    {
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                nums.push_back(std::stod(item, &used));
                if (used != item.size())
                    throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad symbol argument '" + item + "' in '" + text + "'");
            }
        }
    }
    auto need = [&](std::size_t k) {
        if (nums.size() != k)
            throw std::invalid_argument("symbol '" + name + "' expects " + std::to_string(k) + " argument(s)");
    };
    if (name == "riesz_x" || name == "Dx") { need(1); return riesz_x(nums[0]); }
    if (name == "riesz_y" || name == "Dy") { need(1); return riesz_y(nums[0]); }
    if (name == "riesz" || name == "D") { need(1); return riesz(nums[0]); }
    if (name == "bessel" || name == "J") { need(1); return bessel(nums[0]); }
    if (name == "bessel_x" || name == "Jx") { need(1); return bessel_x(nums[0]); }
    if (name == "bessel_y" || name == "Jy") { need(1); return bessel_y(nums[0]); }
    if (name == "hilbert_x" || name == "Hx") { need(0); return hilbert_x_symbol(); }
    if (name == "lp_x" || name == "Px") {
        need(1);
        if (nums[0] != std::floor(nums[0]))
            throw std::invalid_argument("lp_x needs an integer index");
        return lp_x(static_cast<int>(nums[0]));
    }
    if (name == "propagator" || name == "S") { need(2); return propagator(nums[0], nums[1]); }
    if (name == "dx") { need(0); return deriv_x(); }
    if (name == "dy") { need(0); return deriv_y(); }
    throw std::invalid_argument("unknown symbol family '" + name + "'");
}

// ---------------------------------------------------------------------------
// Named operators.

inline Field hilbert_x(const Field& f) { return apply_multiplier(f, hilbert_x_symbol()); }

inline Field lp_project_x(const Field& f, int j, const BumpProfile& bump = default_bump())
{
    return apply_multiplier(f, lp_x(j, bump));
}

inline Field linear_propagate(const Field& f, double t, double alpha)
{
    return apply_multiplier(f, propagator(t, alpha));
}

inline Field bessel_inverse(const Field& f, double s)
{
    if (!(s > 0.0))
        throw std::domain_error("bessel_inverse needs s > 0");
    return apply_multiplier(f, bessel(-s));
}

} // namespace bozk

#pragma once

#include "bozk/fft.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bozk {

/// @brief Periodic box [-lx/2, lx/2) x [-ly/2, ly/2) standing in for the plane.
///
/// Samples are stored row-major with x as the slow index: value (i, j) lives at
/// i * ny + j and sits at the point (x(i), y(j)).
struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;

    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double cell_area() const { return dx() * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    double x(int i) const { return -0.5 * lx + i * dx(); }
    double y(int j) const { return -0.5 * ly + j * dy(); }

    // Signed mode number of storage index i, in {-n/2, ..., n/2 - 1}.
    static int mode(int i, int n) { return i < n / 2 ? i : i - n; }

    double xi(int i) const { return 2.0 * std::numbers::pi * mode(i, nx) / lx; }
    double eta(int j) const { return 2.0 * std::numbers::pi * mode(j, ny) / ly; }

    // Largest lattice wavenumber magnitude (the Nyquist value).
    double xi_max() const { return std::numbers::pi * nx / lx; }
    double eta_max() const { return std::numbers::pi * ny / ly; }

    bool operator==(const Grid& o) const
    {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

inline Grid make_grid(int nx, int ny, double lx, double ly)
{
    if (nx < 8 || ny < 8)
        throw std::invalid_argument("grid dimensions must be at least 8");
    if (nx % 2 != 0 || ny % 2 != 0)
        throw std::invalid_argument("grid dimensions must be even");
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw std::invalid_argument("box lengths must be positive and finite");
    return Grid{nx, ny, lx, ly};
}

inline void to_json(nlohmann::json& j, const Grid& g)
{
    j = nlohmann::json{{"nx", g.nx}, {"ny", g.ny}, {"lx", g.lx}, {"ly", g.ly}};
}

inline void from_json(const nlohmann::json& j, Grid& g)
{
    g = make_grid(j.at("nx").get<int>(), j.at("ny").get<int>(), j.at("lx").get<double>(),
                  j.at("ly").get<double>());
}

/// Forward transform in the L2-unitary convention:
///   c(k,l) = sqrt(lx ly) / (nx ny) * sum u(i,j) exp(-i(xi_k x_i + eta_l y_j)),
/// so that sum |c|^2 equals the quadrature sum |u|^2 dx dy exactly. The phase
/// is taken relative to the box corner, which only matters for shifts.
inline std::vector<cplx> forward_transform(const Grid& g, const std::vector<double>& values)
{
    std::vector<cplx> in(values.begin(), values.end()), out(g.size());
    fft_forward_2d(g.nx, g.ny, in.data(), out.data());
    const double scale = std::sqrt(g.lx * g.ly) / static_cast<double>(g.size());
    for (auto& c : out)
        c *= scale;
    return out;
}

/// Inverse of forward_transform. Returns the complex samples; callers that
/// expect a real field take the real part.
inline std::vector<cplx> backward_transform(const Grid& g, const std::vector<cplx>& coeffs)
{
    std::vector<cplx> out(g.size());
    fft_backward_2d(g.nx, g.ny, coeffs.data(), out.data());
    const double scale = 1.0 / std::sqrt(g.lx * g.ly);
    for (auto& c : out)
        c *= scale;
    return out;
}

/// @brief Real samples on a Grid together with their Fourier coefficients.
///
/// A Field is immutable once built and both views are always consistent.
class Field {
public:
    Field() = default;

    static Field from_values(const Grid& g, std::vector<double> values)
    {
        if (values.size() != g.size())
            throw std::invalid_argument("value array does not match grid");
        for (double v : values)
            if (!std::isfinite(v))
                throw std::invalid_argument("field values must be finite");
        Field f;
        f.grid_ = g;
        f.coeffs_ = forward_transform(g, values);
        f.values_ = std::move(values);
        return f;
    }

    /// Builds from coefficients. The imaginary part of the inverse transform is
    /// discarded, which is exact when the coefficients are Hermitian symmetric.
    static Field from_coeffs(const Grid& g, std::vector<cplx> coeffs)
    {
        if (coeffs.size() != g.size())
            throw std::invalid_argument("coefficient array does not match grid");
        Field f;
        f.grid_ = g;
        auto samples = backward_transform(g, coeffs);
        f.values_.resize(g.size());
        for (std::size_t k = 0; k < samples.size(); ++k)
            f.values_[k] = samples[k].real();
        f.coeffs_ = std::move(coeffs);
        return f;
    }

    static Field zeros(const Grid& g) { return from_values(g, std::vector<double>(g.size(), 0.0)); }

    template < typename Fn >
    static Field sample(const Grid& g, Fn&& fn)
    {
        std::vector<double> v(g.size());
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                v[static_cast<std::size_t>(i) * g.ny + j] = fn(g.x(i), g.y(j));
        return from_values(g, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }

    double value(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.ny + j]; }
    cplx coeff(int i, int j) const { return coeffs_[static_cast<std::size_t>(i) * grid_.ny + j]; }

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<cplx> coeffs_;
};

/// Recomputes the coefficients from the physical samples.
inline Field to_spectral(const Field& f) { return Field::from_values(f.grid(), f.values()); }

/// Recomputes the physical samples from the coefficients.
inline Field to_physical(const Field& f) { return Field::from_coeffs(f.grid(), f.coeffs()); }

struct FieldNorms {
    double l2 = 0.0;
    double linf = 0.0;
};

inline FieldNorms field_norms(const Field& f)
{
    FieldNorms n;
    double sum = 0.0;
    for (double v : f.values()) {
        sum += v * v;
        n.linf = std::max(n.linf, std::abs(v));
    }
    n.l2 = std::sqrt(sum * f.grid().cell_area());
    return n;
}

/// L^p norm by grid quadrature; p = infinity gives the grid maximum.
inline double lp_norm(const std::vector<double>& v, double cell, double p)
{
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v)
            m = std::max(m, std::abs(x));
        return m;
    }
    if (!(p >= 1.0))
        throw std::invalid_argument("L^p norm needs p >= 1");
    double sum = 0.0;
    for (double x : v)
        sum += std::pow(std::abs(x), p);
    return std::pow(sum * cell, 1.0 / p);
}

inline double lp_norm(const Field& f, double p) { return lp_norm(f.values(), f.grid().cell_area(), p); }

/// Sum of |c|^2, equal to the squared L2 norm in the unitary convention.
inline double spectral_energy(const std::vector<cplx>& c)
{
    double s = 0.0;
    for (const auto& z : c)
        s += std::norm(z);
    return s;
}

// ---------------------------------------------------------------------------
// Snapshots: a little-endian binary header (int64 nx, int64 ny, double lx,
// double ly, double timestamp) followed by nx*ny doubles in storage order, and
// a JSON sidecar describing the same header.

struct Snapshot {
    Field field;
    double timestamp = 0.0;
};

inline void save_snapshot(const std::string& path, const Field& f, double timestamp,
                          const nlohmann::json& extra = nlohmann::json::object())
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open snapshot for writing: " + path);
    const Grid& g = f.grid();
    std::int64_t nx = g.nx, ny = g.ny;
    out.write(reinterpret_cast<const char*>(&nx), sizeof nx);
    out.write(reinterpret_cast<const char*>(&ny), sizeof ny);
    out.write(reinterpret_cast<const char*>(&g.lx), sizeof g.lx);
    out.write(reinterpret_cast<const char*>(&g.ly), sizeof g.ly);
    out.write(reinterpret_cast<const char*>(&timestamp), sizeof timestamp);
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!out)
        throw std::runtime_error("snapshot write failed: " + path);

    nlohmann::json side = {{"format", "bozk-field-v1"},
                           {"layout", "int64 nx, int64 ny, f64 lx, f64 ly, f64 timestamp, "
                                      "then nx*ny f64 values, x-major"},
                           {"grid", g},
                           {"timestamp", timestamp},
                           {"extra", extra}};
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

inline Snapshot load_snapshot(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open snapshot: " + path);
    std::int64_t nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0, ts = 0.0;
    in.read(reinterpret_cast<char*>(&nx), sizeof nx);
    in.read(reinterpret_cast<char*>(&ny), sizeof ny);
    in.read(reinterpret_cast<char*>(&lx), sizeof lx);
    in.read(reinterpret_cast<char*>(&ly), sizeof ly);
    in.read(reinterpret_cast<char*>(&ts), sizeof ts);
    if (!in)
        throw std::runtime_error("truncated snapshot header: " + path);
    Grid g = make_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    std::vector<double> v(g.size());
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in)
        throw std::runtime_error("truncated snapshot body: " + path);
    return Snapshot{Field::from_values(g, std::move(v)), ts};
}

} // namespace bozk

#pragma once

#include "bozk/diagnostics.hpp"
#include "bozk/fourier_ops.hpp"
#include "bozk/grid_field.hpp"
#include "bozk/smooth.hpp"

#include "json.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bozk {

/// @brief Absorbing layer sigma(x, y) >= 0 applied as u <- exp(-sigma dt) u.
///
/// sigma ramps smoothly from 0 to `strength` over `width` when moving left of
/// x_start, and when |y| moves beyond y_start. Either side can be disabled.
struct Sponge {
    double strength = 0.0;
    std::optional<double> x_start;
    std::optional<double> y_start;
    double width = 4.0;

    bool active() const { return strength > 0.0 && (x_start || y_start); }

    double sigma(double x, double y) const
    {
        if (!active())
            return 0.0;
        double s = 0.0;
        if (x_start)
            s += smooth_step((*x_start - x) / width);
        if (y_start)
            s += smooth_step((std::abs(y) - *y_start) / width);
        return strength * s;
    }
};

inline void to_json(nlohmann::json& j, const Sponge& s)
{
    j = nlohmann::json{{"strength", s.strength}, {"width", s.width}};
    j["x_start"] = s.x_start ? nlohmann::json(*s.x_start) : nlohmann::json(nullptr);
    j["y_start"] = s.y_start ? nlohmann::json(*s.y_start) : nlohmann::json(nullptr);
}

struct SolverConfig {
    double alpha = 0.5;
    double dt = 1e-3;
    double t_end = 1.0;
    bool dealias = true;
    Grid grid;
    int observer_stride = 10;
    bool nonlinear = true;
    Sponge sponge;
    double blowup_factor = 1e8;
    double wrap_threshold = 1e-10;
    int checkpoint_every = 0;

    /// dt * max over the lattice of |xi| * max(|xi|^(alpha+1), eta^2). Recorded,
    /// not enforced: the scheme treats the linear part exactly.
    double stability_number() const
    {
        const double xm = grid.xi_max(), em = grid.eta_max();
        return dt * xm * std::max(std::pow(xm, alpha + 1.0), em * em);
    }

    void validate() const
    {
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("alpha must lie in [0, 1]");
        if (!(dt > 0.0))
            throw std::invalid_argument("dt must be positive");
        if (!(t_end >= 0.0))
            throw std::invalid_argument("t_end must be nonnegative");
        if (observer_stride < 1)
            throw std::invalid_argument("observer_stride must be positive");
        make_grid(grid.nx, grid.ny, grid.lx, grid.ly);
    }
};

inline void to_json(nlohmann::json& j, const SolverConfig& c)
{
    j = nlohmann::json{{"alpha", c.alpha},
                       {"dt", c.dt},
                       {"t_end", c.t_end},
                       {"dealias", c.dealias},
                       {"grid", c.grid},
                       {"observer_stride", c.observer_stride},
                       {"nonlinear", c.nonlinear},
                       {"sponge", c.sponge},
                       {"blowup_factor", c.blowup_factor},
                       {"wrap_threshold", c.wrap_threshold},
                       {"checkpoint_every", c.checkpoint_every},
                       {"stability_number", c.stability_number()}};
}

struct SimState {
    Field field;
    double t = 0.0;
    long step_count = 0;
};

/// Raised when the solution stops being finite or its H^3 proxy explodes.
/// Carries whatever diagnostics were gathered before the abort.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, double t, long step, DiagnosticSeries partial)
        : std::runtime_error(what), t_(t), step_(step), partial_(std::move(partial))
    {
    }
    double time() const { return t_; }
    long step() const { return step_; }
    const DiagnosticSeries& partial() const { return partial_; }

private:
    double t_;
    long step_;
    DiagnosticSeries partial_;
};

inline std::vector<unsigned char> dealias_mask(const Grid& g)
{
    std::vector<unsigned char> m(g.size());
    for (int i = 0; i < g.nx; ++i) {
        const bool kx = std::abs(Grid::mode(i, g.nx)) <= g.nx / 3;
        for (int j = 0; j < g.ny; ++j)
            m[static_cast<std::size_t>(i) * g.ny + j] = kx && std::abs(Grid::mode(j, g.ny)) <= g.ny / 3;
    }
    return m;
}

/// Returns -1/2 d_x (u^2) evaluated spectrally. With dealiasing, modes with
/// |k| > nx/3 or |l| > ny/3 are removed before and after squaring.
inline Field nonlinear_term(const Field& f, bool dealias)
{
    const Grid& g = f.grid();
    std::vector<cplx> c = f.coeffs();
    std::vector<unsigned char> mask;
    if (dealias) {
        mask = dealias_mask(g);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (!mask[k])
                c[k] = 0.0;
    }
    auto u = backward_transform(g, c);
    std::vector<double> sq(g.size());
    for (std::size_t k = 0; k < sq.size(); ++k)
        sq[k] = u[k].real() * u[k].real();
    auto w = forward_transform(g, sq);
    auto ikx = lattice_symbol(g, deriv_x());
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] *= -0.5 * ikx[k];
        if (dealias && !mask[k])
            w[k] = 0.0;
    }
    return Field::from_coeffs(g, std::move(w));
}

/// @brief Integrating-factor RK4 for u_t = L u + N(u) with L exact.
///
/// The linear flow multiplies coefficients by exp(i dt omega); the classical
/// fourth-order Runge-Kutta stages act on the transformed variable
/// v = exp(-i t omega) u_hat. An optional absorbing layer is applied in
/// physical space after each step.
class Integrator {
public:
    explicit Integrator(const SolverConfig& cfg) : cfg_(cfg), g_(cfg.grid)
    {
        cfg_.validate();
        e_half_ = lattice_symbol(g_, propagator(0.5 * cfg_.dt, cfg_.alpha));
        e_full_ = lattice_symbol(g_, propagator(cfg_.dt, cfg_.alpha));
        ikx_ = lattice_symbol(g_, deriv_x());
        mask_ = dealias_mask(g_);
        j3_.resize(g_.size());
        for (int i = 0; i < g_.nx; ++i)
            for (int j = 0; j < g_.ny; ++j) {
                double r = 1.0 + g_.xi(i) * g_.xi(i) + g_.eta(j) * g_.eta(j);
                j3_[static_cast<std::size_t>(i) * g_.ny + j] = r * r * r;
            }
        if (cfg_.sponge.active()) {
            damp_.resize(g_.size());
            absorbing_.resize(g_.size());
            for (int i = 0; i < g_.nx; ++i)
                for (int j = 0; j < g_.ny; ++j) {
                    const std::size_t k = static_cast<std::size_t>(i) * g_.ny + j;
                    const double s = cfg_.sponge.sigma(g_.x(i), g_.y(j));
                    damp_[k] = std::exp(-s * cfg_.dt);
                    absorbing_[k] = s > 0.0;
                }
        }
    }

    const SolverConfig& config() const { return cfg_; }

    /// Cells inside the absorbing layer, or nullptr when there is none.
    const std::vector<unsigned char>* absorbing_cells() const { return absorbing_.empty() ? nullptr : &absorbing_; }

    /// Squared H^3 norm computed through Parseval.
    double h3_proxy(const std::vector<cplx>& c) const
    {
        double s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            s += j3_[k] * std::norm(c[k]);
        return std::sqrt(s);
    }

    void advance(std::vector<cplx>& uh) const
    {
        const std::size_t n = uh.size();
        const double dt = cfg_.dt;
        if (!cfg_.nonlinear) {
            for (std::size_t k = 0; k < n; ++k)
                uh[k] *= e_full_[k];
        } else {
            std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
            eval_n(uh, k1);
            for (std::size_t k = 0; k < n; ++k)
                tmp[k] = e_half_[k] * (uh[k] + 0.5 * dt * k1[k]);
            eval_n(tmp, k2);
            for (std::size_t k = 0; k < n; ++k)
                tmp[k] = e_half_[k] * uh[k] + 0.5 * dt * k2[k];
            eval_n(tmp, k3);
            for (std::size_t k = 0; k < n; ++k)
                tmp[k] = e_full_[k] * uh[k] + dt * e_half_[k] * k3[k];
            eval_n(tmp, k4);
            for (std::size_t k = 0; k < n; ++k)
                uh[k] = e_full_[k] * uh[k]
                        + dt / 6.0 * (e_full_[k] * k1[k] + 2.0 * e_half_[k] * (k2[k] + k3[k]) + k4[k]);
        }
        if (!damp_.empty()) {
            auto u = backward_transform(g_, uh);
            std::vector<double> r(n);
            for (std::size_t k = 0; k < n; ++k)
                r[k] = u[k].real() * damp_[k];
            uh = forward_transform(g_, r);
        }
    }

    SimState step(const SimState& s) const
    {
        std::vector<cplx> uh = s.field.coeffs();
        advance(uh);
        SimState out{Field::from_coeffs(g_, std::move(uh)), s.t + cfg_.dt, s.step_count + 1};
        check_finite(out.field.coeffs(), out.t, out.step_count);
        return out;
    }

private:
    void eval_n(const std::vector<cplx>& uh, std::vector<cplx>& out) const
    {
        const std::size_t n = uh.size();
        std::vector<cplx> c(uh);
        if (cfg_.dealias)
            for (std::size_t k = 0; k < n; ++k)
                if (!mask_[k])
                    c[k] = 0.0;
        auto u = backward_transform(g_, c);
        std::vector<double> sq(n);
        for (std::size_t k = 0; k < n; ++k)
            sq[k] = u[k].real() * u[k].real();
        out = forward_transform(g_, sq);
        for (std::size_t k = 0; k < n; ++k) {
            out[k] *= -0.5 * ikx_[k];
            if (cfg_.dealias && !mask_[k])
                out[k] = 0.0;
        }
    }

    void check_finite(const std::vector<cplx>& c, double t, long step) const
    {
        double h = h3_proxy(c);
        if (!std::isfinite(h))
            throw BlowUpError("non-finite values at t = " + format_double(t), t, step, {});
    }

    SolverConfig cfg_;
    Grid g_;
    std::vector<cplx> e_half_, e_full_, ikx_;
    std::vector<unsigned char> mask_;
    std::vector<double> j3_, damp_;
    std::vector<unsigned char> absorbing_;
};

/// Convenience single step; builds the integrator on every call.
inline SimState step(const SimState& state, const SolverConfig& config)
{
    if (state.t + config.dt > config.t_end + config.dt * (1.0 + 1e-9))
        throw std::invalid_argument("step would pass t_end");
    return Integrator(config).step(state);
}

/// Observer: adds entries to the record for the field at time t.
using Observer = std::function<void(const Field&, double, DiagnosticRecord&)>;

struct SimResult {
    DiagnosticSeries series;
    SimState final_state;
    double max_wrap = 0.0;
    bool wrap_exceeded = false;
};

/// Evolves from `start` to config.t_end. Observers run at the start, every
/// observer_stride steps and at the final step; every record also carries the
/// wrap-contamination metric under the label "wrap".
inline SimResult simulate(const SimState& start, const SolverConfig& config, const std::vector<Observer>& observers,
                          const std::function<void(const SimState&)>& checkpoint = {})
{
    config.validate();
    if (!(start.field.grid() == config.grid))
        throw std::invalid_argument("initial field does not live on the configured grid");
    Integrator integ(config);
    SimResult res;
    res.series.meta["solver"] = config;

    const double remaining = config.t_end - start.t;
    const long nsteps = remaining <= 0.0 ? 0 : static_cast<long>(std::llround(remaining / config.dt));

    auto observe = [&](const Field& f, double t) {
        DiagnosticRecord rec;
        rec.t = t;
        for (const auto& obs : observers)
            obs(f, t, rec);
        double w = wrap_contamination(f, integ.absorbing_cells());
        rec.set("wrap", w);
        res.max_wrap = std::max(res.max_wrap, w);
        res.series.append(std::move(rec));
    };

    observe(start.field, start.t);
    std::vector<cplx> uh = start.field.coeffs();
    const double h3_0 = integ.h3_proxy(uh);
    long step_count = start.step_count;
    for (long n = 1; n <= nsteps; ++n) {
        integ.advance(uh);
        ++step_count;
        const double t = start.t + n * config.dt;
        const double h3 = integ.h3_proxy(uh);
        if (!std::isfinite(h3))
            throw BlowUpError("non-finite values at t = " + format_double(t), t, step_count, res.series);
        if (h3_0 > 0.0 && h3 > config.blowup_factor * h3_0)
            throw BlowUpError("H^3 proxy exceeded " + format_double(config.blowup_factor) + " times its initial value",
                              t, step_count, res.series);
        const bool record = n % config.observer_stride == 0 || n == nsteps;
        const bool ckpt = checkpoint && config.checkpoint_every > 0 && n % config.checkpoint_every == 0;
        if (record || ckpt) {
            Field f = Field::from_coeffs(config.grid, uh);
            if (ckpt)
                checkpoint(SimState{f, t, step_count});
            if (record)
                observe(f, t);
        }
    }
    res.final_state = SimState{Field::from_coeffs(config.grid, uh), start.t + nsteps * config.dt, step_count};
    res.wrap_exceeded = res.max_wrap > config.wrap_threshold;
    return res;
}

inline SimResult simulate(const Field& u0, const SolverConfig& config, const std::vector<Observer>& observers)
{
    return simulate(SimState{u0, 0.0, 0}, config, observers);
}

// ---------------------------------------------------------------------------
// Standard observers.

inline Observer conserved_observer(double alpha)
{
    return [alpha](const Field& f, double, DiagnosticRecord& rec) {
        Conserved q = conserved_quantities(f, alpha);
        rec.set("I", q.I);
        rec.set("M", q.M);
        rec.set("E", q.E);
    };
}

inline Observer mass_observer()
{
    return [](const Field& f, double, DiagnosticRecord& rec) {
        double m = 0.0;
        for (double u : f.values())
            m += u * u;
        rec.set("M", m * f.grid().cell_area());
    };
}

} // namespace bozk

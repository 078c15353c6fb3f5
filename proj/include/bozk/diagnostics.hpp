#pragma once

#include "bozk/cutoffs.hpp"
#include "bozk/fourier_ops.hpp"
#include "bozk/grid_field.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bozk {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

struct DiagnosticRecord {
    double t = 0.0;
    std::vector<std::pair<std::string, double>> entries;

    void set(const std::string& label, double value)
    {
        for (const auto& e : entries)
            if (e.first == label)
                throw std::invalid_argument("duplicate diagnostic label '" + label + "'");
        if (!std::isfinite(value))
            throw std::domain_error("diagnostic '" + label + "' is not finite");
        entries.emplace_back(label, value);
    }

    bool has(const std::string& label) const
    {
        for (const auto& e : entries)
            if (e.first == label)
                return true;
        return false;
    }

    double get(const std::string& label) const
    {
        for (const auto& e : entries)
            if (e.first == label)
                return e.second;
        throw std::out_of_range("no diagnostic '" + label + "'");
    }
};

/// @brief Time-ordered diagnostic records plus free-form metadata.
///
/// CSV layout: one "# meta: {...}" comment line, then a header row "t,<labels>"
/// with labels in first-seen order, then one row per record. Missing entries
/// are left empty. Numbers use the shortest round-trip decimal form, so equal
/// inputs always produce identical bytes.
struct DiagnosticSeries {
    std::vector<DiagnosticRecord> records;
    nlohmann::json meta = nlohmann::json::object();

    void append(DiagnosticRecord rec)
    {
        if (!std::isfinite(rec.t))
            throw std::domain_error("record time must be finite");
        if (!records.empty() && !(rec.t > records.back().t))
            throw std::invalid_argument("record times must be strictly increasing");
        records.push_back(std::move(rec));
    }

    std::vector<std::string> labels() const
    {
        std::vector<std::string> out;
        for (const auto& r : records)
            for (const auto& e : r.entries)
                if (std::find(out.begin(), out.end(), e.first) == out.end())
                    out.push_back(e.first);
        return out;
    }

    std::vector<double> times() const
    {
        std::vector<double> t;
        for (const auto& r : records)
            t.push_back(r.t);
        return t;
    }

    std::vector<double> column(const std::string& label) const
    {
        std::vector<double> c;
        for (const auto& r : records)
            c.push_back(r.get(label));
        return c;
    }

    std::string to_csv() const
    {
        std::ostringstream os;
        os << "# meta: " << meta.dump() << "\n";
        auto labs = labels();
        os << "t";
        for (const auto& l : labs)
            os << "," << l;
        os << "\n";
        for (const auto& r : records) {
            os << format_double(r.t);
            for (const auto& l : labs) {
                os << ",";
                if (r.has(l))
                    os << format_double(r.get(l));
            }
            os << "\n";
        }
        return os.str();
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["meta"] = meta;
        j["labels"] = labels();
        nlohmann::json recs = nlohmann::json::array();
        for (const auto& r : records) {
            nlohmann::json e = nlohmann::json::object();
            for (const auto& kv : r.entries)
                e[kv.first] = kv.second;
            recs.push_back({{"t", r.t}, {"values", e}});
        }
        j["records"] = recs;
        return j;
    }

    void write_csv(const std::string& path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path);
        out << to_csv();
    }

    void write_json(const std::string& path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path);
        out << to_json().dump(2) << "\n";
    }
};

/// Trapezoid rule for samples y(t) at increasing times t.
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y)
{
    if (t.size() != y.size())
        throw std::invalid_argument("trapezoid needs matching arrays");
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k)
        s += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
    return s;
}

// ---------------------------------------------------------------------------
// Conserved functionals.

struct Conserved {
    double I = 0.0;
    double M = 0.0;
    double E = 0.0;
};

/// I = int u, M = int u^2, E = 1/2 int (|D_x^{(a+1)/2} u|^2 + |u_y|^2 - u^3/3).
/// The quadratic parts of E are evaluated through Parseval.
inline Conserved conserved_quantities(const Field& f, double alpha)
{
    const Grid& g = f.grid();
    Conserved q;
    double cubic = 0.0;
    for (double u : f.values()) {
        q.I += u;
        q.M += u * u;
        cubic += u * u * u;
    }
    q.I *= g.cell_area();
    q.M *= g.cell_area();
    cubic *= g.cell_area();
    double kinetic = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double wx = homogeneous_power(g.xi(i), alpha + 1.0);
        for (int j = 0; j < g.ny; ++j) {
            const double eta = g.eta(j);
            kinetic += (wx + eta * eta) * std::norm(f.coeff(i, j));
        }
    }
    q.E = 0.5 * (kinetic - cubic / 3.0);
    return q;
}

// ---------------------------------------------------------------------------
// Localized Sobolev quantities. Each takes physical samples of an operator
// applied to u and integrates them against an x-dependent weight.

inline double weighted_square_sum(const Grid& g, const std::vector<double>& v, const std::vector<double>& wx)
{
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        if (wx[i] == 0.0)
            continue;
        double row = 0.0;
        const double* p = v.data() + static_cast<std::size_t>(i) * g.ny;
        for (int j = 0; j < g.ny; ++j)
            row += p[j] * p[j];
        s += wx[i] * row;
    }
    return s * g.cell_area();
}

inline std::vector<double> half_space_weight(const Grid& g, double x0)
{
    std::vector<double> w(g.nx);
    for (int i = 0; i < g.nx; ++i)
        w[i] = g.x(i) >= x0 ? 1.0 : 0.0;
    return w;
}

/// Weight w(x + v t) for the selected cutoff raised to the given power, where
/// x is measured from the reference point x0.
inline std::vector<double> cutoff_weight(const Grid& g, const CutoffFamily& fam, CutoffSelector which, double v,
                                         double t, int power, double x0 = 0.0)
{
    std::vector<double> w(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        double c = eval_shifted(fam, which, g.x(i) - x0, v, t);
        w[i] = power == 2 ? c * c : c;
    }
    return w;
}

inline std::vector<double> chi_chiprime_weight(const Grid& g, const CutoffFamily& fam, double v, double t,
                                               double x0 = 0.0)
{
    std::vector<double> w(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        double x = g.x(i) - x0 + v * t;
        w[i] = fam.chi(x) * fam.chi_prime(x);
    }
    return w;
}

/// Sharp-indicator integral of (J_x^s u)^2 over x >= x0.
inline double half_space_norm(const Field& f, double s, double x0)
{
    if (s < 0.0)
        throw std::domain_error("half_space_norm needs s >= 0");
    Field ju = apply_multiplier(f, bessel_x(s));
    return weighted_square_sum(f.grid(), ju.values(), half_space_weight(f.grid(), x0));
}

/// Integral of (J_x^s u)^2 chi^2(x - x0 + v t).
inline double windowed_norm(const Field& f, double s, const CutoffFamily& fam, double v, double t, double x0 = 0.0)
{
    if (s < 0.0)
        throw std::domain_error("windowed_norm needs s >= 0");
    Field ju = apply_multiplier(f, bessel_x(s));
    return weighted_square_sum(f.grid(), ju.values(), cutoff_weight(f.grid(), fam, CutoffSelector::chi, v, t, 2, x0));
}

struct ChannelIncrement {
    double dx_part = 0.0;
    double dy_part = 0.0;
};

/// Integrals of (D_x^{(a+1)/2} J_x^s u)^2 chi chi' and (d_y J_x^s u)^2 chi chi',
/// both with the weight evaluated at x - x0 + v t.
inline ChannelIncrement channel_smoothing_increment(const Field& f, double s, double alpha, const CutoffFamily& fam,
                                                    double v, double t, double x0 = 0.0)
{
    if (s < 0.0)
        throw std::domain_error("channel_smoothing_increment needs s >= 0");
    const Grid& g = f.grid();
    auto w = chi_chiprime_weight(g, fam, v, t, x0);
    Field a = apply_multiplier(f, product(riesz_x(0.5 * (alpha + 1.0)), bessel_x(s)));
    Field b = apply_multiplier(f, product(deriv_y(), bessel_x(s)));
    return {weighted_square_sum(g, a.values(), w), weighted_square_sum(g, b.values(), w)};
}

// ---------------------------------------------------------------------------
// Kato smoothing quantities.

enum class KatoOperator { J, Jx, Jy, D, Dx, Dy };
enum class KatoSmoothing { dx_half, hilbert_dx_half, dy };

struct KatoTag {
    KatoOperator op = KatoOperator::J;
    KatoSmoothing smoothing = KatoSmoothing::dx_half;
};

/// Parses "A/S" with A in {J, Jx, Jy, D, Dx, Dy} and S in {Dx, HDx, dy}.
inline KatoTag parse_kato_tag(const std::string& text)
{
    auto pos = text.find('/');
    if (pos == std::string::npos)
        throw std::invalid_argument("kato tag must look like 'J/Dx'");
    std::string a = text.substr(0, pos), s = text.substr(pos + 1);
    KatoTag tag;
    if (a == "J") tag.op = KatoOperator::J;
    else if (a == "Jx") tag.op = KatoOperator::Jx;
    else if (a == "Jy") tag.op = KatoOperator::Jy;
    else if (a == "D") tag.op = KatoOperator::D;
    else if (a == "Dx") tag.op = KatoOperator::Dx;
    else if (a == "Dy") tag.op = KatoOperator::Dy;
    else throw std::invalid_argument("unknown kato operator '" + a + "'");
    if (s == "Dx") tag.smoothing = KatoSmoothing::dx_half;
    else if (s == "HDx") tag.smoothing = KatoSmoothing::hilbert_dx_half;
    else if (s == "dy") tag.smoothing = KatoSmoothing::dy;
    else throw std::invalid_argument("unknown kato smoothing operator '" + s + "'");
    return tag;
}

inline MultiplierSymbol kato_symbol(double r, double alpha, KatoTag tag)
{
    MultiplierSymbol a;
    switch (tag.op) {
    case KatoOperator::J: a = bessel(r); break;
    case KatoOperator::Jx: a = bessel_x(r); break;
    case KatoOperator::Jy: a = bessel_y(r); break;
    case KatoOperator::D: a = riesz(r); break;
    case KatoOperator::Dx: a = riesz_x(r); break;
    case KatoOperator::Dy: a = riesz_y(r); break;
    }
    MultiplierSymbol s;
    switch (tag.smoothing) {
    case KatoSmoothing::dx_half: s = riesz_x(0.5 * (alpha + 1.0)); break;
    case KatoSmoothing::hilbert_dx_half: s = product(hilbert_x_symbol(), riesz_x(0.5 * (alpha + 1.0))); break;
    case KatoSmoothing::dy: s = deriv_y(); break;
    }
    return product(s, a);
}

/// Integral over |x| < R (all y) of the square of the tagged operator applied to u.
inline double kato_quantities(const Field& f, double r, double alpha, double R, KatoTag tag)
{
    if (r < 0.0 || !(R > 0.0))
        throw std::domain_error("kato_quantities needs r >= 0 and R > 0");
    const Grid& g = f.grid();
    Field q = apply_multiplier(f, kato_symbol(r, alpha, tag));
    std::vector<double> w(g.nx);
    for (int i = 0; i < g.nx; ++i)
        w[i] = std::abs(g.x(i)) < R ? 1.0 : 0.0;
    return weighted_square_sum(g, q.values(), w);
}

// ---------------------------------------------------------------------------
// Wrap contamination and dispersive decay fits.

/// Fraction of the squared L2 norm sitting within lx/8 (resp. ly/8) of the
/// periodic seam. Cells flagged in `exclude` (for instance an absorbing layer)
/// do not count toward the numerator.
inline double wrap_contamination(const Field& f, const std::vector<unsigned char>* exclude = nullptr)
{
    const Grid& g = f.grid();
    double total = 0.0, edge = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const bool bx = std::abs(g.x(i)) >= 0.375 * g.lx;
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * g.ny + j;
            const double e = f.values()[k] * f.values()[k];
            total += e;
            const bool by = std::abs(g.y(j)) >= 0.375 * g.ly;
            if ((bx || by) && !(exclude && (*exclude)[k]))
                edge += e;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

enum class DecayMode { strichartz, rough };

inline double decay_target(DecayMode mode, double p)
{
    const double q = std::isinf(p) ? 1.0 : 1.0 - 2.0 / p;
    return mode == DecayMode::strichartz ? -5.0 / 6.0 * q : -0.5 * q;
}

struct DecayFit {
    double slope = 0.0;
    double prefactor = 0.0;
    double target = 0.0;
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> wrap;
    double max_wrap = 0.0;
    double upper_decade_slope = NAN; ///< slope over t >= t_max/10 alone, NaN if fewer than two times
};

namespace detail {

// Least-squares slope and intercept of log y against log x over the indices in idx.
inline std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                                            const std::vector<std::size_t>& idx)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(idx.size());
    for (std::size_t k : idx) {
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

} // namespace detail

/// Least-squares fit of log ||P_j^x S(t) datum||_p against log t. The mode only
/// selects the reference exponent reported alongside the fit.
inline DecayFit decay_fit(const Field& datum, double alpha, int j, double p, const std::vector<double>& times,
                          DecayMode mode = DecayMode::strichartz)
{
    if (!(p >= 2.0))
        throw std::domain_error("decay_fit needs p >= 2");
    if (times.size() < 2)
        throw std::invalid_argument("decay_fit needs at least two times");
    double tmin = times.front(), tmax = times.front();
    for (double t : times) {
        if (!(t > 0.0))
            throw std::invalid_argument("decay_fit times must be positive");
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    if (tmax < 10.0 * tmin)
        throw std::invalid_argument("decay_fit times must span at least one decade");

    Field pj = lp_project_x(datum, j);
    DecayFit fit;
    fit.target = decay_target(mode, p);
    fit.times = times;
    for (double t : times) {
        Field u = linear_propagate(pj, t, alpha);
        fit.norms.push_back(lp_norm(u, p));
        fit.wrap.push_back(wrap_contamination(u));
        fit.max_wrap = std::max(fit.max_wrap, fit.wrap.back());
    }
    bool any = false;
    for (double n : fit.norms)
        any = any || n >= 1e-14;
    if (!any)
        throw std::domain_error("decay_fit is degenerate: all norms below 1e-14");
    std::vector<std::size_t> all, upper;
    for (std::size_t k = 0; k < times.size(); ++k) {
        all.push_back(k);
        if (times[k] >= tmax / 10.0 * (1.0 - 1e-12))
            upper.push_back(k);
    }
    const auto [slope, intercept] = detail::loglog_fit(times, fit.norms, all);
    fit.slope = slope;
    fit.prefactor = std::exp(intercept);
    if (upper.size() >= 2)
        fit.upper_decade_slope = detail::loglog_fit(times, fit.norms, upper).first;
    return fit;
}

} // namespace bozk

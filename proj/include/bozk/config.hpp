#pragma once

#include "bozk/commutator_lab.hpp"
#include "bozk/cutoffs.hpp"
#include "bozk/datum.hpp"
#include "bozk/diagnostics.hpp"
#include "bozk/evolve.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bozk {

/// @brief All violations found while parsing or validating a config.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> errors)
        : std::runtime_error(join(errors)), errors_(std::move(errors))
    {
    }

    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e)
    {
        std::string s;
        for (const auto& m : e)
            s += (s.empty() ? "" : "\n") + m;
        return s;
    }

    std::vector<std::string> errors_;
};

enum class ValueType { real, integer, boolean, text, real_list, int_list, text_list, opt_real };

struct ConfigKey {
    const char* path;
    ValueType type;
    const char* fallback;
    const char* doc;
};

/// Every accepted key with its type, default and meaning. Keys outside this
/// table are rejected.
inline const std::vector<ConfigKey>& config_schema()
{
    static const std::vector<ConfigKey> schema = {
        {"run.kind", ValueType::text, "simulate", "simulate | propagation | linear-decay | kato | commutator-norms | inequality | cutoff-check"},
        {"run.seed", ValueType::integer, "0", "master seed"},
        {"run.output_dir", ValueType::text, "out", "output directory"},
        {"run.threads", ValueType::integer, "1", "FFT threads"},

        {"solver.alpha", ValueType::real, "0.5", "dispersion parameter in [0, 1]"},
        {"solver.dt", ValueType::real, "1e-3", "time step"},
        {"solver.t_end", ValueType::real, "1", "final time"},
        {"solver.nx", ValueType::integer, "128", "grid points in x"},
        {"solver.ny", ValueType::integer, "128", "grid points in y"},
        {"solver.lx", ValueType::real, "40", "box length in x"},
        {"solver.ly", ValueType::real, "40", "box length in y"},
        {"solver.dealias", ValueType::boolean, "true", "2/3-rule dealiasing"},
        {"solver.nonlinear", ValueType::boolean, "true", "include the u u_x term"},
        {"solver.observer_stride", ValueType::integer, "10", "steps between records"},
        {"solver.blowup_factor", ValueType::real, "1e8", "H^3 proxy growth that counts as blow-up"},
        {"solver.wrap_threshold", ValueType::real, "1e-6", "edge energy fraction that counts as wrap contamination"},
        {"solver.checkpoint_every", ValueType::integer, "0", "steps between checkpoints, 0 disables"},
        {"solver.sponge_strength", ValueType::real, "0", "absorbing layer strength"},
        {"solver.sponge_x_start", ValueType::opt_real, "none", "sponge ramps in left of this x"},
        {"solver.sponge_y_start", ValueType::opt_real, "none", "sponge ramps in beyond this |y|"},
        {"solver.sponge_width", ValueType::real, "4", "sponge ramp width"},

        {"regularity.s", ValueType::real, "2", "Sobolev index of the one-sided hypothesis"},

        {"window.x0", ValueType::real, "0", "left edge of the regular half-space"},
        {"window.eps", ValueType::real, "1", "cutoff parameter epsilon"},
        {"window.b", ValueType::real, "5", "cutoff parameter b"},
        {"window.v", ValueType::real_list, "0, 1", "window speeds"},
        {"window.tau", ValueType::real, "5", "channel right edge offset"},

        {"datum.kind", ValueType::text, "gaussian", "gaussian | band_limited_random | one_sided | spectral_packet | rough_packet | fold_packet"},
        {"datum.amplitude", ValueType::real, "1", "overall amplitude"},
        {"datum.wx", ValueType::real, "1", "gaussian width in x"},
        {"datum.wy", ValueType::real, "1", "width in y (gaussian, one_sided)"},
        {"datum.xc", ValueType::real, "0", "gaussian centre x"},
        {"datum.yc", ValueType::real, "0", "gaussian centre y"},
        {"datum.seed", ValueType::integer, "-1", "random datum seed, -1 uses run.seed"},
        {"datum.band", ValueType::real, "4", "band limit of the random datum"},
        {"datum.x1", ValueType::real, "-5", "location of the rough point"},
        {"datum.gamma", ValueType::real, "1.2", "exponent of |x - x1|"},
        {"datum.w", ValueType::real, "1", "envelope width around x1"},
        {"datum.bump_amplitude", ValueType::real, "0.5", "smooth bump amplitude (one_sided)"},
        {"datum.bump_x", ValueType::real, "2", "smooth bump centre (one_sided)"},
        {"datum.bump_w", ValueType::real, "1.5", "smooth bump width (one_sided)"},
        {"datum.filter", ValueType::boolean, "true", "grid-scale spectral filter (one_sided)"},
        {"datum.packet_x", ValueType::real, "0.28", "packet centre as a fraction of lx"},
        {"datum.packet_sx", ValueType::real, "2", "packet spectral width in xi"},
        {"datum.packet_sy", ValueType::real, "0.7", "packet spectral width in eta"},
        {"datum.packet_xi", ValueType::real, "1", "fold packet centre frequency in xi"},

        {"decay.p", ValueType::real, "inf", "Lebesgue exponent, p >= 2"},
        {"decay.j", ValueType::integer, "0", "Littlewood-Paley index"},
        {"decay.t_min", ValueType::real, "1", "first fit time"},
        {"decay.t_max", ValueType::real, "100", "last fit time"},
        {"decay.count", ValueType::integer, "17", "log-spaced fit times"},
        {"decay.mode", ValueType::text, "strichartz", "strichartz | rough"},
        {"decay.wrap_threshold", ValueType::real, "1e-10", "edge energy fraction allowed in the fit"},

        {"kato.r", ValueType::real, "1", "order of A^r"},
        {"kato.R", ValueType::real, "5", "window half-width |x| < R"},
        {"kato.tags", ValueType::text_list, "J/Dx, J/HDx, J/dy, Dx/Dx, Dx/HDx, Dx/dy", "A/smoothing pairs"},

        {"commutator.a", ValueType::real, "2", "order a = 2 mu + 1"},
        {"commutator.b", ValueType::real, "0", "outer order b"},
        {"commutator.n", ValueType::integer, "0", "truncation n"},
        {"commutator.grids", ValueType::int_list, "256, 512, 1024", "1-D grid sizes"},
        {"commutator.length", ValueType::real, "32", "1-D box length"},
        {"commutator.h", ValueType::text, "gaussian", "gaussian | zero"},
        {"commutator.h_width", ValueType::real, "1", "width of h = exp(-x^2/w^2)"},
        {"commutator.inner", ValueType::text, "b", "b (D^b R D^b) | a (D^b R D^a, no bound claimed)"},
        {"commutator.iters", ValueType::integer, "4000", "power iteration cap"},

        {"inequality.kind", ValueType::text, "kato-ponce", "kato-ponce | li-commutator | leibniz-d | leibniz-j | cutoff-commutator | calderon | localization"},
        {"inequality.s", ValueType::real, "1", "Sobolev order (beta for localization I, II)"},
        {"inequality.p", ValueType::real, "2", "Lebesgue exponent"},
        {"inequality.trials", ValueType::integer, "100", "random trials"},
        {"inequality.grids", ValueType::int_list, "256, 512", "1-D grid sizes"},
        {"inequality.length", ValueType::real, "32", "1-D box length"},
        {"inequality.l", ValueType::integer, "1", "outer derivatives (calderon)"},
        {"inequality.m", ValueType::integer, "0", "inner derivatives (calderon) or J^-m order (localization)"},
        {"inequality.part", ValueType::text, "I", "localization part I | II | III | IV"},
        {"inequality.r", ValueType::real, "-1", "part III order, -1 uses s"},
        {"inequality.delta", ValueType::real, "1", "support separation (localization)"},
        {"inequality.band", ValueType::real, "8", "random field band limit"},
        {"inequality.margin", ValueType::real, "0.25", "Sobolev index margin (cutoff-commutator)"},

        {"cutoff.eps", ValueType::real, "1", "epsilon of the reference family"},
        {"cutoff.b", ValueType::real, "5", "b of the reference family"},
        {"cutoff.families", ValueType::integer, "20", "extra random (eps, b) families"},
        {"cutoff.samples", ValueType::integer, "10000", "samples per family"},
        {"cutoff.tol", ValueType::real, "1e-10", "identity tolerance"},

        {"sweep.param", ValueType::text, "", "key to vary, e.g. solver.nx"},
        {"sweep.values", ValueType::text_list, "", "values taken by the key"},
        {"sweep.parallel", ValueType::integer, "1", "runs dispatched at once"},
    };
    return schema;
}

inline const ConfigKey* find_key(const std::string& path)
{
    for (const auto& k : config_schema())
        if (path == k.path)
            return &k;
    return nullptr;
}

/// @brief Raw "section.key" -> text map read from a flat sectioned file.
///
/// Format: `[section]` headers, `key = value` lines, `#` comments. Lists are
/// comma separated.
struct ConfigText {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
    std::vector<std::string> errors;  // syntax problems and unknown keys
};

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    if (trim(s).empty())
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

inline ConfigText read_config_text(const std::string& text)
{
    ConfigText ct;
    std::vector<std::string>& errors = ct.errors;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line = line.substr(0, pos);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string path = section.empty() ? key : section + "." + key;
        if (!find_key(path)) {
            errors.push_back(path + ": unknown key (line " + std::to_string(lineno) + ")");
            continue;
        }
        if (ct.values.count(path)) {
            errors.push_back(path + ": duplicate key (line " + std::to_string(lineno) + ")");
            continue;
        }
        ct.values[path] = trim(line.substr(eq + 1));
        ct.lines[path] = lineno;
    }
    return ct;
}

inline ConfigText read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError({"cannot read config file '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return read_config_text(ss.str());
}

/// Typed access with the schema default filled in; type errors are collected.
class TypedConfig {
public:
    explicit TypedConfig(ConfigText ct) : ct_(std::move(ct)) {}

    const std::vector<std::string>& errors() const { return errors_; }

    std::string raw(const std::string& path) const
    {
        auto it = ct_.values.find(path);
        if (it != ct_.values.end())
            return it->second;
        const ConfigKey* k = find_key(path);
        if (!k)
            throw std::logic_error("schema lacks key " + path);
        return k->fallback;
    }

    double real(const std::string& path)
    {
        const std::string s = raw(path);
        if (auto v = to_real(s))
            return *v;
        errors_.push_back(path + ": expected a real number, got '" + s + "'");
        return 0.0;
    }

    std::optional<double> opt_real(const std::string& path)
    {
        const std::string s = raw(path);
        if (s == "none" || s.empty())
            return std::nullopt;
        if (auto v = to_real(s))
            return v;
        errors_.push_back(path + ": expected a real number or none, got '" + s + "'");
        return std::nullopt;
    }

    long long integer(const std::string& path)
    {
        const std::string s = raw(path);
        if (auto v = to_int(s))
            return *v;
        errors_.push_back(path + ": expected an integer, got '" + s + "'");
        return 0;
    }

    bool boolean(const std::string& path)
    {
        const std::string s = raw(path);
        if (s == "true" || s == "yes" || s == "1")
            return true;
        if (s == "false" || s == "no" || s == "0")
            return false;
        errors_.push_back(path + ": expected true or false, got '" + s + "'");
        return false;
    }

    std::string text(const std::string& path) { return raw(path); }

    std::vector<double> real_list(const std::string& path)
    {
        std::vector<double> out;
        for (const auto& item : split_list(raw(path))) {
            if (auto v = to_real(item))
                out.push_back(*v);
            else
                errors_.push_back(path + ": expected a list of reals, got item '" + item + "'");
        }
        return out;
    }

    std::vector<long long> int_list(const std::string& path)
    {
        std::vector<long long> out;
        for (const auto& item : split_list(raw(path))) {
            if (auto v = to_int(item))
                out.push_back(*v);
            else
                errors_.push_back(path + ": expected a list of integers, got item '" + item + "'");
        }
        return out;
    }

    std::vector<std::string> text_list(const std::string& path) { return split_list(raw(path)); }

    /// Resolved values of every schema key, in schema order.
    nlohmann::json resolved() const
    {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& k : config_schema())
            j[k.path] = raw(k.path);
        return j;
    }

private:
    static std::optional<double> to_real(const std::string& s)
    {
        if (s == "inf" || s == "+inf")
            return INFINITY;
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used == s.size() && std::isfinite(v))
                return v;
        } catch (const std::exception&) {
        }
        return std::nullopt;
    }

    static std::optional<long long> to_int(const std::string& s)
    {
        try {
            std::size_t used = 0;
            long long v = std::stoll(s, &used);
            if (used == s.size())
                return v;
        } catch (const std::exception&) {
        }
        return std::nullopt;
    }

    ConfigText ct_;
    std::vector<std::string> errors_;
};

struct WindowConfig {
    double x0 = 0.0, eps = 1.0, b = 5.0, tau = 5.0;
    std::vector<double> v{0.0, 1.0};
};

struct DecayConfig {
    double p = INFINITY;
    int j = 0;
    double t_min = 1.0, t_max = 100.0;
    int count = 17;
    DecayMode mode = DecayMode::strichartz;
    double wrap_threshold = 1e-10;

    std::vector<double> times() const
    {
        std::vector<double> t(count);
        for (int k = 0; k < count; ++k)
            t[k] = t_min * std::pow(t_max / t_min, static_cast<double>(k) / (count - 1));
        return t;
    }
};

struct KatoConfig {
    double r = 1.0, R = 5.0;
    std::vector<std::string> tags;
};

struct CommutatorConfig {
    double a = 2.0, b = 0.0;
    int n = 0;
    std::vector<int> grids;
    double length = 32.0;
    std::string h = "gaussian";
    double h_width = 1.0;
    RemainderInner inner = RemainderInner::b;
    int iters = 4000;
};

struct InequalityConfig {
    std::string kind = "kato-ponce";
    InequalityParams params;
    int trials = 100;
    std::vector<int> grids;
    double length = 32.0;
};

struct CutoffConfig {
    double eps = 1.0, b = 5.0;
    int families = 20, samples = 10000;
    double tol = 1e-10;
};

struct SweepConfig {
    std::string param;
    std::vector<std::string> values;
    int parallel = 1;
};


inline double s_alpha(double alpha) { return (17.0 - 2.0 * alpha) / 12.0; }

inline const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> kinds = {"simulate", "propagation", "linear-decay", "kato",
                                                   "commutator-norms", "inequality", "cutoff-check"};
    return kinds;
}

/// @brief A fully validated run description.
struct ExperimentConfig {
    std::string kind = "simulate";
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    int threads = 1;
    SolverConfig solver;
    double s = 2.0;
    double s_alpha = 0.0;
    WindowConfig window;
    DatumRecipe datum;
    DecayConfig decay;
    KatoConfig kato;
    CommutatorConfig commutator;
    InequalityConfig inequality;
    CutoffConfig cutoff;
    SweepConfig sweep;
    nlohmann::json resolved;  // every key with its effective value

    bool time_dependent() const { return kind == "simulate" || kind == "propagation" || kind == "kato"; }
};

namespace detail {

inline std::vector<int> to_ints(const std::vector<long long>& v)
{
    return std::vector<int>(v.begin(), v.end());
}

} // namespace detail

/// Builds and validates a config. Every violation is collected and reported
/// together with its key path; nothing reaches a solver unless all pass.
inline ExperimentConfig build_experiment(const ConfigText& ct)
{
    TypedConfig tc(ct);
    std::vector<std::string> errors;
    auto fail = [&](const std::string& m) { errors.push_back(m); };
    ExperimentConfig c;

    c.kind = tc.text("run.kind");
    if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind) == experiment_kinds().end())
        fail("run.kind: unknown experiment kind '" + c.kind + "'");
    const long long seed = tc.integer("run.seed");
    if (seed < 0)
        fail("run.seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.output_dir = tc.text("run.output_dir");
    c.threads = static_cast<int>(tc.integer("run.threads"));
    if (c.threads < 1)
        fail("run.threads: must be at least 1");

    // Solver and grid.
    SolverConfig& sc = c.solver;
    sc.alpha = tc.real("solver.alpha");
    if (sc.alpha < 0.0 || sc.alpha > 1.0)
        fail("solver.alpha: must lie in [0, 1] (alpha in [0,1])");
    sc.dt = tc.real("solver.dt");
    sc.t_end = tc.real("solver.t_end");
    const long long nx = tc.integer("solver.nx"), ny = tc.integer("solver.ny");
    const double lx = tc.real("solver.lx"), ly = tc.real("solver.ly");
    try {
        sc.grid = make_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    } catch (const std::exception& e) {
        fail(std::string("solver.nx/ny/lx/ly: ") + e.what());
    }
    sc.dealias = tc.boolean("solver.dealias");
    sc.nonlinear = tc.boolean("solver.nonlinear");
    sc.observer_stride = static_cast<int>(tc.integer("solver.observer_stride"));
    sc.blowup_factor = tc.real("solver.blowup_factor");
    sc.wrap_threshold = tc.real("solver.wrap_threshold");
    sc.checkpoint_every = static_cast<int>(tc.integer("solver.checkpoint_every"));
    sc.sponge.strength = tc.real("solver.sponge_strength");
    sc.sponge.x_start = tc.opt_real("solver.sponge_x_start");
    sc.sponge.y_start = tc.opt_real("solver.sponge_y_start");
    sc.sponge.width = tc.real("solver.sponge_width");
    if (!(sc.dt > 0.0))
        fail("solver.dt: must be positive");
    if (!(sc.t_end > 0.0))
        fail("solver.t_end: must be positive");
    if (sc.observer_stride < 1)
        fail("solver.observer_stride: must be at least 1");
    if (sc.checkpoint_every < 0)
        fail("solver.checkpoint_every: must be nonnegative");
    if (!(sc.blowup_factor > 1.0))
        fail("solver.blowup_factor: must exceed 1");
    if (!(sc.wrap_threshold > 0.0))
        fail("solver.wrap_threshold: must be positive");
    if (sc.sponge.strength < 0.0)
        fail("solver.sponge_strength: must be nonnegative");
    if (!(sc.sponge.width > 0.0))
        fail("solver.sponge_width: must be positive");
    if (c.time_dependent() && sc.dt > 0.0 && sc.t_end > 0.0
        && sc.observer_stride * sc.dt > 0.01 * sc.t_end * (1.0 + 1e-12))
        fail("solver.observer_stride: stride * dt must not exceed 0.01 * t_end");

    // Regularity and window.
    c.s = tc.real("regularity.s");
    c.s_alpha = s_alpha(sc.alpha);
    c.window.x0 = tc.real("window.x0");
    c.window.eps = tc.real("window.eps");
    c.window.b = tc.real("window.b");
    c.window.v = tc.real_list("window.v");
    c.window.tau = tc.real("window.tau");
    for (double v : c.window.v)
        if (v < 0.0)
            fail("window.v: speeds must satisfy v >= 0");
    if (c.kind == "propagation") {
        if (!(c.s > c.s_alpha))
            fail("regularity.s: propagation needs s > s_alpha = (17 - 2 alpha)/12 = " + format_double(c.s_alpha)
                 + " (s > s_α)");
        if (!(c.window.eps > 0.0))
            fail("window.eps: must be positive");
        if (!(c.window.tau >= 5.0 * c.window.eps))
            fail("window.tau: the channel needs tau >= 5 eps (τ ≥ 5ε)");
        if (!(c.window.b >= 5.0 * c.window.eps))
            fail("window.b: the cutoff family needs b >= 5 eps");
        if (c.window.v.empty())
            fail("window.v: at least one speed is required");
    }

    // Datum.
    DatumRecipe& d = c.datum;
    d.kind = tc.text("datum.kind");
    d.amplitude = tc.real("datum.amplitude");
    d.wx = tc.real("datum.wx");
    d.wy = tc.real("datum.wy");
    d.xc = tc.real("datum.xc");
    d.yc = tc.real("datum.yc");
    const long long dseed = tc.integer("datum.seed");
    d.seed = dseed < 0 ? c.seed : static_cast<std::uint64_t>(dseed);
    d.band = tc.real("datum.band");
    d.x1 = tc.real("datum.x1");
    d.gamma = tc.real("datum.gamma");
    d.w = tc.real("datum.w");
    d.bump_amplitude = tc.real("datum.bump_amplitude");
    d.bump_x = tc.real("datum.bump_x");
    d.bump_w = tc.real("datum.bump_w");
    d.filter = tc.boolean("datum.filter");
    d.packet_x = tc.real("datum.packet_x");
    d.packet_sx = tc.real("datum.packet_sx");
    d.packet_sy = tc.real("datum.packet_sy");
    d.packet_xi = tc.real("datum.packet_xi");
    d.alpha = c.solver.alpha;
    static const std::vector<std::string> datum_kinds = {"gaussian", "band_limited_random", "one_sided",
                                                         "spectral_packet", "rough_packet", "fold_packet"};
    if (std::find(datum_kinds.begin(), datum_kinds.end(), d.kind) == datum_kinds.end())
        fail("datum.kind: unknown datum '" + d.kind + "'");
    if (d.kind == "gaussian" && (!(d.wx > 0.0) || !(d.wy > 0.0)))
        fail("datum.wx/wy: gaussian widths must be positive");
    if (d.kind == "band_limited_random" && !(d.band > 0.0))
        fail("datum.band: must be positive");
    if (d.kind == "one_sided") {
        if (!(d.gamma > 0.0))
            fail("datum.gamma: one_sided needs gamma > 0");
        if (!(d.w > 0.0) || !(d.wy > 0.0) || !(d.bump_w > 0.0))
            fail("datum.w/wy/bump_w: widths must be positive");
        if (!(d.x1 < c.window.x0))
            fail("datum.x1: the rough point must lie strictly left of window.x0");
    }
    if ((d.kind == "spectral_packet" || d.kind == "fold_packet") && (!(d.packet_sx > 0.0) || !(d.packet_sy > 0.0)))
        fail("datum.packet_sx/packet_sy: must be positive");

    // Linear decay.
    DecayConfig& dc = c.decay;
    dc.p = tc.real("decay.p");
    dc.j = static_cast<int>(tc.integer("decay.j"));
    dc.t_min = tc.real("decay.t_min");
    dc.t_max = tc.real("decay.t_max");
    dc.count = static_cast<int>(tc.integer("decay.count"));
    const std::string mode = tc.text("decay.mode");
    dc.wrap_threshold = tc.real("decay.wrap_threshold");
    if (mode == "strichartz")
        dc.mode = DecayMode::strichartz;
    else if (mode == "rough")
        dc.mode = DecayMode::rough;
    else
        fail("decay.mode: expected strichartz or rough, got '" + mode + "'");
    if (!(dc.p >= 2.0))
        fail("decay.p: must satisfy p >= 2");
    if (!(dc.t_min > 0.0))
        fail("decay.t_min: must be positive");
    if (!(dc.t_max >= 10.0 * dc.t_min))
        fail("decay.t_max: fit times must span at least one decade");
    if (dc.count < 2)
        fail("decay.count: need at least two times");

    // Kato smoothing.
    c.kato.r = tc.real("kato.r");
    c.kato.R = tc.real("kato.R");
    c.kato.tags = tc.text_list("kato.tags");
    if (c.kato.r < 0.0)
        fail("kato.r: must be nonnegative");
    if (!(c.kato.R > 0.0))
        fail("kato.R: must be positive");
    for (const auto& t : c.kato.tags) {
        try {
            parse_kato_tag(t);
        } catch (const std::exception& e) {
            fail(std::string("kato.tags: ") + e.what());
        }
    }

    // Commutator norms.
    CommutatorConfig& cc = c.commutator;
    cc.a = tc.real("commutator.a");
    cc.b = tc.real("commutator.b");
    cc.n = static_cast<int>(tc.integer("commutator.n"));
    cc.grids = detail::to_ints(tc.int_list("commutator.grids"));
    cc.length = tc.real("commutator.length");
    cc.h = tc.text("commutator.h");
    cc.h_width = tc.real("commutator.h_width");
    const std::string inner = tc.text("commutator.inner");
    cc.iters = static_cast<int>(tc.integer("commutator.iters"));
    if (inner == "b")
        cc.inner = RemainderInner::b;
    else if (inner == "a")
        cc.inner = RemainderInner::a;
    else
        fail("commutator.inner: expected b or a, got '" + inner + "'");
    if (c.kind == "commutator-norms") {
        if (cc.a < 1.0)
            fail("commutator.a: must satisfy a >= 1");
        if (cc.n < 0)
            fail("commutator.n: must be nonnegative");
        if (cc.b < 0.0)
            fail("commutator.b: must be nonnegative");
        if (0.5 * (cc.a - 1.0) - cc.n < 0.0)
            fail("commutator.n: mu - n must be nonnegative");
        const double sum = cc.a + 2.0 * cc.b;
        if (sum < 2.0 * cc.n + 1.0 || sum > 2.0 * cc.n + 3.0)
            fail("commutator.b: need 2n+1 <= a+2b <= 2n+3");
        if (cc.grids.empty())
            fail("commutator.grids: at least one grid size is required");
        for (int n : cc.grids)
            if (n < 8 || n % 2 != 0 || n > max_dense_size)
                fail("commutator.grids: sizes must be even, at least 8 and at most 4096");
        if (cc.h != "gaussian" && cc.h != "zero")
            fail("commutator.h: expected gaussian or zero, got '" + cc.h + "'");
        if (!(cc.h_width > 0.0))
            fail("commutator.h_width: must be positive");
        if (!(cc.length > 0.0))
            fail("commutator.length: must be positive");
        if (cc.iters < 20)
            fail("commutator.iters: must be at least 20");
    }

    // Inequalities.
    InequalityConfig& ic = c.inequality;
    ic.kind = tc.text("inequality.kind");
    ic.params.s = tc.real("inequality.s");
    ic.params.p = tc.real("inequality.p");
    ic.trials = static_cast<int>(tc.integer("inequality.trials"));
    ic.grids = detail::to_ints(tc.int_list("inequality.grids"));
    ic.length = tc.real("inequality.length");
    ic.params.l = static_cast<int>(tc.integer("inequality.l"));
    ic.params.m = static_cast<int>(tc.integer("inequality.m"));
    const std::string part = tc.text("inequality.part");
    ic.params.r = tc.real("inequality.r");
    ic.params.delta = tc.real("inequality.delta");
    ic.params.band = tc.real("inequality.band");
    ic.params.sobolev_margin = tc.real("inequality.margin");
    if (c.kind == "inequality") {
        try {
            parse_inequality_kind(ic.kind);
        } catch (const std::exception& e) {
            fail(std::string("inequality.kind: ") + e.what());
        }
        try {
            ic.params.part = parse_localization_part(part);
        } catch (const std::exception& e) {
            fail(std::string("inequality.part: ") + e.what());
        }
        if (ic.trials < 10)
            fail("inequality.trials: must be at least 10");
        if (!(ic.params.p >= 1.0))
            fail("inequality.p: must be at least 1");
        if (ic.grids.empty())
            fail("inequality.grids: at least one grid size is required");
        for (int n : ic.grids)
            if (n < 8 || n % 2 != 0)
                fail("inequality.grids: sizes must be even and at least 8");
        if (!(ic.params.delta > 0.0))
            fail("inequality.delta: must be positive");
        if (!(ic.params.band > 0.0))
            fail("inequality.band: must be positive");
        if (!(ic.length > 0.0))
            fail("inequality.length: must be positive");
    }

    // Cutoff check.
    c.cutoff.eps = tc.real("cutoff.eps");
    c.cutoff.b = tc.real("cutoff.b");
    c.cutoff.families = static_cast<int>(tc.integer("cutoff.families"));
    c.cutoff.samples = static_cast<int>(tc.integer("cutoff.samples"));
    c.cutoff.tol = tc.real("cutoff.tol");
    if (c.kind == "cutoff-check") {
        if (!(c.cutoff.eps > 0.0))
            fail("cutoff.eps: must be positive");
        if (!(c.cutoff.b >= 5.0 * c.cutoff.eps))
            fail("cutoff.b: must satisfy b >= 5 eps");
        if (c.cutoff.families < 0)
            fail("cutoff.families: must be nonnegative");
        if (c.cutoff.samples < 2)
            fail("cutoff.samples: need at least two samples");
    }

    // Sweep.
    c.sweep.param = tc.text("sweep.param");
    c.sweep.values = tc.text_list("sweep.values");
    c.sweep.parallel = static_cast<int>(tc.integer("sweep.parallel"));
    if (!c.sweep.param.empty()
        && (!find_key(c.sweep.param) || c.sweep.param.rfind("sweep.", 0) == 0 || c.sweep.param == "run.threads"
            || c.sweep.param == "run.output_dir"))
        fail("sweep.param: '" + c.sweep.param + "' is not a sweepable key");
    if (c.sweep.parallel < 1)
        fail("sweep.parallel: must be at least 1");

    std::vector<std::string> all = ct.errors;
    all.insert(all.end(), tc.errors().begin(), tc.errors().end());
    all.insert(all.end(), errors.begin(), errors.end());
    errors = std::move(all);
    if (!errors.empty())
        throw ValidationError(errors);
    c.resolved = tc.resolved();
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) { return build_experiment(read_config_text(text)); }

/// Renders resolved values back to the config format; parsing the result
/// reproduces the same experiment.
inline std::string render_config(const nlohmann::json& resolved)
{
    std::string out, section;
    for (const auto& k : config_schema()) {
        const std::string path = k.path;
        const auto dot = path.find('.');
        const std::string sec = path.substr(0, dot), key = path.substr(dot + 1);
        if (sec != section) {
            out += (out.empty() ? "" : "\n") + std::string("[") + sec + "]\n";
            section = sec;
        }
        out += key + " = " + resolved.at(path).get<std::string>() + "\n";
    }
    return out;
}

} // namespace bozk

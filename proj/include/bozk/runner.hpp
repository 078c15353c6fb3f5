#pragma once

#include "bozk/commutator_lab.hpp"
#include "bozk/config.hpp"
#include "bozk/cutoffs.hpp"
#include "bozk/datum.hpp"
#include "bozk/diagnostics.hpp"
#include "bozk/evolve.hpp"
#include "bozk/fft.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef BOZK_VERSION
#define BOZK_VERSION "0.0.0"
#endif

namespace bozk {

namespace fs = std::filesystem;

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_validation = 2, exit_blowup = 3, exit_wrap = 4 };

struct RunOptions {
    std::string resume_path;            // checkpoint to resume a simulate run from
    std::vector<std::string> command;   // invoking command line, echoed in the manifest
};

struct RunOutcome {
    int exit_code = exit_ok;
    nlohmann::json manifest;
};

/// @brief Plain CSV table for outputs that are not time series.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    std::string to_csv() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t k = 0; k < r.size(); ++k)
                out += (k ? "," : "") + r[k];
            out += "\n";
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return out;
    }

    void write(const std::string& path) const
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path);
        out << to_csv();
    }
};

/// Column label fragment for a real parameter, e.g. 0.5 -> "0.5".
inline std::string label_number(double v) { return format_double(v); }

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

inline nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    return nlohmann::json::parse(in);
}

inline std::string utc_now()
{
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// ---------------------------------------------------------------------------
// Plot scripts. They only read the CSV files written next to them.

inline std::string plot_script(const std::string& kind)
{
    std::string s = R"(#!/usr/bin/env python3
# Renders the standard figures of this run from its CSV output.
# Usage: python3 plot.py [other_run_dir ...]
import json, os, sys
import pandas as pd
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
kind = ")" + kind + R"("

def series(d):
    return pd.read_csv(os.path.join(d, "series.csv"), comment="#")

if kind in ("simulate", "propagation", "kato"):
    df = series(here)
    groups = {}
    for c in df.columns[1:]:
        groups.setdefault(c.split("_v")[0] if "_v" in c else c, []).append(c)
    for name, cols in groups.items():
        fig, ax = plt.subplots()
        for c in cols:
            ax.plot(df["t"], df[c], label=c)
        ax.set_xlabel("t")
        ax.set_title(name)
        ax.legend(fontsize=7)
        fig.savefig(os.path.join(here, "fig_" + name + ".png"), dpi=120)
        plt.close(fig)
    runs = [here] + sys.argv[1:]
    if kind == "propagation" and len(runs) > 1:
        rows = []
        for d in runs:
            m = json.load(open(os.path.join(d, "manifest.json")))
            for key, val in m["results"]["channel_integrals"].items():
                rows.append((m["config"]["solver.nx"], key, val))
        tab = pd.DataFrame(rows, columns=["nx", "quantity", "value"])
        fig, ax = plt.subplots()
        for q, sub in tab.groupby("quantity"):
            sub = sub.sort_values("nx", key=lambda s: s.astype(int))
            ax.plot(sub["nx"].astype(int), sub["value"], "o-", label=q)
        ax.set_xscale("log", base=2)
        ax.set_xlabel("nx")
        ax.set_title("time-integrated channel smoothing vs resolution")
        ax.legend(fontsize=7)
        fig.savefig(os.path.join(here, "fig_channel_vs_resolution.png"), dpi=120)
        plt.close(fig)
elif kind == "linear-decay":
    df = series(here)
    fig, ax = plt.subplots()
    ax.loglog(df["t"], df["norm"], "o-", label="norm")
    m = json.load(open(os.path.join(here, "manifest.json")))["results"]
    ax.loglog(df["t"], m["prefactor"] * df["t"] ** m["target"], "--", label="reference slope")
    ax.set_xlabel("t")
    ax.legend()
    fig.savefig(os.path.join(here, "fig_decay.png"), dpi=120)
elif kind == "inequality":
    df = pd.read_csv(os.path.join(here, "ratios.csv"))
    fig, ax = plt.subplots()
    for n, sub in df.groupby("n1d"):
        ax.plot(sub["trial"], sub["ratio"], ".", label="n1d=%d" % n)
    ax.set_xlabel("trial")
    ax.set_ylabel("lhs / rhs")
    ax.legend()
    fig.savefig(os.path.join(here, "fig_ratios.png"), dpi=120)
elif kind == "commutator-norms":
    df = pd.read_csv(os.path.join(here, "norms.csv"))
    fig, ax = plt.subplots()
    ax.semilogx(df["n1d"], df["c_emp"], "o-", base=2)
    ax.set_xlabel("n1d")
    ax.set_ylabel("C_emp")
    fig.savefig(os.path.join(here, "fig_c_emp.png"), dpi=120)
)";
    return s;
}

// ---------------------------------------------------------------------------
// Run bookkeeping shared by all kinds.

class RunContext {
public:
    RunContext(const ExperimentConfig& c, const RunOptions& opt) : cfg_(c), opt_(opt), start_(clock::now())
    {
        fs::create_directories(c.output_dir);
        manifest_["kind"] = c.kind;
        manifest_["code_version"] = BOZK_VERSION;
        manifest_["config"] = c.resolved;
        manifest_["config_text"] = render_config(c.resolved);
        manifest_["seeds"] = {{"run", c.seed}, {"datum", c.datum.seed}};
        manifest_["threads"] = c.threads;
        manifest_["started_utc"] = utc_now();
        manifest_["command"] = opt.command;
        manifest_["rerun"] = "bozk " + c.kind + " --config config.ini --out <dir>";
        manifest_["outputs"] = nlohmann::json::array();
        manifest_["results"] = nlohmann::json::object();
        write_text(path("config.ini"), render_config(c.resolved));
        add_output("config.ini");
    }

    std::string path(const std::string& name) const { return (fs::path(cfg_.output_dir) / name).string(); }
    void add_output(const std::string& name) { manifest_["outputs"].push_back(name); }
    nlohmann::json& results() { return manifest_["results"]; }
    nlohmann::json& manifest() { return manifest_; }

    void write_series(const DiagnosticSeries& s)
    {
        s.write_csv(path("series.csv"));
        s.write_json(path("series.json"));
        add_output("series.csv");
        add_output("series.json");
    }

    RunOutcome finish(int code)
    {
        write_text(path("plot.py"), plot_script(cfg_.kind));
        add_output("plot.py");
        manifest_["wall_seconds"] = std::chrono::duration<double>(clock::now() - start_).count();
        manifest_["exit_code"] = code;
        write_text(path("manifest.json"), manifest_.dump(2) + "\n");
        return {code, manifest_};
    }

private:
    using clock = std::chrono::steady_clock;
    const ExperimentConfig& cfg_;
    const RunOptions& opt_;
    clock::time_point start_;
    nlohmann::json manifest_;
};

inline void record_wrap(RunContext& ctx, double max_wrap, double threshold)
{
    ctx.manifest()["wrap_contamination"] = {{"max", max_wrap}, {"threshold", threshold}};
}

/// Time integrals of every column whose label starts with the prefix.
inline nlohmann::json integrate_columns(const DiagnosticSeries& s, const std::string& prefix)
{
    nlohmann::json out = nlohmann::json::object();
    const auto t = s.times();
    for (const auto& lab : s.labels())
        if (lab.rfind(prefix, 0) == 0)
            out[lab] = trapezoid(t, s.column(lab));
    return out;
}

// ---------------------------------------------------------------------------
// Time-dependent kinds.

/// Runs the solver with the given observers and handles checkpoints, resume,
/// blow-up and wrap contamination in the same way for every kind.
inline int run_solver(const ExperimentConfig& c, const RunOptions& opt, RunContext& ctx,
                      const std::vector<Observer>& observers, DiagnosticSeries& series_out)
{
    SimState start{make_datum(c.datum, c.solver.grid), 0.0, 0};
    if (!opt.resume_path.empty()) {
        Snapshot snap = load_snapshot(opt.resume_path);
        nlohmann::json side = read_json(opt.resume_path + ".json");
        if (!(snap.field.grid() == c.solver.grid))
            throw ValidationError({"resume: checkpoint grid does not match solver grid"});
        start = SimState{snap.field, snap.timestamp, side.at("extra").at("step_count").get<long>()};
        ctx.manifest()["resumed_from"] = {{"path", opt.resume_path}, {"t", snap.timestamp}, {"step", start.step_count}};
    }
    const std::string ckdir = ctx.path("checkpoints");
    std::function<void(const SimState&)> checkpoint;
    if (c.solver.checkpoint_every > 0) {
        fs::create_directories(ckdir);
        checkpoint = [&](const SimState& s) {
            char name[64];
            std::snprintf(name, sizeof name, "ckpt_%08ld.bin", s.step_count);
            save_snapshot((fs::path(ckdir) / name).string(), s.field, s.t,
                          {{"step_count", s.step_count}, {"config", c.resolved}});
        };
        ctx.add_output("checkpoints/");
    }
    try {
        SimResult res = simulate(start, c.solver, observers, checkpoint);
        save_snapshot(ctx.path("final.bin"), res.final_state.field, res.final_state.t,
                      {{"step_count", res.final_state.step_count}, {"config", c.resolved}});
        ctx.add_output("final.bin");
        ctx.write_series(res.series);
        series_out = res.series;
        record_wrap(ctx, res.max_wrap, c.solver.wrap_threshold);
        return res.wrap_exceeded ? exit_wrap : exit_ok;
    } catch (const BlowUpError& e) {
        ctx.write_series(e.partial());
        series_out = e.partial();
        ctx.manifest()["blowup"] = {{"message", e.what()}, {"t", e.time()}, {"step", e.step()}};
        return exit_blowup;
    }
}

inline RunOutcome run_simulate(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    ctx.manifest()["stability_number"] = c.solver.stability_number();
    DiagnosticSeries s;
    int code = run_solver(c, opt, ctx, {conserved_observer(c.solver.alpha)}, s);
    if (!s.records.empty()) {
        auto drift = [&](const std::string& lab) {
            auto col = s.column(lab);
            double worst = 0.0;
            for (double v : col)
                worst = std::max(worst, std::abs(v - col.front()));
            return col.front() != 0.0 ? worst / std::abs(col.front()) : worst;
        };
        ctx.results()["mass_drift"] = drift("M");
        ctx.results()["energy_drift"] = drift("E");
    }
    return ctx.finish(code);
}

/// Half-space norms of the datum at nx/2 and nx. Documents the one-sided
/// Sobolev asymmetry the recipe is meant to have.
inline nlohmann::json datum_asymmetry(const ExperimentConfig& c)
{
    nlohmann::json out = nlohmann::json::array();
    const Grid& g = c.solver.grid;
    for (int k : {2, 1}) {
        if (g.nx / k < 8 || g.ny / k < 8 || (g.nx / k) % 2 || (g.ny / k) % 2)
            continue;
        Grid gk = make_grid(g.nx / k, g.ny / k, g.lx, g.ly);
        Field u = make_datum(c.datum, gk);
        const double full = half_space_norm(u, c.s, -INFINITY);
        const double right = half_space_norm(u, c.s, c.window.x0);
        out.push_back({{"nx", gk.nx}, {"full", full}, {"right", right}, {"left", full - right}});
    }
    return out;
}

inline RunOutcome run_propagation(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    ctx.manifest()["stability_number"] = c.solver.stability_number();
    ctx.manifest()["s_alpha"] = c.s_alpha;
    ctx.manifest()["datum_asymmetry"] = datum_asymmetry(c);
    const WindowConfig w = c.window;
    const CutoffFamily window_family = make_family(w.eps, w.b);
    const CutoffFamily channel_family = make_family(w.eps, w.tau);
    std::vector<double> rgrid;
    for (int k = 1; k <= 4; ++k)
        rgrid.push_back(c.s * k / 4.0);
    ctx.manifest()["r_grid"] = rgrid;
    const double alpha = c.solver.alpha, s = c.s;

    std::vector<Observer> obs{conserved_observer(alpha)};
    obs.push_back([=](const Field& f, double t, DiagnosticRecord& rec) {
        for (double v : w.v) {
            const std::string vs = "_v" + label_number(v);
            for (double r : rgrid)
                rec.set("half_space_r" + label_number(r) + vs, half_space_norm(f, r, w.x0 + w.eps - v * t));
            rec.set("windowed" + vs, windowed_norm(f, s, window_family, v, t, w.x0));
            ChannelIncrement ch = channel_smoothing_increment(f, s, alpha, channel_family, v, t, w.x0);
            rec.set("channel_dx" + vs, ch.dx_part);
            rec.set("channel_dy" + vs, ch.dy_part);
        }
    });
    DiagnosticSeries series;
    int code = run_solver(c, opt, ctx, obs, series);
    ctx.results()["channel_integrals"] = integrate_columns(series, "channel_");
    nlohmann::json sup = nlohmann::json::object();
    for (const auto& lab : series.labels())
        if (lab.rfind("half_space_", 0) == 0) {
            auto col = series.column(lab);
            sup[lab] = *std::max_element(col.begin(), col.end());
        }
    ctx.results()["half_space_sup"] = sup;
    return ctx.finish(code);
}

inline RunOutcome run_kato(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    ctx.manifest()["stability_number"] = c.solver.stability_number();
    std::vector<std::pair<std::string, KatoTag>> tags;
    for (const auto& t : c.kato.tags) {
        std::string lab = "kato_" + t;
        std::replace(lab.begin(), lab.end(), '/', '_');
        tags.emplace_back(lab, parse_kato_tag(t));
    }
    const double r = c.kato.r, R = c.kato.R, alpha = c.solver.alpha;
    std::vector<Observer> obs{conserved_observer(alpha)};
    obs.push_back([=](const Field& f, double, DiagnosticRecord& rec) {
        for (const auto& [lab, tag] : tags)
            rec.set(lab, kato_quantities(f, r, alpha, R, tag));
    });
    DiagnosticSeries series;
    int code = run_solver(c, opt, ctx, obs, series);
    ctx.results()["kato_integrals"] = integrate_columns(series, "kato_");
    return ctx.finish(code);
}

// ---------------------------------------------------------------------------
// Linear decay.

inline RunOutcome run_linear_decay(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    Field datum = make_datum(c.datum, c.solver.grid);
    DecayFit fit = decay_fit(datum, c.solver.alpha, c.decay.j, c.decay.p, c.decay.times(), c.decay.mode);
    DiagnosticSeries s;
    s.meta["grid"] = c.solver.grid;
    s.meta["alpha"] = c.solver.alpha;
    s.meta["p"] = finite_or_null(c.decay.p);
    s.meta["j"] = c.decay.j;
    for (std::size_t k = 0; k < fit.times.size(); ++k) {
        DiagnosticRecord rec;
        rec.t = fit.times[k];
        rec.set("norm", fit.norms[k]);
        rec.set("wrap", fit.wrap[k]);
        s.append(std::move(rec));
    }
    ctx.write_series(s);
    ctx.results() = {{"slope", fit.slope},
                     {"prefactor", fit.prefactor},
                     {"target", fit.target},
                     {"slope_error", std::abs(fit.slope - fit.target)},
                     {"upper_decade_slope", finite_or_null(fit.upper_decade_slope)},
                     {"mode", c.decay.mode == DecayMode::rough ? "rough" : "strichartz"}};
    record_wrap(ctx, fit.max_wrap, c.decay.wrap_threshold);
    return ctx.finish(fit.max_wrap > c.decay.wrap_threshold ? exit_wrap : exit_ok);
}

// ---------------------------------------------------------------------------
// Commutator lab kinds.

inline Vec commutator_h(const CommutatorConfig& cc, const Grid1D& g)
{
    if (cc.h == "zero")
        return Vec(g.n, 0.0);
    return sample_1d(g, [&](double x) { return std::exp(-x * x / (cc.h_width * cc.h_width)); });
}

inline RunOutcome run_commutator_norms(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    const CommutatorConfig& cc = c.commutator;
    Table tab{{"n1d", "c_emp", "op_norm", "l1_norm", "tail_fraction", "converged", "degenerate"}, {}};
    nlohmann::json per = nlohmann::json::array();
    double cmin = INFINITY, cmax = 0.0;
    bool tail_ok = true, converged = true, degenerate = false;
    for (int n : cc.grids) {
        Grid1D g = make_grid1d(n, cc.length);
        RemainderBound rb = verify_remainder_bound(cc.a, cc.b, cc.n, g, commutator_h(cc, g), cc.inner, cc.iters);
        tab.add({std::to_string(n), format_double(rb.c_emp), format_double(rb.op_norm), format_double(rb.l1_norm),
                 format_double(rb.tail_fraction), rb.converged ? "1" : "0", rb.degenerate ? "1" : "0"});
        per.push_back({{"n1d", n}, {"c_emp", finite_or_null(rb.c_emp)}, {"op_norm", rb.op_norm},
                       {"l1_norm", rb.l1_norm}, {"tail_fraction", rb.tail_fraction}, {"converged", rb.converged},
                       {"degenerate", rb.degenerate}});
        if (rb.degenerate) {
            degenerate = true;
        } else {
            cmin = std::min(cmin, rb.c_emp);
            cmax = std::max(cmax, rb.c_emp);
        }
        tail_ok = tail_ok && rb.tail_fraction < 1e-10;
        converged = converged && rb.converged;
    }
    tab.write(ctx.path("norms.csv"));
    ctx.add_output("norms.csv");
    ctx.results() = {{"per_grid", per},
                     {"spread", degenerate ? nlohmann::json(nullptr) : finite_or_null(cmax / cmin)},
                     {"tail_ok", tail_ok},
                     {"converged", converged},
                     {"degenerate", degenerate},
                     {"inner", cc.inner == RemainderInner::b ? "b" : "a"}};
    write_text(ctx.path("summary.json"), ctx.results().dump(2) + "\n");
    ctx.add_output("summary.json");
    return ctx.finish(exit_ok);
}

inline RunOutcome run_inequality(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    const InequalityConfig& ic = c.inequality;
    const InequalityKind kind = parse_inequality_kind(ic.kind);
    Table tab{{"n1d", "trial", "ratio"}, {}};
    nlohmann::json per = nlohmann::json::array();
    double lo = INFINITY, hi = 0.0;
    for (int n : ic.grids) {
        Grid1D g = make_grid1d(n, ic.length);
        InequalityResult r = inequality_ratio(kind, ic.params, ic.trials, c.seed, g);
        for (std::size_t k = 0; k < r.ratios.size(); ++k)
            tab.add({std::to_string(n), std::to_string(k), format_double(r.ratios[k])});
        per.push_back({{"n1d", n}, {"max_ratio", r.max_ratio}, {"skipped", r.skipped}});
        lo = std::min(lo, r.max_ratio);
        hi = std::max(hi, r.max_ratio);
    }
    tab.write(ctx.path("ratios.csv"));
    ctx.add_output("ratios.csv");
    ctx.results() = {{"kind", ic.kind}, {"per_grid", per}, {"spread", lo > 0.0 ? finite_or_null(hi / lo) : nullptr}};
    write_text(ctx.path("summary.json"), ctx.results().dump(2) + "\n");
    ctx.add_output("summary.json");
    return ctx.finish(exit_ok);
}

/// Reference family plus `families` random (eps, b) pairs drawn from the seed.
inline std::vector<std::pair<double, double>> cutoff_parameters(const CutoffConfig& cc, std::uint64_t seed)
{
    std::vector<std::pair<double, double>> out{{cc.eps, cc.b}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < cc.families; ++k) {
        const double eps = 0.05 * std::pow(40.0, u(rng));
        out.emplace_back(eps, eps * (5.0 + 20.0 * u(rng)));
    }
    return out;
}

inline RunOutcome run_cutoff_check(const ExperimentConfig& c, const RunOptions& opt)
{
    RunContext ctx(c, opt);
    Table tab{{"family", "eps", "b", "sharpness", "property", "passed", "residual"}, {}};
    bool all = true;
    int idx = 0;
    for (auto [eps, b] : cutoff_parameters(c.cutoff, c.seed)) {
        std::string sharp = "none";
        FamilyValidation v;
        try {
            CutoffFamily fam = make_family(eps, b);
            sharp = format_double(fam.sharpness());
            v = validate_family(fam, c.cutoff.samples, c.cutoff.tol);
        } catch (const std::runtime_error&) {
            v = validate_family(CutoffFamily(eps, b, 64.0), c.cutoff.samples, c.cutoff.tol);
        }
        for (const auto& chk : v.checks)
            tab.add({std::to_string(idx), format_double(eps), format_double(b), sharp, "\"" + chk.name + "\"",
                     chk.passed ? "1" : "0", format_double(chk.residual)});
        all = all && v.all_passed();
        ++idx;
    }
    tab.write(ctx.path("properties.csv"));
    ctx.add_output("properties.csv");
    ctx.results() = {{"families", idx}, {"all_passed", all}};
    return ctx.finish(all ? exit_ok : exit_validation);
}

// ---------------------------------------------------------------------------

inline RunOutcome run_experiment(const ExperimentConfig& c, const RunOptions& opt = {})
{
    set_fft_threads(c.threads);
    if (!opt.resume_path.empty() && c.kind != "simulate")
        throw ValidationError({"resume: only simulate runs can be resumed"});
    if (c.kind == "simulate")
        return run_simulate(c, opt);
    if (c.kind == "propagation")
        return run_propagation(c, opt);
    if (c.kind == "kato")
        return run_kato(c, opt);
    if (c.kind == "linear-decay")
        return run_linear_decay(c, opt);
    if (c.kind == "commutator-norms")
        return run_commutator_norms(c, opt);
    if (c.kind == "inequality")
        return run_inequality(c, opt);
    if (c.kind == "cutoff-check")
        return run_cutoff_check(c, opt);
    throw ValidationError({"run.kind: unknown experiment kind '" + c.kind + "'"});
}

/// Runs the base config once per sweep value, each in its own subdirectory of
/// the base output directory. Returns the worst exit code.
inline int run_sweep(const ConfigText& base, const std::vector<std::string>& command = {})
{
    ExperimentConfig head = build_experiment(base);
    if (head.sweep.param.empty() || head.sweep.values.empty())
        throw ValidationError({"sweep.param and sweep.values are required for a sweep"});
    std::vector<ExperimentConfig> runs;
    std::vector<std::string> errors;
    for (std::size_t k = 0; k < head.sweep.values.size(); ++k) {
        ConfigText ct = base;
        std::string value = head.sweep.values[k];
        ct.values[head.sweep.param] = value;
        std::string tag = value;
        for (char& ch : tag)
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-')
                ch = '_';
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu_", k);
        ct.values["run.output_dir"] = (fs::path(head.output_dir) / (name + tag)).string();
        try {
            runs.push_back(build_experiment(ct));
        } catch (const ValidationError& e) {
            for (const auto& m : e.errors())
                errors.push_back(head.sweep.param + "=" + value + ": " + m);
        }
    }
    if (!errors.empty())
        throw ValidationError(errors);
    set_fft_threads(head.threads);
    int worst = exit_ok;
    nlohmann::json index = nlohmann::json::array();
    const std::size_t batch = static_cast<std::size_t>(head.sweep.parallel);
    for (std::size_t k = 0; k < runs.size(); k += batch) {
        std::vector<std::future<int>> jobs;
        for (std::size_t q = k; q < std::min(runs.size(), k + batch); ++q)
            jobs.push_back(std::async(std::launch::async, [&, q] {
                RunOptions o;
                o.command = command;
                return run_experiment(runs[q], o).exit_code;
            }));
        for (std::size_t q = 0; q < jobs.size(); ++q) {
            int code = jobs[q].get();
            index.push_back({{"value", head.sweep.values[k + q]}, {"dir", runs[k + q].output_dir}, {"exit_code", code}});
            worst = std::max(worst, code);
        }
    }
    fs::create_directories(head.output_dir);
    write_text((fs::path(head.output_dir) / "sweep.json").string(),
               nlohmann::json{{"param", head.sweep.param}, {"runs", index}}.dump(2) + "\n");
    return worst;
}

} // namespace bozk

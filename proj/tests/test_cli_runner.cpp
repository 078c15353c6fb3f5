#include "bozk/config.hpp"
#include "bozk/runner.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bozk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("bozk_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p);
    out << text;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(BOZK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> errors_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.errors();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle)
{
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos)
            return true;
    return false;
}

const std::string small_sim = R"(
[run]
kind = simulate
[solver]
nx = 64
ny = 64
lx = 40
ly = 40
dt = 0.01
t_end = 1
observer_stride = 1
[datum]
kind = gaussian
wx = 2
wy = 2
)";

} // namespace

TEST(Config, DefaultsAndOverrides)
{
    ExperimentConfig c = parse_config("[run]\nkind = simulate\n[solver]\nnx = 64 # trailing comment\n");
    EXPECT_EQ(c.solver.grid.nx, 64);
    EXPECT_EQ(c.solver.grid.ny, 128);
    EXPECT_EQ(c.solver.alpha, 0.5);
    EXPECT_EQ(c.solver.wrap_threshold, 1e-6);
    EXPECT_EQ(c.datum.alpha, 0.5);
}

TEST(Config, SyntaxAndKeyErrors)
{
    EXPECT_TRUE(any_contains(errors_of("[solver\nnx = 4\n"), "malformed section"));
    EXPECT_TRUE(any_contains(errors_of("[solver]\nnx 64\n"), "expected key = value"));
    EXPECT_TRUE(any_contains(errors_of("[solver]\nfrobnicate = 1\n"), "solver.frobnicate: unknown key"));
    EXPECT_TRUE(any_contains(errors_of("[solver]\nnx = 64\nnx = 32\n"), "duplicate key"));
    EXPECT_TRUE(any_contains(errors_of("[solver]\nnx = many\n"), "solver.nx"));
}

TEST(Config, CollectsEveryViolation)
{
    auto e = errors_of("[solver]\nalpha = 1.5\ndt = -1\n[run]\nthreads = 0\n");
    EXPECT_GE(e.size(), 3u);
    EXPECT_TRUE(any_contains(e, "solver.alpha"));
    EXPECT_TRUE(any_contains(e, "solver.dt"));
    EXPECT_TRUE(any_contains(e, "run.threads"));
}

TEST(Config, PropagationHypotheses)
{
    const std::string base = "[run]\nkind = propagation\n[solver]\nt_end = 1\nobserver_stride = 1\n";
    auto e = errors_of(base + "[window]\neps = 1\ntau = 4\n");
    EXPECT_TRUE(any_contains(e, "τ ≥ 5ε"));
    e = errors_of(base + "[regularity]\ns = 1.3\n");
    EXPECT_TRUE(any_contains(e, "s_alpha"));
    e = errors_of(base + "[window]\nv = 1, -1\n");
    EXPECT_TRUE(any_contains(e, "v >= 0"));
    EXPECT_TRUE(errors_of(base).empty());
}

TEST(Config, ObserverCadenceIsBounded)
{
    auto e = errors_of("[solver]\ndt = 0.01\nt_end = 1\nobserver_stride = 2\n");
    EXPECT_TRUE(any_contains(e, "observer_stride"));
}

TEST(Config, RenderedConfigReparsesToSameSettings)
{
    ExperimentConfig c = parse_config(small_sim);
    ExperimentConfig d = parse_config(render_config(c.resolved));
    EXPECT_EQ(c.resolved, d.resolved);
}

TEST(Runner, SimulateWritesManifestAndOutputs)
{
    fs::path out = scratch("sim");
    ConfigText ct = read_config_text(small_sim);
    ct.values["run.output_dir"] = out.string();
    RunOutcome r = run_experiment(build_experiment(ct));
    EXPECT_EQ(r.exit_code, exit_ok);
    nlohmann::json m = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m["kind"], "simulate");
    EXPECT_EQ(m["exit_code"], 0);
    for (const char* key : {"code_version", "config", "config_text", "seeds", "threads", "wall_seconds", "outputs",
                            "stability_number", "wrap_contamination"})
        EXPECT_TRUE(m.contains(key)) << key;
    for (const auto& o : m["outputs"])
        EXPECT_TRUE(fs::exists(out / o.get<std::string>())) << o;
    EXPECT_TRUE(fs::exists(out / "final.bin.json"));
    EXPECT_TRUE(fs::exists(out / "plot.py"));
    nlohmann::json s = nlohmann::json::parse(slurp(out / "series.json"));
    EXPECT_EQ(s["records"].size(), 101u);
    EXPECT_LT(m["results"]["mass_drift"].get<double>(), 1e-10);
    // The snapshot reloads to the exact final state.
    Snapshot snap = load_snapshot((out / "final.bin").string());
    EXPECT_NEAR(snap.timestamp, 1.0, 1e-12);
}

TEST(Runner, RunsAreReproducible)
{
    std::string csv[2], bin[2];
    for (int k = 0; k < 2; ++k) {
        fs::path out = scratch("repro" + std::to_string(k));
        ConfigText ct = read_config_text(small_sim);
        ct.values["datum.kind"] = "band_limited_random";
        ct.values["datum.band"] = "2";
        ct.values["solver.wrap_threshold"] = "1";
        ct.values["run.seed"] = "42";
        ct.values["run.output_dir"] = out.string();
        run_experiment(build_experiment(ct));
        csv[k] = slurp(out / "series.csv");
        bin[k] = slurp(out / "final.bin");
    }
    EXPECT_EQ(csv[0], csv[1]);
    EXPECT_EQ(bin[0], bin[1]);
    EXPECT_FALSE(csv[0].empty());
}

TEST(Runner, ResumeFromCheckpointMatchesUninterruptedRun)
{
    fs::path full = scratch("full"), resumed = scratch("resumed");
    ConfigText ct = read_config_text(small_sim);
    ct.values["solver.checkpoint_every"] = "50";
    ct.values["run.output_dir"] = full.string();
    run_experiment(build_experiment(ct));
    const fs::path ck = full / "checkpoints" / "ckpt_00000050.bin";
    ASSERT_TRUE(fs::exists(ck));
    ct.values["run.output_dir"] = resumed.string();
    RunOptions opt;
    opt.resume_path = ck.string();
    RunOutcome r = run_experiment(build_experiment(ct), opt);
    EXPECT_EQ(r.exit_code, exit_ok);
    EXPECT_TRUE(r.manifest.contains("resumed_from"));
    Snapshot a = load_snapshot((full / "final.bin").string()), b = load_snapshot((resumed / "final.bin").string());
    EXPECT_EQ(a.timestamp, b.timestamp);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.field.values().size(); ++k)
        worst = std::max(worst, std::abs(a.field.values()[k] - b.field.values()[k]));
    EXPECT_LT(worst, 1e-13);
}

TEST(Runner, ResumeRejectedForOtherKinds)
{
    ConfigText ct = read_config_text("[run]\nkind = cutoff-check\n");
    ct.values["run.output_dir"] = scratch("bad_resume").string();
    RunOptions opt;
    opt.resume_path = "nowhere.bin";
    EXPECT_THROW(run_experiment(build_experiment(ct), opt), ValidationError);
}

TEST(Runner, CutoffCheckAndSweep)
{
    fs::path out = scratch("cutoff");
    ConfigText ct = read_config_text("[run]\nkind = cutoff-check\n[cutoff]\nfamilies = 3\nsamples = 2000\n");
    ct.values["run.output_dir"] = out.string();
    RunOutcome r = run_experiment(build_experiment(ct));
    EXPECT_EQ(r.exit_code, exit_ok);
    EXPECT_TRUE(fs::exists(out / "properties.csv"));

    fs::path sw = scratch("sweep");
    ConfigText st = read_config_text("[run]\nkind = inequality\n[inequality]\nkind = leibniz-d\ntrials = 10\n"
                                     "grids = 128\n[sweep]\nparam = inequality.s\nvalues = 0.5, 1.5\n");
    st.values["run.output_dir"] = sw.string();
    EXPECT_EQ(run_sweep(st), exit_ok);
    nlohmann::json idx = nlohmann::json::parse(slurp(sw / "sweep.json"));
    ASSERT_EQ(idx["runs"].size(), 2u);
    for (const auto& run : idx["runs"]) {
        EXPECT_EQ(run["exit_code"], 0);
        EXPECT_TRUE(fs::exists(fs::path(run["dir"].get<std::string>()) / "manifest.json"));
    }
}

TEST(Cli, ExitCodes)
{
    fs::path dir = scratch("cli");
    write_file(dir / "ok.ini", small_sim);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "ok.ini").string() + " --out " + (dir / "ok").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "manifest.json"));

    write_file(dir / "bad.ini", small_sim + "[solver]\nalpha = 2\n");
    EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.ini").string() + " --out " + (dir / "bad").string()), 2);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.ini").string()), 2);
    EXPECT_EQ(run_cli("simulate --no-such-flag"), 2);

    // Large data with a step far beyond the stable range.
    std::string blow = small_sim;
    blow.replace(blow.find("dt = 0.01"), 9, "dt = 0.1");
    blow.replace(blow.find("t_end = 1\n"), 9, "t_end = 20");
    blow += "[datum]\namplitude = 30\n";
    write_file(dir / "blow.ini", blow);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "blow.ini").string() + " --out " + (dir / "blow").string()
                      + " --seed 1"),
              3);

    // A wide Gaussian on a short box already has energy at the seam.
    std::string wrap = small_sim;
    wrap.replace(wrap.find("wx = 2"), 6, "wx = 8");
    write_file(dir / "wrap.ini", wrap);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "wrap.ini").string() + " --out " + (dir / "wrap").string()), 4);
}

TEST(Cli, SeedFlagOverridesConfig)
{
    fs::path dir = scratch("cli_seed");
    write_file(dir / "c.ini", small_sim);
    ASSERT_EQ(run_cli("simulate --config " + (dir / "c.ini").string() + " --out " + (dir / "o").string()
                      + " --seed 9 --threads 1"),
              0);
    nlohmann::json m = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    EXPECT_EQ(m["seeds"]["run"], 9);
    EXPECT_EQ(m["threads"], 1);
}

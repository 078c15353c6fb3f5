// Command-line front end: one subcommand per experiment kind plus `sweep`.

#include "bozk/config.hpp"
#include "bozk/runner.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct Overrides {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::string resume;
};

void add_common(CLI::App* sub, Overrides& ov)
{
    sub->add_option("--config", ov.config_path, "config file (flat sectioned key = value)");
    sub->add_option_function<std::string>("--out", [&](const std::string& v) { ov.values["run.output_dir"] = v; },
                                          "output directory");
    sub->add_option_function<std::string>("--seed", [&](const std::string& v) { ov.values["run.seed"] = v; },
                                          "master seed");
    sub->add_option_function<std::string>("--threads", [&](const std::string& v) { ov.values["run.threads"] = v; },
                                           "FFT threads");
}

void add_key(CLI::App* sub, Overrides& ov, const std::string& flag, const std::string& key, const std::string& help)
{
    sub->add_option_function<std::string>(flag, [&ov, key](const std::string& v) { ov.values[key] = v; }, help);
}

bozk::ConfigText load(const Overrides& ov, const std::string& kind)
{
    bozk::ConfigText ct = ov.config_path.empty() ? bozk::ConfigText{} : bozk::read_config_file(ov.config_path);
    if (!kind.empty())
        ct.values["run.kind"] = kind;
    for (const auto& [k, v] : ov.values)
        ct.values[k] = v;
    return ct;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pseudospectral lab for the dispersive generalized Benjamin-Ono-Zakharov-Kuznetsov equation"};
    app.require_subcommand(1);
    Overrides ov;
    std::vector<std::string> command(argv, argv + argc);

    const std::vector<std::string> kinds = bozk::experiment_kinds();
    std::map<std::string, CLI::App*> subs;
    for (const auto& k : kinds) {
        CLI::App* sub = app.add_subcommand(k, "run a " + k + " experiment");
        add_common(sub, ov);
        subs[k] = sub;
    }
    subs["simulate"]->add_option("--resume", ov.resume, "checkpoint to resume from");
    add_key(subs["linear-decay"], ov, "--alpha", "solver.alpha", "dispersion parameter");
    add_key(subs["linear-decay"], ov, "--p", "decay.p", "Lebesgue exponent");
    add_key(subs["linear-decay"], ov, "--mode", "decay.mode", "strichartz or rough");
    subs["commutator-norms"]->set_help_flag("--help", "print this help message and exit");
    add_key(subs["commutator-norms"], ov, "--a", "commutator.a", "order a");
    add_key(subs["commutator-norms"], ov, "--n", "commutator.n", "truncation n");
    add_key(subs["commutator-norms"], ov, "--b", "commutator.b", "outer order b");
    add_key(subs["commutator-norms"], ov, "--grid", "commutator.grids", "1-D grid size(s), comma separated");
    add_key(subs["commutator-norms"], ov, "--h", "commutator.h", "multiplier profile");
    add_key(subs["commutator-norms"], ov, "--inner", "commutator.inner", "b or a");
    add_key(subs["inequality"], ov, "--kind", "inequality.kind", "inequality family");
    add_key(subs["inequality"], ov, "--s", "inequality.s", "Sobolev order");
    add_key(subs["inequality"], ov, "--p", "inequality.p", "Lebesgue exponent");
    add_key(subs["inequality"], ov, "--trials", "inequality.trials", "number of trials");
    add_key(subs["inequality"], ov, "--grid", "inequality.grids", "1-D grid size(s), comma separated");

    CLI::App* sweep = app.add_subcommand("sweep", "run a config once per value of one key");
    add_common(sweep, ov);
    add_key(sweep, ov, "--param", "sweep.param", "key to vary");
    add_key(sweep, ov, "--values", "sweep.values", "comma separated values");
    add_key(sweep, ov, "--parallel", "sweep.parallel", "runs dispatched at once");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : bozk::exit_validation;
    }

    try {
        if (sweep->parsed()) {
            int code = bozk::run_sweep(load(ov, ""), command);
            std::cout << "sweep finished with exit code " << code << "\n";
            return code;
        }
        for (const auto& [kind, sub] : subs) {
            if (!sub->parsed())
                continue;
            bozk::ExperimentConfig cfg = bozk::build_experiment(load(ov, kind));
            bozk::RunOptions opt;
            opt.resume_path = ov.resume;
            opt.command = command;
            bozk::RunOutcome out = bozk::run_experiment(cfg, opt);
            std::cout << out.manifest["results"].dump(2) << "\n";
            if (out.exit_code == bozk::exit_blowup)
                std::cerr << "blow-up: " << out.manifest["blowup"]["message"].get<std::string>() << "\n";
            if (out.exit_code == bozk::exit_wrap)
                std::cerr << "wrap contamination above threshold\n";
            return out.exit_code;
        }
    } catch (const bozk::ValidationError& e) {
        for (const auto& m : e.errors())
            std::cerr << "config error: " << m << "\n";
        return bozk::exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bozk::exit_failure;
    }
    return bozk::exit_failure;
}

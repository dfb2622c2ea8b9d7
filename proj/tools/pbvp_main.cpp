#include "pbvp/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Periodic boundary-value solver for control-affine systems with "
                 "piecewise-constant inputs"};
    app.require_subcommand(1);

    std::string config_path;
    pbvp::CliOverrides overrides;
    std::string method, out_dir, bench_which;
    int n_g = -1, n_i = -1;
    unsigned seed = 0;
    std::vector<CLI::Option*> seed_opts;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "path to the JSON run configuration")
                ->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--n-g", n_g, "override grid size");
        cmd->add_option("--n-i", n_i, "override iteration count");
        seed_opts.push_back(cmd->add_option("--seed", seed, "seed for sampled bounds"));
    };

    CLI::App* solve = app.add_subcommand("solve", "run a solver and write trajectory + report");
    add_common(solve, true);
    solve->add_option("--method", method, "simple | newton-modified | newton-classical");
    bool oracle = false;
    solve->add_flag("--oracle", oracle, "cross-check against the shooting oracle");

    CLI::App* certify = app.add_subcommand("certify", "evaluate the convergence certificate");
    add_common(certify, true);

    CLI::App* bench = app.add_subcommand("bench", "run a named benchmark");
    bench->add_option("which", bench_which, "table1 | figure1")->required();
    add_common(bench, false);

    CLI11_PARSE(app, argc, argv);

    if (n_g > 0) overrides.n_g = n_g;
    if (n_i > 0) overrides.n_iter = n_i;
    if (!method.empty()) overrides.method = method;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    overrides.oracle = oracle;
    for (const CLI::Option* so : seed_opts)
        if (so->count() > 0) overrides.seed = seed;

    try {
        if (solve->parsed()) return pbvp::cmd_solve(pbvp::load_config(config_path), overrides);
        if (certify->parsed()) return pbvp::cmd_certify(pbvp::load_config(config_path), overrides);
        if (bench->parsed()) return pbvp::cmd_bench(bench_which, overrides);
    } catch (const pbvp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

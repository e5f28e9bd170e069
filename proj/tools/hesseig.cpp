// hesseig: batch front end for the k-Hessian eigenvalue solvers.
//
//   hesseig <eigen|oracle|sweep|verify|flow> [--config FILE] [--set section.key=value]...
//           [--jobs N] [--out DIR] [--dry-run]

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hesseig/config.hpp"
#include "hesseig/run.hpp"

namespace {

struct Args {
    std::string config_path;
    std::vector<std::string> sets;
    int jobs = 0;
    std::string out;
    bool dry_run = false;
};

int execute(const std::string& mode, const Args& args)
{
    std::string text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) {
            std::cerr << hesseig::error_json("io", "cannot read config '" + args.config_path + "'",
                                             {{"mode", mode}})
                      << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    std::vector<std::string> overrides = args.sets;
    overrides.push_back("run.mode=" + mode);
    if (args.jobs > 0) {
        overrides.push_back("run.jobs=" + std::to_string(args.jobs));
    }
    hesseig::RunConfig config;
    try {
        config = hesseig::parse_config(text, overrides);
    } catch (const hesseig::ConfigError& e) {
        std::cerr << hesseig::error_json(e.kind(), e.what(),
                                         {{"mode", mode},
                                          {"line", std::to_string(e.line())},
                                          {"column", std::to_string(e.column())}})
                  << "\n";
        return 2;
    }
    if (args.dry_run) {
        std::cout << hesseig::to_ini(config);
        return 0;
    }
    hesseig::RunOptions options;
    if (!args.out.empty()) {
        options.out_dir = args.out;
    }
    const hesseig::RunOutcome outcome = hesseig::run(config, std::cout, std::cerr, options);
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Eigenvalue solvers for weighted k-Hessian equations"};
    app.require_subcommand(1);
    Args args;
    const std::vector<std::pair<std::string, std::string>> modes = {
        {"eigen", "grid eigenvalue for the first delta"},
        {"oracle", "radial shooting (and Bessel, k = 1) eigenvalue on a disk"},
        {"sweep", "delta sweep with extrapolation to delta = 0"},
        {"verify", "estimate, regularity and linearization checks on a snapshot"},
        {"flow", "descent flow of the truncated functional"},
    };
    for (const auto& [name, help] : modes) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config_path, "configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", args.sets, "override, section.key=value (repeatable)");
        sub->add_option("--jobs", args.jobs, "concurrent solves for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--out", args.out, "output directory (overrides HESSEIG_OUT and outputs.dir)");
        sub->add_flag("--dry-run", args.dry_run, "print the resolved configuration and exit");
    }
    CLI11_PARSE(app, argc, argv);
    for (const auto& [name, help] : modes) {
        if (app.got_subcommand(name)) {
            return execute(name, args);
        }
    }
    return 2;
}

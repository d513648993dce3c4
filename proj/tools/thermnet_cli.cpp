#include <CLI11.hpp>

#include <iostream>

#include "thermnet/app.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"thermnet - thermal-circuit assembly, state-space extraction and simulation"};

    thermnet::RunOptions options;
    std::string method = "exact-zoh";
    double step = 0.0;

    cli.add_option("--config", options.config_path, "building description file (.tc)");
    cli.add_option("--inputs", options.inputs_path, "input time-series file (.csv)");
    cli.add_option("--output", options.output_path, "trajectory output file (stdout if omitted)");
    cli.add_option("--dt", step, "simulation step in seconds (default: input step)");
    cli.add_option("--method", method, "explicit-euler | implicit-euler | exact-zoh")
        ->check(CLI::IsMember({"explicit-euler", "implicit-euler", "exact-zoh"}));
    cli.add_flag("--report-eigen", options.report_eigen, "print eigenvalues and time constants");
    cli.add_flag("--dump-statespace", options.dump_statespace, "write the state-space matrices");
    cli.add_option("--compare", options.compare_path, "measured series to compare against");
    cli.add_flag("--allow-unbound", options.allow_unbound,
                 "treat unbound flagged sources as constant zero");
    cli.add_option("--batch", options.batch_dir,
                   "run every subdirectory holding building.tc + inputs.csv");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? thermnet::kExitOk : thermnet::kExitUsage;
    }

    options.method = thermnet::method_from_string(method);
    if (step > 0.0) options.step = step;

    return thermnet::run_app(options, std::cout, std::cerr);
}

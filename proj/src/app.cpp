#include "thermnet/app.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "thermnet/compare.hpp"
#include "thermnet/timeseries_io.hpp"

namespace thermnet {

TimeSeries bind_channels(const BuildingModel& model, const StateSpace& ss,
                         const TimeSeries& user_inputs, bool allow_unbound) {
    TimeSeries bound;
    bound.start_time = user_inputs.start_time;
    bound.step = user_inputs.step;
    const Index samples = user_inputs.sample_count();

    auto user_channel = [&](const ResolvedBinding& b) -> const Vector& {
        return user_inputs.channel(b.channel);
    };

    for (std::size_t col = 0; col < ss.input_labels.size(); ++col) {
        const std::string& label = ss.input_labels[col];
        Vector values = Vector::Zero(samples);
        bool found = false;
        if (col < static_cast<std::size_t>(ss.input_branches.size())) {
            const Index branch = ss.input_branches[col];
            for (const auto& b : model.bindings) {
                if (!b.is_branch || b.global_index != branch) continue;
                values = b.scale * user_channel(b);
                found = true;
            }
        } else {
            const Index node = col < ss.input_branches.size() + ss.input_massless_nodes.size()
                                   ? ss.input_massless_nodes[col - ss.input_branches.size()]
                                   : ss.input_capacitive_nodes[col - ss.input_branches.size() -
                                                               ss.input_massless_nodes.size()];
            for (const auto& b : model.bindings) {
                if (b.is_branch || b.global_index != node) continue;
                values += b.scale * user_channel(b);
                found = true;
            }
        }
        if (!found && !allow_unbound)
            throw InputBindingError("source '" + label +
                                    "' has no channel binding (pass --allow-unbound to force "
                                    "a constant zero)");
        bound.names.push_back(label);
        bound.channels.push_back(std::move(values));
    }
    return bound;
}

std::string format_eigen_report(const EigenReport& report) {
    std::ostringstream out;
    char buf[128];
    out << "eigenvalues (1/s) and time constants:\n";
    for (Index i = 0; i < report.eigenvalues.size(); ++i) {
        std::snprintf(buf, sizeof buf, "  %14.6e   tau = %12.4f s (%8.3f h)\n",
                      report.eigenvalues[i], report.time_constants[i],
                      report.time_constants[i] / 3600.0);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "dominant time constant: %.4f s (%.3f h)\n",
                  report.dominant_time_constant, report.dominant_time_constant / 3600.0);
    out << buf;
    std::snprintf(buf, sizeof buf, "stiffness ratio: %.6g\n", report.stiffness_ratio);
    out << buf;
    return out.str();
}

namespace {

void dump_matrix(std::ostream& out, const char* name, const Matrix& m) {
    out << name << " " << m.rows() << " x " << m.cols() << "\n";
    char buf[40];
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
}

}  // namespace

std::string format_statespace(const StateSpace& ss) {
    std::ostringstream out;
    out << "states:";
    for (const auto& s : ss.state_labels) out << " " << s;
    out << "\ninputs:";
    for (const auto& s : ss.input_labels) out << " " << s;
    out << "\noutputs:";
    for (const auto& s : ss.output_labels) out << " " << s;
    out << "\n";
    dump_matrix(out, "A", ss.a);
    dump_matrix(out, "B", ss.b);
    dump_matrix(out, "C", ss.c);
    dump_matrix(out, "D", ss.d);
    return out.str();
}

int run_scenario(const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const BuildingDescription desc = parse_building(options.config_path);
        BuildingModel model = compile_building(desc);

        const ValidationReport structure = validate(model.assembled);
        if (structure.has_errors()) {
            err << "model: assembled circuit is invalid\n" << structure.summary();
            return kExitModel;
        }
        const ValidationReport posedness = check_well_posed(model.assembled);
        for (const auto& v : posedness.violations)
            if (v.severity == Severity::Warning)
                err << "warning [" << to_string(v.kind) << "] node " << v.index << ": "
                    << v.message << "\n";
        if (posedness.has_errors()) {
            err << "model: circuit is not well posed\n" << posedness.summary();
            return kExitModel;
        }

        const DaeSystem dae = build_dae(model.assembled);
        StateSpace ss = extract_state_space(dae, model.assembled);
        ss.output_labels = model.output_display_names;

        out << model.circuits.size() << " elementary models, " << ss.state_count()
            << " states, " << model.assembled.branch_count() << " branches, "
            << model.assembled.node_count() << " nodes\n";

        if (options.report_eigen) out << format_eigen_report(eigen_report(ss));
        if (options.dump_statespace) {
            if (options.output_path.empty()) {
                out << format_statespace(ss);
            } else {
                const std::string path = options.output_path + ".statespace.txt";
                std::ofstream f(path);
                f << format_statespace(ss);
                out << "state-space matrices written to " << path << "\n";
            }
        }

        if (options.inputs_path.empty()) return kExitOk;  // model inspection only

        const TimeSeries user_inputs = ingest_timeseries(options.inputs_path);
        const TimeSeries inputs = bind_channels(model, ss, user_inputs, options.allow_unbound);

        IntegratorConfig config;
        config.method = options.method;
        config.step = options.step.value_or(inputs.step);
        const Trajectory trajectory = integrate(ss, inputs, config);

        if (!trajectory.outputs.allFinite()) {
            err << "numeric: trajectory diverged (non-finite values)\n";
            return kExitNumeric;
        }

        if (options.output_path.empty()) write_trajectory(trajectory, out);
        else write_trajectory_file(trajectory, options.output_path);

        if (!options.compare_path.empty()) {
            const TimeSeries measured = ingest_timeseries(options.compare_path);
            std::vector<std::pair<std::string, std::string>> channel_map;
            for (const auto& name : trajectory.output_names)
                if (measured.channel_index(name) >= 0) channel_map.push_back({name, name});
            if (channel_map.empty()) {
                err << "compare: no measured channel matches a trajectory output\n";
                return kExitParse;
            }
            for (const auto& [sim_name, meas_name] : channel_map) {
                const ComparisonStats stats = compare(trajectory, measured, {{sim_name, meas_name}});
                out << "compare " << sim_name << ": " << format_stats(stats);
            }
            if (channel_map.size() > 1) {
                const ComparisonStats pooled = compare(trajectory, measured, channel_map);
                out << "compare (all channels): " << format_stats(pooled);
            }
        }
        return kExitOk;
    } catch (const ParseError& e) {
        err << "parse: " << e.what() << "\n";
        return kExitParse;
    } catch (const StabilityError& e) {
        err << "numeric: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const InputBindingError& e) {
        err << "inputs: " << e.what() << "\n";
        return kExitParse;
    } catch (const SingularSystemError& e) {
        err << "model: " << e.what() << "\n";
        return kExitModel;
    } catch (const NoStatesError& e) {
        err << "model: " << e.what() << "\n";
        return kExitModel;
    } catch (const MergeError& e) {
        err << "model: " << e.what() << "\n";
        return kExitModel;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    }
}

int run_app(const RunOptions& options, std::ostream& out, std::ostream& err) {
    if (options.batch_dir.empty()) {
        if (options.config_path.empty()) {
            err << "usage: --config is required (or --batch <dir>)\n";
            return kExitUsage;
        }
        return run_scenario(options, out, err);
    }

    namespace fs = std::filesystem;
    std::vector<fs::path> scenarios;
    if (!fs::is_directory(options.batch_dir)) {
        err << "usage: batch directory '" << options.batch_dir << "' does not exist\n";
        return kExitUsage;
    }
    for (const auto& entry : fs::directory_iterator(options.batch_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "building.tc") &&
            fs::exists(entry.path() / "inputs.csv"))
            scenarios.push_back(entry.path());
    std::sort(scenarios.begin(), scenarios.end());
    if (scenarios.empty()) {
        err << "usage: no scenario directories (building.tc + inputs.csv) under '"
            << options.batch_dir << "'\n";
        return kExitUsage;
    }

    struct Result {
        int code;
        std::string log;
        std::string errors;
    };
    std::vector<std::future<Result>> futures;
    for (const auto& dir : scenarios) {
        futures.push_back(std::async(std::launch::async, [dir, &options]() {
            RunOptions scenario = options;
            scenario.batch_dir.clear();
            scenario.config_path = (dir / "building.tc").string();
            scenario.inputs_path = (dir / "inputs.csv").string();
            scenario.output_path = (dir / "trajectory.csv").string();
            std::ostringstream log, errors;
            const int code = run_scenario(scenario, log, errors);
            return Result{code, log.str(), errors.str()};
        }));
    }

    int worst = kExitOk;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const Result result = futures[i].get();
        out << "[" << scenarios[i].filename().string() << "] exit " << result.code << "\n"
            << result.log;
        err << result.errors;
        worst = std::max(worst, result.code);
    }
    return worst;
}

}  // namespace thermnet

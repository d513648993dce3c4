#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "thermnet/config.hpp"
#include "thermnet/simulate.hpp"

namespace thermnet {

/// One batch-CLI invocation, already parsed from flags.
struct RunOptions {
    std::string config_path;
    std::string inputs_path;
    std::string output_path;  // empty: trajectory to stdout
    std::optional<double> step;
    Method method = Method::ExactZoh;
    bool report_eigen = false;
    bool dump_statespace = false;
    std::string compare_path;
    bool allow_unbound = false;
    std::string batch_dir;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitModel = 3;
inline constexpr int kExitNumeric = 4;

/// Synthesizes the state-space input channels from the user channels via the
/// model bindings: flow channels sum scale*user, temperature channels take
/// the single bound channel. Unbound flagged sources become zero when
/// allow_unbound is set, otherwise throw InputBindingError.
TimeSeries bind_channels(const BuildingModel& model, const StateSpace& ss,
                         const TimeSeries& user_inputs, bool allow_unbound);

/// Runs one scenario end to end; writes artifacts, logs to `out`/`err`.
/// Returns an exit code instead of throwing.
int run_scenario(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Dispatches to run_scenario or, with batch_dir set, runs every
/// subdirectory holding building.tc + inputs.csv in parallel.
int run_app(const RunOptions& options, std::ostream& out, std::ostream& err);

std::string format_eigen_report(const EigenReport& report);
std::string format_statespace(const StateSpace& ss);

}  // namespace thermnet

#pragma once

#include <iosfwd>
#include <string>

#include "thermnet/simulate.hpp"

namespace thermnet {

/// Reads a delimited time-series file: comma-separated, first header column
/// `time` (seconds since start, uniform step), remaining columns named
/// channels. Throws ParseError with line/column locations.
TimeSeries ingest_timeseries(const std::string& path);

/// Same parser on an in-memory document; `filename` is used in error
/// messages only.
TimeSeries parse_timeseries(const std::string& text, const std::string& filename);

/// Writes a trajectory in the same delimited format, one column per output
/// node (plus recorded states when present). Deterministic formatting.
void write_trajectory(const Trajectory& trajectory, std::ostream& out);
void write_trajectory_file(const Trajectory& trajectory, const std::string& path);

}  // namespace thermnet

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thermnet/simulate.hpp"

namespace thermnet {

/// Error statistics over (simulated - measured), pooled across the mapped
/// channel pairs. Standard deviation uses the population form (divide by N).
struct ComparisonStats {
    Index count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double min = 0.0;
    double max = 0.0;
    double bin_width = 0.1;   // degC
    double bin_origin = 0.0;  // left edge of the first bin
    std::vector<Index> bins;
};

/// Compares trajectory outputs against measured channels over the
/// overlapping window. Both grids must share the same step and align on it.
/// channel_map pairs (trajectory output name, measured channel name).
ComparisonStats compare(const Trajectory& simulated, const TimeSeries& measured,
                        const std::vector<std::pair<std::string, std::string>>& channel_map,
                        double bin_width = 0.1);

std::string format_stats(const ComparisonStats& stats);

}  // namespace thermnet

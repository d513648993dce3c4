#include "thermnet/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace thermnet {

namespace {

double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * double(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - double(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

ComparisonStats compare(const Trajectory& simulated, const TimeSeries& measured,
                        const std::vector<std::pair<std::string, std::string>>& channel_map,
                        double bin_width) {
    if (channel_map.empty()) throw Error("comparison needs at least one channel pair");
    if (bin_width <= 0.0) throw Error("histogram bin width must be positive");
    if (simulated.time.size() < 1) throw Error("empty trajectory");

    const double sim_start = simulated.time[0];
    const double sim_step =
        simulated.time.size() > 1 ? simulated.time[1] - simulated.time[0] : measured.step;
    if (measured.step > 0.0 && simulated.time.size() > 1 &&
        std::abs(sim_step - measured.step) > 1e-9 * std::max(sim_step, 1.0))
        throw Error("comparison grids have different steps (" + std::to_string(sim_step) +
                    " s vs " + std::to_string(measured.step) + " s)");

    // Align the two grids on a shared window.
    const double offset = (measured.start_time - sim_start) / sim_step;
    const double rounded = std::round(offset);
    if (std::abs(offset - rounded) > 1e-6)
        throw Error("comparison grids are not aligned (offset of " + std::to_string(offset) +
                    " steps)");
    const Index shift = static_cast<Index>(rounded);  // sim index of measured sample 0
    const Index first_sim = std::max<Index>(0, shift);
    const Index last_sim =
        std::min<Index>(simulated.time.size() - 1, shift + measured.sample_count() - 1);
    if (first_sim > last_sim) throw Error("no overlapping window between the two series");

    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>((last_sim - first_sim + 1) * channel_map.size()));
    for (const auto& [sim_name, meas_name] : channel_map) {
        const auto it =
            std::find(simulated.output_names.begin(), simulated.output_names.end(), sim_name);
        if (it == simulated.output_names.end())
            throw Error("trajectory has no output column '" + sim_name + "'");
        const Index sim_col = static_cast<Index>(it - simulated.output_names.begin());
        const Vector& meas = measured.channel(meas_name);
        for (Index k = first_sim; k <= last_sim; ++k)
            errors.push_back(simulated.outputs(k, sim_col) - meas[k - shift]);
    }

    ComparisonStats stats;
    stats.count = static_cast<Index>(errors.size());
    stats.bin_width = bin_width;

    double sum = 0.0;
    for (double e : errors) sum += e;
    stats.mean = sum / double(errors.size());
    double var = 0.0;
    for (double e : errors) var += (e - stats.mean) * (e - stats.mean);
    stats.stddev = std::sqrt(var / double(errors.size()));

    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    stats.min = sorted.front();
    stats.max = sorted.back();
    stats.q25 = quantile(sorted, 0.25);
    stats.median = quantile(sorted, 0.50);
    stats.q75 = quantile(sorted, 0.75);

    stats.bin_origin = std::floor(stats.min / bin_width) * bin_width;
    const Index bin_count =
        static_cast<Index>(std::floor((stats.max - stats.bin_origin) / bin_width)) + 1;
    stats.bins.assign(static_cast<std::size_t>(bin_count), 0);
    for (double e : errors) {
        Index bin = static_cast<Index>(std::floor((e - stats.bin_origin) / bin_width));
        bin = std::clamp<Index>(bin, 0, bin_count - 1);
        ++stats.bins[static_cast<std::size_t>(bin)];
    }
    return stats;
}

std::string format_stats(const ComparisonStats& stats) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "samples %lld  mean %.4f  stddev %.4f  min %.4f  q25 %.4f  median %.4f  "
                  "q75 %.4f  max %.4f",
                  static_cast<long long>(stats.count), stats.mean, stats.stddev, stats.min,
                  stats.q25, stats.median, stats.q75, stats.max);
    out << buf << "\n";
    for (std::size_t i = 0; i < stats.bins.size(); ++i) {
        const double lo = stats.bin_origin + double(i) * stats.bin_width;
        std::snprintf(buf, sizeof buf, "  [%+.2f, %+.2f): %lld", lo, lo + stats.bin_width,
                      static_cast<long long>(stats.bins[i]));
        out << buf << "\n";
    }
    return out.str();
}

}  // namespace thermnet

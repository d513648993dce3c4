#include "thermnet/timeseries_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace thermnet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct Cell {
    std::string_view text;
    int column;  // 1-based position of the first character
};

std::vector<Cell> split_line(std::string_view line) {
    std::vector<Cell> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view raw =
            comma == std::string_view::npos ? line.substr(start) : line.substr(start, comma - start);
        const std::string_view trimmed = trim(raw);
        const int col = static_cast<int>(start + (trimmed.data() - raw.data())) + 1;
        cells.push_back({trimmed, col});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_number(const Cell& cell, const std::string& file, int line) {
    double value = 0.0;
    const char* first = cell.text.data();
    const char* last = first + cell.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(file, line, cell.column,
                         "expected a number, got '" + std::string(cell.text) + "'");
    return value;
}

}  // namespace

TimeSeries parse_timeseries(const std::string& text, const std::string& filename) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    // Header.
    std::vector<Cell> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        header = split_line(line);
        break;
    }
    if (header.empty()) throw ParseError(filename, std::max(line_no, 1), 1, "empty file");
    if (header.front().text != "time")
        throw ParseError(filename, line_no, header.front().column,
                         "first column must be named 'time'");

    TimeSeries series;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string name(header[c].text);
        if (name.empty())
            throw ParseError(filename, line_no, header[c].column, "empty channel name");
        if (std::find(series.names.begin(), series.names.end(), name) != series.names.end())
            throw ParseError(filename, line_no, header[c].column,
                             "duplicate channel name '" + name + "'");
        series.names.push_back(name);
    }
    if (series.names.empty())
        throw ParseError(filename, line_no, 1, "no channels declared after the time column");

    std::vector<double> times;
    std::vector<std::vector<double>> columns(series.names.size());
    const std::string header_line = line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<Cell> cells = split_line(line);
        if (cells.size() != header.size())
            throw ParseError(filename, line_no, 1,
                             "row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()));
        times.push_back(parse_number(cells[0], filename, line_no));
        for (std::size_t c = 1; c < cells.size(); ++c)
            columns[c - 1].push_back(parse_number(cells[c], filename, line_no));
    }
    if (times.empty()) throw ParseError(filename, line_no, 1, "no data rows");

    series.start_time = times.front();
    if (times.size() > 1) {
        const double step = times[1] - times[0];
        if (!(step > 0.0))
            throw ParseError(filename, 0, 0, "time column must be strictly increasing");
        for (std::size_t r = 2; r < times.size(); ++r) {
            const double d = times[r] - times[r - 1];
            if (std::abs(d - step) > 1e-9 * std::max(step, 1.0))
                throw ParseError(filename, 0, 0,
                                 "non-uniform time step: expected " + std::to_string(step) +
                                     " s, got " + std::to_string(d) + " s at sample " +
                                     std::to_string(r));
        }
        series.step = step;
    }

    for (std::size_t c = 0; c < columns.size(); ++c)
        series.channels.push_back(
            Eigen::Map<Vector>(columns[c].data(), static_cast<Index>(columns[c].size())));
    return series;
}

TimeSeries ingest_timeseries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_timeseries(buf.str(), path);
}

namespace {

void append_number(std::string& out, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out += buf;
}

}  // namespace

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
    std::string text = "time";
    for (const auto& name : trajectory.output_names) text += "," + name;
    for (const auto& name : trajectory.state_names) text += "," + name;
    text += "\n";
    for (Index k = 0; k < trajectory.time.size(); ++k) {
        append_number(text, trajectory.time[k]);
        for (Index c = 0; c < trajectory.outputs.cols(); ++c) {
            text += ",";
            append_number(text, trajectory.outputs(k, c));
        }
        for (Index c = 0; c < trajectory.states.cols(); ++c) {
            text += ",";
            append_number(text, trajectory.states(k, c));
        }
        text += "\n";
    }
    out << text;
}

void write_trajectory_file(const Trajectory& trajectory, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    write_trajectory(trajectory, out);
}

}  // namespace thermnet

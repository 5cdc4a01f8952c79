#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/model.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

namespace csv_detail {

inline std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
        cells.push_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline bool known_channel(std::string_view name)
{
    for (auto s : kStateNames) {
        if (s == name) return true;
    }
    for (auto s : kInputNames) {
        if (s == name) return true;
    }
    return false;
}

inline std::string format_double(double x)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace csv_detail

/// Relative tolerance on sample spacing when the rate comes from a `t` column.
inline constexpr double kSampleSpacingTolerance = 0.01;

/// Reads a flight log. The header names the channels (state and control
/// symbols, plus an optional `t` column in seconds). Without `t` the caller
/// must declare the sample rate. Every loaded channel is marked measured.
inline TimeSeriesLog load_log(std::istream& in, std::optional<double> declared_rate_hz = std::nullopt)
{
    using csv_detail::split_row;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) break;
    }
    if (line.empty()) throw DataError("empty log: no header row");

    std::vector<std::string> header;
    for (auto cell : split_row(line)) header.emplace_back(cell);
    std::optional<std::size_t> t_col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "t") {
            if (t_col) throw DataError("line " + std::to_string(line_no) + ": duplicate column 't'");
            t_col = c;
        } else if (!csv_detail::known_channel(header[c])) {
            throw DataError("line " + std::to_string(line_no) + ": unknown column '" + header[c] + "'");
        }
        for (std::size_t prev = 0; prev < c; ++prev) {
            if (header[prev] == header[c]) {
                throw DataError("line " + std::to_string(line_no) + ": duplicate column '" + header[c] + "'");
            }
        }
    }

    std::vector<std::vector<double>> columns(header.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double value = 0.0;
            const auto* first = cells[c].data();
            const auto* last = first + cells[c].size();
            if (!cells[c].empty() && *first == '+') ++first;
            auto res = std::from_chars(first, last, value);
            if (cells[c].empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(value)) {
                throw DataError("line " + std::to_string(line_no) + ", column '" + header[c] +
                                "': not a finite number: '" + std::string(cells[c]) + "'");
            }
            columns[c].push_back(value);
        }
    }

    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    if (n < 2) throw DataError("log needs at least 2 samples, found " + std::to_string(n));

    double rate = 0.0;
    double t0 = 0.0;
    if (t_col) {
        const auto& t = columns[*t_col];
        for (std::size_t k = 1; k < n; ++k) {
            if (!(t[k] > t[k - 1])) {
                throw DataError("line " + std::to_string(k + 2) + ": time is not strictly increasing");
            }
        }
        const double mean_dt = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            const double step = t[k] - t[k - 1];
            if (std::abs(step - mean_dt) > kSampleSpacingTolerance * mean_dt) {
                throw DataError("line " + std::to_string(k + 2) + ": irregular sample spacing " +
                                csv_detail::format_double(step) + " s (nominal " +
                                csv_detail::format_double(mean_dt) + " s)");
            }
        }
        rate = 1.0 / mean_dt;
        t0 = t[0];
        if (declared_rate_hz && std::abs(*declared_rate_hz - rate) > kSampleSpacingTolerance * rate) {
            throw DataError("declared rate disagrees with the t column");
        }
    } else {
        if (!declared_rate_hz) throw DataError("log has no 't' column and no declared sample rate");
        rate = *declared_rate_hz;
    }

    TimeSeriesLog log(rate, t0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (t_col && c == *t_col) continue;
        log.add_channel(header[c], std::move(columns[c]), true);
    }
    log.validate();
    return log;
}

inline TimeSeriesLog load_log_file(const std::string& path, std::optional<double> declared_rate_hz = std::nullopt)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return load_log(in, declared_rate_hz);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

/// Writes `t` followed by every channel in log order. Values use the
/// shortest round-trip representation so a reload is bit-exact.
inline void save_log(const TimeSeriesLog& log, std::ostream& out)
{
    out << 't';
    for (const auto& name : log.channel_names()) out << ',' << name;
    out << '\n';
    std::vector<std::span<const double>> cols;
    for (const auto& name : log.channel_names()) cols.push_back(log.channel(name));
    for (std::size_t k = 0; k < log.size(); ++k) {
        out << csv_detail::format_double(log.time(k));
        for (const auto& col : cols) out << ',' << csv_detail::format_double(col[k]);
        out << '\n';
    }
}

inline void save_log_file(const TimeSeriesLog& log, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    save_log(log, out);
    if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace heliid

// CSV ingestion and emission. Header row holds the series names, one column
// per series, no missing cells.
#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edm/core.hpp"

namespace edm {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return cells;
}

inline double parse_real(std::string_view cell, std::size_t row, std::size_t col)
{
    double v = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc{} || ptr != last) {
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                        ": '" + std::string(cell) + "' is not a real number");
    }
    if (!std::isfinite(v)) {
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                        ": non-finite value");
    }
    return v;
}

} // namespace detail

inline std::vector<TimeSeries> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).empty()) {
        throw DataError("CSV has no header row");
    }
    std::vector<std::string> names;
    for (auto cell : detail::split_row(line)) {
        if (cell.empty()) {
            throw DataError("CSV header has an empty column name");
        }
        names.emplace_back(cell);
    }
    std::vector<std::vector<double>> columns(names.size());

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split_row(line);
        if (cells.size() != names.size()) {
            throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(names.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                throw DataError("row " + std::to_string(row) + ", column '" + names[c] +
                                "': missing value");
            }
            columns[c].push_back(detail::parse_real(cells[c], row, c));
        }
    }
    if (columns.empty() || columns.front().empty()) {
        throw DataError("CSV has no data rows");
    }

    std::vector<TimeSeries> out;
    out.reserve(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        out.emplace_back(names[c], std::move(columns[c]));
    }
    return out;
}

inline std::vector<TimeSeries> read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    return read_csv(in);
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_real(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline void write_csv(std::ostream& out, std::span<const TimeSeries> columns)
{
    if (columns.empty()) {
        throw DataError("nothing to write");
    }
    const std::size_t n = columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != n) {
            throw DataError("CSV columns must have equal length");
        }
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c].name();
    }
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << format_real(columns[c][i]);
        }
        out << '\n';
    }
}

inline void write_csv_file(const std::string& path, std::span<const TimeSeries> columns)
{
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    write_csv(out, columns);
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

/// Column lookup by name; the error lists what is available.
inline const TimeSeries& find_column(std::span<const TimeSeries> columns, std::string_view name)
{
    for (const auto& c : columns) {
        if (c.name() == name) {
            return c;
        }
    }
    std::string available;
    for (const auto& c : columns) {
        available += (available.empty() ? "" : ", ") + c.name();
    }
    throw DataError("no column named '" + std::string(name) + "' (available: " + available + ")");
}

} // namespace edm

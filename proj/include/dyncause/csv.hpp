#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dyncause/errors.hpp"
#include "dyncause/panel.hpp"

namespace dyncause {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace detail

// Read a dated panel: header row "date,name1,name2,...", then one row per
// period. Cells must be plain numbers; empty cells are reported as missing
// (with their position), anything else as a parse error. Dates must
// strictly increase.
inline Panel parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();

    Panel panel;
    std::string line;
    long line_no = 0;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    while (std::getline(buffer, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> fields = detail::split_fields(line);
        if (line_no == 1) {
            if (fields.size() < 2) throw ParseError("header needs a date column and at least one series", 1, 1);
            panel.names.assign(fields.begin() + 1, fields.end());
            width = fields.size();
            continue;
        }
        if (fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no, 1);
        if (fields[0].empty()) throw MissingValue(line_no, 1);
        panel.dates.push_back(fields[0]);
        std::vector<double> row;
        for (std::size_t j = 1; j < fields.size(); ++j) {
            if (fields[j].empty()) throw MissingValue(line_no, static_cast<long>(j + 1));
            double v = 0.0;
            const char* first = fields[j].data();
            const char* last = first + fields[j].size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last)
                throw ParseError("not a number: '" + fields[j] + "'", line_no,
                                 static_cast<long>(j + 1));
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2)
        throw InsufficientObservations("csv input", static_cast<long>(rows.size()), 2);
    panel.values.resize(static_cast<long>(rows.size()), static_cast<long>(width - 1));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j + 1 < width; ++j)
            panel.values(static_cast<long>(t), static_cast<long>(j)) = rows[t][j];
    panel.validate();
    return panel;
}

// Fixed-point with six decimals, the format used in all emitted CSV files.
// NaN becomes an empty cell.
inline std::string format_number(double v, int decimals = 6) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    // normalize "-0.000000" to "0.000000"
    std::string s(buf);
    bool all_zero = true;
    for (char c : s)
        if (c >= '1' && c <= '9') all_zero = false;
    if (all_zero && !s.empty() && s[0] == '-') s.erase(0, 1);
    return s;
}

// Strict double parse for round-tripping our own output.
inline double parse_number(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("not a number: '" + s + "'", 0, 0);
    return v;
}

} // namespace dyncause

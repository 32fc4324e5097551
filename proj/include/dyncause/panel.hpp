#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dyncause/errors.hpp"

namespace dyncause {

// Dates are kept as the labels they came in with. Ordering is checked
// numerically when both labels parse as plain numbers (so "9" < "10" on
// yearly integer data), lexicographically otherwise (ISO dates sort fine).
inline bool date_less(const std::string& a, const std::string& b) {
    auto as_number = [](const std::string& s, double& out) {
        if (s.empty()) return false;
        char* end = nullptr;
        out = std::strtod(s.c_str(), &end);
        return end == s.c_str() + s.size();
    };
    double x, y;
    if (as_number(a, x) && as_number(b, y)) return x < y;
    return a < b;
}

// A dated multivariate sample: T rows, n named columns, column-major values.
struct Panel {
    std::vector<std::string> dates;  // length T
    std::vector<std::string> names;  // length n
    Eigen::MatrixXd values;          // T x n

    long rows() const { return values.rows(); }
    long cols() const { return values.cols(); }

    // Throws if the pieces are inconsistent, a value is non-finite, or the
    // dates are not strictly increasing.
    void validate() const {
        if (static_cast<long>(dates.size()) != values.rows())
            throw Error("panel: " + std::to_string(dates.size()) + " dates for " +
                        std::to_string(values.rows()) + " rows");
        if (static_cast<long>(names.size()) != values.cols())
            throw Error("panel: " + std::to_string(names.size()) + " names for " +
                        std::to_string(values.cols()) + " columns");
        for (long t = 0; t < values.rows(); ++t)
            for (long j = 0; j < values.cols(); ++j)
                if (!std::isfinite(values(t, j))) throw MissingValue(t + 1, j + 1);
        for (std::size_t t = 1; t < dates.size(); ++t)
            if (!date_less(dates[t - 1], dates[t]))
                throw NonMonotonicDates(dates[t - 1], dates[t], static_cast<long>(t + 1));
    }

    long column_index(const std::string& name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error("panel: no column named '" + name + "'");
        return static_cast<long>(it - names.begin());
    }

    // Rows [first, last], 1-based inclusive.
    Panel slice_rows(long first, long last) const {
        if (first < 1 || last > rows() || first > last)
            throw Error("panel: bad row slice [" + std::to_string(first) + ", " +
                        std::to_string(last) + "] of " + std::to_string(rows()));
        Panel out;
        out.names = names;
        out.dates.assign(dates.begin() + (first - 1), dates.begin() + last);
        out.values = values.middleRows(first - 1, last - first + 1);
        return out;
    }

    Panel select_columns(const std::vector<long>& idx) const {
        Panel out;
        out.dates = dates;
        out.values.resize(rows(), static_cast<long>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (idx[j] < 0 || idx[j] >= cols())
                throw Error("panel: column index " + std::to_string(idx[j]) + " out of range");
            out.names.push_back(names[idx[j]]);
            out.values.col(static_cast<long>(j)) = values.col(idx[j]);
        }
        return out;
    }
};

} // namespace dyncause

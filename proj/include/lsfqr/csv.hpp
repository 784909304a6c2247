#pragma once

#include "lsfqr/common.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lsfqr::csv {

inline double parse_cell(std::string_view cell, const std::string& path, std::size_t row,
                         std::size_t col) {
    // trim ascii whitespace
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t' || cell.front() == '\r'))
        cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
        cell.remove_suffix(1);
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || cell.empty())
        LSFQR_THROW(DataError, path + ": non-numeric cell '" + std::string(cell) + "' at row " +
                                   std::to_string(row + 1) + ", column " + std::to_string(col + 1));
    return value;
}

/// Reads a headerless numeric CSV into a row-major table. Rows must all have
/// the same number of cells; empty lines are skipped.
inline std::vector<std::vector<double>> read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) LSFQR_THROW(DataError, "cannot open '" + path + "'");
    std::vector<std::vector<double>> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            ++lineno;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0, col = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view cell(line.data() + start,
                                  (comma == std::string::npos ? line.size() : comma) - start);
            row.push_back(parse_cell(cell, path, lineno, col++));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!table.empty() && row.size() != table.front().size())
            LSFQR_THROW(DataError, path + ": ragged row " + std::to_string(lineno + 1) + " (" +
                                       std::to_string(row.size()) + " cells, expected " +
                                       std::to_string(table.front().size()) + ")");
        table.push_back(std::move(row));
        ++lineno;
    }
    return table;
}

/// Shortest round-trippable decimal representation.
inline std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path) {
        if (!out_) LSFQR_THROW(DataError, "cannot open '" + path + "' for writing");
    }
    void header(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i)
            out_ << (i ? "," : "") << names[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format(values[i]);
        out_ << "\n";
    }
    void raw_row(const std::string& line) { out_ << line << "\n"; }

private:
    std::ofstream out_;
};

inline void write_matrix(const std::string& path, const Matrix& m) {
    Writer w(path);
    std::string line;
    for (Index i = 0; i < m.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) line += ",";
            line += format(m(i, j));
        }
        w.raw_row(line);
    }
}

inline void write_vector(const std::string& path, const Vector& v) {
    Writer w(path);
    for (Index i = 0; i < v.size(); ++i) w.raw_row(format(v[i]));
}

}  // namespace lsfqr::csv

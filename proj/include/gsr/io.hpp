#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gsr/errors.hpp"
#include "gsr/partition.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Shortest round-trippable decimal form (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline double parse_double(const std::string& tok, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str())
        throw IoError(context + ": cannot parse '" + tok + "' as a number");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(line);
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace detail

/// Matrix as comma-separated values, one row per line, no header.
inline Matrix load_matrix_csv(const std::string& path) {
    auto in = detail::open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& tok : detail::split_csv_line(line))
            row.push_back(detail::parse_double(tok, path));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(path + ": ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": empty matrix");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

inline void save_matrix_csv(const std::string& path, const Matrix& m) {
    auto out = detail::open_out(path);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

/// Signal file: one value per line.
inline Vector load_vector(const std::string& path) {
    auto in = detail::open_in(path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        vals.push_back(detail::parse_double(line, path));
    }
    Vector v(static_cast<Index>(vals.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = vals[static_cast<std::size_t>(i)];
    return v;
}

inline void save_vector(const std::string& path, const Vector& v) {
    auto out = detail::open_out(path);
    for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

/// Partition file: a single line of comma-separated group sizes.
inline std::vector<Index> load_partition_sizes(const std::string& path) {
    auto in = detail::open_in(path);
    std::string line;
    while (std::getline(in, line) && line.empty()) {
    }
    if (line.empty()) throw IoError(path + ": empty partition file");
    std::vector<Index> sizes;
    for (const auto& tok : detail::split_csv_line(line)) {
        const double v = detail::parse_double(tok, path);
        sizes.push_back(static_cast<Index>(v));
    }
    return sizes;
}

inline void save_partition_sizes(const std::string& path, const GroupPartition& part) {
    auto out = detail::open_out(path);
    for (Index g = 0; g < part.num_groups(); ++g) {
        if (g) out << ',';
        out << part.size(g);
    }
    out << '\n';
}

/// Group index list, one per line (0-based).
inline std::vector<Index> load_index_list(const std::string& path) {
    auto in = detail::open_in(path);
    std::vector<Index> idx;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        idx.push_back(static_cast<Index>(detail::parse_double(line, path)));
    }
    return idx;
}

inline void save_index_list(const std::string& path, const std::vector<Index>& idx) {
    auto out = detail::open_out(path);
    for (Index i : idx) out << i << '\n';
}

}  // namespace gsr

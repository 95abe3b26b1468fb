#include "pcps/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "pcps/errors.hpp"

namespace pcps {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& token, const char* context) {
    const std::string t = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParameterError(std::string(context) + ": cannot parse value '" + token + "'");
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ParameterError("cannot open input file: " + path);
    return f;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw ParameterError("cannot open output file: " + path);
    return f;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw ParameterError("format_double: conversion failed");
    return std::string(buf, ptr);
}

Matrix read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(parse_double(cell, "read_csv"));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DimensionError("read_csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DimensionError("read_csv: empty input");

    Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    require_finite(a, "read_csv");
    return a;
}

Matrix read_csv_file(const std::string& path) {
    auto f = open_input(path);
    return read_csv(f);
}

void write_csv(std::ostream& out, const Matrix& a) {
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << format_double(a(i, j));
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Matrix& a) {
    auto f = open_output(path);
    write_csv(f, a);
}

Matrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw DimensionError("read_matrix_market: empty input");
    std::string header = line;
    std::transform(header.begin(), header.end(), header.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (header.rfind("%%matrixmarket", 0) != 0 ||
        header.find("matrix") == std::string::npos ||
        header.find("array") == std::string::npos ||
        header.find("real") == std::string::npos)
        throw ParameterError("read_matrix_market: unsupported header: " + line);

    // Skip comments, read the size line.
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (!t.empty() && t[0] != '%') break;
    }
    std::stringstream dims(line);
    Index n = 0, d = 0;
    if (!(dims >> n >> d) || n < 1 || d < 1)
        throw DimensionError("read_matrix_market: bad size line");

    Matrix a(n, d);
    Index count = 0;
    while (count < n * d && std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        std::stringstream ss(t);
        std::string tok;
        while (ss >> tok) {
            if (count >= n * d)
                throw DimensionError("read_matrix_market: too many values");
            const Index j = count / n;  // column-major body
            const Index i = count % n;
            a(i, j) = parse_double(tok, "read_matrix_market");
            ++count;
        }
    }
    if (count != n * d)
        throw DimensionError("read_matrix_market: expected " + std::to_string(n * d) +
                             " values, got " + std::to_string(count));
    require_finite(a, "read_matrix_market");
    return a;
}

Matrix read_matrix_market_file(const std::string& path) {
    auto f = open_input(path);
    return read_matrix_market(f);
}

void write_matrix_market(std::ostream& out, const Matrix& a) {
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out << format_double(a(i, j)) << '\n';
}

void write_matrix_market_file(const std::string& path, const Matrix& a) {
    auto f = open_output(path);
    write_matrix_market(f, a);
}

Matrix load_matrix(const std::string& path) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == "mtx" || ext == "mm")
        return read_matrix_market_file(path);
    return read_csv_file(path);
}

}  // namespace pcps

#pragma once

#include <iosfwd>
#include <string>

#include "pcps/linalg.hpp"

namespace pcps {

// Matrix I/O. Values are written in shortest round-trip decimal form, so a
// write/read cycle reproduces every entry exactly.

// CSV: one row per line, comma-separated.
Matrix read_csv(std::istream& in);
Matrix read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Matrix& a);
void write_csv_file(const std::string& path, const Matrix& a);

// MatrixMarket array format (dense, real, general; column-major body).
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market_file(const std::string& path);
void write_matrix_market(std::ostream& out, const Matrix& a);
void write_matrix_market_file(const std::string& path, const Matrix& a);

// Dispatches on extension: .mtx / .mm read as MatrixMarket, anything else CSV.
Matrix load_matrix(const std::string& path);

// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace pcps

#pragma once

#include "fwelnet/types.hpp"

#include <string>
#include <vector>

namespace fwelnet {

/// Parse failure with 1-based line/column position.
class CsvParseError : public DataError {
public:
    CsvParseError(const std::string& path, int line, int column, const std::string& what);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Reads a rectangular numeric CSV (comma-separated, UTF-8, one observation
/// per row). `header` skips the first row.
MatrixXd read_csv_matrix(const std::string& path, bool header = false);

/// Single-column file as a vector.
VectorXd read_csv_vector(const std::string& path, bool header = false);

/// Single integer column (CV fold groups).
std::vector<long long> read_csv_int_column(const std::string& path, bool header = false);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Writes rows of already-formatted cells; caller controls every byte.
void write_csv(const std::string& path,
               const std::vector<std::string>& header_row,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace fwelnet

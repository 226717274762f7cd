#include "fwelnet/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fwelnet {

CsvParseError::CsvParseError(const std::string& path, int line, int column,
                             const std::string& what)
    : DataError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // Ignore a trailing blank line.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

double parse_cell(const std::string& path, const std::string& cell, int line, int column) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    // Tolerate surrounding spaces.
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    if (begin == end) throw CsvParseError(path, line, column, "empty cell");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw CsvParseError(path, line, column,
                            "cannot parse '" + std::string(begin, end) + "' as a number");
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

MatrixXd read_csv_matrix(const std::string& path, bool header) {
    const std::vector<std::string> lines = read_lines(path);
    const std::size_t first = header ? 1 : 0;
    if (lines.size() <= first) throw DataError("'" + path + "' has no data rows");

    std::vector<std::vector<double>> rows;
    std::size_t n_cols = 0;
    for (std::size_t li = first; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li + 1);
        const auto fields = split_fields(lines[li]);
        if (li == first) {
            n_cols = fields.size();
        } else if (fields.size() != n_cols) {
            std::ostringstream msg;
            msg << "row has " << fields.size() << " fields, expected " << n_cols;
            throw CsvParseError(path, line_no, 1, msg.str());
        }
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row[c] = parse_cell(path, fields[c], line_no, static_cast<int>(c + 1));
        }
        rows.push_back(std::move(row));
    }

    MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

VectorXd read_csv_vector(const std::string& path, bool header) {
    const MatrixXd m = read_csv_matrix(path, header);
    if (m.cols() != 1) {
        throw DataError("'" + path + "' must have exactly one column, found " +
                        std::to_string(m.cols()));
    }
    return m.col(0);
}

std::vector<long long> read_csv_int_column(const std::string& path, bool header) {
    const VectorXd v = read_csv_vector(path, header);
    std::vector<long long> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const long long r = static_cast<long long>(v[i]);
        if (static_cast<double>(r) != v[i]) {
            throw DataError("'" + path + "' row " + std::to_string(i + 1) +
                            ": expected an integer, found " + std::to_string(v[i]));
        }
        out[static_cast<std::size_t>(i)] = r;
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header_row,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    auto write_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    };
    if (!header_row.empty()) write_row(header_row);
    for (const auto& row : rows) write_row(row);
    if (!out) throw DataError("failed while writing '" + path + "'");
}

}  // namespace fwelnet

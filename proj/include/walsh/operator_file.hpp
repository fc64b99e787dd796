#pragma once

#include <stdexcept>
#include <string>

#include "walsh/operators.hpp"

namespace walsh {

// Malformed operator file. what() carries "line L, column C" and the field.
class OperatorFileError : public std::runtime_error {
public:
    OperatorFileError(std::size_t line, std::size_t column, std::string field, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string field_;
};

// {
//   "dims": [rows, cols],                       rows = dim Y, cols = dim X
//   "domain":   {"norm": "l1_weighted", "weights": [...]},
//   "codomain": {"norm": "euclidean"},
//   "matrix": [a_11, a_12, ..., a_rows_cols]      row-major
// }
OperatorSpec parse_operator(const std::string& text);
OperatorSpec read_operator_file(const std::string& path);

std::string format_operator(const OperatorSpec& T);

}  // namespace walsh

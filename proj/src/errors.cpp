#include "fnmf/errors.hpp"

#include <utility>

namespace fnmf {

namespace {

std::string located(const std::string& what, std::size_t row, std::size_t column) {
    if (row == 0) return what;
    std::string out = what + " (row " + std::to_string(row);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ")";
}

} // namespace

FormatError::FormatError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(located(what, row, column)), row_(row), column_(column) {}

NumericalError::NumericalError(const std::string& what, int iteration, std::string block)
    : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ", block " + block + ")"),
      iteration_(iteration), block_(std::move(block)) {}

} // namespace fnmf

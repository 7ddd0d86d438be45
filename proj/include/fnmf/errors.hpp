#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fnmf {

// Input violates a mathematical precondition (negative data, bad K, shape mismatch...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed input file. Row/column are 1-based; 0 means "not applicable".
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t row = 0, std::size_t column = 0);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

// Non-finite values appeared inside an iterative solver.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, int iteration, std::string block);

    int iteration() const noexcept { return iteration_; }
    const std::string& block() const noexcept { return block_; }

private:
    int iteration_;
    std::string block_;
};

// A state invariant failed while invariant checking was enabled.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace fnmf

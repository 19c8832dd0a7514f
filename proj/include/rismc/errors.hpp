#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rismc {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Bad shapes or sizes passed between modules.
class DimensionError : public Error
{
public:
    using Error::Error;
};

// Domain-type invariant or operation precondition violated.
class ContractViolation : public Error
{
public:
    using Error::Error;
};

// Singular or ill-conditioned matrix met while factoring.
class SingularMatrixError : public Error
{
public:
    SingularMatrixError(std::string matrix, double rcond)
        : Error("matrix " + matrix + " is singular or ill-conditioned (rcond="
                + std::to_string(rcond) + ")"),
          matrix_(std::move(matrix)), rcond_(rcond) {}

    const std::string& matrix() const noexcept { return matrix_; }
    double rcond() const noexcept { return rcond_; }

private:
    std::string matrix_;
    double rcond_;
};

// Quadrature did not reach tolerance within the refinement budget.
class QuadratureError : public Error
{
public:
    QuadratureError(std::size_t i, std::size_t j, const std::string& detail)
        : Error("mutual impedance quadrature failed for pair (" + std::to_string(i) + ", "
                + std::to_string(j) + "): " + detail),
          i_(i), j_(j), detail_(detail) {}

    std::size_t first() const noexcept { return i_; }
    std::size_t second() const noexcept { return j_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t i_, j_;
    std::string detail_;
};

class ParseError : public Error
{
public:
    ParseError(std::size_t position, const std::string& what, bool is_line)
        : Error((is_line ? "line " : "byte offset ") + std::to_string(position) + ": " + what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class ReciprocityError : public Error
{
public:
    ReciprocityError(std::string block, std::string transpose_block, std::size_t i, std::size_t j,
                     double rel_err)
        : Error("reciprocity violated between Z_" + block + "(" + std::to_string(i) + "," +
                std::to_string(j) + ") and Z_" + transpose_block + "(" + std::to_string(j) + "," +
                std::to_string(i) + "), relative error " + std::to_string(rel_err)),
          block_(std::move(block)), transpose_block_(std::move(transpose_block)), i_(i), j_(j) {}

    const std::string& block() const noexcept { return block_; }
    const std::string& transpose_block() const noexcept { return transpose_block_; }
    std::size_t row() const noexcept { return i_; }
    std::size_t col() const noexcept { return j_; }

private:
    std::string block_, transpose_block_;
    std::size_t i_, j_;
};

class PlacementError : public Error
{
public:
    using Error::Error;
};

// a_k == 0 or chi_k ~ 0 for one RIS element; the sweep skips that element.
class DegenerateElementError : public Error
{
public:
    DegenerateElementError(std::size_t k, const std::string& detail)
        : Error("RIS element " + std::to_string(k) + " is degenerate: " + detail), k_(k) {}

    std::size_t element() const noexcept { return k_; }

private:
    std::size_t k_;
};

// Unrecoverable numerical failure inside a BCD sweep.
class SweepError : public Error
{
public:
    SweepError(std::size_t k, const std::string& detail)
        : Error("sweep aborted at RIS element " + std::to_string(k) + ": " + detail), k_(k) {}

    std::size_t element() const noexcept { return k_; }

private:
    std::size_t k_;
};

}  // namespace rismc

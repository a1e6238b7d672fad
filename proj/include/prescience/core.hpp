#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace prescience {

// Dense row-major matrix. Small problems only; no view machinery.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    const double* row_ptr(std::size_t i) const { return a.data() + i * cols; }
    double* row_ptr(std::size_t i) { return a.data() + i * cols; }
};

class ArgumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateColumnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg, long iterations = -1)
        : std::runtime_error(msg), iterations(iterations) {}
    long iterations;
};

class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prescience

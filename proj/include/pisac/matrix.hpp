#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace pisac {

/// Row-major dense matrix of doubles. Deliberately minimal: the tape engine
/// and kernels do all the arithmetic.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
    Matrix(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
        assert(data.size() == static_cast<size_t>(r) * c);
    }

    int size() const { return rows * cols; }
    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    bool is_scalar() const { return rows == 1 && cols == 1; }
    double scalar() const {
        assert(is_scalar());
        return data[0];
    }
};

}  // namespace pisac

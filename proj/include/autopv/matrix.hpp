#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace autopv {

/// Dense row-major matrix of doubles. The estimators consume this directly;
/// FeatureMatrix wraps it together with the night mask.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    /// Copy of the selected rows, in the given order.
    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const double* src = data.data() + idx[i] * cols;
            std::copy(src, src + cols, out.data.data() + i * cols);
        }
        return out;
    }
};

}  // namespace autopv

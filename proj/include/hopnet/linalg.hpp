#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hopnet {

using Vector = std::vector<double>;

// Dense row-major matrix. Sized for desk-scale networks (n up to a few
// hundred), so no sparse or blocked storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    Matrix transposed() const;

    // max_ij |A_ij - A_ji|; infinite for non-square matrices.
    double asymmetry() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double norm_inf(std::span<const double> x);
double distance_inf(std::span<const double> a, std::span<const double> b);

}  // namespace hopnet

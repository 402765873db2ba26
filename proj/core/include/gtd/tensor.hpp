#pragma once

#include <cstddef>
#include <vector>

namespace gtd {

// Row-major 64-bit float tensor. Used as a matrix (rows x cols) by every
// layer; 1-D tensors are stored as a single row.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    explicit Tensor(std::size_t n) : Tensor(1, n) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double v);
    void zero() { fill(0.0); }
    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = A (m x k) * B (k x n). accumulate=false overwrites out.
void matmul(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate = false);
// out = A^T (k x m -> m x k transposed view) * B
void matmul_at(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate = false);
// out = A * B^T
void matmul_bt(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate = false);

} // namespace gtd

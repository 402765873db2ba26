#include "gtd/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace gtd {

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

void matmul(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (!accumulate) out.zero();
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b.row(p);
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

void matmul_at(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    if (!accumulate) out.zero();
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = a.row(p);
        const double* brow = b.row(p);
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* orow = out.row(i);
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

void matmul_bt(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    if (!accumulate) out.zero();
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b.row(j);
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
            orow[j] += s;
        }
    }
}

} // namespace gtd

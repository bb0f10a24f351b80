#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fuzzyclust {

/// Dense rows x cols matrix of doubles, column-major. The column count is
/// the "long" dimension throughout the library (columns are articles).
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<double> col(std::size_t i) { return {values_.data() + i * rows_, rows_}; }
    std::span<const double> col(std::size_t i) const {
        return {values_.data() + i * rows_, rows_};
    }

    double operator()(std::size_t r, std::size_t c) const { return values_[c * rows_ + r]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[c * rows_ + r]; }

    std::span<const double> data() const { return values_; }
    std::span<double> data() { return values_; }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

inline double frob_inner(const DenseMatrix& a, const DenseMatrix& b) {
    double acc = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t k = 0; k < da.size(); ++k) acc += da[k] * db[k];
    return acc;
}

inline double frob_norm(const DenseMatrix& a) { return std::sqrt(frob_inner(a, a)); }

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    const auto da = a.data();
    const auto db = b.data();
    double worst = 0.0;
    for (std::size_t k = 0; k < da.size(); ++k) {
        worst = std::max(worst, std::abs(da[k] - db[k]));
    }
    return worst;
}

}  // namespace fuzzyclust

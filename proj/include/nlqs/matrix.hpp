#pragma once

#include <cstddef>
#include <vector>

namespace nlqs {

// Dense row-major real matrix, sized for reduced subspaces and small full graphs.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(std::size_t(rows) * std::size_t(cols), fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = v < 0 ? (-v > m ? -v : m) : (v > m ? v : m);
        return m;
    }

    double symmetry_residual() const {
        double r = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j) {
                double d = (*this)(i, j) - (*this)(j, i);
                if (d < 0) d = -d;
                if (d > r) r = d;
            }
        return r;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

}  // namespace nlqs

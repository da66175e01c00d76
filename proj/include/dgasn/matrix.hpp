#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgasn {

// Row-major dense matrix of 64-bit floats.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    static DenseMatrix zeros(int r, int c) { return DenseMatrix(r, c); }
    static DenseMatrix full(int r, int c, double v) {
        DenseMatrix m(r, c);
        std::fill(m.data.begin(), m.data.end(), v);
        return m;
    }
    static DenseMatrix scalar(double v) {
        DenseMatrix m(1, 1);
        m.data[0] = v;
        return m;
    }
    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    size_t size() const { return data.size(); }
    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_shape(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace dgasn

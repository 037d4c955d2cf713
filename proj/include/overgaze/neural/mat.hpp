#pragma once

// Dense row-major matrix, templated on scalar so the whole stack runs in
// 32-bit for training and 64-bit for gradient checking — same code path,
// different precision.  Eigen supplies the GEMM kernel only —
// graph construction, layers, and gradients are all in this project.

#include <Eigen/Core>
#include <vector>

#include "overgaze/common/error.hpp"

namespace og::neural {

template <typename T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> v;  // row-major

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, T(0)) {}

    static Mat zeros(int r, int c) { return Mat(r, c); }

    T& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    T operator()(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return v.size(); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (T x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }
};

template <typename T>
using EigenMap =
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstEigenMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// out = A·B, with optional transposes; accumulate adds into out instead of
// overwriting.  Shapes are checked, mismatches are programming errors.
template <typename T>
void matmul(const Mat<T>& a, bool ta, const Mat<T>& b, bool tb, Mat<T>& out,
            bool accumulate = false) {
    int ar = ta ? a.cols : a.rows, ac = ta ? a.rows : a.cols;
    int br = tb ? b.cols : b.rows, bc = tb ? b.rows : b.cols;
    if (ac != br) throw Error("matmul: inner dimensions disagree");
    if (out.rows != ar || out.cols != bc) {
        if (accumulate) throw Error("matmul: accumulate into wrong shape");
        out = Mat<T>(ar, bc);
    }
    ConstEigenMap<T> ea(a.v.data(), a.rows, a.cols);
    ConstEigenMap<T> eb(b.v.data(), b.rows, b.cols);
    EigenMap<T> eo(out.v.data(), out.rows, out.cols);
    if (!ta && !tb)
        accumulate ? void(eo.noalias() += ea * eb) : void(eo.noalias() = ea * eb);
    else if (ta && !tb)
        accumulate ? void(eo.noalias() += ea.transpose() * eb)
                   : void(eo.noalias() = ea.transpose() * eb);
    else if (!ta && tb)
        accumulate ? void(eo.noalias() += ea * eb.transpose())
                   : void(eo.noalias() = ea * eb.transpose());
    else
        accumulate ? void(eo.noalias() += ea.transpose() * eb.transpose())
                   : void(eo.noalias() = ea.transpose() * eb.transpose());
}

}  // namespace og::neural

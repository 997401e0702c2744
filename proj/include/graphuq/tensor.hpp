#pragma once

#include <Eigen/Dense>
#include <vector>

#include "graphuq/dual.hpp"
#include "graphuq/errors.hpp"

namespace graphuq {

/// Dense row-major matrix of scalars S (double or Dual). Column vectors are
/// n x 1, scalars are 1 x 1.
template <class S>
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<S> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    static Tensor zeros(int r, int c) { return Tensor(r, c); }

    int size() const { return rows * cols; }
    S& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const S& operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    S& operator[](int i) { return data[static_cast<std::size_t>(i)]; }
    const S& operator[](int i) const { return data[static_cast<std::size_t>(i)]; }

    bool is_scalar() const { return rows == 1 && cols == 1; }

    bool all_finite() const {
        for (const S& x : data)
            if (!finite(x)) return false;
        return true;
    }
};

template <class S>
Tensor<S> tensor_from(const Eigen::MatrixXd& m) {
    Tensor<S> t(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < t.rows; ++i)
        for (int j = 0; j < t.cols; ++j) t(i, j) = S(m(i, j));
    return t;
}

template <class S>
Tensor<S> tensor_from(const Eigen::VectorXd& v) {
    Tensor<S> t(static_cast<int>(v.size()), 1);
    for (int i = 0; i < t.rows; ++i) t[i] = S(v[i]);
    return t;
}

inline Eigen::MatrixXd to_matrix(const Tensor<double>& t) {
    Eigen::MatrixXd m(t.rows, t.cols);
    for (int i = 0; i < t.rows; ++i)
        for (int j = 0; j < t.cols; ++j) m(i, j) = t(i, j);
    return m;
}

inline Eigen::VectorXd to_vector(const Tensor<double>& t) {
    if (t.cols != 1) throw DimensionMismatch("to_vector: tensor is not a column vector");
    Eigen::VectorXd v(t.rows);
    for (int i = 0; i < t.rows; ++i) v[i] = t[i];
    return v;
}

} // namespace graphuq

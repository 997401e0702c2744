#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "graphuq/tensor.hpp"

namespace graphuq {

enum class Activation { Linear, Relu, Tanh, Sigmoid, Swish };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Swish: return "swish";
    }
    return "linear";
}

/// Cached eigendecomposition of a symmetric PSD matrix (graph Laplacians).
/// Shared between the forward model and the data generator so that both apply
/// exp(-s L) through the same spectral route.
struct SymmetricEigen {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;

    static SymmetricEigen decompose(const Eigen::MatrixXd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
        if (solver.info() != Eigen::Success)
            throw EigenFailure("eigendecomposition did not converge");
        return {m, solver.eigenvectors(), solver.eigenvalues()};
    }

    /// exp(-s * matrix) * c for plain double inputs.
    Eigen::VectorXd exp_apply(double s, const Eigen::VectorXd& c) const {
        Eigen::VectorXd a = vectors.transpose() * c;
        for (int i = 0; i < a.size(); ++i) a[i] *= std::exp(-s * values[i]);
        return vectors * a;
    }
};

/// Records the forward computation as a DAG of tensor-valued nodes; parents
/// always precede children, so one reverse sweep over the node array
/// accumulates all adjoints. A tape is single-writer while it is being built;
/// distinct tapes may be evaluated concurrently.
template <class S>
class Tape {
public:
    using Var = int;

    Var input(Tensor<S> value) { return push(std::move(value), {}); }

    Var input(const Eigen::MatrixXd& m) { return input(tensor_from<S>(m)); }
    Var input(const Eigen::VectorXd& v) { return input(tensor_from<S>(v)); }

    const Tensor<S>& val(Var v) const { return nodes_[v].value; }
    const Tensor<S>& adjoint(Var v) const { return nodes_[v].adjoint; }

    int size() const { return static_cast<int>(nodes_.size()); }

    // ---- elementwise -----------------------------------------------------

    Var add(Var a, Var b) {
        check_same_shape(a, b, "add");
        Tensor<S> out = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        for (int i = 0; i < out.size(); ++i) out[i] += bv[i];
        return push(std::move(out), [a, b](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            t.accumulate(a, [&](int i) { return g[i]; });
            t.accumulate(b, [&](int i) { return g[i]; });
        });
    }

    Var sub(Var a, Var b) {
        check_same_shape(a, b, "sub");
        Tensor<S> out = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        for (int i = 0; i < out.size(); ++i) out[i] -= bv[i];
        return push(std::move(out), [a, b](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            t.accumulate(a, [&](int i) { return g[i]; });
            t.accumulate(b, [&](int i) { return -g[i]; });
        });
    }

    Var mul(Var a, Var b) {
        check_same_shape(a, b, "mul");
        Tensor<S> out = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        for (int i = 0; i < out.size(); ++i) out[i] *= bv[i];
        return push(std::move(out), [a, b](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            const auto& av = t.nodes_[a].value;
            const auto& bv2 = t.nodes_[b].value;
            t.accumulate(a, [&](int i) { return g[i] * bv2[i]; });
            t.accumulate(b, [&](int i) { return g[i] * av[i]; });
        });
    }

    /// alpha * x + beta, elementwise with double coefficients.
    Var affine(Var a, double alpha, double beta) {
        Tensor<S> out = nodes_[a].value;
        for (int i = 0; i < out.size(); ++i) out[i] = out[i] * alpha + S(beta);
        return push(std::move(out), [a, alpha](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            t.accumulate(a, [&](int i) { return g[i] * alpha; });
        });
    }

    Var scale(Var a, double alpha) { return affine(a, alpha, 0.0); }

    Var activation(Var a, Activation act) {
        if (act == Activation::Linear) return a;
        Tensor<S> out = nodes_[a].value;
        for (int i = 0; i < out.size(); ++i) out[i] = apply_act(out[i], act);
        return push(std::move(out), [a, act](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            const auto& x = t.nodes_[a].value;
            t.accumulate(a, [&](int i) { return g[i] * act_deriv(x[i], act); });
        });
    }

    // ---- linear algebra --------------------------------------------------

    Var matmul(Var a, Var b) {
        const auto& av = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        if (av.cols != bv.rows) throw DimensionMismatch("matmul: inner dimensions differ");
        Tensor<S> out(av.rows, bv.cols);
        for (int i = 0; i < av.rows; ++i)
            for (int k = 0; k < av.cols; ++k) {
                const S aik = av(i, k);
                for (int j = 0; j < bv.cols; ++j) out(i, j) += aik * bv(k, j);
            }
        return push(std::move(out), [a, b](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            const auto& av2 = t.nodes_[a].value;
            const auto& bv2 = t.nodes_[b].value;
            if (t.wants_grad(a)) { // dA = g * B^T
                auto& ga = t.touch(a);
                for (int i = 0; i < av2.rows; ++i)
                    for (int j = 0; j < bv2.cols; ++j) {
                        const S gij = g(i, j);
                        for (int k = 0; k < av2.cols; ++k) ga(i, k) += gij * bv2(k, j);
                    }
            }
            if (t.wants_grad(b)) { // dB = A^T * g
                auto& gb = t.touch(b);
                for (int i = 0; i < av2.rows; ++i)
                    for (int k = 0; k < av2.cols; ++k) {
                        const S aik = av2(i, k);
                        for (int j = 0; j < bv2.cols; ++j) gb(k, j) += aik * g(i, j);
                    }
            }
        });
    }

    /// A * x with a constant double matrix A. The pointer must outlive the tape.
    Var leftmul(const Eigen::MatrixXd* A, Var x) {
        const auto& xv = nodes_[x].value;
        if (static_cast<int>(A->cols()) != xv.rows)
            throw DimensionMismatch("leftmul: inner dimensions differ");
        Tensor<S> out(static_cast<int>(A->rows()), xv.cols);
        for (int i = 0; i < out.rows; ++i)
            for (int k = 0; k < xv.rows; ++k) {
                const double aik = (*A)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < xv.cols; ++j) out(i, j) += xv(k, j) * aik;
            }
        return push(std::move(out), [A, x](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (!t.wants_grad(x)) return;
            auto& gx = t.touch(x); // dx = A^T g
            for (int i = 0; i < g.rows; ++i)
                for (int k = 0; k < gx.rows; ++k) {
                    const double aik = (*A)(i, k);
                    if (aik == 0.0) continue;
                    for (int j = 0; j < g.cols; ++j) gx(k, j) += g(i, j) * aik;
                }
        });
    }

    /// Adds a column vector b to every row of m.
    Var add_rowvec(Var m, Var b) {
        const auto& mv = nodes_[m].value;
        const auto& bv = nodes_[b].value;
        if (bv.cols != 1 || bv.rows != mv.cols)
            throw DimensionMismatch("add_rowvec: bias length does not match columns");
        Tensor<S> out = mv;
        for (int i = 0; i < out.rows; ++i)
            for (int j = 0; j < out.cols; ++j) out(i, j) += bv[j];
        return push(std::move(out), [m, b](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            t.accumulate(m, [&](int i) { return g[i]; });
            if (t.wants_grad(b)) {
                auto& gb = t.touch(b);
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) gb[j] += g(i, j);
            }
        });
    }

    // ---- reductions and reshaping ----------------------------------------

    Var colmean(Var m) {
        const auto& mv = nodes_[m].value;
        if (mv.rows == 0) throw EmptyGraph("colmean: no rows to pool");
        Tensor<S> out(mv.cols, 1);
        for (int i = 0; i < mv.rows; ++i)
            for (int j = 0; j < mv.cols; ++j) out[j] += mv(i, j);
        const double inv = 1.0 / mv.rows;
        for (int j = 0; j < mv.cols; ++j) out[j] = out[j] * inv;
        return push(std::move(out), [m, inv](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (!t.wants_grad(m)) return;
            auto& gm = t.touch(m);
            for (int i = 0; i < gm.rows; ++i)
                for (int j = 0; j < gm.cols; ++j) gm(i, j) += g[j] * inv;
        });
    }

    Var sum(Var a) {
        const auto& av = nodes_[a].value;
        Tensor<S> out(1, 1);
        for (int i = 0; i < av.size(); ++i) out[0] += av[i];
        return push(std::move(out), [a](Tape& t) {
            const S g = t.nodes_[t.cursor_].adjoint[0];
            t.accumulate(a, [&](int) { return g; });
        });
    }

    Var sum_sq(Var a) {
        const auto& av = nodes_[a].value;
        Tensor<S> out(1, 1);
        for (int i = 0; i < av.size(); ++i) out[0] += av[i] * av[i];
        return push(std::move(out), [a](Tape& t) {
            const S g = t.nodes_[t.cursor_].adjoint[0];
            const auto& x = t.nodes_[a].value;
            t.accumulate(a, [&](int i) { return g * x[i] * 2.0; });
        });
    }

    Var dot(Var a, Var b) {
        check_same_shape(a, b, "dot");
        const auto& av = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        Tensor<S> out(1, 1);
        for (int i = 0; i < av.size(); ++i) out[0] += av[i] * bv[i];
        return push(std::move(out), [a, b](Tape& t) {
            const S g = t.nodes_[t.cursor_].adjoint[0];
            const auto& av2 = t.nodes_[a].value;
            const auto& bv2 = t.nodes_[b].value;
            t.accumulate(a, [&](int i) { return g * bv2[i]; });
            t.accumulate(b, [&](int i) { return g * av2[i]; });
        });
    }

    /// Weighted sum of a column vector with constant weights -> scalar.
    Var wsum(Var v, const Eigen::VectorXd& w) {
        const auto& vv = nodes_[v].value;
        if (vv.cols != 1 || vv.rows != static_cast<int>(w.size()))
            throw DimensionMismatch("wsum: weight length mismatch");
        Tensor<S> out(1, 1);
        for (int i = 0; i < vv.rows; ++i) out[0] += vv[i] * w[i];
        return push(std::move(out), [v, w](Tape& t) {
            const S g = t.nodes_[t.cursor_].adjoint[0];
            t.accumulate(v, [&](int i) { return g * w[i]; });
        });
    }

    Var reshape(Var a, int r, int c) {
        const auto& av = nodes_[a].value;
        if (r * c != av.size()) throw DimensionMismatch("reshape: element count changed");
        Tensor<S> out = av;
        out.rows = r;
        out.cols = c;
        return push(std::move(out), [a](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            t.accumulate(a, [&](int i) { return g[i]; });
        });
    }

    /// Contiguous slice of a column vector.
    Var seg(Var a, int offset, int len) {
        const auto& av = nodes_[a].value;
        if (av.cols != 1 || offset < 0 || offset + len > av.rows)
            throw DimensionMismatch("seg: slice out of range");
        Tensor<S> out(len, 1);
        for (int i = 0; i < len; ++i) out[i] = av[offset + i];
        return push(std::move(out), [a, offset, len](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (!t.wants_grad(a)) return;
            auto& ga = t.touch(a);
            for (int i = 0; i < len; ++i) ga[offset + i] += g[i];
        });
    }

    Var vconcat(Var a, Var b) {
        const auto& av = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        if (av.cols != 1 || bv.cols != 1) throw DimensionMismatch("vconcat: expects column vectors");
        Tensor<S> out(av.rows + bv.rows, 1);
        for (int i = 0; i < av.rows; ++i) out[i] = av[i];
        for (int i = 0; i < bv.rows; ++i) out[av.rows + i] = bv[i];
        const int na = av.rows;
        return push(std::move(out), [a, b, na](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (t.wants_grad(a)) {
                auto& ga = t.touch(a);
                for (int i = 0; i < na; ++i) ga[i] += g[i];
            }
            if (t.wants_grad(b)) {
                auto& gb = t.touch(b);
                for (int i = 0; i < gb.rows; ++i) gb[i] += g[na + i];
            }
        });
    }

    /// Stacks 1x1 nodes into a column vector.
    Var pack_scalars(const std::vector<Var>& xs) {
        Tensor<S> out(static_cast<int>(xs.size()), 1);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!nodes_[xs[i]].value.is_scalar())
                throw DimensionMismatch("pack_scalars: element is not scalar");
            out[static_cast<int>(i)] = nodes_[xs[i]].value[0];
        }
        std::vector<Var> ids = xs;
        return push(std::move(out), [ids](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            for (std::size_t i = 0; i < ids.size(); ++i)
                t.accumulate(ids[i], [&](int) { return g[static_cast<int>(i)]; });
        });
    }

    Var col(Var m, int j) {
        const auto& mv = nodes_[m].value;
        if (j < 0 || j >= mv.cols) throw DimensionMismatch("col: index out of range");
        Tensor<S> out(mv.rows, 1);
        for (int i = 0; i < mv.rows; ++i) out[i] = mv(i, j);
        return push(std::move(out), [m, j](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (!t.wants_grad(m)) return;
            auto& gm = t.touch(m);
            for (int i = 0; i < g.rows; ++i) gm(i, j) += g[i];
        });
    }

    Var set_col(Var m, int j, Var v) {
        const auto& mv = nodes_[m].value;
        const auto& vv = nodes_[v].value;
        if (vv.cols != 1 || vv.rows != mv.rows || j < 0 || j >= mv.cols)
            throw DimensionMismatch("set_col: shape mismatch");
        Tensor<S> out = mv;
        for (int i = 0; i < mv.rows; ++i) out(i, j) = vv[i];
        return push(std::move(out), [m, j, v](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (t.wants_grad(m)) {
                auto& gm = t.touch(m);
                for (int i = 0; i < g.rows; ++i)
                    for (int jj = 0; jj < g.cols; ++jj)
                        if (jj != j) gm(i, jj) += g(i, jj);
            }
            if (t.wants_grad(v)) {
                auto& gv = t.touch(v);
                for (int i = 0; i < g.rows; ++i) gv[i] += g(i, j);
            }
        });
    }

    /// Zeroes the rows flagged in mask (used to pin boundary nodes).
    Var zero_rows(Var m, const std::vector<char>& mask) {
        const auto& mv = nodes_[m].value;
        if (static_cast<int>(mask.size()) != mv.rows)
            throw DimensionMismatch("zero_rows: mask length mismatch");
        Tensor<S> out = mv;
        for (int i = 0; i < out.rows; ++i)
            if (mask[i])
                for (int j = 0; j < out.cols; ++j) out(i, j) = S(0.0);
        return push(std::move(out), [m, mask](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            if (!t.wants_grad(m)) return;
            auto& gm = t.touch(m);
            for (int i = 0; i < g.rows; ++i)
                if (!mask[i])
                    for (int j = 0; j < g.cols; ++j) gm(i, j) += g(i, j);
        });
    }

    /// y = exp(-s * L) c through the cached spectral decomposition of L.
    /// s is a 1x1 node (s >= 0), c a column vector; eig must outlive the tape.
    Var matexp_apply(const SymmetricEigen* eig, Var s, Var c) {
        const auto& cv = nodes_[c].value;
        const int n = static_cast<int>(eig->values.size());
        if (!nodes_[s].value.is_scalar() || cv.cols != 1 || cv.rows != n)
            throw DimensionMismatch("matexp_apply: shape mismatch");
        Tensor<S> out = spectral_apply(eig, nodes_[s].value[0], cv);
        return push(std::move(out), [eig, s, c](Tape& t) {
            const auto& g = t.nodes_[t.cursor_].adjoint;
            const auto& y = t.nodes_[t.cursor_].value;
            const S sval = t.nodes_[s].value[0];
            if (t.wants_grad(c)) {
                // exp(-sL) is symmetric, so the pullback reuses the same map.
                Tensor<S> back = spectral_apply(eig, sval, g);
                auto& gc = t.touch(c);
                for (int i = 0; i < gc.rows; ++i) gc[i] += back[i];
            }
            if (t.wants_grad(s)) {
                // d/ds exp(-sL) c = -L y
                S acc(0.0);
                const int n2 = static_cast<int>(eig->matrix.rows());
                for (int i = 0; i < n2; ++i) {
                    S ly(0.0);
                    for (int k = 0; k < n2; ++k) {
                        const double lik = eig->matrix(i, k);
                        if (lik != 0.0) ly += y[k] * lik;
                    }
                    acc += g[i] * ly;
                }
                t.touch(s)[0] += -acc;
            }
        });
    }

    // ---- reverse pass ------------------------------------------------------

    /// Runs the reverse sweep from a scalar root; adjoints of every node that
    /// influences the root are accumulated and can be read via adjoint().
    void backward(Var root) {
        if (!nodes_[root].value.is_scalar())
            throw DimensionMismatch("backward: root must be scalar");
        for (auto& n : nodes_) {
            n.adjoint = Tensor<S>(n.value.rows, n.value.cols);
            n.touched = false;
        }
        nodes_[root].adjoint[0] = S(1.0);
        nodes_[root].touched = true;
        for (cursor_ = root; cursor_ >= 0; --cursor_) {
            auto& n = nodes_[cursor_];
            if (!n.touched || !n.pull) continue;
            n.pull(*this);
        }
    }

private:
    struct Node {
        Tensor<S> value;
        Tensor<S> adjoint;
        std::function<void(Tape&)> pull;
        bool touched = false;
    };

    std::vector<Node> nodes_;
    int cursor_ = -1;

    Var push(Tensor<S> value, std::function<void(Tape&)> pull) {
        nodes_.push_back(Node{std::move(value), {}, std::move(pull), false});
        return static_cast<Var>(nodes_.size() - 1);
    }

    // Leaves get adjoints too (they are what callers read); interior nodes
    // whose adjoint never became nonzero are skipped in the sweep.
    bool wants_grad(Var) const { return true; }

    Tensor<S>& touch(Var v) {
        nodes_[v].touched = true;
        return nodes_[v].adjoint;
    }

    template <class F>
    void accumulate(Var v, F&& per_element) {
        auto& g = touch(v);
        for (int i = 0; i < g.size(); ++i) g[i] += per_element(i);
    }

    void check_same_shape(Var a, Var b, const char* op) const {
        const auto& av = nodes_[a].value;
        const auto& bv = nodes_[b].value;
        if (av.rows != bv.rows || av.cols != bv.cols)
            throw DimensionMismatch(std::string(op) + ": operand shapes differ");
    }

    static S apply_act(S x, Activation act) {
        using std::exp;
        using std::tanh;
        switch (act) {
            case Activation::Linear: return x;
            case Activation::Relu: return value_of(x) > 0.0 ? x : S(0.0);
            case Activation::Tanh: return tanh(x);
            case Activation::Sigmoid: return S(1.0) / (S(1.0) + exp(-x));
            case Activation::Swish: return x / (S(1.0) + exp(-x));
        }
        return x;
    }

    static S act_deriv(S x, Activation act) {
        using std::exp;
        using std::tanh;
        switch (act) {
            case Activation::Linear: return S(1.0);
            case Activation::Relu: return value_of(x) > 0.0 ? S(1.0) : S(0.0);
            case Activation::Tanh: {
                S t = tanh(x);
                return S(1.0) - t * t;
            }
            case Activation::Sigmoid: {
                S s = S(1.0) / (S(1.0) + exp(-x));
                return s * (S(1.0) - s);
            }
            case Activation::Swish: {
                S s = S(1.0) / (S(1.0) + exp(-x));
                return s + x * s * (S(1.0) - s);
            }
        }
        return S(1.0);
    }

    static Tensor<S> spectral_apply(const SymmetricEigen* eig, S s, const Tensor<S>& c) {
        using std::exp;
        const int n = c.rows;
        Tensor<S> coeff(n, 1);
        for (int i = 0; i < n; ++i) {
            S acc(0.0);
            for (int k = 0; k < n; ++k) acc += c[k] * eig->vectors(k, i);
            coeff[i] = acc * exp(-(s * eig->values[i]));
        }
        Tensor<S> out(n, 1);
        for (int i = 0; i < n; ++i) {
            S acc(0.0);
            for (int k = 0; k < n; ++k) acc += coeff[k] * eig->vectors(i, k);
            out[i] = acc;
        }
        return out;
    }
};

} // namespace graphuq

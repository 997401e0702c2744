#pragma once

#include <Eigen/Dense>

#include "graphuq/tape.hpp"

namespace graphuq {

/// Drivers for scalar-valued functionals of a flat parameter vector.
///
/// A functional F is anything callable as
///     template <class S> Tape<S>::Var F(Tape<S>& tape, typename Tape<S>::Var w);
/// returning a 1x1 node (generic lambdas with auto& tape work). The same
/// functional runs with double scalars for gradients and with Dual scalars for
/// Hessian-vector products.
namespace ad {

template <class F>
double eval(F&& f, const Eigen::VectorXd& w) {
    Tape<double> tape;
    auto win = tape.input(w);
    auto root = f(tape, win);
    return tape.val(root)[0];
}

template <class F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& w) {
    Tape<double> tape;
    auto win = tape.input(w);
    auto root = f(tape, win);
    if (!std::isfinite(tape.val(root)[0]))
        throw NonFiniteValue("gradient: function value is not finite");
    tape.backward(root);
    const auto& g = tape.adjoint(win);
    if (!g.all_finite()) throw NonFiniteValue("gradient: non-finite partial derivative");
    return to_vector(g);
}

template <class F>
std::pair<double, Eigen::VectorXd> value_and_gradient(F&& f, const Eigen::VectorXd& w) {
    Tape<double> tape;
    auto win = tape.input(w);
    auto root = f(tape, win);
    double v = tape.val(root)[0];
    if (!std::isfinite(v)) throw NonFiniteValue("gradient: function value is not finite");
    tape.backward(root);
    const auto& g = tape.adjoint(win);
    if (!g.all_finite()) throw NonFiniteValue("gradient: non-finite partial derivative");
    return {v, to_vector(g)};
}

/// (d^2 f / dw^2) v by seeding the tangent channel with v and reading the
/// tangent of the reverse-pass adjoints (forward-over-reverse).
template <class F>
Eigen::VectorXd hessian_vector_product(F&& f, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
    if (w.size() != v.size()) throw DimensionMismatch("hvp: direction length mismatch");
    Tape<Dual> tape;
    Tensor<Dual> seed(static_cast<int>(w.size()), 1);
    for (int i = 0; i < seed.rows; ++i) seed[i] = Dual{w[i], v[i]};
    auto win = tape.input(std::move(seed));
    auto root = f(tape, win);
    if (!finite(tape.val(root)[0]))
        throw NonFiniteValue("hvp: function value is not finite");
    tape.backward(root);
    const auto& g = tape.adjoint(win);
    if (!g.all_finite()) throw NonFiniteValue("hvp: non-finite second derivative");
    Eigen::VectorXd out(w.size());
    for (int i = 0; i < g.rows; ++i) out[i] = g[i].d;
    return out;
}

} // namespace ad
} // namespace graphuq

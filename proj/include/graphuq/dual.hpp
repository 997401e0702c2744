#pragma once

#include <cmath>

namespace graphuq {

/// First-order dual number: value plus directional tangent. Running the tape
/// with Dual scalars turns a reverse pass into forward-over-reverse, which is
/// how Hessian-vector products are obtained.
struct Dual {
    double v = 0.0;
    double d = 0.0;

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double tangent) : v(value), d(tangent) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
};

inline Dual operator+(Dual a, const Dual& b) { a += b; return a; }
inline Dual operator-(Dual a, const Dual& b) { a -= b; return a; }
inline Dual operator*(Dual a, const Dual& b) { a *= b; return a; }
inline Dual operator/(const Dual& a, const Dual& b) {
    double inv = 1.0 / b.v;
    return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
}
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }

inline Dual exp(const Dual& a) {
    double e = std::exp(a.v);
    return {e, e * a.d};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(const Dual& a) {
    double s = std::sqrt(a.v);
    return {s, 0.5 * a.d / s};
}
inline Dual tanh(const Dual& a) {
    double t = std::tanh(a.v);
    return {t, (1.0 - t * t) * a.d};
}

/// Extracts the primal value of a scalar (identity for double).
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const Dual& x) { return std::isfinite(x.v) && std::isfinite(x.d); }

} // namespace graphuq

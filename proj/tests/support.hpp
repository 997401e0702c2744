#pragma once

// Shared oracles for the test suites. Everything here is independent of the
// library's differentiation and sampling paths: plain finite differences,
// quadrature, and closed-form Gaussian algebra.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace oracle {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

/// Central finite-difference gradient.
inline Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& w, double h = 1e-5) {
    Eigen::VectorXd g(w.size());
    Eigen::VectorXd x = w;
    for (int i = 0; i < w.size(); ++i) {
        x[i] = w[i] + h;
        double fp = f(x);
        x[i] = w[i] - h;
        double fm = f(x);
        x[i] = w[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Explicit Hessian by nested central differences.
inline Eigen::MatrixXd fd_hessian(const ScalarFn& f, const Eigen::VectorXd& w, double h = 1e-4) {
    const int n = static_cast<int>(w.size());
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd x = w;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            x = w;
            x[i] += h; x[j] += h; double fpp = f(x);
            x = w;
            x[i] += h; x[j] -= h; double fpm = f(x);
            x = w;
            x[i] -= h; x[j] += h; double fmp = f(x);
            x = w;
            x[i] -= h; x[j] -= h; double fmm = f(x);
            H(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    }
    return H;
}

inline double rel_error(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double max_rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    double scale = std::max(1e-12, want.cwiseAbs().maxCoeff());
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

/// Composite Simpson rule on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Closed-form posterior for y = J w + noise with N(0, sigma0^2 I) prior and
/// N(0, sigma_eps^2) i.i.d. noise.
struct ConjugateGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    static ConjugateGaussian from(const Eigen::MatrixXd& J, const Eigen::VectorXd& y,
                                  double sigma0, double sigma_eps) {
        const int d = static_cast<int>(J.cols());
        Eigen::MatrixXd precision =
            Eigen::MatrixXd::Identity(d, d) / (sigma0 * sigma0) + J.transpose() * J / (sigma_eps * sigma_eps);
        Eigen::MatrixXd cov = precision.inverse();
        return {cov * J.transpose() * y / (sigma_eps * sigma_eps), cov};
    }
};

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace oracle

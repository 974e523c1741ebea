#pragma once

// Chebyshev series with complex coefficients: Clenshaw evaluation, derivative
// series, and root finding through the colleague-matrix eigenproblem. High
// degree fits (up to ~44 here) are numerically hopeless in the monomial
// basis, so the rational S-matrix model stores its polynomials this way.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marchenko/util.hpp"

namespace marchenko {

struct ChebSeries {
    std::vector<Complex> c;  // p(u) = sum c_k T_k(u)

    int degree() const { return static_cast<int>(c.size()) - 1; }

    Complex eval(Complex u) const {
        if (c.empty()) return 0.0;
        Complex b1 = 0.0, b2 = 0.0;
        for (std::size_t k = c.size(); k-- > 1;) {
            const Complex b0 = c[k] + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return c[0] + u * b1 - b2;
    }

    ChebSeries derivative() const {
        const int n = degree();
        if (n <= 0) return ChebSeries{{Complex(0.0, 0.0)}};
        std::vector<Complex> d(n, 0.0);
        Complex dkp1 = 0.0, dkp2 = 0.0;  // d_{k+1}, d_{k+2} while sweeping down
        for (int k = n - 1; k >= 0; --k) {
            const Complex dk = dkp2 + 2.0 * double(k + 1) * c[k + 1];
            d[k] = dk;
            dkp2 = dkp1;
            dkp1 = dk;
        }
        d[0] *= 0.5;
        return ChebSeries{std::move(d)};
    }

    void trim(double rel = 1e-14) {
        double scale = 0.0;
        for (const auto& v : c) scale = std::max(scale, std::abs(v));
        while (c.size() > 1 && std::abs(c.back()) <= rel * scale) c.pop_back();
    }
};

/// All roots of a Chebyshev series via the colleague matrix, with one Newton
/// polish on the Clenshaw-evaluated series. Throws if the polished residual
/// stays above tol * |coefficients|.
inline std::vector<Complex> cheb_roots(ChebSeries p, double residual_tol = 1e-8) {
    p.trim();
    const int n = p.degree();
    if (n <= 0) return {};
    if (n == 1) return {-p.c[0] / p.c[1]};
    double scale = 0.0;
    for (const auto& v : p.c) scale = std::max(scale, std::abs(v));
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    A(0, 1) = 1.0;
    for (int j = 1; j < n - 1; ++j) {
        A(j, j - 1) = 0.5;
        A(j, j + 1) = 0.5;
    }
    for (int j = 0; j < n; ++j) A(n - 1, j) -= p.c[j] / (2.0 * p.c[n]);
    A(n - 1, n - 2) += 0.5;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("cheb_roots: eigensolver failed");
    const ChebSeries dp = p.derivative();
    std::vector<Complex> roots;
    roots.reserve(n);
    for (int j = 0; j < n; ++j) {
        Complex u = es.eigenvalues()(j);
        for (int it = 0; it < 2; ++it) {
            const Complex f = p.eval(u);
            const Complex df = dp.eval(u);
            if (std::abs(df) == 0.0) break;
            u -= f / df;
        }
        if (std::abs(p.eval(u)) > residual_tol * scale)
            throw std::runtime_error("cheb_roots: root failed to converge");
        roots.push_back(u);
    }
    return roots;
}

/// T_k(u) for k = 0..n at a real point (used to build collocation matrices).
inline std::vector<double> cheb_basis_row(double u, int n) {
    std::vector<double> t(n + 1);
    t[0] = 1.0;
    if (n >= 1) t[1] = u;
    for (int k = 2; k <= n; ++k) t[k] = 2.0 * u * t[k - 1] - t[k - 2];
    return t;
}

}  // namespace marchenko

#pragma once

// Interpolation helpers: a quadratic (second-order) B-spline interpolant used
// for S-matrix deviation tables, and a natural cubic spline used to evaluate
// tabulated potentials inside ODE integrators.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marchenko/util.hpp"

namespace marchenko {

/// Quadratic B-spline through (x_i, y_i). Interior knots sit at data-interval
/// midpoints with the first and last interval left knot-free, open ends.
/// Evaluation outside the data range throws.
class QuadraticSpline {
public:
    QuadraticSpline() = default;

    QuadraticSpline(const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size() || x.size() < 3)
            throw std::invalid_argument("QuadraticSpline: need >= 3 points");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1])) throw std::invalid_argument("QuadraticSpline: x not ascending");
        const int m = static_cast<int>(x.size());
        knots_.assign(3, x.front());
        for (int j = 1; j <= m - 3; ++j) knots_.push_back(0.5 * (x[j] + x[j + 1]));
        knots_.insert(knots_.end(), 3, x.back());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            const int span = find_span(x[i]);
            const auto b = basis_funs(span, x[i]);
            for (int j = 0; j <= 2; ++j) A(i, span - 2 + j) = b[j];
        }
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) rhs(i) = y[i];
        Eigen::VectorXd c = A.partialPivLu().solve(rhs);
        coeff_.assign(c.data(), c.data() + m);
        xmin_ = x.front();
        xmax_ = x.back();
    }

    double operator()(double x) const {
        if (x < xmin_ - 1e-12 || x > xmax_ + 1e-12)
            throw std::domain_error("QuadraticSpline: evaluation outside data range");
        x = std::min(std::max(x, xmin_), xmax_);
        const int span = find_span(x);
        const auto b = basis_funs(span, x);
        double v = 0.0;
        for (int j = 0; j <= 2; ++j) v += b[j] * coeff_[span - 2 + j];
        return v;
    }

    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }

private:
    int find_span(double x) const {
        const int n = static_cast<int>(knots_.size()) - 3;  // basis count
        if (x >= knots_[n]) return n - 1;
        int lo = 2, hi = n;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (x < knots_[mid]) ? hi = mid : lo = mid;
        }
        return lo;
    }

    std::array<double, 3> basis_funs(int span, double x) const {
        // Cox-de Boor, degree 2: the three B-splines alive on [t_span, t_span+1).
        std::array<double, 3> N{1.0, 0.0, 0.0};
        std::array<double, 2> left{}, right{};
        for (int j = 1; j <= 2; ++j) {
            left[j - 1] = x - knots_[span + 1 - j];
            right[j - 1] = knots_[span + j] - x;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                const double tmp = N[r] / (right[r] + left[j - r - 1]);
                N[r] = saved + right[r] * tmp;
                saved = left[j - r - 1] * tmp;
            }
            N[j] = saved;
        }
        return N;  // N[j] multiplies coefficient (span - 2 + j)
    }

    std::vector<double> knots_;
    std::vector<double> coeff_;
    double xmin_ = 0.0, xmax_ = 0.0;
};

/// Quadratic spline for complex-valued tables (real and imaginary parts fit
/// independently).
class QuadraticSplineC {
public:
    QuadraticSplineC() = default;
    QuadraticSplineC(const std::vector<double>& x, const std::vector<Complex>& y) {
        std::vector<double> re(y.size()), im(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            re[i] = y[i].real();
            im[i] = y[i].imag();
        }
        re_ = QuadraticSpline(x, re);
        im_ = QuadraticSpline(x, im);
    }
    Complex operator()(double x) const { return {re_(x), im_(x)}; }

private:
    QuadraticSpline re_, im_;
};

/// Natural cubic spline; evaluation clamps to the end values outside the grid.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const int n = static_cast<int>(x_.size());
        if (n < 2 || y_.size() != x_.size()) throw std::invalid_argument("CubicSpline: bad input");
        m_.assign(n, 0.0);
        if (n == 2) return;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        A(0, 0) = 1.0;
        A(n - 1, n - 1) = 1.0;
        for (int i = 1; i < n - 1; ++i) {
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            A(i, i - 1) = h0;
            A(i, i) = 2.0 * (h0 + h1);
            A(i, i + 1) = h1;
            rhs(i) = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        Eigen::VectorXd m = A.partialPivLu().solve(rhs);
        for (int i = 0; i < n; ++i) m_[i] = m(i);
    }

    double operator()(double x) const {
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const int i = static_cast<int>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i], t = x - x_[i];
        return y_[i] + t * ((y_[i + 1] - y_[i]) / h - h / 6.0 * (2.0 * m_[i] + m_[i + 1])) +
               t * t * 0.5 * m_[i] + t * t * t * (m_[i + 1] - m_[i]) / (6.0 * h);
    }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace marchenko

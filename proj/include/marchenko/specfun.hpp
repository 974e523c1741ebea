#pragma once

// Riccati-Hankel and Riccati-Bessel functions of integer order for complex
// argument, in the convention h_0^{+-}(z) = exp(+-iz), so that
//   J = (H+ - H-)/2i,  N = -(H+ + H-)/2,  h^{+-} = -N_hat +- i J_hat.
// For integer l these are finite exponential-polynomial expressions:
//   h_l^+(z) = exp(iz) * c_l(1/z),  c_0 = 1, c_1(u) = u - i,
//   c_{l+1}(u) = (2l+1) u c_l(u) - c_{l-1}(u),
// and h_l^-(z) carries the conjugated coefficients with exp(-iz).
// J_hat switches to its power series for small |z| to avoid cancellation.

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marchenko/util.hpp"

namespace marchenko {

inline constexpr int max_riccati_order = 10;

struct RiccatiValue {
    Complex value;
    Complex derivative;  // d/dz
};

namespace detail {

// Coefficients of c_l(u) (ascending powers of u = 1/z) for h_l^+.
inline const std::vector<std::vector<Complex>>& hankel_poly_table() {
    static const std::vector<std::vector<Complex>> table = [] {
        std::vector<std::vector<Complex>> t(max_riccati_order + 1);
        t[0] = {Complex(1.0, 0.0)};
        t[1] = {Complex(0.0, -1.0), Complex(1.0, 0.0)};
        for (int l = 1; l < max_riccati_order; ++l) {
            std::vector<Complex> next(l + 2, Complex(0.0, 0.0));
            for (std::size_t j = 0; j < t[l].size(); ++j) next[j + 1] += double(2 * l + 1) * t[l][j];
            for (std::size_t j = 0; j < t[l - 1].size(); ++j) next[j] -= t[l - 1][j];
            t[l + 1] = std::move(next);
        }
        return t;
    }();
    return table;
}

inline Complex poly_eval(const std::vector<Complex>& c, Complex u, bool conj_coeffs) {
    Complex acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * u + (conj_coeffs ? std::conj(c[j]) : c[j]);
    return acc;
}

inline Complex poly_eval_deriv(const std::vector<Complex>& c, Complex u, bool conj_coeffs) {
    Complex acc = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) {
        const Complex cj = conj_coeffs ? std::conj(c[j]) : c[j];
        acc = acc * u + double(j) * cj;
    }
    return acc;
}

inline double double_factorial(int n) {
    double v = 1.0;
    for (int k = n; k > 1; k -= 2) v *= k;
    return v;
}

}  // namespace detail

/// h_l^{sign}(z) with its z-derivative. sign = +1 or -1.
inline RiccatiValue riccati_hankel(int l, int sign, Complex z) {
    if (l < 0 || l > max_riccati_order) throw std::invalid_argument("riccati_hankel: order out of range");
    if (sign != 1 && sign != -1) throw std::invalid_argument("riccati_hankel: sign must be +-1");
    if (z == Complex(0.0, 0.0)) throw std::domain_error("riccati_hankel: z = 0");
    const bool minus = (sign == -1);
    const auto& c = detail::hankel_poly_table()[l];
    const Complex u = 1.0 / z;
    const Complex p = detail::poly_eval(c, u, minus);
    const Complex dp = detail::poly_eval_deriv(c, u, minus);
    const Complex phase = std::exp(Complex(0.0, minus ? -1.0 : 1.0) * z);
    RiccatiValue r;
    r.value = phase * p;
    r.derivative = phase * (Complex(0.0, minus ? -1.0 : 1.0) * p - dp * u * u);
    return r;
}

/// Riccati-Bessel J (kind 'J', regular) or N (kind 'N', irregular).
inline RiccatiValue riccati_bessel(int l, char kind, Complex z) {
    if (l < 0 || l > max_riccati_order) throw std::invalid_argument("riccati_bessel: order out of range");
    if (kind == 'J') {
        if (std::abs(z) < 0.5) {
            // power series: J_l(z) = z^{l+1} sum_k (-z^2/2)^k / (k! (2l+2k+1)!!)
            Complex sum = 0.0, dsum = 0.0;
            Complex zpow = 1.0;  // z^{2k}
            double fact = 1.0;
            for (int k = 0; k <= 24; ++k) {
                const double denom = fact * detail::double_factorial(2 * l + 2 * k + 1);
                const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
                const double coef = sgn / (denom * std::pow(2.0, k));
                sum += coef * zpow;
                dsum += coef * double(l + 1 + 2 * k) * zpow;
                zpow *= z * z;
                fact *= (k + 1);
                if (std::abs(coef * zpow) < 1e-20 * std::abs(sum) && k > 2) break;
            }
            const Complex zl = std::pow(z, l);
            return {zl * z * sum, zl * dsum};
        }
        const auto hp = riccati_hankel(l, +1, z);
        const auto hm = riccati_hankel(l, -1, z);
        return {(hp.value - hm.value) / (2.0 * I), (hp.derivative - hm.derivative) / (2.0 * I)};
    }
    if (kind == 'N') {
        if (z == Complex(0.0, 0.0)) throw std::domain_error("riccati_bessel: z = 0 for kind N");
        const auto hp = riccati_hankel(l, +1, z);
        const auto hm = riccati_hankel(l, -1, z);
        return {-0.5 * (hp.value + hm.value), -0.5 * (hp.derivative + hm.derivative)};
    }
    throw std::invalid_argument("riccati_bessel: kind must be 'J' or 'N'");
}

/// Second derivative from the free radial equation h'' = (l(l+1)/z^2 - 1) h.
inline Complex riccati_second_derivative(int l, Complex z, Complex value) {
    return (double(l * (l + 1)) / (z * z) - 1.0) * value;
}

}  // namespace marchenko

#pragma once

// Forward solver for the coupled radial equation
//   Psi'' = ( L(L+1)/r^2 + V(r) - Q^2 ) Psi,
// with the full n x n S-matrix taken from the asymptotic matching
//   Psi -> (i/2) ( H^-(Qr) C - H^+(Qr) Q^{-1/2} S Q^{1/2} C ),
// plus an independent variable-phase route that integrates the reaction
// matrix ODE in the potential cut-off radius.
//
// The matching route uses a fixed-step matrix Numerov recurrence; closed
// channels grow like exp(+|q_a| r), which is held in check by periodic QR
// re-orthonormalization of the solution columns (the right factor is
// absorbed into the matching constant C, so S is unaffected). Below the
// top threshold the closed-channel *rows* of the matched S lose accuracy
// at the scale eps * exp(2 |q_a| r_match); rows coupling to open channels
// stay well conditioned. ScatteringSolution::closed_row_scale records it.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "marchenko/kinematics.hpp"
#include "marchenko/potential.hpp"
#include "marchenko/smatrix_model.hpp"
#include "marchenko/specfun.hpp"
#include "marchenko/util.hpp"

namespace marchenko {

struct SolverOptions {
    double match_radius = -1.0;          // default: potential range + 2 fm
    double step_limit = 0.005;           // fm
    double wavelength_fraction = 0.001;  // steps per 2 pi / q_max
    double r0 = 1e-4;                    // integration start
    double qr_interval = 0.5;            // fm between re-orthonormalizations
    double qr_im_trigger = 1.0;          // enable QR when max Im q_a exceeds this
    double step_scale = 1.0;             // < 1 refines the grid (convergence checks)
    unsigned threads = 0;                // scan parallelism (0 = hardware)
};

struct ScatteringSolution {
    double q1 = 0.0;
    ChannelMomenta momenta;
    Eigen::MatrixXcd S;
    std::optional<Eigen::MatrixXcd> T;
    double cond = 0.0;              // condition estimate of the matching constant C
    double closed_row_scale = 0.0;  // eps * e^{2 max|Im q| r_m}: noise floor of closed rows
};

namespace detail {

inline void numerov_u(const Potential& pot, const ChannelSet& ch, const ChannelMomenta& cm,
                      double r, Eigen::MatrixXd& u, Eigen::MatrixXd& vtmp) {
    pot.eval(r, vtmp);
    u = vtmp;
    for (int a = 0; a < ch.size(); ++a) {
        const double la = ch.l[a];
        const double q2 = (cm.q[a].imag() == 0.0) ? sq(cm.q[a].real()) : -sq(cm.q[a].imag());
        u(a, a) += la * (la + 1.0) / (r * r) - q2;
    }
}

}  // namespace detail

/// Full n x n S-matrix by regular-solution integration and linear matching.
inline ScatteringSolution solve_smatrix(const Potential& pot, const ChannelSet& ch, double q1,
                                        const SolverOptions& opts = {}) {
    if (q1 <= 0.0) throw std::invalid_argument("solve_smatrix: q1 must be positive");
    const int n = ch.size();
    ScatteringSolution sol;
    sol.q1 = q1;
    sol.momenta = momenta_from_q1(q1, ch);
    double qmax = 0.0, im_max = 0.0;
    for (const auto& q : sol.momenta.q) {
        if (std::abs(q) < 1e-9) throw std::domain_error("solve_smatrix: momentum at a threshold");
        qmax = std::max(qmax, std::abs(q));
        im_max = std::max(im_max, q.imag());
    }
    // local momentum scale includes the potential depth
    Eigen::MatrixXd v0(n, n);
    pot.eval(0.0, v0);
    qmax = std::max(qmax, std::sqrt(v0.cwiseAbs().maxCoeff()));

    const double r_m = (opts.match_radius > 0.0) ? opts.match_radius : pot.range + 2.0;
    const double h_target =
        opts.step_scale * std::min(opts.wavelength_fraction * 2.0 * pi / qmax, opts.step_limit);
    const long nsteps = std::max(8L, static_cast<long>(std::ceil((r_m - opts.r0) / h_target)));
    const double h = (r_m - opts.r0) / static_cast<double>(nsteps);
    const double c = h * h / 12.0;

    Eigen::MatrixXd y_prev(n, n), y_curr(n, n), y_next(n, n);
    Eigen::MatrixXd u_prev(n, n), u_curr(n, n), u_next(n, n), vtmp(n, n), rhs(n, n);
    // regular seed psi_ab = delta_ab r^{l_a + 1} with one Taylor correction
    y_prev.setZero();
    y_curr.setZero();
    detail::numerov_u(pot, ch, sol.momenta, opts.r0, u_prev, vtmp);
    for (int a = 0; a < n; ++a) y_prev(a, a) = std::pow(opts.r0, ch.l[a] + 1);
    const double r1 = opts.r0 + h;
    for (int a = 0; a < n; ++a) y_curr(a, a) = std::pow(r1, ch.l[a] + 1);
    y_curr += 0.5 * h * h * (u_prev * y_prev);
    detail::numerov_u(pot, ch, sol.momenta, r1, u_curr, vtmp);

    const bool stabilize = im_max > opts.qr_im_trigger;
    const long qr_every =
        stabilize ? std::max(1L, static_cast<long>(opts.qr_interval / h)) : nsteps + 3;

    // integrate two steps past r_m for the derivative stencil
    std::vector<Eigen::MatrixXd> tail;
    tail.reserve(5);
    for (long k = 1; k <= nsteps + 2; ++k) {
        const double r_next = opts.r0 + (k + 1) * h;
        detail::numerov_u(pot, ch, sol.momenta, r_next, u_next, vtmp);
        rhs.noalias() = (2.0 * Eigen::MatrixXd::Identity(n, n) + 10.0 * c * u_curr) * y_curr;
        rhs.noalias() -= (Eigen::MatrixXd::Identity(n, n) - c * u_prev) * y_prev;
        y_next = (Eigen::MatrixXd::Identity(n, n) - c * u_next).partialPivLu().solve(rhs);
        y_prev.swap(y_curr);
        y_curr.swap(y_next);
        u_prev.swap(u_curr);
        u_curr.swap(u_next);
        if (k % qr_every == 0 && k < nsteps - 2) {
            Eigen::MatrixXd stack(2 * n, n);
            stack.topRows(n) = y_curr;
            stack.bottomRows(n) = y_prev;
            const Eigen::HouseholderQR<Eigen::MatrixXd> qr(stack);
            const Eigen::MatrixXd thinq =
                qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, n);
            y_curr = thinq.topRows(n);
            y_prev = thinq.bottomRows(n);
        }
        if (k >= nsteps - 2) tail.push_back(y_curr);
    }
    // tail holds Psi at r_m - 2h ... r_m + 2h
    const Eigen::MatrixXd& psi = tail[2];
    const Eigen::MatrixXd dpsi =
        (-tail[4] + 8.0 * tail[3] - 8.0 * tail[1] + tail[0]) / (12.0 * h);

    // per-channel 2x2 matching: psi = (i/2)(h- C - h+ D), D = Q^{-1/2} S Q^{1/2} C
    Eigen::MatrixXcd C(n, n), D(n, n);
    for (int a = 0; a < n; ++a) {
        const Complex qa = sol.momenta.q[a];
        const auto hp = riccati_hankel(ch.l[a], +1, qa * r_m);
        const auto hm = riccati_hankel(ch.l[a], -1, qa * r_m);
        const Complex a11 = hm.value, a12 = -hp.value;
        const Complex a21 = qa * hm.derivative, a22 = -qa * hp.derivative;
        const Complex det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-14)
            throw std::runtime_error("solve_smatrix: singular matching pair");
        for (int b = 0; b < n; ++b) {
            const Complex b1 = -2.0 * I * psi(a, b);
            const Complex b2 = -2.0 * I * dpsi(a, b);
            C(a, b) = (b1 * a22 - a12 * b2) / det;
            D(a, b) = (a11 * b2 - b1 * a21) / det;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C);
    const double smin = svd.singularValues()(n - 1), smax = svd.singularValues()(0);
    sol.cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    if (smin <= 1e-13 * smax)
        throw std::runtime_error("solve_smatrix: matching system singular, cond ~ " +
                                 std::to_string(sol.cond));
    Eigen::MatrixXcd q_half(n, n), q_mhalf(n, n);
    q_half.setZero();
    q_mhalf.setZero();
    for (int a = 0; a < n; ++a) {
        const Complex root = std::sqrt(sol.momenta.q[a]);
        q_half(a, a) = root;
        q_mhalf(a, a) = 1.0 / root;
    }
    sol.S = q_half * D * C.partialPivLu().solve(q_mhalf);
    sol.closed_row_scale = 2.2e-16 * std::exp(2.0 * im_max * r_m);
    return sol;
}

namespace detail {

/// Dormand-Prince 5(4) on a complex matrix ODE.
template <typename Rhs>
Eigen::MatrixXcd rk45(const Rhs& f, Eigen::MatrixXcd y, double t, double t_end, double rtol,
                      double atol) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    double hstep = std::min(1e-3, (t_end - t) / 10.0);
    long guard = 0;
    while (t < t_end) {
        if (++guard > 2000000) throw std::runtime_error("rk45: step count exceeded");
        hstep = std::min(hstep, t_end - t);
        const Eigen::MatrixXcd k1 = f(t, y);
        const Eigen::MatrixXcd k2 = f(t + c2 * hstep, y + hstep * (a21 * k1));
        const Eigen::MatrixXcd k3 = f(t + c3 * hstep, y + hstep * (a31 * k1 + a32 * k2));
        const Eigen::MatrixXcd k4 = f(t + c4 * hstep, y + hstep * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::MatrixXcd k5 =
            f(t + c5 * hstep, y + hstep * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::MatrixXcd k6 =
            f(t + hstep, y + hstep * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::MatrixXcd y5 =
            y + hstep * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::MatrixXcd k7 = f(t + hstep, y5);
        const Eigen::MatrixXcd err =
            hstep * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = atol + rtol * std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
        const double enorm = err.cwiseAbs().maxCoeff() / scale;
        if (enorm <= 1.0) {
            t += hstep;
            y = y5;
        }
        const double factor = (enorm > 0.0) ? 0.9 * std::pow(enorm, -0.2) : 5.0;
        hstep *= std::clamp(factor, 0.1, 5.0);
        if (hstep < 1e-14 * std::max(1.0, std::abs(t_end)))
            throw std::runtime_error("rk45: step underflow (stiff failure)");
    }
    return y;
}

}  // namespace detail

/// Reaction matrix by the variable phase route:
///   dT/dr = -2 (J - T N) Q^{-1/2} V Q^{-1/2} (J - N T),  T(0) = 0,
/// then S = (1 - iT)^{-1} (1 + iT).
inline ScatteringSolution solve_tmatrix_vpa(const Potential& pot, const ChannelSet& ch, double q1,
                                            double rtol = 1e-9) {
    if (q1 <= 0.0) throw std::invalid_argument("solve_tmatrix_vpa: q1 must be positive");
    const int n = ch.size();
    ScatteringSolution sol;
    sol.q1 = q1;
    sol.momenta = momenta_from_q1(q1, ch);
    for (const auto& q : sol.momenta.q)
        if (std::abs(q) < 1e-9) throw std::domain_error("solve_tmatrix_vpa: momentum at a threshold");
    Eigen::MatrixXcd q_mhalf = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) q_mhalf(a, a) = 1.0 / std::sqrt(sol.momenta.q[a]);

    auto rhs = [&](double r, const Eigen::MatrixXcd& T) -> Eigen::MatrixXcd {
        Eigen::MatrixXd v(n, n);
        pot.eval(r, v);
        Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n), N = Eigen::MatrixXcd::Zero(n, n);
        for (int a = 0; a < n; ++a) {
            const Complex z = sol.momenta.q[a] * r;
            J(a, a) = riccati_bessel(ch.l[a], 'J', z).value;
            N(a, a) = riccati_bessel(ch.l[a], 'N', z).value;
        }
        const Eigen::MatrixXcd w = q_mhalf * v * q_mhalf;
        return -2.0 * (J - T * N) * w * (J - N * T);
    };
    Eigen::MatrixXcd T0 = Eigen::MatrixXcd::Zero(n, n);
    const Eigen::MatrixXcd T = detail::rk45(rhs, T0, 1e-6, pot.range, rtol, 1e-12);
    sol.T = T;
    const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(one - I * T);
    if (!lu.isInvertible()) throw std::runtime_error("solve_tmatrix_vpa: (1 - iT) singular");
    sol.S = lu.solve(one + I * T);
    return sol;
}

/// Per-point solve over a momentum grid; each point is independent.
inline SMatrixSamples smatrix_scan(const Potential& pot, const ChannelSet& ch,
                                   const std::vector<double>& q_grid,
                                   const SolverOptions& opts = {}) {
    SMatrixSamples out;
    out.channels = ch;
    out.q = q_grid;
    out.S.resize(q_grid.size());
    std::vector<std::string> failures(q_grid.size());
    parallel_for(
        q_grid.size(),
        [&](std::size_t j) {
            try {
                out.S[j] = solve_smatrix(pot, ch, q_grid[j], opts).S;
            } catch (const std::exception& e) {
                failures[j] = e.what();
            }
        },
        opts.threads);
    std::string msg;
    for (std::size_t j = 0; j < failures.size(); ++j)
        if (!failures[j].empty())
            msg += "  q[" + std::to_string(j) + "] = " + std::to_string(q_grid[j]) + ": " + failures[j] + "\n";
    if (!msg.empty()) throw std::runtime_error("smatrix_scan failures:\n" + msg);
    out.compute_threshold_index();
    return out;
}

}  // namespace marchenko

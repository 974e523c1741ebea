#pragma once

// Two-channel S-matrix algebra: the standard (delta1, delta2, eps)
// parametrization above the second threshold, the (delta1, gamma, phi)
// form below it, reconstruction of the closed-closed block from open-channel
// data, threshold power-law fits, and the S <-> T Cayley transforms.

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "marchenko/kinematics.hpp"
#include "marchenko/util.hpp"

namespace marchenko {

using Eigen::MatrixXcd;

struct SMatrixSamples {
    std::vector<double> q;       // ascending first-channel momenta
    std::vector<MatrixXcd> S;    // n x n per point
    ChannelSet channels;
    int threshold_index = 0;     // first index with M(q) > W_n-th (here W_2)

    int size() const { return static_cast<int>(q.size()); }
    int n() const { return channels.size(); }

    void compute_threshold_index() {
        threshold_index = size();
        if (channels.size() < 2) return;
        for (int j = 0; j < size(); ++j) {
            if (invariant_mass(q[j], channels) > channels.threshold(1)) {
                threshold_index = j;
                break;
            }
        }
    }

    /// max |S - S^T| and max ||S'S - I|| (above threshold) diagnostics
    double max_asymmetry() const {
        double worst = 0.0;
        for (const auto& s : S) worst = std::max(worst, (s - s.transpose()).cwiseAbs().maxCoeff());
        return worst;
    }
    double max_unitarity_defect() const {
        double worst = 0.0;
        for (int j = threshold_index; j < size(); ++j) {
            const MatrixXcd d = S[j].adjoint() * S[j] - MatrixXcd::Identity(n(), n());
            worst = std::max(worst, d.cwiseAbs().maxCoeff());
        }
        return worst;
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("SMatrixSamples: cannot open " + path);
        out << "# q";
        for (int a = 0; a < n(); ++a)
            for (int b = a; b < n(); ++b)
                out << ", Re S" << a + 1 << b + 1 << ", Im S" << a + 1 << b + 1;
        out << "\n" << std::setprecision(17);
        for (int j = 0; j < size(); ++j) {
            out << q[j];
            for (int a = 0; a < n(); ++a)
                for (int b = a; b < n(); ++b)
                    out << ", " << S[j](a, b).real() << ", " << S[j](a, b).imag();
            out << "\n";
        }
    }

    static SMatrixSamples read_csv(const std::string& path, ChannelSet channels) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("SMatrixSamples: cannot open " + path);
        SMatrixSamples out;
        out.channels = std::move(channels);
        const int nn = out.channels.size();
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            for (auto& c : line)
                if (c == ',') c = ' ';
            std::istringstream ss(line);
            double qv;
            if (!(ss >> qv)) continue;
            MatrixXcd s(nn, nn);
            for (int a = 0; a < nn; ++a)
                for (int b = a; b < nn; ++b) {
                    double re, im;
                    if (!(ss >> re >> im)) throw std::runtime_error("SMatrixSamples: short row");
                    s(a, b) = Complex(re, im);
                    s(b, a) = s(a, b);
                }
            out.q.push_back(qv);
            out.S.push_back(std::move(s));
        }
        out.compute_threshold_index();
        return out;
    }
};

/// Continuous unwrap of an angle series (nearest branch, anchored at the
/// highest index where the principal value is kept).
inline std::vector<double> unwrap_angles(std::vector<double> theta) {
    for (std::size_t j = theta.size(); j-- > 1;) {
        const double d = theta[j - 1] - theta[j];
        theta[j - 1] -= 2.0 * pi * std::round(d / (2.0 * pi));
    }
    return theta;
}

struct PhaseParamsSeries {
    std::vector<double> q, delta1, delta2, eps, residual;
};

struct BelowParamsSeries {
    std::vector<double> q, delta1, gamma, residual;
};

/// Parameters of S = [[e^{2i d1} cos2e, i e^{i(d1+d2)} sin2e],
///                    [ .. , e^{2i d2} cos2e]] from above-threshold samples.
/// Phases are unwrapped in q, anchored small at the top of the grid; the
/// residual reports per-point distance of S12 from the parametrized form.
inline PhaseParamsSeries params_above(const SMatrixSamples& s) {
    if (s.n() != 2) throw std::invalid_argument("params_above: two-channel only");
    PhaseParamsSeries p;
    std::vector<double> th1, th2;
    for (int j = s.threshold_index; j < s.size(); ++j) {
        p.q.push_back(s.q[j]);
        th1.push_back(std::arg(s.S[j](0, 0)));
        th2.push_back(std::arg(s.S[j](1, 1)));
    }
    if (p.q.empty()) throw std::invalid_argument("params_above: no points above threshold");
    th1 = unwrap_angles(th1);
    th2 = unwrap_angles(th2);
    for (std::size_t k = 0; k < p.q.size(); ++k) {
        const int j = s.threshold_index + static_cast<int>(k);
        const double d1 = 0.5 * th1[k], d2 = 0.5 * th2[k];
        const Complex u = s.S[j](0, 1) / (I * std::exp(I * (d1 + d2)));
        const double sin2e = u.real();
        const double eps = 0.5 * std::asin(std::clamp(sin2e, -1.0, 1.0));
        p.delta1.push_back(d1);
        p.delta2.push_back(d2);
        p.eps.push_back(eps);
        const Complex rebuilt = I * std::exp(I * (d1 + d2)) * std::sin(2.0 * eps);
        p.residual.push_back(std::abs(s.S[j](0, 1) - rebuilt) +
                             std::abs(std::abs(s.S[j](0, 0)) - std::cos(2.0 * eps)));
    }
    return p;
}

/// Below-threshold form of the two-channel S-matrix:
///   S11 = e^{2i d1}, S12 = i^{L2+3/2} e^{i d1} gamma,
///   S22 = S12^2 / (S11 + 1) + phi.
inline Eigen::Matrix2cd build_below(double delta1, double gamma, double phi, int L2) {
    const Complex s11 = std::exp(2.0 * I * delta1);
    if (std::abs(s11 + 1.0) < 1e-12)
        throw std::domain_error("build_below: delta1 = pi/2 (mod pi), reconstruction singular");
    const Complex phase = std::exp(I * (pi / 2.0) * (L2 + 1.5));
    const Complex s12 = phase * std::exp(I * delta1) * gamma;
    Eigen::Matrix2cd S;
    S(0, 0) = s11;
    S(0, 1) = S(1, 0) = s12;
    S(1, 1) = s12 * s12 / (s11 + 1.0) + phi;
    return S;
}

/// delta1 and gamma from below-threshold solver output. The residual is the
/// imaginary part gamma picks up if the data are not of the expected form.
inline BelowParamsSeries params_below(const SMatrixSamples& s) {
    if (s.n() != 2) throw std::invalid_argument("params_below: two-channel only");
    BelowParamsSeries p;
    std::vector<double> th1;
    for (int j = 0; j < s.threshold_index; ++j) {
        p.q.push_back(s.q[j]);
        th1.push_back(std::arg(s.S[j](0, 0)));
    }
    if (p.q.empty()) throw std::invalid_argument("params_below: no points below threshold");
    th1 = unwrap_angles(th1);
    const int L2 = s.channels.l[1];
    const Complex phase = std::exp(I * (pi / 2.0) * (L2 + 1.5));
    for (std::size_t k = 0; k < p.q.size(); ++k) {
        const int j = static_cast<int>(k);
        const double d1 = 0.5 * th1[k];
        const Complex g = s.S[j](0, 1) / (phase * std::exp(I * d1));
        p.delta1.push_back(d1);
        p.gamma.push_back(g.real());
        p.residual.push_back(std::abs(g.imag()) + std::abs(std::abs(s.S[j](0, 0)) - 1.0));
    }
    return p;
}

/// Closed-closed block from open-channel data, the phi-free "sufficient"
/// choice: S_- = S_-+ (1 + S_+)^{-1} S_+-.
inline MatrixXcd s_minus_from_open(const MatrixXcd& Sp, const MatrixXcd& Spm) {
    const MatrixXcd one = MatrixXcd::Identity(Sp.rows(), Sp.cols());
    Eigen::FullPivLU<MatrixXcd> lu(one + Sp);
    if (!lu.isInvertible()) throw std::domain_error("s_minus_from_open: (1 + S_+) singular");
    return Spm.transpose() * lu.solve(Spm);
}

inline MatrixXcd t_from_s(const MatrixXcd& S) {
    const MatrixXcd one = MatrixXcd::Identity(S.rows(), S.cols());
    Eigen::FullPivLU<MatrixXcd> lu(one + S);
    if (!lu.isInvertible()) throw std::domain_error("t_from_s: (1 + S) singular");
    return I * (one - S) * lu.inverse();
}

inline MatrixXcd s_from_t(const MatrixXcd& T) {
    const MatrixXcd one = MatrixXcd::Identity(T.rows(), T.cols());
    Eigen::FullPivLU<MatrixXcd> lu(one - I * T);
    if (!lu.isInvertible()) throw std::domain_error("s_from_t: (1 - iT) singular");
    return lu.solve(one + I * T);
}

struct ThresholdFit {
    double b = 0.0;
    double residual = 0.0;   // rms of the through-origin fit
    double exponent = 0.0;   // free-exponent log-log refit
    int points = 0;
};

enum class ThresholdSide { Above, Below };

/// Least-squares fit of sin(2 eps)/(2 cos d1) (above) or gamma/(2 cos d1)
/// (below) against |q_2|^{L2 + 1/2} through the origin, over a window in
/// |q_2|.
inline ThresholdFit fit_threshold_b(const SMatrixSamples& s, ThresholdSide side,
                                    double window_lo = 0.05, double window_hi = 0.4) {
    if (s.n() != 2) throw std::invalid_argument("fit_threshold_b: two-channel only");
    const double expn = s.channels.l[1] + 0.5;
    std::vector<double> xs, ys, q2abs;
    if (side == ThresholdSide::Above) {
        const auto p = params_above(s);
        for (std::size_t k = 0; k < p.q.size(); ++k) {
            const double q2 = std::abs(channel_momentum(invariant_mass(p.q[k], s.channels), 1, s.channels));
            if (q2 < window_lo || q2 > window_hi) continue;
            const double c = std::cos(p.delta1[k]);
            if (std::abs(c) < 1e-3)
                throw std::domain_error("fit_threshold_b: cos(delta1) vanishes inside window");
            xs.push_back(std::pow(q2, expn));
            ys.push_back(std::sin(2.0 * p.eps[k]) / (2.0 * c));
            q2abs.push_back(q2);
        }
    } else {
        const auto p = params_below(s);
        for (std::size_t k = 0; k < p.q.size(); ++k) {
            const double q2 = std::abs(channel_momentum(invariant_mass(p.q[k], s.channels), 1, s.channels));
            if (q2 < window_lo || q2 > window_hi) continue;
            const double c = std::cos(p.delta1[k]);
            if (std::abs(c) < 1e-3)
                throw std::domain_error("fit_threshold_b: cos(delta1) vanishes inside window");
            xs.push_back(std::pow(q2, expn));
            ys.push_back(p.gamma[k] / (2.0 * c));
            q2abs.push_back(q2);
        }
    }
    if (xs.size() < 5) throw std::domain_error("fit_threshold_b: fewer than 5 points in window");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    ThresholdFit fit;
    fit.b = sxy / sxx;
    fit.points = static_cast<int>(xs.size());
    double r2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) r2 += sq(ys[i] - fit.b * xs[i]);
    fit.residual = std::sqrt(r2 / xs.size());
    fit.exponent = loglog_slope(q2abs, ys);
    return fit;
}

/// Replace the closed-channel entries below threshold by the phi = 0
/// reconstruction built from (delta1, gamma). The input's Re S22 below
/// threshold therefore never reaches anything downstream.
inline SMatrixSamples canonicalize_below_threshold(SMatrixSamples s) {
    if (s.n() != 2 || s.threshold_index == 0) return s;
    const auto below = params_below(s);
    for (int j = 0; j < s.threshold_index; ++j)
        s.S[j] = build_below(below.delta1[j], below.gamma[j], 0.0, s.channels.l[1]);
    return s;
}

/// As above, but with externally supplied delta1 / gamma series (PWA mode,
/// where only S11 is measured and gamma comes from a model).
inline SMatrixSamples canonicalize_below_threshold(SMatrixSamples s,
                                                   const std::vector<double>& delta1,
                                                   const std::vector<double>& gamma) {
    if (s.n() != 2) throw std::invalid_argument("canonicalize_below_threshold: two-channel only");
    if (static_cast<int>(delta1.size()) < s.threshold_index ||
        static_cast<int>(gamma.size()) < s.threshold_index)
        throw std::invalid_argument("canonicalize_below_threshold: series too short");
    for (int j = 0; j < s.threshold_index; ++j)
        s.S[j] = build_below(delta1[j], gamma[j], 0.0, s.channels.l[1]);
    return s;
}

}  // namespace marchenko

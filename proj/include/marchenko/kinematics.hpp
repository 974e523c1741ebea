#pragma once

// Relativistic two-body channel kinematics: invariant mass <-> channel
// momenta, thresholds W_a = m_a1 + m_a2, and the sqrt(dq_a/dq_1) weight
// entering the coupled-channel Marchenko input kernel. Units: hbar = c = 1,
// momenta and masses in fm^-1, lengths in fm.

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marchenko/util.hpp"

namespace marchenko {

struct ChannelSet {
    std::vector<std::array<double, 2>> masses;  // (m_a1, m_a2), fm^-1
    std::vector<int> l;                         // orbital momentum per channel
    std::vector<double> W;                      // thresholds, cached

    int size() const { return static_cast<int>(masses.size()); }
    double threshold(int a) const { return W.at(a); }

    static ChannelSet create(std::vector<std::array<double, 2>> m, std::vector<int> l) {
        if (m.empty() || m.size() != l.size())
            throw std::invalid_argument("ChannelSet: need equal nonzero mass/l counts");
        ChannelSet ch;
        ch.masses = std::move(m);
        ch.l = std::move(l);
        ch.W.reserve(ch.masses.size());
        for (std::size_t a = 0; a < ch.masses.size(); ++a) {
            if (ch.masses[a][0] <= 0.0 || ch.masses[a][1] <= 0.0)
                throw std::invalid_argument("ChannelSet: masses must be positive");
            if (ch.l[a] < 0) throw std::invalid_argument("ChannelSet: l must be >= 0");
            ch.W.push_back(ch.masses[a][0] + ch.masses[a][1]);
        }
        for (std::size_t a = 1; a < ch.W.size(); ++a)
            if (!(ch.W[a] > ch.W[a - 1]))
                throw std::invalid_argument("ChannelSet: thresholds must be strictly ascending");
        return ch;
    }

    static ChannelSet create_mev(std::vector<std::array<double, 2>> m_mev, std::vector<int> l) {
        for (auto& pair : m_mev) {
            pair[0] /= hbarc_mev_fm;
            pair[1] /= hbarc_mev_fm;
        }
        return create(std::move(m_mev), std::move(l));
    }
};

namespace detail {
inline Complex w_of(Complex q, double m) { return std::sqrt(q * q + m * m); }
inline double w_of(double q, double m) { return std::sqrt(q * q + m * m); }
}  // namespace detail

/// M(q1) = w_11(q1) + w_12(q1). Total on the reals; even in q1.
/// Internals in extended precision so threshold differences M - W_a keep as
/// many bits as the double result can carry.
inline double invariant_mass(double q1, const ChannelSet& ch) {
    const long double q2 = static_cast<long double>(q1) * q1;
    const long double m1 = ch.masses[0][0], m2 = ch.masses[0][1];
    return static_cast<double>(std::sqrt(q2 + m1 * m1) + std::sqrt(q2 + m2 * m2));
}

/// q_a^2 from the invariant mass, Kallen form (exact for real and complex M^2).
inline Complex channel_momentum_sq(Complex M2, int a, const ChannelSet& ch) {
    const double m1 = ch.masses[a][0], m2 = ch.masses[a][1];
    const double s = m1 * m1 + m2 * m2, d = m1 * m1 - m2 * m2;
    return 0.25 * M2 - 0.5 * s + 0.25 * d * d / M2;
}

/// Channel momentum on the physical sheet. Open channels (M >= W_a) carry the
/// sign of the driving first-channel momentum; closed channels sit on the
/// positive imaginary axis for either sign. Real-axis path uses the factored
/// Kallen form (M - W_a)(M + W_a)(M^2 - (m_a1 - m_a2)^2) / (4 M^2) in extended
/// precision: near thresholds the unfactored form loses half the digits.
inline Complex channel_momentum(double M, int a, const ChannelSet& ch, double sign_q1 = 1.0) {
    if (a < 0 || a >= ch.size()) throw std::out_of_range("channel_momentum: bad channel index");
    if (M < ch.W[0] - 1e-12) throw std::domain_error("channel_momentum: M below lowest threshold");
    const long double m1 = ch.masses[a][0], m2 = ch.masses[a][1];
    const long double W = m1 + m2, D = m1 - m2, Ml = M;
    const long double q2 = (Ml - W) * (Ml + W) * (Ml * Ml - D * D) / (4.0L * Ml * Ml);
    if (q2 >= 0.0L) {
        const double q = static_cast<double>(std::sqrt(q2));
        return Complex((sign_q1 < 0.0 ? -q : q), 0.0);
    }
    return Complex(0.0, static_cast<double>(std::sqrt(-q2)));
}

/// Analytic continuation q_a(q1) for complex first-channel momentum
/// (used at S-matrix pole positions). Branch: Im q_a >= 0 (physical sheet);
/// on the real axis the open branch inherits sign(Re q1).
inline Complex channel_momentum_c(Complex q1, int a, const ChannelSet& ch) {
    if (a == 0) return q1;
    const Complex M = detail::w_of(q1, ch.masses[0][0]) + detail::w_of(q1, ch.masses[0][1]);
    const Complex q2 = channel_momentum_sq(M * M, a, ch);
    Complex q = std::sqrt(q2);
    if (std::abs(q.imag()) < 1e-14 * std::abs(q)) {
        if (q.real() * (q1.real() < 0 ? -1.0 : 1.0) < 0.0) q = -q;
    } else if (q.imag() < 0.0) {
        q = -q;
    }
    return q;
}

struct ChannelMomenta {
    double q1 = 0.0;
    double M = 0.0;
    std::vector<Complex> q;
    int open_count = 0;
};

inline ChannelMomenta momenta_from_q1(double q1, const ChannelSet& ch) {
    ChannelMomenta cm;
    cm.q1 = q1;
    cm.M = invariant_mass(q1, ch);
    cm.q.resize(ch.size());
    for (int a = 0; a < ch.size(); ++a) {
        cm.q[a] = channel_momentum(cm.M, a, ch, q1 < 0 ? -1.0 : 1.0);
        if (cm.q[a].imag() == 0.0) ++cm.open_count;
    }
    return cm;
}

/// dq_a/dq_1 along the physical sheet, closed form from dM = M q dq / (w1 w2).
inline Complex dq_dq1_c(Complex q1, int a, const ChannelSet& ch) {
    if (a == 0) return 1.0;
    const Complex qa = channel_momentum_c(q1, a, ch);
    const Complex num = q1 * detail::w_of(qa, ch.masses[a][0]) * detail::w_of(qa, ch.masses[a][1]);
    const Complex den = qa * detail::w_of(q1, ch.masses[0][0]) * detail::w_of(q1, ch.masses[0][1]);
    return num / den;
}

/// rho_aa = (dq_a/dq_1)^{1/2}, principal branch. rho_11 == 1 identically.
inline Complex rho_element_c(Complex q1, int a, const ChannelSet& ch) {
    if (a == 0) return 1.0;
    const Complex qa = channel_momentum_c(q1, a, ch);
    if (std::abs(qa) < 1e-6) throw std::domain_error("rho_element: channel threshold (q_a = 0)");
    return std::sqrt(dq_dq1_c(q1, a, ch));
}

inline Complex rho_element(double q1, int a, const ChannelSet& ch) {
    if (q1 == 0.0) throw std::domain_error("rho_element: q1 = 0");
    return rho_element_c(Complex(q1, 0.0), a, ch);
}

/// d(rho_aa)/dq_1, analytic. Needed for second-order pole weights in the
/// separable kernel: u = dq_a/dq_1, rho' = u' / (2 rho) with
/// u' = u * (N'/N - u D'(q_a)/D(q_a)), N(q) = q/(w11 w12), D(p) = p/(wa1 wa2).
inline Complex rho_prime_c(Complex q1, int a, const ChannelSet& ch) {
    if (a == 0) return 0.0;
    const Complex qa = channel_momentum_c(q1, a, ch);
    const double m11 = ch.masses[0][0], m12 = ch.masses[0][1];
    const double ma1 = ch.masses[a][0], ma2 = ch.masses[a][1];
    const Complex w11 = detail::w_of(q1, m11), w12 = detail::w_of(q1, m12);
    const Complex wa1 = detail::w_of(qa, ma1), wa2 = detail::w_of(qa, ma2);
    const Complex u = (q1 * wa1 * wa2) / (qa * w11 * w12);
    const Complex N = q1 / (w11 * w12);
    const Complex D = qa / (wa1 * wa2);
    // N'(q) = [ (w11 w12)^2 - q^2 (w11^2 + w12^2) ] / (w11 w12)^3, same form for D'.
    const Complex Np = (sq(w11 * w12) - q1 * q1 * (w11 * w11 + w12 * w12)) / (sq(w11 * w12) * w11 * w12);
    const Complex Dp = (sq(wa1 * wa2) - qa * qa * (wa1 * wa1 + wa2 * wa2)) / (sq(wa1 * wa2) * wa1 * wa2);
    const Complex up = u * (Np / N - u * Dp / D);
    return up / (2.0 * std::sqrt(u));
}

/// First-channel momentum at which channel a opens: M(q1) = W_a, q1 >= 0.
inline double threshold_q1(int a, const ChannelSet& ch) {
    const double W = ch.W.at(a);
    const Complex q2 = channel_momentum_sq(Complex(W * W, 0.0), 0, ch);
    return std::sqrt(std::max(0.0, q2.real()));
}

}  // namespace marchenko

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace marchenko {

using Complex = std::complex<double>;

inline constexpr double hbarc_mev_fm = 197.3269804;  // MeV*fm
inline constexpr double pi = 3.14159265358979323846;
inline constexpr Complex I{0.0, 1.0};

/// q_min, q_min + dq, ... up to and including the largest multiple <= q_max.
inline std::vector<double> linear_grid(double start, double stop, double step) {
    if (step <= 0.0) throw std::invalid_argument("linear_grid: step must be positive");
    std::vector<double> g;
    for (double v = start; v <= stop + 0.5 * step; v += step) g.push_back(v);
    while (!g.empty() && g.back() > stop + 1e-12) g.pop_back();
    return g;
}

/// Geometric grid on [a, b] with npts points (dense near a).
inline std::vector<double> geometric_grid(double a, double b, int npts) {
    if (a <= 0.0 || b <= a || npts < 2) throw std::invalid_argument("geometric_grid: bad range");
    std::vector<double> g(npts);
    const double ratio = std::pow(b / a, 1.0 / (npts - 1));
    double v = a;
    for (int i = 0; i < npts; ++i, v *= ratio) g[i] = v;
    g.back() = b;
    return g;
}

/// Parallel map over [0, n). Each task must be independent; results land in
/// caller-owned storage so the output order is deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline double sq(double x) { return x * x; }
inline Complex sq(Complex x) { return x * x; }

/// Least-squares slope of log|y| vs log|x|.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(std::abs(x[i])), ly = std::log(std::abs(y[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace marchenko

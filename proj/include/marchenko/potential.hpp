#pragma once

// Potential matrices: analytic forms and radial-grid tables with CSV
// serialization (columns r, upper triangle of V).

#include <Eigen/Dense>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "marchenko/spline.hpp"
#include "marchenko/util.hpp"

namespace marchenko {

/// Symmetric n x n potential, zero beyond `range`.
struct Potential {
    int n = 0;
    double range = 0.0;  // fm
    std::function<void(double, Eigen::MatrixXd&)> eval;

    Eigen::MatrixXd operator()(double r) const {
        Eigen::MatrixXd v(n, n);
        eval(r, v);
        return v;
    }
};

/// V0 * exp(-a r^2) on every matrix element (the two-channel test case).
inline Potential gaussian_potential(int n, double v0, double a, double range) {
    Potential p;
    p.n = n;
    p.range = range;
    p.eval = [n, v0, a, range](double r, Eigen::MatrixXd& out) {
        const double v = (r > range) ? 0.0 : v0 * std::exp(-a * r * r);
        out.setConstant(n, n, v);
    };
    return p;
}

inline Potential zero_potential(int n, double range = 1.0) {
    Potential p;
    p.n = n;
    p.range = range;
    p.eval = [n](double, Eigen::MatrixXd& out) { out.setZero(n, n); };
    return p;
}

struct PotentialGrid {
    std::vector<double> r;
    std::vector<Eigen::MatrixXd> V;  // symmetric per point
    double range = 0.0;              // treated as 0 beyond

    int channels() const { return V.empty() ? 0 : static_cast<int>(V.front().rows()); }
    int size() const { return static_cast<int>(r.size()); }

    void validate() const {
        for (const auto& v : V) {
            const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
            if (asym > 1e-12)
                throw std::invalid_argument("PotentialGrid: asymmetric potential matrix");
        }
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1])) throw std::invalid_argument("PotentialGrid: r not ascending");
    }

    /// Cubic-spline evaluator per upper-triangle element; constant below the
    /// first grid point, zero beyond the range.
    Potential interpolator() const {
        validate();
        const int n = channels();
        auto splines = std::make_shared<std::vector<CubicSpline>>();
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                std::vector<double> y(r.size());
                for (std::size_t i = 0; i < r.size(); ++i) y[i] = V[i](a, b);
                splines->push_back(CubicSpline(r, y));
            }
        Potential p;
        p.n = n;
        p.range = range;
        const double rmax = std::min(range, r.back());
        p.eval = [n, splines, rmax](double rr, Eigen::MatrixXd& out) {
            out.resize(n, n);
            if (rr > rmax) {
                out.setZero();
                return;
            }
            int idx = 0;
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b) {
                    const double v = (*splines)[idx++](rr);
                    out(a, b) = v;
                    out(b, a) = v;
                }
        };
        return p;
    }

    /// Same grid with the potential forced to zero beyond r_cut.
    PotentialGrid cut(double r_cut) const {
        PotentialGrid out = *this;
        out.range = std::min(range, r_cut);
        for (int i = 0; i < size(); ++i)
            if (r[i] > r_cut) out.V[i].setZero();
        return out;
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("PotentialGrid: cannot open " + path);
        const int n = channels();
        out << "# r";
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) out << ", V" << a + 1 << b + 1;
        out << "\n# range = " << std::setprecision(17) << range << "\n";
        out << std::setprecision(17);
        for (int i = 0; i < size(); ++i) {
            out << r[i];
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b) out << ", " << V[i](a, b);
            out << "\n";
        }
    }

    static PotentialGrid read_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("PotentialGrid: cannot open " + path);
        PotentialGrid g;
        std::string line;
        int n = -1;
        while (std::getline(in, line)) {
            if (line.rfind("# range =", 0) == 0) {
                g.range = std::stod(line.substr(9));
                continue;
            }
            if (line.empty() || line[0] == '#') continue;
            for (auto& c : line)
                if (c == ',') c = ' ';
            std::istringstream ss(line);
            std::vector<double> vals;
            double v;
            while (ss >> v) vals.push_back(v);
            if (vals.empty()) continue;
            if (n < 0) {
                // m = 1 + n(n+1)/2 columns
                n = static_cast<int>(std::round(0.5 * (std::sqrt(8.0 * (vals.size() - 1) + 1.0) - 1.0)));
            }
            Eigen::MatrixXd m(n, n);
            int idx = 1;
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b) {
                    m(a, b) = vals.at(idx);
                    m(b, a) = vals.at(idx);
                    ++idx;
                }
            g.r.push_back(vals[0]);
            g.V.push_back(std::move(m));
        }
        if (g.range == 0.0 && !g.r.empty()) g.range = g.r.back();
        return g;
    }
};

/// Sample an analytic potential onto a grid.
inline PotentialGrid sample_potential(const Potential& p, const std::vector<double>& r) {
    PotentialGrid g;
    g.r = r;
    g.range = p.range;
    g.V.reserve(r.size());
    for (double rr : r) g.V.push_back(p(rr));
    return g;
}

}  // namespace marchenko

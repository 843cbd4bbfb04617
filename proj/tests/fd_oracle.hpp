#pragma once

// Independent reference for the clamped strip: second-order finite
// differences on a uniform grid, backward Euler with steps proportional to
// the cube of the gap, Richardson-extrapolated in the step factor.

#include <algorithm>
#include <cmath>
#include <vector>

#include "quench/numkit.hpp"

namespace oracle {

struct FdRun {
    double t_c = 0.0;
    double x_min = 0.0;  // location of the smallest gap (x >= 0 side)
};

inline FdRun fd_strip_clamped_once(double eps, std::size_t n, double kappa, double stop_gap) {
    using quench::numkit::BandedMatrix;
    const double h = 2.0 / static_cast<double>(n);
    const std::size_t m = n - 1;
    const double c = eps * eps / (h * h * h * h);
    std::vector<double> u(m, 0.0), rhs(m);
    auto d4 = [&](const std::vector<double>& v, std::size_t i) {
        auto at = [&](long k) -> double {
            if (k < 0) return k == -1 ? 0.0 : v[0];                // u(-1) = 0, ghost u_{-1} = u_1
            if (k >= static_cast<long>(m)) return k == static_cast<long>(m) ? 0.0 : v[m - 1];
            return v[static_cast<std::size_t>(k)];
        };
        const long k = static_cast<long>(i);
        return at(k - 2) - 4 * at(k - 1) + 6 * at(k) - 4 * at(k + 1) + at(k + 2);
    };
    double t = 0.0;
    for (;;) {
        double gap = 1.0;
        for (double v : u) gap = std::min(gap, 1.0 + v);
        if (gap <= stop_gap) break;
        const double dt = kappa * gap * gap * gap;
        std::vector<double> w = u;
        for (int it = 0; it < 30; ++it) {
            BandedMatrix j(m, 2, 2);
            for (std::size_t i = 0; i < m; ++i) {
                const double g = 1.0 + w[i];
                rhs[i] = -((w[i] - u[i]) / dt + c * d4(w, i) + 1.0 / (g * g));
                j.at(i, i) = 1.0 / dt + 6 * c - 2.0 / (g * g * g) + ((i == 0 || i + 1 == m) ? c : 0.0);
                if (i >= 1) j.at(i, i - 1) = -4 * c;
                if (i >= 2) j.at(i, i - 2) = c;
                if (i + 1 < m) j.at(i, i + 1) = -4 * c;
                if (i + 2 < m) j.at(i, i + 2) = c;
            }
            const auto dw = quench::numkit::solve_banded(j, rhs);
            double nrm = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                w[i] += dw[i];
                nrm = std::max(nrm, std::abs(dw[i]));
            }
            if (nrm < 1e-13) break;
        }
        u = w;
        t += dt;
    }
    // extrapolate gap^3 linearly with the instantaneous rate at the minimum
    std::size_t imin = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (u[i] < u[imin] || (u[i] == u[imin] && i > imin)) imin = i;
    const double g = 1.0 + u[imin];
    const double rate = -c * d4(u, imin) - 1.0 / (g * g);
    return {t + g / (-3.0 * rate), std::abs(-1.0 + h * static_cast<double>(imin + 1))};
}

inline FdRun fd_strip_clamped(double eps, std::size_t n, double kappa = 2e-3,
                              double stop_gap = 1e-2) {
    const auto a = fd_strip_clamped_once(eps, n, kappa, stop_gap);
    const auto b = fd_strip_clamped_once(eps, n, 0.5 * kappa, stop_gap);
    return {2.0 * b.t_c - a.t_c, b.x_min};
}

}  // namespace oracle

#include "quench/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "quench/errors.hpp"
#include "quench/numkit.hpp"

namespace quench::spectral {

using numkit::bessel;
using numkit::BesselKind;

namespace {

// d^n/dy^n of sin, cos, sinh, cosh evaluated at xi*y, divided by xi^n
double dsin(double a, int n) { return std::sin(a + 0.5 * n * std::numbers::pi); }
double dcos(double a, int n) { return std::cos(a + 0.5 * n * std::numbers::pi); }
double dsinh(double a, int n) { return n % 2 == 0 ? std::sinh(a) : std::cosh(a); }
double dcosh(double a, int n) { return n % 2 == 0 ? std::cosh(a) : std::sinh(a); }

}  // namespace

double EigenPair::raw(double x, int laplacian_power) const {
    const int n = 2 * laplacian_power;  // derivative order on the strip
    const double xin = std::pow(xi_, n);
    if (spec_.geometry == Geometry::Strip) {
        const double a = xi_ * (x - 1.0);
        if (spec_.condition == Condition::Navier) return xin * dsin(a, n);
        return xin * (dsin(a, n) - dsinh(a, n) + ratio_ * (dcos(a, n) - dcosh(a, n)));
    }
    const double r = xi_ * x;
    if (spec_.condition == Condition::Navier)
        return (laplacian_power % 2 == 0 ? 1.0 : -1.0) * xin * bessel(BesselKind::J0, r);
    // Delta J0(xi r) = -xi^2 J0, Delta I0(xi r) = xi^2 I0
    const double j_sign = laplacian_power % 2 == 0 ? -1.0 : 1.0;
    return xin * (bessel(BesselKind::I0, r) + j_sign * ratio_ * bessel(BesselKind::J0, r));
}

double EigenPair::raw_gradient(double x) const {
    if (spec_.geometry == Geometry::Strip) {
        const double a = xi_ * (x - 1.0);
        if (spec_.condition == Condition::Navier) return xi_ * dsin(a, 1);
        return xi_ * (dsin(a, 1) - dsinh(a, 1) + ratio_ * (dcos(a, 1) - dcosh(a, 1)));
    }
    const double r = xi_ * x;
    if (spec_.condition == Condition::Navier) return xi_ * bessel(BesselKind::J0Prime, r);
    return xi_ * (bessel(BesselKind::I0Prime, r) - ratio_ * bessel(BesselKind::J0Prime, r));
}

double EigenPair::value(double x) const { return c_ * raw(x, 0); }
double EigenPair::gradient(double x) const { return c_ * raw_gradient(x); }
double EigenPair::laplacian(double x) const { return c_ * raw(x, 1); }
double EigenPair::bilaplacian(double x) const { return c_ * raw(x, 2); }

EigenPair principal_eigenpair(const BoundarySpec& spec) {
    EigenPair ep;
    ep.spec_ = spec;
    try {
        if (spec.geometry == Geometry::Strip && spec.condition == Condition::Navier) {
            ep.xi_ = 0.5 * std::numbers::pi;
        } else if (spec.geometry == Geometry::Disc && spec.condition == Condition::Navier) {
            ep.xi_ = numkit::find_root_bracketed(
                [](double z) { return bessel(BesselKind::J0, z); }, 2.0, 3.0, 1e-15);
        } else if (spec.geometry == Geometry::Strip) {
            ep.xi_ = numkit::find_root_bracketed(
                [](double xi) { return std::cos(2 * xi) * std::cosh(2 * xi) - 1.0; }, 2.0, 3.0,
                1e-13);
            const double t = 2.0 * ep.xi_;
            ep.ratio_ = (std::sin(t) - std::sinh(t)) / (std::cos(t) - std::cosh(t));
        } else {
            ep.xi_ = numkit::find_root_bracketed(
                [](double xi) {
                    return bessel(BesselKind::J0, xi) * bessel(BesselKind::I0Prime, xi) -
                           bessel(BesselKind::J0Prime, xi) * bessel(BesselKind::I0, xi);
                },
                3.0, 3.5, 1e-15);
            // I0/J0 = I0'/J0' at the root; use the better-conditioned quotient
            const double j0 = bessel(BesselKind::J0, ep.xi_);
            const double j1 = bessel(BesselKind::J0Prime, ep.xi_);
            ep.ratio_ = std::abs(j0) >= std::abs(j1)
                            ? bessel(BesselKind::I0, ep.xi_) / j0
                            : bessel(BesselKind::I0Prime, ep.xi_) / j1;
        }
    } catch (const InvalidBracket& e) {
        throw NoConvergence(std::string("principal eigenvalue root search: ") + e.what(), 0.0);
    }
    ep.mu0_ = std::pow(ep.xi_, 4);

    double integral;
    if (spec.geometry == Geometry::Strip) {
        integral = numkit::quad_adaptive([&](double x) { return ep.raw(x, 0); }, -1.0, 1.0,
                                         1e-14);
    } else {
        integral = 2.0 * std::numbers::pi *
                   numkit::quad_adaptive([&](double r) { return ep.raw(r, 0) * r; }, 0.0, 1.0,
                                         1e-14);
    }
    ep.c_ = 1.0 / integral;
    return ep;
}

double epsilon_bar(double mu0) {
    if (!(mu0 > 0.0)) throw std::invalid_argument("epsilon_bar: mu0 must be positive");
    return std::sqrt(27.0 / (4.0 * mu0));
}

double touchdown_time_bound(double epsilon, double mu0) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("touchdown_time_bound: epsilon < 0");
    if (epsilon >= epsilon_bar(mu0))
        throw BoundInapplicable("epsilon " + std::to_string(epsilon) +
                                " is not below epsilon_bar " +
                                std::to_string(epsilon_bar(mu0)));
    const double a = epsilon * epsilon * mu0;
    // 1 / (a s + (1+s)^-2) = (1+s)^2 / (1 + a s (1+s)^2): no endpoint singularity
    return numkit::quad_adaptive(
        [a](double s) {
            const double w = (1.0 + s) * (1.0 + s);
            return w / (1.0 + a * s * w);
        },
        -1.0, 0.0, 1e-13);
}

}  // namespace quench::spectral

#pragma once

// Forward-mode scalar carrying value plus two directional derivatives: one
// with respect to a state entry y_j, one with respect to its rate y'_j.

namespace quench::mmpde::detail {

struct Dual {
    double v = 0.0;
    double a = 0.0;  // d/dy
    double b = 0.0;  // d/dy'

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit promotion is the point
    Dual(double value, double da, double db) : v(value), a(da), b(db) {}
};

inline Dual operator+(Dual x, Dual y) { return {x.v + y.v, x.a + y.a, x.b + y.b}; }
inline Dual operator-(Dual x, Dual y) { return {x.v - y.v, x.a - y.a, x.b - y.b}; }
inline Dual operator-(Dual x) { return {-x.v, -x.a, -x.b}; }
inline Dual operator*(Dual x, Dual y) {
    return {x.v * y.v, x.a * y.v + x.v * y.a, x.b * y.v + x.v * y.b};
}
inline Dual operator/(Dual x, Dual y) {
    const double inv = 1.0 / y.v;
    const double q = x.v * inv;
    return {q, (x.a - q * y.a) * inv, (x.b - q * y.b) * inv};
}
inline Dual& operator+=(Dual& x, Dual y) { return x = x + y; }
inline Dual& operator-=(Dual& x, Dual y) { return x = x - y; }
inline Dual& operator*=(Dual& x, Dual y) { return x = x * y; }

inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }

}  // namespace quench::mmpde::detail

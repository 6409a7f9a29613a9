// Small fixed-size plane algebra used throughout the library.
#pragma once

#include <cmath>
#include <numbers>

namespace quasirigid {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }

    // Counterclockwise quarter turn.
    constexpr Vec2 perp() const { return {-y, x}; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Angle of the undirected line spanned by v, folded into [0, pi).
inline double angle_mod_pi(Vec2 v) {
    double a = std::atan2(v.y, v.x);
    if (a < 0.0) a += std::numbers::pi;
    if (a >= std::numbers::pi) a -= std::numbers::pi;
    return a;
}

// Acute angle between the lines spanned by a and b, in [0, pi/2].
inline double line_angle_between(Vec2 a, Vec2 b) {
    return std::atan2(std::abs(cross(a, b)), std::abs(dot(a, b)));
}

// Deterministic sign convention for direction vectors defined up to +-1:
// keep the upper half plane, ties broken toward +x.
inline Vec2 canonical_sign(Vec2 v) {
    if (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) return -v;
    return v;
}

// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0;
    double c = 0.0, d = 1.0;

    constexpr double det() const { return a * d - b * c; }

    constexpr Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    constexpr Mat2 inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    static Mat2 rotation_cw(double theta) {
        double s = std::sin(theta), co = std::cos(theta);
        return {co, s, -s, co};
    }
};

} // namespace quasirigid

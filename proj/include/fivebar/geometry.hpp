#pragma once

#include <cmath>
#include <numbers>

namespace fivebar {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
    friend constexpr Point operator*(Point a, double k) { return {k * a.x, k * a.y}; }
    friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline double heading(Point a) { return std::atan2(a.y, a.x); }
inline Point unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Wraps into (-pi, pi].
double wrap_angle(double angle);

// Signed shortest rotation taking `from` onto `to`, in (-pi, pi].
inline double angle_difference(double to, double from) { return wrap_angle(to - from); }

inline double degrees(double radians) { return radians * 180.0 / kPi; }
inline double radians(double degrees) { return degrees * kPi / 180.0; }

}  // namespace fivebar

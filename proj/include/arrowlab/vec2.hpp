#pragma once

#include <cmath>
#include <ostream>

namespace arrowlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend Vec2 operator*(double s, Vec2 a) { return a * s; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

    Vec2& operator+=(Vec2 b) { x += b.x; y += b.y; return *this; }
    Vec2& operator-=(Vec2 b) { x -= b.x; y -= b.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
    friend double norm_sq(Vec2 a) { return dot(a, a); }
    friend double norm(Vec2 a) { return std::sqrt(norm_sq(a)); }

    friend std::ostream& operator<<(std::ostream& os, Vec2 a) {
        return os << "(" << a.x << ", " << a.y << ")";
    }
};

}  // namespace arrowlab

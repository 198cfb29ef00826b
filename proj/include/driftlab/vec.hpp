#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace driftlab {

/// Small fixed-size 3-vector used for positions, orientations and directions.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Flat 7-component vector: [pos x,y,z, ori x,y,z, gripper].
using Vec7 = std::array<double, 7>;

inline Vec7 add(const Vec7& a, const Vec7& b) {
    Vec7 r{};
    for (std::size_t i = 0; i < 7; ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec7 sub(const Vec7& a, const Vec7& b) {
    Vec7 r{};
    for (std::size_t i = 0; i < 7; ++i) r[i] = a[i] - b[i];
    return r;
}

inline double norm(const Vec7& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace driftlab

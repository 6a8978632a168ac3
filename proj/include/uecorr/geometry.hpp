// geometry.hpp — Small value types for 3-D coordinates and grid indices.

#pragma once

#include <cmath>
#include <cstdint>

namespace uecorr {

/// 3-vector of doubles; world coordinates are in mm throughout.
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
    constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    /// Component-wise product.
    constexpr Vec3 scaled(const Vec3& s) const { return {x * s.x, y * s.y, z * s.z}; }
    /// Component-wise quotient.
    constexpr Vec3 divided(const Vec3& s) const { return {x / s.x, y / s.y, z / s.z}; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }

    bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Integer voxel/grid dimensions or indices.
struct Index3 {
    int x = 0;
    int y = 0;
    int z = 0;

    constexpr Index3() = default;
    constexpr Index3(int x_, int y_, int z_) : x(x_), y(y_), z(z_) {}
    constexpr bool operator==(const Index3& o) const { return x == o.x && y == o.y && z == o.z; }

    constexpr std::int64_t count() const {
        return static_cast<std::int64_t>(x) * y * z;
    }

    Vec3 to_vec3() const {
        return {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
    }
};

} // namespace uecorr

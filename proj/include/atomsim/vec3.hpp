#pragma once

#include <cmath>
#include <stdexcept>

namespace atomsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend constexpr Vec3 operator*(Vec3 v, double s) { return s * v; }
    friend constexpr Vec3 operator/(Vec3 v, double s) { return {v.x / s, v.y / s, v.z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(Vec3 b) { x += b.x; y += b.y; z += b.z; return *this; }

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& component(int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return v / n;
}

inline bool finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

// Deterministic right-handed orthonormal frame (e1, e2, n) completing a
// unit vector n. For n = z this yields (x, y, z).
struct Frame {
    Vec3 e1, e2, n;
};
inline Frame orthonormal_frame(Vec3 n_raw) {
    const Vec3 n = normalized(n_raw);
    const Vec3 seed = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = seed - dot(seed, n) * n;
    e1 = normalized(e1);
    const Vec3 e2 = cross(n, e1);
    return {e1, e2, n};
}

} // namespace atomsim

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "parameter.hpp"
#include "vec3.hpp"

namespace atomsim {

using cd = std::complex<double>;
using PolVector = std::array<cd, 3>;  // Cartesian (ex, ey, ez), lab frame

namespace detail {
inline double pol_norm2(const PolVector& v) {
    return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}
inline cd pol_dot(const PolVector& a, const PolVector& b) {  // <a|b>
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}
inline PolVector pol_normalized(const PolVector& v) {
    const double n = std::sqrt(pol_norm2(v));
    if (n == 0.0) throw std::invalid_argument("polarization: zero vector");
    return {v[0] / n, v[1] / n, v[2] / n};
}
} // namespace detail

// Field polarization: either a fixed unit Cartesian vector, or a mixed
// form (dominant vector plus an orthogonal contamination whose amplitude
// may be a stochastic Parameter, sampled at compile time).
struct Polarization {
    PolVector vec{cd(1), cd(0), cd(0)};
    bool mixed = false;
    PolVector dominant{};
    PolVector contamination{};
    Value contamination_amplitude = 0.0;

    static Polarization linear(Vec3 direction) {
        const Vec3 d = normalized(direction);
        Polarization p;
        p.vec = {cd(d.x), cd(d.y), cd(d.z)};
        return p;
    }

    static Polarization from_vector(PolVector v) {
        Polarization p;
        p.vec = detail::pol_normalized(v);
        return p;
    }

    // Circular polarization in the plane transverse to `axis`; sign
    // selects the rotation sense: (e1 + i*sign*e2)/sqrt(2).
    static Polarization circular(Vec3 axis, int sign) {
        const Frame f = orthonormal_frame(axis);
        const double s = sign >= 0 ? 1.0 : -1.0;
        const cd inv = 1.0 / std::sqrt(2.0);
        Polarization p;
        p.vec = {inv * (cd(f.e1.x) + cd(0, s) * f.e2.x),
                 inv * (cd(f.e1.y) + cd(0, s) * f.e2.y),
                 inv * (cd(f.e1.z) + cd(0, s) * f.e2.z)};
        return p;
    }

    static Polarization mixed_form(PolVector dominant, PolVector contamination, Value amplitude) {
        Polarization p;
        p.mixed = true;
        p.dominant = detail::pol_normalized(dominant);
        p.contamination = detail::pol_normalized(contamination);
        if (std::abs(detail::pol_dot(p.dominant, p.contamination)) > 1e-12)
            throw std::invalid_argument("mixed polarization: contamination not orthogonal to dominant");
        p.contamination_amplitude = std::move(amplitude);
        p.vec = p.dominant;
        return p;
    }
};

// Resolves the mixed form with a concrete contamination draw:
// (dominant + a * contamination), renormalized. Pure polarizations are
// returned unchanged.
inline PolVector resolve_polarization(const Polarization& p, double contamination_draw) {
    if (!p.mixed) return p.vec;
    PolVector v;
    for (int i = 0; i < 3; ++i) v[i] = p.dominant[i] + contamination_draw * p.contamination[i];
    return detail::pol_normalized(v);
}

inline PolVector resolve_polarization(const Polarization& p, ResolveContext& ctx) {
    if (!p.mixed) return p.vec;
    return resolve_polarization(p, resolve(p.contamination_amplitude, ctx));
}

// Spherical components (sigma-, pi, sigma+) of a polarization vector in
// the frame whose z axis is the quantization axis:
//   e_{-1} = +(ex' - i ey')/sqrt(2),  e_0 = ez',  e_{+1} = -(ex' + i ey')/sqrt(2).
// The q component multiplies transitions with m_upper - m_lower = q.
struct SphericalComponents {
    cd sigma_minus, pi, sigma_plus;
    cd q(int qi) const {
        if (qi == -1) return sigma_minus;
        if (qi == 0) return pi;
        if (qi == +1) return sigma_plus;
        throw std::invalid_argument("spherical component index must be -1, 0, +1");
    }
};

inline SphericalComponents spherical_components(const PolVector& eps, Vec3 quantization_axis) {
    const Frame f = orthonormal_frame(quantization_axis);  // throws on zero axis
    const cd ex = eps[0] * f.e1.x + eps[1] * f.e1.y + eps[2] * f.e1.z;
    const cd ey = eps[0] * f.e2.x + eps[1] * f.e2.y + eps[2] * f.e2.z;
    const cd ez = eps[0] * f.n.x + eps[1] * f.n.y + eps[2] * f.n.z;
    const double inv = 1.0 / std::sqrt(2.0);
    return {inv * (ex - cd(0, 1) * ey), ez, -inv * (ex + cd(0, 1) * ey)};
}

inline SphericalComponents spherical_components(const Polarization& p, Vec3 quantization_axis) {
    if (p.mixed) throw std::invalid_argument("spherical_components: resolve mixed polarization first");
    return spherical_components(p.vec, quantization_axis);
}

} // namespace atomsim

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "constants.hpp"
#include "polarization.hpp"
#include "vec3.hpp"

namespace atomsim {

// Axis-aligned focused TEM00 beam: wavelength, 1/e^2 waist radius, power.
struct GaussianBeam {
    double wavelength = 0.0;  // m
    double waist = 0.0;       // m
    double power = 0.0;       // W
    Vec3 focus{};
    Vec3 direction{0, 0, 1};
    Polarization polarization = Polarization::linear({1, 0, 0});
};

// Elliptical Gaussian beam with arbitrary propagation direction and a
// global phase offset. The transverse x axis is fixed by the
// deterministic frame completion of the propagation direction.
struct GeneralGaussianBeam {
    double wavelength = 0.0;
    double waist_x = 0.0;
    double waist_y = 0.0;
    double power = 0.0;
    Vec3 direction{0, 0, 1};
    Vec3 focus{};
    Polarization polarization = Polarization::linear({1, 0, 0});
    double phase = 0.0;  // rad
};

// Plane wave: uniform intensity, fixed wavevector.
struct PlanarBeam {
    Vec3 wavevector{};        // rad/m, |k| = 2 pi / lambda
    double field_scale = 0.0; // peak electric field, V/m
    Polarization polarization = Polarization::linear({1, 0, 0});
};

struct AodTone {
    double frequency = 0.0;  // Hz
    double amplitude = 0.0;  // dimensionless, >= 0
};

// Rectangular AOD tweezer grid: trap (i, j) sits at
//   origin + row_cal * f_row[i] * y + col_cal * f_col[j] * x,
// carries amplitude A_row[i] * A_col[j], and is a Gaussian beam of waist
// `trap_waist` propagating along z. Traps superpose coherently.
struct TweezerArray {
    double wavelength = 0.0;   // m (carrier)
    double trap_waist = 0.0;   // m
    std::vector<AodTone> row_tones;
    std::vector<AodTone> col_tones;
    double row_calibration = 1e-12;  // m per Hz (1 um/MHz default)
    double col_calibration = 1e-12;  // m per Hz
    Vec3 origin{};
    double power_per_unit_amplitude2 = 0.0;  // W for a trap of squared amplitude 1
    Polarization polarization = Polarization::linear({1, 0, 0});
};

using Beam = std::variant<GaussianBeam, GeneralGaussianBeam, PlanarBeam, TweezerArray>;

inline std::vector<std::vector<Vec3>> trap_positions(const TweezerArray& arr) {
    std::vector<std::vector<Vec3>> grid;
    grid.reserve(arr.row_tones.size());
    for (const auto& row : arr.row_tones) {
        std::vector<Vec3> line;
        line.reserve(arr.col_tones.size());
        for (const auto& col : arr.col_tones) {
            line.push_back(arr.origin + arr.row_calibration * row.frequency * Vec3{0, 1, 0} +
                           arr.col_calibration * col.frequency * Vec3{1, 0, 0});
        }
        grid.push_back(std::move(line));
    }
    return grid;
}

namespace detail {

// Peak-normalized elliptical TEM00 amplitude in beam coordinates
// (x, y transverse; z along propagation, origin at focus). Includes
// waist expansion, wavefront curvature and the Gouy phase.
inline cd gaussian_amplitude(double x, double y, double z, double wx0, double wy0, double wavelength) {
    const double k = constants::two_pi / wavelength;
    const double zrx = constants::pi * wx0 * wx0 / wavelength;
    const double zry = constants::pi * wy0 * wy0 / wavelength;
    const double wx = wx0 * std::sqrt(1.0 + (z / zrx) * (z / zrx));
    const double wy = wy0 * std::sqrt(1.0 + (z / zry) * (z / zry));
    const double mag = std::sqrt(wx0 * wy0 / (wx * wy)) * std::exp(-x * x / (wx * wx) - y * y / (wy * wy));
    double phase = k * z - 0.5 * (std::atan(z / zrx) + std::atan(z / zry));
    if (z != 0.0) {
        const double rx = z * (1.0 + (zrx / z) * (zrx / z));
        const double ry = z * (1.0 + (zry / z) * (zry / z));
        phase += k * x * x / (2.0 * rx) + k * y * y / (2.0 * ry);
    }
    return std::polar(mag, phase);
}

} // namespace detail

// Complex field amplitude, normalized so that
//   intensity(r) = peak_intensity(beam) * |field_amplitude(r)|^2.
// A Gaussian beam evaluates to 1 (zero phase) at its focus.
inline cd field_amplitude(const GaussianBeam& b, Vec3 r) {
    const Frame f = orthonormal_frame(b.direction);
    const Vec3 d = r - b.focus;
    return detail::gaussian_amplitude(dot(d, f.e1), dot(d, f.e2), dot(d, f.n), b.waist, b.waist, b.wavelength);
}

inline cd field_amplitude(const GeneralGaussianBeam& b, Vec3 r) {
    const Frame f = orthonormal_frame(b.direction);
    const Vec3 d = r - b.focus;
    return detail::gaussian_amplitude(dot(d, f.e1), dot(d, f.e2), dot(d, f.n), b.waist_x, b.waist_y, b.wavelength) *
           std::polar(1.0, b.phase);
}

inline cd field_amplitude(const PlanarBeam& b, Vec3 r) {
    return std::polar(1.0, dot(b.wavevector, r));
}

inline cd field_amplitude(const TweezerArray& arr, Vec3 r) {
    cd sum = 0.0;
    for (const auto& row : arr.row_tones) {
        const double ry = arr.row_calibration * row.frequency;
        for (const auto& col : arr.col_tones) {
            const Vec3 center = arr.origin + Vec3{arr.col_calibration * col.frequency, ry, 0};
            const Vec3 d = r - center;
            sum += row.amplitude * col.amplitude *
                   detail::gaussian_amplitude(d.x, d.y, d.z, arr.trap_waist, arr.trap_waist, arr.wavelength);
        }
    }
    return sum;
}

inline cd field_amplitude(const Beam& beam, Vec3 r) {
    return std::visit([&](const auto& b) { return field_amplitude(b, r); }, beam);
}

// Peak intensity I0 (time-averaged): 2P/(pi wx wy) for Gaussian beams,
// per-unit-amplitude trap peak for arrays, eps0 c E0^2 / 2 for plane
// waves.
inline double peak_intensity(const GaussianBeam& b) {
    return 2.0 * b.power / (constants::pi * b.waist * b.waist);
}
inline double peak_intensity(const GeneralGaussianBeam& b) {
    return 2.0 * b.power / (constants::pi * b.waist_x * b.waist_y);
}
inline double peak_intensity(const PlanarBeam& b) {
    return 0.5 * constants::eps0 * constants::c_light * b.field_scale * b.field_scale;
}
inline double peak_intensity(const TweezerArray& arr) {
    return 2.0 * arr.power_per_unit_amplitude2 / (constants::pi * arr.trap_waist * arr.trap_waist);
}
inline double peak_intensity(const Beam& beam) {
    return std::visit([](const auto& b) { return peak_intensity(b); }, beam);
}

inline double intensity(const Beam& beam, Vec3 r) {
    return peak_intensity(beam) * std::norm(field_amplitude(beam, r));
}

// Peak electric field E0 from the time-averaged peak intensity.
inline double peak_field(const Beam& beam) {
    return std::sqrt(2.0 * peak_intensity(beam) / (constants::eps0 * constants::c_light));
}

// Dipole potential U(r) = -(alpha / 2 eps0 c) * I(r), in joules.
// Positive polarizability attracts atoms to intensity maxima.
inline double optical_potential(const Beam& beam, double polarizability, Vec3 r) {
    if (!finite(r)) throw std::invalid_argument("optical_potential: non-finite position");
    return -polarizability / (2.0 * constants::eps0 * constants::c_light) * intensity(beam, r);
}

// Smallest transverse length scale of a beam; sets the default
// finite-difference step for forces.
inline double force_length_scale(const Beam& beam) {
    struct V {
        double operator()(const GaussianBeam& b) const { return b.waist; }
        double operator()(const GeneralGaussianBeam& b) const { return std::min(b.waist_x, b.waist_y); }
        double operator()(const PlanarBeam& b) const {
            const double k = norm(b.wavevector);
            return k > 0 ? constants::two_pi / k : 0.0;
        }
        double operator()(const TweezerArray& b) const { return b.trap_waist; }
    };
    return std::visit(V{}, beam);
}

// F = -grad U by central finite differences with step h (h <= 0 selects
// waist/100 of this beam).
inline Vec3 optical_force(const Beam& beam, double polarizability, Vec3 r, double h = 0.0) {
    if (h <= 0.0) h = force_length_scale(beam) / 100.0;
    Vec3 f{};
    for (int i = 0; i < 3; ++i) {
        Vec3 rp = r, rm = r;
        rp.component(i) += h;
        rm.component(i) -= h;
        const double up = optical_potential(beam, polarizability, rp);
        const double um = optical_potential(beam, polarizability, rm);
        f.component(i) = -(up - um) / (2.0 * h);
    }
    return f;
}

// Total potential / force over a set of beams (intensities add; each
// beam sees its own polarizability). The force step uses the smallest
// length scale among the beams.
inline double optical_potential_total(std::span<const Beam> beams, std::span<const double> alphas, Vec3 r) {
    double u = 0.0;
    for (std::size_t i = 0; i < beams.size(); ++i) u += optical_potential(beams[i], alphas[i], r);
    return u;
}

inline Vec3 optical_force_total(std::span<const Beam> beams, std::span<const double> alphas, Vec3 r,
                                double h = 0.0) {
    if (h <= 0.0) {
        double scale = 0.0;
        for (const auto& b : beams) {
            const double s = force_length_scale(b);
            if (s > 0 && (scale == 0 || s < scale)) scale = s;
        }
        h = (scale > 0 ? scale : 1e-6) / 100.0;
    }
    Vec3 f{};
    for (std::size_t i = 0; i < beams.size(); ++i) f += optical_force(beams[i], alphas[i], r, h);
    return f;
}

inline const Polarization& beam_polarization(const Beam& beam) {
    return std::visit([](const auto& b) -> const Polarization& { return b.polarization; }, beam);
}

// Peak Rabi frequencies (pi, sigma+, sigma-) of a beam driving a unit
// transition of reduced dipole moment d_red: Omega_q = d E0 e_q / hbar.
struct RabiComponents {
    double pi, plus, minus;  // rad/s (magnitudes)
};

inline RabiComponents rabi_frequencies(const Beam& beam, Vec3 quantization_axis, double reduced_dipole) {
    if (reduced_dipole <= 0) throw std::invalid_argument("rabi_frequencies: dipole must be positive");
    const auto comps = spherical_components(beam_polarization(beam), quantization_axis);
    const double scale = reduced_dipole * peak_field(beam) / constants::hbar;
    return {scale * std::abs(comps.pi), scale * std::abs(comps.sigma_plus), scale * std::abs(comps.sigma_minus)};
}

} // namespace atomsim

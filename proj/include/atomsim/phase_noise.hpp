#pragma once

#include <cmath>
#include <complex>
#include <mutex>
#include <random>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "constants.hpp"
#include "rng.hpp"

namespace atomsim {

// One-sided laser frequency-noise PSD: a Gaussian servo bump plus a
// power-law background,
//   S_nu(f) = A_G exp(-(f - f0)^2 / (2 sigma^2)) + A_pl f^alpha   [Hz^2/Hz].
struct LaserPhaseNoiseModel {
    double servo_amplitude = 0.0;   // A_G, Hz^2/Hz
    double servo_frequency = 0.0;   // f0, Hz
    double servo_width = 1.0;       // sigma, Hz (> 0)
    double powerlaw_amplitude = 0.0;  // A_pl, Hz^2/Hz at 1 Hz
    double powerlaw_exponent = 0.0;   // alpha (0 = white frequency noise)

    double psd(double f) const {
        double s = 0.0;
        if (servo_amplitude > 0.0) {
            const double d = (f - servo_frequency) / servo_width;
            s += servo_amplitude * std::exp(-0.5 * d * d);
        }
        if (powerlaw_amplitude > 0.0 && f > 0.0) s += powerlaw_amplitude * std::pow(f, powerlaw_exponent);
        return s;
    }

    void validate() const {
        if (servo_width <= 0.0) throw std::invalid_argument("phase noise: servo width must be > 0");
        if (servo_amplitude < 0.0 || powerlaw_amplitude < 0.0)
            throw std::invalid_argument("phase noise: negative PSD amplitude");
    }
};

namespace detail {

// FFTW plan creation/destruction is not thread safe; executions on
// distinct plans are.
inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

inline void irfft(std::vector<std::complex<double>>& spectrum, std::vector<double>& out) {
    const int n = static_cast<int>(out.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spectrum.data()), out.data(),
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    for (double& x : out) x /= n;
}

} // namespace detail

// Synthesizes one time-domain phase trajectory phi(t_k), k = 0 .. n-1
// with n = round(duration/dt), by spectral shaping of complex white
// noise with sqrt(S_nu) on the rFFT grid of the full duration and
// integration in the frequency domain (each frequency component divided
// by i f_k). The DC bin is zeroed: a global phase offset is
// unobservable, and this regularizes the power-law divergence at f -> 0.
// The trajectory is pinned to phi(0) = 0.
inline std::vector<double> synthesize_phase_noise(const LaserPhaseNoiseModel& model, double duration, double dt,
                                                  std::mt19937_64& rng) {
    model.validate();
    if (!(duration >= dt) || !(dt > 0.0))
        throw std::invalid_argument("synthesize_phase_noise: need duration >= dt > 0");
    const int n = static_cast<int>(std::llround(duration / dt));
    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    if (model.servo_amplitude <= 0.0 && model.powerlaw_amplitude <= 0.0) return phi;

    const int n_freq = n / 2 + 1;
    const double df = 1.0 / (n * dt);
    std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n_freq), 0.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 1; k < n_freq; ++k) {
        const double f = k * df;
        // E|X_k|^2 = S(f_k) n / (2 dt) reproduces the one-sided PSD
        const double sigma_k = std::sqrt(model.psd(f) * n / (2.0 * dt));
        std::complex<double> z(gaussian(rng), gaussian(rng));
        z *= inv_sqrt2;
        if (2 * k == n) z = std::complex<double>(z.real() * std::sqrt(2.0), 0.0);  // Nyquist bin is real
        // frequency noise -> phase: divide by i f
        spectrum[static_cast<std::size_t>(k)] = sigma_k * z / std::complex<double>(0.0, f);
    }
    detail::irfft(spectrum, phi);
    const double phi0 = phi[0];
    for (double& x : phi) x -= phi0;
    return phi;
}

} // namespace atomsim

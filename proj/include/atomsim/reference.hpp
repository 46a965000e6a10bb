#pragma once

#include <cmath>
#include <complex>

namespace atomsim::reference {

// Undamped resonant Rabi oscillation from |g>.
inline double rabi_pe(double omega, double t) {
    const double s = std::sin(0.5 * omega * t);
    return s * s;
}

// Exact resonant optical-Bloch solution with spontaneous decay at rate
// gamma, starting from |g>. The (v, w) Bloch components obey
//   v' = -(gamma/2) v - omega w,   w' = omega v - gamma (w + 1),
// a constant-coefficient linear system solved in closed form via the
// exponential of the traceless part: exp(At) = e^{mu t} (cos(Wt) I +
// sin(Wt)/W (A - mu I)) with mu = -3 gamma / 4, W^2 = omega^2 -
// (gamma/4)^2 (analytic in W^2, so the overdamped case follows by the
// same complex formula).
inline double damped_bloch_pe(double omega, double gamma, double t) {
    const double mu = -0.75 * gamma;
    const std::complex<double> w2(omega * omega - gamma * gamma / 16.0, 0.0);
    const std::complex<double> w = std::sqrt(w2);
    const std::complex<double> coswt = std::cos(w * t);
    // sin(Wt)/W -> t as W -> 0
    const std::complex<double> sincwt = std::abs(w) * t > 1e-8 ? std::sin(w * t) / w
                                                               : std::complex<double>(t, 0.0);
    // A - mu I = [[gamma/4, -omega], [omega, -gamma/4]]; only the w row
    // of exp(At) is needed for P_e
    const double m21 = std::exp(mu * t) * (sincwt * omega).real();
    const double m22 = std::exp(mu * t) * (coswt + sincwt * (-gamma / 4.0)).real();

    // steady state x_ss = -A^{-1} b with b = (0, -gamma)
    const double det = gamma * gamma / 2.0 + omega * omega;
    const double vss = omega * gamma / det;
    const double wss = -gamma * gamma / (2.0 * det);

    const double v0 = 0.0 - vss;
    const double w0 = -1.0 - wss;
    const double wt = m21 * v0 + m22 * w0 + wss;
    return 0.5 * (1.0 + wt);
}

// Population left in |e> under pure decay.
inline double decay_pe(double gamma, double t) { return std::exp(-gamma * t); }

} // namespace atomsim::reference

#pragma once

// Physical constants (CODATA 2018) and unit conventions.
//
// Everything internal is SI with angular frequencies:
//   frequencies, Rabi amplitudes, detunings, rates  -> rad/s
//   positions -> m, time -> s, magnetic field -> T, power -> W.
// Hamiltonian matrix elements are stored as H/hbar (rad/s).

namespace atomsim::constants {

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double mu_B = 9.2740100783e-24;           // J/T
inline constexpr double k_B = 1.380649e-23;                // J/K
inline constexpr double c_light = 299792458.0;             // m/s
inline constexpr double eps0 = 8.8541878128e-12;           // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

} // namespace atomsim::constants

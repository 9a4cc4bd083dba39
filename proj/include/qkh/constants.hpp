// constants.hpp — Unit conventions and physical constants.
//
// The math core works in natural units, hbar = m = 1, where m is the mass of
// the trapped particle. SI quantities enter only through the optomech
// converters, which record the conversion factors they used.

#pragma once

#include <cmath>
#include <complex>

namespace qkh {

using cd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// SI Planck constant over 2*pi, J*s (2019 SI).
inline constexpr double hbar_si = 1.054571817e-34;

inline constexpr const char* code_version = "qkh 0.1.0";

// Zero-point length of a harmonic mode, sqrt(hbar / (2 m omega)).
inline double zero_point_length(double mass, double omega, double hbar = 1.0) {
    return std::sqrt(hbar / (2.0 * mass * omega));
}

}  // namespace qkh

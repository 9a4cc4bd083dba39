// drive.hpp — Quantized trap-position operators for a single driven mode.
//
// All interaction-picture operators here are linear in the ladder operators,
//   op(t) = c(t) a + conj(c(t)) a†,
// so each carries a single complex coefficient c(t) evaluated in closed form.
// Interaction-picture phases are applied analytically, never by exponentiating
// the number operator numerically.

#pragma once

#include "qkh/constants.hpp"
#include "qkh/envelope.hpp"
#include "qkh/fock.hpp"

namespace qkh {

struct DriveSpec {
    double ell = 0.0;    // coupling length
    double omega = 1.0;  // oscillator mode frequency
    Envelope envelope;
    // Drop the f' terms of the derivative operators. Requires omega * T >= 10.
    bool slow_envelope = false;

    void validate() const;

    // Dimensionless expansion parameter ell^2 / (2 a_zp^2) = m omega ell^2 / hbar.
    double epsilon(double mass = 1.0) const { return mass * omega * ell * ell; }
};

DriveSpec make_drive(double ell, double omega, Envelope envelope, bool slow_envelope = false);

// Threshold operationalizing the slow-envelope regime 1 << omega T.
inline constexpr double slow_envelope_min_omega_T = 10.0;

// a-coefficients of the drive operators; the a† coefficient is the conjugate.
cd alpha_coeff(const DriveSpec& spec, double t);         // Schrödinger picture, real
cd alpha_i_coeff(const DriveSpec& spec, double t);       // interaction picture
cd alpha_i_dot_coeff(const DriveSpec& spec, double t);   // first time derivative
cd alpha_i_ddot_coeff(const DriveSpec& spec, double t);  // second time derivative

// Hermitian oscillator matrix c a + conj(c) a†.
Mat linear_op(const FockSpace& fock, cd a_coefficient);

// alpha(t) = ell f(t) (a + a†).
Mat alpha_op(const DriveSpec& spec, const FockSpace& fock, double t);
// Interaction-picture alpha_i(t) = ell f(t) (a e^{-iwt} + a† e^{iwt}).
Mat alpha_i_op(const DriveSpec& spec, const FockSpace& fock, double t);
Mat alpha_i_dot(const DriveSpec& spec, const FockSpace& fock, double t);
Mat alpha_i_ddot(const DriveSpec& spec, const FockSpace& fock, double t);

}  // namespace qkh

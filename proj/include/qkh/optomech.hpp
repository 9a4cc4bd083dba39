// optomech.hpp — SI-facing mapping from cavity-optomechanics parameters onto
// the quantized-trap model, with regime validity checks. This is the only
// module that works in SI units; everything it hands to the core is converted
// to natural units with the conversion factors recorded in the mapping.

#pragma once

#include <string>

#include "qkh/errors.hpp"

namespace qkh {

// How the drive/detuning frequency printed in ordinary lab notation is read.
enum class FrequencyConvention { angular, ordinary };

struct OptomechParams {
    double mass_kg = 0.0;          // resonator mass
    double omega_mech = 0.0;       // mechanical angular frequency Omega, rad/s
    double g0 = 0.0;               // single-photon coupling, rad/s (0 = derive from G)
    double frequency_shift = 0.0;  // G, rad/s per meter (0 = derive from g0)
    double omega_drive = 0.0;      // drive/detuning frequency; see convention
    double kappa = 0.0;            // cavity decay, rad/s
    double n0 = 0.0;               // peak mean photon number scale
    double omega_mod = 0.0;        // photon-number modulation frequency, rad/s
    FrequencyConvention convention = FrequencyConvention::angular;
    bool strict_slow_modulation = false;  // raise the flag violation as an error

    void validate() const;
};

struct QkhMapping {
    double ell_m = 0.0;    // coupling length at peak photon number, meters
    double x_zp_m = 0.0;   // resonator zero-point motion, meters
    double g0 = 0.0;       // resolved coupling, rad/s
    double frequency_shift = 0.0;  // resolved G, rad/s/m
    double epsilon = 0.0;           // headline value under the stated convention
    double epsilon_angular = 0.0;   // omega read as rad/s
    double epsilon_ordinary = 0.0;  // omega read as Hz (multiplied by 2 pi)
    bool slow_modulation_ok = false;  // omega_mod <= kappa / 10
    bool perturbative = false;        // epsilon < 1
    // Conversion into core natural units (hbar = m = 1, drive mode at
    // omega = 1): lengths divide by sqrt(hbar / m omega), times by 1 / omega.
    double length_unit_m = 0.0;
    double time_unit_s = 0.0;

    std::string to_json() const;
};

// n_ph(t) = n0 [1 - sin(omega_mod t)].
double photon_modulation(double n0, double omega_mod, double t);

QkhMapping map_to_qkh(const OptomechParams& params);

// Phase spread accumulated by the photon-number-squared term eliminated from
// the optomechanical Hamiltonian, estimated over a coherent state's number
// spread sqrt(n_ph); a diagnostic for interference-sensitive observables.
double kerr_phase_audit(const OptomechParams& params, double duration_s);

}  // namespace qkh

#include "qkh/optomech.hpp"

#include <cmath>
#include <sstream>

#include "qkh/constants.hpp"

namespace qkh {

void OptomechParams::validate() const {
    if (!(mass_kg > 0.0)) throw validation_error("OptomechParams: mass must be positive");
    if (!(omega_mech > 0.0))
        throw validation_error("OptomechParams: mechanical frequency must be positive");
    if (!(omega_drive > 0.0)) throw validation_error("OptomechParams: drive frequency must be positive");
    if (!(kappa > 0.0)) throw validation_error("OptomechParams: cavity decay must be positive");
    if (n0 < 0.0) throw validation_error("OptomechParams: photon number must be non-negative");
    if (omega_mod < 0.0) throw validation_error("OptomechParams: modulation frequency must be >= 0");
    if (g0 < 0.0 || frequency_shift < 0.0)
        throw validation_error("OptomechParams: couplings must be non-negative");
    // Exactly one of {g0, G} drives the mapping; both zero is the decoupled case.
    if (g0 > 0.0 && frequency_shift > 0.0)
        throw validation_error("OptomechParams: supply at most one of g0 and the frequency shift G");
}

double photon_modulation(double n0, double omega_mod, double t) {
    if (n0 < 0.0) throw validation_error("photon_modulation: n0 must be non-negative");
    return n0 * (1.0 - std::sin(omega_mod * t));
}

QkhMapping map_to_qkh(const OptomechParams& params) {
    params.validate();
    QkhMapping map;
    map.x_zp_m = std::sqrt(hbar_si / (2.0 * params.mass_kg * params.omega_mech));
    if (params.g0 > 0.0) {
        map.g0 = params.g0;
        map.frequency_shift = params.g0 / map.x_zp_m;
    } else {
        map.frequency_shift = params.frequency_shift;
        map.g0 = params.frequency_shift * map.x_zp_m;
    }

    // ell f(t) = hbar G sqrt(n_ph(t)) / (m Omega^2); the constant ell is taken
    // at the modulation peak 2 n0 so the envelope stays within [0, 1].
    const double n_peak = 2.0 * params.n0;
    map.ell_m = hbar_si * map.frequency_shift * std::sqrt(n_peak) /
                (params.mass_kg * params.omega_mech * params.omega_mech);

    const double ratio = map.g0 / params.omega_mech;
    const double base = 2.0 * params.n0 * ratio * ratio;
    map.epsilon_angular = base * (params.omega_drive / params.omega_mech);
    map.epsilon_ordinary = base * (two_pi * params.omega_drive / params.omega_mech);
    map.epsilon = params.convention == FrequencyConvention::angular ? map.epsilon_angular
                                                                    : map.epsilon_ordinary;

    map.slow_modulation_ok = params.omega_mod <= params.kappa / 10.0;
    if (!map.slow_modulation_ok && params.strict_slow_modulation)
        throw validation_error(
            "map_to_qkh: photon-number modulation is not slow against the cavity decay "
            "(omega_mod > kappa/10)");
    map.perturbative = map.epsilon < 1.0;

    const double omega_angular = params.convention == FrequencyConvention::angular
                                     ? params.omega_drive
                                     : two_pi * params.omega_drive;
    // Core natural units (hbar = m = 1, drive mode at omega = 1): lengths in
    // sqrt(hbar / m omega), so the drive mode's zero-point length is 1/sqrt(2).
    map.length_unit_m = std::sqrt(hbar_si / (params.mass_kg * omega_angular));
    map.time_unit_s = 1.0 / omega_angular;
    return map;
}

double kerr_phase_audit(const OptomechParams& params, double duration_s) {
    params.validate();
    if (duration_s < 0.0) throw validation_error("kerr_phase_audit: duration must be >= 0");
    if (params.n0 == 0.0) return 0.0;
    const double x_zp = std::sqrt(hbar_si / (2.0 * params.mass_kg * params.omega_mech));
    const double shift = params.g0 > 0.0 ? params.g0 / x_zp : params.frequency_shift;
    // Kerr rate chi = hbar G^2 / (2 m Omega^2); spread over delta n = sqrt(n).
    const double chi = hbar_si * shift * shift /
                       (2.0 * params.mass_kg * params.omega_mech * params.omega_mech);
    return chi * duration_s * 2.0 * params.n0 * std::sqrt(params.n0);
}

std::string QkhMapping::to_json() const {
    std::ostringstream out;
    out.precision(12);
    out << "{\n"
        << "  \"ell_m\": " << ell_m << ",\n"
        << "  \"x_zp_m\": " << x_zp_m << ",\n"
        << "  \"g0_rad_s\": " << g0 << ",\n"
        << "  \"frequency_shift_rad_s_m\": " << frequency_shift << ",\n"
        << "  \"epsilon\": " << epsilon << ",\n"
        << "  \"epsilon_angular\": " << epsilon_angular << ",\n"
        << "  \"epsilon_ordinary\": " << epsilon_ordinary << ",\n"
        << "  \"slow_modulation_ok\": " << (slow_modulation_ok ? "true" : "false") << ",\n"
        << "  \"perturbative\": " << (perturbative ? "true" : "false") << ",\n"
        << "  \"length_unit_m\": " << length_unit_m << ",\n"
        << "  \"time_unit_s\": " << time_unit_s << "\n"
        << "}\n";
    return out.str();
}

}  // namespace qkh

#include "qkh/drive.hpp"

#include <cmath>

#include "qkh/constants.hpp"

namespace qkh {

void DriveSpec::validate() const {
    if (ell < 0.0) throw validation_error("DriveSpec: ell must be non-negative");
    if (!(omega > 0.0)) throw validation_error("DriveSpec: omega must be positive");
    envelope.validate();
    if (slow_envelope && omega * envelope.time_scale() < slow_envelope_min_omega_T)
        throw validation_error(
            "DriveSpec: slow_envelope requires omega * T >= 10; drop the flag or slow the envelope");
}

DriveSpec make_drive(double ell, double omega, Envelope envelope, bool slow_envelope) {
    DriveSpec spec{ell, omega, envelope, slow_envelope};
    spec.validate();
    return spec;
}

cd alpha_coeff(const DriveSpec& spec, double t) {
    return spec.ell * envelope_eval(spec.envelope, t).f;
}

cd alpha_i_coeff(const DriveSpec& spec, double t) {
    const double f = envelope_eval(spec.envelope, t).f;
    return spec.ell * f * std::exp(cd(0.0, -spec.omega * t));
}

cd alpha_i_dot_coeff(const DriveSpec& spec, double t) {
    const EnvelopeSample s = envelope_eval(spec.envelope, t);
    const double df = spec.slow_envelope ? 0.0 : s.df;
    return spec.ell * cd(df, -spec.omega * s.f) * std::exp(cd(0.0, -spec.omega * t));
}

cd alpha_i_ddot_coeff(const DriveSpec& spec, double t) {
    const EnvelopeSample s = envelope_eval(spec.envelope, t);
    const double w = spec.omega;
    if (spec.slow_envelope)  // exactly -w^2 alpha_i
        return -w * w * spec.ell * s.f * std::exp(cd(0.0, -w * t));
    return spec.ell * cd(s.d2f - w * w * s.f, -2.0 * w * s.df) * std::exp(cd(0.0, -w * t));
}

Mat linear_op(const FockSpace& fock, cd a_coefficient) {
    return a_coefficient * fock.annihilation() + std::conj(a_coefficient) * fock.creation();
}

Mat alpha_op(const DriveSpec& spec, const FockSpace& fock, double t) {
    return linear_op(fock, alpha_coeff(spec, t));
}

Mat alpha_i_op(const DriveSpec& spec, const FockSpace& fock, double t) {
    return linear_op(fock, alpha_i_coeff(spec, t));
}

Mat alpha_i_dot(const DriveSpec& spec, const FockSpace& fock, double t) {
    return linear_op(fock, alpha_i_dot_coeff(spec, t));
}

Mat alpha_i_ddot(const DriveSpec& spec, const FockSpace& fock, double t) {
    return linear_op(fock, alpha_i_ddot_coeff(spec, t));
}

}  // namespace qkh

#include "qkh/effective.hpp"

#include <cmath>

#include "qkh/constants.hpp"

namespace qkh {

namespace {

QuadratureOptions series_quad(const DriveSpec& spec) {
    QuadratureOptions opts;
    opts.rel_tol = series_quadrature_tol;
    opts.split_period = two_pi / spec.omega;
    return opts;
}

// Inner nested kernel: Int_{t_i}^{T2} F(T1, t) F(T2, T1) dT1.
cd nested_kernel(const DriveSpec& spec, double t_inner_start, double tau2, double t,
                 const QuadratureOptions& opts) {
    return integrate(
        [&](double tau1) {
            return f_kernel_exact(spec, tau1, t) * f_kernel_exact(spec, tau2, tau1);
        },
        t_inner_start, tau2, opts);
}

// Inner nested kernel with the outer-time derivative applied to the first factor.
cd nested_kernel_dt(const DriveSpec& spec, double t_inner_start, double tau2, double t,
                    const QuadratureOptions& opts) {
    return integrate(
        [&](double tau1) {
            return f_kernel_exact_dt(spec, tau1, t) * f_kernel_exact(spec, tau2, tau1);
        },
        t_inner_start, tau2, opts);
}

}  // namespace

EffectiveField::EffectiveField(DriveSpec s, int ord) : spec(std::move(s)), order(ord) {
    spec.validate();
    if (order < 0 || order > 2)
        throw validation_error("EffectiveField: order must be 0, 1, or 2");
}

cd EffectiveField::velocity_coeff(double t) const {
    const double t_i = spec.envelope.t_start;
    cd coeff = alpha_i_dot_coeff(spec, t);
    if (order >= 1 && spec.ell > 0.0 && t > t_i) {
        const QuadratureOptions opts = series_quad(spec);
        const cd first = integrate(
            [&](double tau) { return f_kernel_exact(spec, tau, t) * alpha_i_dot_coeff(spec, tau); },
            t_i, t, opts);
        coeff += squeeze_sign * cd(0.0, 1.0) * first;
        if (order >= 2) {
            const cd second = integrate(
                [&](double tau2) {
                    return nested_kernel(spec, t_i, tau2, t, opts) * alpha_i_dot_coeff(spec, tau2);
                },
                t_i, t, opts);
            coeff -= second;
        }
    }
    return coeff;
}

cd EffectiveField::acceleration_coeff(double t) const {
    const double t_i = spec.envelope.t_start;
    cd coeff = alpha_i_ddot_coeff(spec, t);
    if (order >= 1 && spec.ell > 0.0 && t > t_i) {
        const QuadratureOptions opts = series_quad(spec);
        // d/dt of the first-order term: F(t, t) = 0 kills the boundary piece.
        const cd first = integrate(
            [&](double tau) {
                return f_kernel_exact_dt(spec, tau, t) * alpha_i_dot_coeff(spec, tau);
            },
            t_i, t, opts);
        coeff += squeeze_sign * cd(0.0, 1.0) * first;
        if (order >= 2) {
            // Boundary piece Int F(T1, t) F(t, T1) dT1 plus the kernel derivative.
            const cd boundary = integrate(
                [&](double tau1) {
                    return f_kernel_exact(spec, tau1, t) * f_kernel_exact(spec, t, tau1);
                },
                t_i, t, opts);
            const cd interior = integrate(
                [&](double tau2) {
                    return nested_kernel_dt(spec, t_i, tau2, t, opts) *
                           alpha_i_dot_coeff(spec, tau2);
                },
                t_i, t, opts);
            coeff -= boundary * alpha_i_dot_coeff(spec, t) + interior;
        }
    }
    return coeff;
}

Mat EffectiveField::velocity_op(const FockSpace& fock, double t) const {
    return linear_op(fock, velocity_coeff(t));
}

Mat EffectiveField::acceleration_op(const FockSpace& fock, double t) const {
    return linear_op(fock, acceleration_coeff(t));
}

Mat alpha_R_dot(const DriveSpec& spec, const FockSpace& fock, int order, double t) {
    return EffectiveField(spec, order).velocity_op(fock, t);
}

Mat alpha_R_ddot(const DriveSpec& spec, const FockSpace& fock, int order, double t) {
    return EffectiveField(spec, order).acceleration_op(fock, t);
}

// --------------------------------------------------------------------------

EpsilonReport epsilon_report(double mass, double omega, double ell, double hbar) {
    if (!(mass > 0.0) || !(omega > 0.0) || ell < 0.0)
        throw validation_error("epsilon_report: mass and omega must be positive, ell non-negative");
    EpsilonReport report;
    report.a_zp = zero_point_length(mass, omega, hbar);
    report.ell = ell;
    report.epsilon = ell * ell / (2.0 * report.a_zp * report.a_zp);
    if (report.epsilon < 0.1)
        report.verdict = "perturbative";
    else if (report.epsilon < 1.0)
        report.verdict = "marginal";
    else
        report.verdict = "nonperturbative";
    return report;
}

// --------------------------------------------------------------------------

BchTerminationReport bch_termination_check(const DriveSpec& spec, double t_prime, double t,
                                           int n_cut) {
    const FockSpace fock(n_cut);
    const Mat v_p = alpha_i_dot(spec, fock, t_prime);
    const Mat v_t = alpha_i_dot(spec, fock, t);
    const Mat z = v_p * v_p;
    const Mat zx = z * v_t - v_t * z;
    const Mat zzx = z * zx - zx * z;
    const cd f = f_kernel_exact(spec, t_prime, t);
    // Degree-3 and degree-5 operator polynomials: truncation defects cannot
    // reach below margins 4 and 6.
    const Mat linear_residual = zx - 2.0 * f * v_p;
    return {interior_norm(zzx, std::min(6, n_cut - 2)),
            interior_norm(linear_residual, std::min(4, n_cut - 2))};
}

}  // namespace qkh

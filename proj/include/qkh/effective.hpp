// effective.hpp — The renormalized trap-velocity/acceleration operator series.
//
// The squeeze stage conjugates the velocity operator; because the commutator
// [v(t')^2, v(t)] = 2 F(t', t) v(t') is linear in v with a c-number kernel and
// all higher nested commutators vanish, the conjugation is an exact series of
// kernel integrals acting on the linear operator:
//
//   v_R(t) = v(t) + s i Int F(T1, t) v(T1) dT1
//          - Int dT2 [ Int F(T1, t) F(T2, T1) dT1 ] v(T2) + O(eps^3),
//
// truncated at the requested order. Every term stays linear in (a, a†), so the
// series reduces to one complex coefficient per time, evaluated by adaptive
// quadrature with per-period panels.

#pragma once

#include <string>

#include "qkh/drive.hpp"
#include "qkh/kernel.hpp"
#include "qkh/quadrature.hpp"

namespace qkh {

// Sign of the squeeze-stage exponent, U_half = Texp(s (i/hbar) Int m v^2/2).
// Fixed to -1: that branch cancels the -m v^2/2 term produced by the position
// shift, exactly as the classical chain's quadratic-phase unitary does.
inline constexpr double squeeze_sign = -1.0;

// Relative tolerance of the series quadratures.
inline constexpr double series_quadrature_tol = 1e-9;

struct EffectiveField {
    DriveSpec spec;
    int order = 1;  // 0, 1, or 2

    EffectiveField(DriveSpec s, int ord);

    // a-coefficients of the renormalized operators at time t, integrating from
    // the envelope start.
    cd velocity_coeff(double t) const;      // v_R(t)
    cd acceleration_coeff(double t) const;  // d/dt v_R(t)

    Mat velocity_op(const FockSpace& fock, double t) const;
    Mat acceleration_op(const FockSpace& fock, double t) const;
};

Mat alpha_R_dot(const DriveSpec& spec, const FockSpace& fock, int order, double t);
Mat alpha_R_ddot(const DriveSpec& spec, const FockSpace& fock, int order, double t);

// --------------------------------------------------------------------------

struct EpsilonReport {
    double epsilon = 0.0;
    double a_zp = 0.0;
    double ell = 0.0;
    std::string verdict;  // perturbative (<0.1) | marginal ([0.1,1)) | nonperturbative (>=1)
};

EpsilonReport epsilon_report(double mass, double omega, double ell, double hbar = 1.0);

// --------------------------------------------------------------------------

// Defect norms of the termination identities with Z = v(t')^2, X = v(t):
// [Z, [Z, X]] vanishes and [Z, X] equals 2 F(t', t) v(t'), both exactly on the
// interior block of the truncated space.
struct BchTerminationReport {
    double double_commutator_norm;  // ||[Z, [Z, X]]|| interior
    double linear_residual_norm;    // ||[Z, X] - 2 F v(t')|| interior
};
BchTerminationReport bch_termination_check(const DriveSpec& spec, double t_prime, double t,
                                           int n_cut);

}  // namespace qkh

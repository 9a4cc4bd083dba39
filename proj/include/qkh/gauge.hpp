// gauge.hpp — The classical and quantum transformation chains between the
// shaken-trap frame and the effective-field frame, applied numerically as
// stepwise products of exact single-generator exponentials.
//
// Quantum chain, applied left to right to a lab-frame state at time t:
//   U_a    oscillator interaction picture, exp(+i w t n)
//   U_0    position shift, Texp( d/dx Int v_i(t') dt' )
//   U_1/2  squeeze stage, Texp( squeeze_sign (i/hbar) Int m v_i(t')^2/2 dt' )
//   U_1    momentum kick, Texp( -(i/hbar) x Int m a_X(t') dt' ),
//          with a_X the renormalized or bare trap acceleration.

#pragma once

#include <functional>

#include "qkh/drive.hpp"
#include "qkh/potential.hpp"
#include "qkh/propagate.hpp"
#include "qkh/state.hpp"

namespace qkh {

// ---------------------------------------------------------------------------
// Classical chain (c-number trajectory)

struct ClassicalKH {
    std::function<double(double)> alpha;
    std::function<double(double)> alpha_dot;
    std::function<double(double)> alpha_ddot;
};

// Shake trajectory alpha(t) = amplitude * f(t) * sin(w_d t) with closed-form
// derivatives; alpha and alpha_dot vanish at the envelope endpoints.
ClassicalKH make_shake_trajectory(double amplitude, double omega_drive, const Envelope& envelope);

// Coherent-state mean trajectory of the quantized drive, 2 ell f(t) Re(beta e^{-iwt}).
ClassicalKH classical_limit_trajectory(const DriveSpec& spec, cd beta);

// E_eff(t) = -alpha_ddot(t) in natural units with unit charge.
std::function<double(double)> classical_effective_field(const ClassicalKH& trajectory);

// ---------------------------------------------------------------------------
// Quantum chain stages

struct StageConfig {
    double dt = 1e-3;
    // Midpoint (second-order) sampling of the stepwise product; the default is
    // the plain first-order left-point product.
    bool midpoint = false;
    bool stability_audit = true;
    long max_steps = 20000000;

    void validate() const;
};

// Which acceleration feeds the momentum-kick stage.
enum class U1Integrand { renormalized, bare };

void apply_interaction_picture(CompositeState& state, const DriveSpec& spec, double t);

// Forward transform moves the state into the co-moving frame (the position
// expectation shifts by -<alpha_i>); the inverse applies U_0† exactly
// (reversed step order, negated shifts) and realizes the conjugation identity
// U_0 x U_0† = x + alpha_i at the state level.
void apply_U0(CompositeState& state, const DriveSpec& spec, const StageConfig& stage, double t0,
              double t1, double mass = 1.0, bool inverse = false);

void apply_U_half(CompositeState& state, const DriveSpec& spec, const StageConfig& stage, double t0,
                  double t1, double mass = 1.0);

void apply_U1(CompositeState& state, const DriveSpec& spec, int order, const StageConfig& stage,
              double t0, double t1, U1Integrand integrand = U1Integrand::renormalized,
              double mass = 1.0);

// Full chain U_1 U_1/2 U_0 U_a applied to a lab-frame state at time t.
void apply_chain(CompositeState& state, const DriveSpec& spec, int order, const StageConfig& stage,
                 double t_start, double t, U1Integrand integrand = U1Integrand::renormalized,
                 double mass = 1.0);

// ---------------------------------------------------------------------------
// Frame equivalence

struct GaugeEquivalence {
    double fidelity = 0.0;
    double one_minus_fidelity = 0.0;
};

// Evolves `initial` in the lab frame, pushes it through the chain, evolves the
// same initial data directly in the effective-field frame at the given order,
// and returns the overlap. Requires t0 == envelope.t_start. When
// `richardson_check` is set, the whole comparison is repeated at dt/2 and a
// non-converged result raises a stability error carrying both values.
GaugeEquivalence gauge_equivalence_fidelity(const CompositeState& initial,
                                            const DriveSpec& spec, const PotentialSpec& potential,
                                            int order, const PropagatorConfig& config,
                                            const StageConfig& stage, double t0, double t1,
                                            bool richardson_check = false);

}  // namespace qkh

#include "qkh/gauge.hpp"

#include <cmath>
#include <sstream>

#include "qkh/constants.hpp"
#include "qkh/effective.hpp"
#include "qkh/spectral.hpp"

namespace qkh {

// ---------------------------------------------------------------------------
// Classical chain

ClassicalKH make_shake_trajectory(double amplitude, double omega_drive, const Envelope& envelope) {
    envelope.validate();
    ClassicalKH traj;
    traj.alpha = [=](double t) {
        return amplitude * envelope_eval(envelope, t).f * std::sin(omega_drive * t);
    };
    traj.alpha_dot = [=](double t) {
        const EnvelopeSample s = envelope_eval(envelope, t);
        return amplitude *
               (s.df * std::sin(omega_drive * t) + s.f * omega_drive * std::cos(omega_drive * t));
    };
    traj.alpha_ddot = [=](double t) {
        const EnvelopeSample s = envelope_eval(envelope, t);
        const double w = omega_drive;
        return amplitude * (s.d2f * std::sin(w * t) + 2.0 * s.df * w * std::cos(w * t) -
                            s.f * w * w * std::sin(w * t));
    };
    return traj;
}

ClassicalKH classical_limit_trajectory(const DriveSpec& spec, cd beta) {
    spec.validate();
    // <c(t) a + c*(t) a†> over a coherent state is 2 Re(c(t) beta).
    ClassicalKH traj;
    traj.alpha = [=](double t) { return 2.0 * std::real(alpha_i_coeff(spec, t) * beta); };
    traj.alpha_dot = [=](double t) { return 2.0 * std::real(alpha_i_dot_coeff(spec, t) * beta); };
    traj.alpha_ddot = [=](double t) { return 2.0 * std::real(alpha_i_ddot_coeff(spec, t) * beta); };
    return traj;
}

std::function<double(double)> classical_effective_field(const ClassicalKH& trajectory) {
    auto ddot = trajectory.alpha_ddot;
    return [ddot](double t) { return -ddot(t); };
}

// ---------------------------------------------------------------------------
// Quantum chain stages

void StageConfig::validate() const {
    if (!(dt > 0.0)) throw validation_error("StageConfig: dt must be positive");
    if (max_steps < 1) throw validation_error("StageConfig: max_steps must be >= 1");
}

void apply_interaction_picture(CompositeState& state, const DriveSpec& spec, double t) {
    for (int n = 0; n < state.n_cut; ++n)
        state.amplitudes.col(n) *= std::exp(cd(0.0, spec.omega * n * t));
}

namespace {

long stage_steps(double t0, double t1, const StageConfig& stage) {
    const double span = t1 - t0;
    if (!(span > 0.0)) throw validation_error("gauge stage: need t1 > t0");
    const long n = std::max<long>(1, std::lround(span / stage.dt));
    if (n > stage.max_steps)
        throw validation_error("gauge stage: step count exceeds max_steps");
    return n;
}

// Rotated-quadrature factorization c a + c* a† = |c| R V_Q diag(q) (R V_Q)†.
struct RotatedQuadrature {
    Mat basis;
    double magnitude;
};

RotatedQuadrature rotated_quadrature(const FockSpace& fock, cd c) {
    RotatedQuadrature rq;
    rq.magnitude = std::abs(c);
    rq.basis = fock.quadrature_eigen().vectors;
    const double theta = rq.magnitude > 0.0 ? std::arg(c) : 0.0;
    for (int n = 0; n < fock.n_cut; ++n) rq.basis.row(n) *= std::exp(cd(0.0, -theta * n));
    return rq;
}

void osc_rotate_in(Eigen::MatrixXcd& a, const Mat& basis) { a = a * basis.conjugate(); }
void osc_rotate_out(Eigen::MatrixXcd& a, const Mat& basis) { a = a * basis.transpose(); }

}  // namespace

void apply_U0(CompositeState& state, const DriveSpec& spec, const StageConfig& stage, double t0,
              double t1, double /*mass*/, bool inverse) {
    spec.validate();
    stage.validate();
    state.grid.require_spectral();
    const long n_steps = stage_steps(t0, t1, stage);
    const double dt = (t1 - t0) / double(n_steps);
    const FockSpace fock(state.n_cut);
    const Eigen::VectorXd& qvals = fock.quadrature_eigen().values;
    SpectralWorkspace ws(state.grid.n_points, state.n_cut);

    // Per-step shift audit: the largest eigen-shift must stay well under the
    // grid spacing for the stepwise product to track the time ordering.
    if (stage.stability_audit) {
        double vmax = 0.0;
        const int probes = 64;
        for (int i = 0; i <= probes; ++i)
            vmax = std::max(vmax,
                            std::abs(alpha_i_dot_coeff(spec, t0 + (t1 - t0) * i / probes)));
        const double shift_max = vmax * std::abs(qvals(state.n_cut - 1)) * dt;
        if (shift_max > 0.5 * state.grid.spacing()) {
            std::ostringstream msg;
            msg << "apply_U0: per-step shift " << shift_max << " exceeds half the grid spacing "
                << state.grid.spacing() << "; reduce stage dt";
            throw stability_error(msg.str());
        }
    }

    const double direction = inverse ? -1.0 : 1.0;
    for (long idx = 0; idx < n_steps; ++idx) {
        // The inverse walks the step sequence backwards.
        const long step = inverse ? n_steps - 1 - idx : idx;
        const double ts = t0 + (step + (stage.midpoint ? 0.5 : 0.0)) * dt;
        const cd c = alpha_i_dot_coeff(spec, ts);
        if (c == cd(0.0, 0.0)) continue;
        const RotatedQuadrature rq = rotated_quadrature(fock, c);
        osc_rotate_in(state.amplitudes, rq.basis);
        ws.to_momentum(state.amplitudes);
        for (int k = 0; k < state.n_cut; ++k) {
            const double shift = direction * rq.magnitude * qvals(k) * dt;
            for (int j = 0; j < state.grid.n_points; ++j)
                state.amplitudes(j, k) *= std::exp(cd(0.0, state.grid.k(j) * shift));
        }
        ws.to_position(state.amplitudes);
        osc_rotate_out(state.amplitudes, rq.basis);
    }
}

void apply_U_half(CompositeState& state, const DriveSpec& spec, const StageConfig& stage, double t0,
                  double t1, double mass) {
    spec.validate();
    stage.validate();
    const long n_steps = stage_steps(t0, t1, stage);
    const double dt = (t1 - t0) / double(n_steps);
    const FockSpace fock(state.n_cut);
    const Eigen::VectorXd& qvals = fock.quadrature_eigen().values;

    for (long step = 0; step < n_steps; ++step) {
        const double ts = t0 + (step + (stage.midpoint ? 0.5 : 0.0)) * dt;
        const cd c = alpha_i_dot_coeff(spec, ts);
        if (c == cd(0.0, 0.0)) continue;
        const RotatedQuadrature rq = rotated_quadrature(fock, c);
        osc_rotate_in(state.amplitudes, rq.basis);
        for (int k = 0; k < state.n_cut; ++k) {
            const double v2 = rq.magnitude * rq.magnitude * qvals(k) * qvals(k);
            state.amplitudes.col(k) *= std::exp(cd(0.0, squeeze_sign * 0.5 * mass * v2 * dt));
        }
        osc_rotate_out(state.amplitudes, rq.basis);
    }
}

void apply_U1(CompositeState& state, const DriveSpec& spec, int order, const StageConfig& stage,
              double t0, double t1, U1Integrand integrand, double mass) {
    spec.validate();
    stage.validate();
    const long n_steps = stage_steps(t0, t1, stage);
    const double dt = (t1 - t0) / double(n_steps);
    const FockSpace fock(state.n_cut);
    const Eigen::VectorXd& qvals = fock.quadrature_eigen().values;
    const EffectiveField field(spec, order);

    for (long step = 0; step < n_steps; ++step) {
        const double ts = t0 + (step + (stage.midpoint ? 0.5 : 0.0)) * dt;
        const cd c = integrand == U1Integrand::renormalized ? field.acceleration_coeff(ts)
                                                            : alpha_i_ddot_coeff(spec, ts);
        if (c == cd(0.0, 0.0)) continue;
        const RotatedQuadrature rq = rotated_quadrature(fock, c);
        osc_rotate_in(state.amplitudes, rq.basis);
        for (int k = 0; k < state.n_cut; ++k) {
            const double kick = mass * rq.magnitude * qvals(k) * dt;
            for (int g = 0; g < state.grid.n_points; ++g)
                state.amplitudes(g, k) *= std::exp(cd(0.0, -state.grid.x(g) * kick));
        }
        osc_rotate_out(state.amplitudes, rq.basis);
    }
}

void apply_chain(CompositeState& state, const DriveSpec& spec, int order, const StageConfig& stage,
                 double t_start, double t, U1Integrand integrand, double mass) {
    apply_interaction_picture(state, spec, t);
    apply_U0(state, spec, stage, t_start, t, mass);
    apply_U_half(state, spec, stage, t_start, t, mass);
    apply_U1(state, spec, order, stage, t_start, t, integrand, mass);
}

// ---------------------------------------------------------------------------

namespace {

GaugeEquivalence equivalence_once(const CompositeState& initial, const DriveSpec& spec,
                                  const PotentialSpec& potential, int order,
                                  const PropagatorConfig& config, const StageConfig& stage,
                                  double t0, double t1) {
    CompositeState lab = initial;
    evolve_lab(lab, potential, spec, config, t0, t1);
    apply_chain(lab, spec, order, stage, t0, t1);

    CompositeState direct = initial;
    apply_interaction_picture(direct, spec, t0);  // identity at t0 = 0
    evolve_final(direct, potential, spec, order, config, t0, t1);

    GaugeEquivalence result;
    result.fidelity = fidelity(lab, direct);
    result.one_minus_fidelity = 1.0 - result.fidelity;
    return result;
}

}  // namespace

GaugeEquivalence gauge_equivalence_fidelity(const CompositeState& initial, const DriveSpec& spec,
                                            const PotentialSpec& potential, int order,
                                            const PropagatorConfig& config,
                                            const StageConfig& stage, double t0, double t1,
                                            bool richardson_check) {
    if (std::abs(t0 - spec.envelope.t_start) > 1e-12)
        throw validation_error(
            "gauge_equivalence_fidelity: t0 must equal the envelope start so every stage begins as "
            "the identity");
    const GaugeEquivalence coarse =
        equivalence_once(initial, spec, potential, order, config, stage, t0, t1);
    if (richardson_check) {
        PropagatorConfig half_cfg = config;
        half_cfg.dt = 0.5 * config.dt;
        StageConfig half_stage = stage;
        half_stage.dt = 0.5 * stage.dt;
        const GaugeEquivalence fine =
            equivalence_once(initial, spec, potential, order, half_cfg, half_stage, t0, t1);
        const double drift = std::abs(fine.one_minus_fidelity - coarse.one_minus_fidelity);
        const double scale = std::max(coarse.one_minus_fidelity, 1e-12);
        if (drift > 0.25 * scale) {
            std::ostringstream msg;
            msg << "gauge_equivalence_fidelity: not converged in dt; 1-F(dt) = "
                << coarse.one_minus_fidelity << ", 1-F(dt/2) = " << fine.one_minus_fidelity
                << "; halve dt and retry";
            throw stability_error(msg.str());
        }
        return fine;
    }
    return coarse;
}

}  // namespace qkh

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkh/constants.hpp"
#include "qkh/gauge.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace qkh;

TEST_CASE("classical effective field") {
    SUBCASE("zero trajectory gives a zero field") {
        const ClassicalKH still{[](double) { return 0.0; }, [](double) { return 0.0; },
                                [](double) { return 0.0; }};
        const auto field = classical_effective_field(still);
        for (double t : {0.0, 1.0, 7.3}) CHECK(field(t) == 0.0);
    }

    SUBCASE("pure sine drive flips to + amplitude w^2 sin") {
        const double a0 = 0.3, wd = 1.7;
        const ClassicalKH traj =
            make_shake_trajectory(a0, wd, make_flat_top(0.0, 100.0, 0.0));
        const auto field = classical_effective_field(traj);
        for (double t : {2.0, 20.0, 63.0})
            CHECK(field(t) == doctest::Approx(a0 * wd * wd * std::sin(wd * t)).epsilon(1e-12));
    }

    SUBCASE("shake trajectory and its velocity vanish at the envelope endpoints") {
        const Envelope env = make_sin_squared(1.0, 9.0);
        const ClassicalKH traj = make_shake_trajectory(0.5, 2.3, env);
        for (double t : {1.0, 9.0}) {
            CHECK(std::abs(traj.alpha(t)) < 1e-14);
            CHECK(std::abs(traj.alpha_dot(t)) < 1e-14);
        }
    }
}

TEST_CASE("lab and dipole frames agree through the classical chain") {
    // Gaussian well shaken classically; position expectations in the two
    // frames differ by exactly the shift trajectory. The grid leaves room for
    // the weak ionized tail, which otherwise wraps into the dipole-frame ramp.
    const SpatialGrid grid(1024, -24.0, 24.0);
    const PotentialSpec pot = make_gaussian_well(4.0, 1.2);
    const Envelope env = make_sin_squared(0.0, 8.0);
    const ClassicalKH traj = make_shake_trajectory(0.4, 2.1, env);

    PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_every = 500;

    CompositeState lab(grid, 1);
    lab.amplitudes.col(0) = relax_ground_state(grid, pot).psi;
    CompositeState dipole = lab;

    const ObservableSeries lab_series =
        evolve_classical(lab, pot, cfg, 0.0, 8.0, traj.alpha, nullptr);
    const auto field = classical_effective_field(traj);
    // Dipole-frame potential term is +m x alpha_ddot = -m x E(t).
    const ObservableSeries dipole_series = evolve_classical(
        dipole, pot, cfg, 0.0, 8.0, nullptr, [&](double t) { return -field(t); });

    REQUIRE(lab_series.size() == dipole_series.size());
    for (std::size_t i = 0; i < lab_series.size(); ++i) {
        const double shift = traj.alpha(lab_series.t[i]);
        CHECK(std::abs(lab_series.x_mean[i] - shift - dipole_series.x_mean[i]) < 1e-6);
    }
}

TEST_CASE("position-shift stage") {
    const SpatialGrid grid(64, -8.0, 8.0);

    SUBCASE("zero envelope leaves the state untouched") {
        const CompositeState before = test::random_state(grid, 6, 3);
        CompositeState state = before;
        const DriveSpec spec = make_drive(0.1, 1.0, make_sin_squared(2.0, 3.0));
        StageConfig stage;
        stage.dt = 1e-2;
        apply_U0(state, spec, stage, 4.0, 5.0);  // support ended at t = 3
        CHECK((state.amplitudes - before.amplitudes).norm() == 0.0);
    }

    SUBCASE("conjugation identity: U_0 x U_0† = x + alpha_i at the state level") {
        const DriveSpec spec = make_drive(3e-4, 1.0, make_sin_squared(0.0, 6.0));
        const FockSpace fock(6);
        StageConfig stage;
        stage.dt = 2e-3;
        stage.midpoint = true;
        for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
            const CompositeState before = test::random_state(grid, 6, seed);
            const double t = 5.0;
            const double mean_shift =
                expectation_osc(before, alpha_i_op(spec, fock, t)).real();

            // <psi| U_0 x U_0† |psi> picks up + <alpha_i>.
            CompositeState adjoint_frame = before;
            apply_U0(adjoint_frame, spec, stage, 0.0, t, 1.0, true);
            CHECK(std::abs(expectation_x(adjoint_frame) - expectation_x(before) - mean_shift) <
                  1e-6);

            // The forward transform enters the co-moving frame: shift by -<alpha_i>.
            CompositeState forward = before;
            apply_U0(forward, spec, stage, 0.0, t);
            CHECK(std::abs(expectation_x(forward) - expectation_x(before) + mean_shift) < 1e-6);

            // Exactly unitary, and the inverse really inverts.
            CHECK(std::abs(forward.norm() - before.norm()) < 1e-10);
            apply_U0(forward, spec, stage, 0.0, t, 1.0, true);
            CHECK((forward.amplitudes - before.amplitudes).norm() < 1e-10);
        }
    }

    SUBCASE("residual of the shift identity grows quadratically in the coupling") {
        const FockSpace fock(6);
        StageConfig stage;
        stage.dt = 1e-3;
        stage.midpoint = true;
        auto residual = [&](double ell) {
            const DriveSpec spec = make_drive(ell, 1.0, make_sin_squared(0.0, 6.0));
            const CompositeState before = test::random_state(grid, 6, 9);
            CompositeState state = before;
            const double t = 5.0;
            apply_U0(state, spec, stage, 0.0, t);
            const double mean_shift =
                expectation_osc(before, alpha_i_op(spec, fock, t)).real();
            return std::abs(expectation_x(state) - expectation_x(before) + mean_shift);
        };
        const double r1 = residual(0.02), r2 = residual(0.04);
        CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.12));
    }

    SUBCASE("per-step shift audit fires on coarse stepping") {
        const DriveSpec spec = make_drive(0.8, 4.0, make_sin_squared(0.0, 6.0));
        CompositeState state = test::random_state(grid, 8, 13);
        StageConfig stage;
        stage.dt = 1.0;
        CHECK_THROWS_AS(apply_U0(state, spec, stage, 0.0, 6.0), stability_error);
    }
}

TEST_CASE("squeeze stage") {
    const SpatialGrid grid(32, -6.0, 6.0);

    SUBCASE("zero envelope is the identity") {
        const CompositeState before = test::random_state(grid, 8, 21);
        CompositeState state = before;
        const DriveSpec spec = make_drive(0.0, 1.0, make_sin_squared(0.0, 6.0));
        StageConfig stage;
        apply_U_half(state, spec, stage, 0.0, 5.0);
        CHECK((state.amplitudes - before.amplitudes).norm() == 0.0);
    }

    SUBCASE("vacuum variances match the symplectic covariance oracle") {
        const double omega = 1.0;
        const DriveSpec spec = make_drive(0.45, omega, make_flat_top(0.0, 40.0, 0.0));
        const double t1 = two_pi / omega;  // one period of constant drive

        ParticleInit packet;
        packet.kind = ParticleInit::Kind::gaussian_packet;
        const FockSpace fock(28);
        CompositeState state = prepare_state(grid, fock, packet, OscillatorInit{});

        StageConfig stage;
        stage.dt = 2e-4;
        stage.midpoint = true;
        apply_U_half(state, spec, stage, 0.0, t1);

        const oracle::Covariance cov =
            oracle::squeeze_covariance(spec, 0.0, t1, 20000, squeeze_sign);
        const QuadratureVariances got = quadrature_variances(reduced_oscillator(state));
        CHECK(std::abs(got.var_x - cov.var_x) < 1e-6);
        CHECK(std::abs(got.var_p - cov.var_p) < 1e-6);
        CHECK(std::abs(got.covariance - cov.cov) < 1e-6);

        // Still a pure Gaussian state: uncertainty product at the vacuum floor.
        CHECK(got.var_x * got.var_p - got.covariance * got.covariance >= 0.25 - 1e-8);
        // And genuinely squeezed below the vacuum variance.
        CHECK(minimal_quadrature_variance(got) < 0.5);
    }
}

TEST_CASE("momentum-kick stage") {
    const SpatialGrid grid(64, -8.0, 8.0);

    SUBCASE("zero envelope is the identity") {
        const CompositeState before = test::random_state(grid, 6, 31);
        CompositeState state = before;
        const DriveSpec spec = make_drive(0.0, 1.0, make_sin_squared(0.0, 6.0));
        StageConfig stage;
        apply_U1(state, spec, 0, stage, 0.0, 5.0);
        CHECK((state.amplitudes - before.amplitudes).norm() == 0.0);
    }

    SUBCASE("coherent drive kicks the particle by the classical velocity change") {
        const double ell = 1e-3, omega = 1.3;
        const DriveSpec spec = make_drive(ell, omega, make_sin_squared(0.0, 7.0));
        const FockSpace fock(18);
        OscillatorInit osc;
        osc.kind = OscillatorInit::Kind::coherent;
        osc.beta = 2.0;
        ParticleInit packet;
        packet.kind = ParticleInit::Kind::gaussian_packet;
        const CompositeState before = prepare_state(grid, fock, packet, osc);

        CompositeState state = before;
        StageConfig stage;
        stage.dt = 1e-3;
        stage.midpoint = true;
        const double t = 5.0;
        apply_U1(state, spec, 0, stage, 0.0, t);

        const ClassicalKH traj = classical_limit_trajectory(spec, 2.0);
        // Kick = -integral of the mean acceleration = -(alpha_dot(t) - alpha_dot(0)).
        const double expected = -(traj.alpha_dot(t) - traj.alpha_dot(0.0));
        CHECK(std::abs((expectation_p(state) - expectation_p(before)) - expected) < 1e-6);
    }

    SUBCASE("unitary on random states") {
        const DriveSpec spec = make_drive(0.2, 1.0, make_sin_squared(0.0, 6.0));
        StageConfig stage;
        stage.dt = 5e-3;
        for (unsigned seed : {41u, 42u, 43u}) {
            CompositeState state = test::random_state(grid, 8, seed);
            const double norm_before = state.norm();
            apply_U1(state, spec, 1, stage, 0.0, 6.0);
            CHECK(std::abs(state.norm() - norm_before) < 1e-8);
        }
    }
}

TEST_CASE("chain preserves the norm over a full run") {
    const SpatialGrid grid(128, -10.0, 10.0);
    const DriveSpec spec = make_drive(0.1, 1.0, make_sin_squared(0.0, 10.0));
    const FockSpace fock(10);
    const PotentialSpec pot = make_harmonic(0.3);
    CompositeState state = prepare_state(grid, fock, ParticleInit{}, OscillatorInit{}, &pot);
    StageConfig stage;
    stage.dt = 2e-3;
    apply_chain(state, spec, 1, stage, 0.0, 10.0);
    CHECK(std::abs(state.norm() - 1.0) < 1e-6);
}

TEST_CASE("gauge equivalence between the shaken frame and the effective frame") {
    const SpatialGrid grid(128, -10.0, 10.0);
    const PotentialSpec pot = make_harmonic(0.8);
    const FockSpace fock(8);
    const CompositeState initial =
        prepare_state(grid, fock, ParticleInit{}, OscillatorInit{}, &pot);

    PropagatorConfig cfg;
    cfg.dt = 2e-3;
    cfg.sample_every = 1000;
    StageConfig stage;
    stage.dt = 2e-3;
    stage.midpoint = true;

    SUBCASE("vanishing coupling decouples the frames") {
        const DriveSpec spec = make_drive(0.0, 1.0, make_sin_squared(0.0, 6.0));
        const GaugeEquivalence eq =
            gauge_equivalence_fidelity(initial, spec, pot, 1, cfg, stage, 0.0, 6.0);
        CHECK(eq.one_minus_fidelity < 1e-8);
    }

    SUBCASE("infinitesimal interval keeps the frames identical") {
        const DriveSpec spec = make_drive(0.1, 1.0, make_sin_squared(0.0, 6.0));
        PropagatorConfig tiny = cfg;
        tiny.dt = 1e-7;
        StageConfig tiny_stage = stage;
        tiny_stage.dt = 1e-7;
        const GaugeEquivalence eq =
            gauge_equivalence_fidelity(initial, spec, pot, 1, tiny, tiny_stage, 0.0, 1e-6);
        CHECK(eq.one_minus_fidelity < 1e-10);
    }

    SUBCASE("order-1 deficit at eps = 1e-2 is quadratically small") {
        const DriveSpec spec = make_drive(0.1, 1.0, make_sin_squared(0.0, 7.5));
        const GaugeEquivalence eq =
            gauge_equivalence_fidelity(initial, spec, pot, 1, cfg, stage, 0.0, 7.5);
        CHECK(eq.one_minus_fidelity < 30.0 * 1e-4);
        CHECK(eq.fidelity > 0.0);
    }

    SUBCASE("mismatched start time is rejected") {
        const DriveSpec spec = make_drive(0.1, 1.0, make_sin_squared(1.0, 7.0));
        CHECK_THROWS_AS(gauge_equivalence_fidelity(initial, spec, pot, 1, cfg, stage, 0.0, 7.0),
                        validation_error);
    }

    SUBCASE("step-halving audit flags unconverged chain stages") {
        // Fine propagation against very coarse first-order stage products: the
        // deficit moves strongly under step halving and the audit must throw.
        const DriveSpec spec = make_drive(0.25, 1.0, make_sin_squared(0.0, 7.5));
        PropagatorConfig fine = cfg;
        fine.leak_error = 1.0;
        StageConfig coarse_stage;
        coarse_stage.dt = 1.5;
        coarse_stage.midpoint = false;
        coarse_stage.stability_audit = false;
        CHECK_THROWS_AS(gauge_equivalence_fidelity(initial, spec, pot, 1, fine, coarse_stage,
                                                   0.0, 7.5, true),
                        stability_error);
    }
}

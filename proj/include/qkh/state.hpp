// state.hpp — Joint particle (x) ⊗ oscillator (Fock) state, preparation,
// expectation values, reduced density matrices, and binary snapshots.

#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qkh/constants.hpp"
#include "qkh/fock.hpp"
#include "qkh/grid.hpp"
#include "qkh/potential.hpp"

namespace qkh {

struct CompositeState {
    SpatialGrid grid;
    int n_cut = 1;
    // Column-major (n_points x n_cut): one contiguous spatial column per Fock level.
    Eigen::MatrixXcd amplitudes;

    CompositeState() = default;
    CompositeState(const SpatialGrid& g, int fock_dim);

    double dx() const { return grid.spacing(); }
    double norm_squared() const { return dx() * amplitudes.squaredNorm(); }
    double norm() const { return std::sqrt(norm_squared()); }
    void normalize();

    // Population of the top Fock level relative to the total norm.
    double top_level_population() const;

    void require_finite() const;
};

// --------------------------------------------------------------------------
// Preparation

struct ParticleInit {
    enum class Kind { trap_ground_state, gaussian_packet } kind = Kind::trap_ground_state;
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;  // position spread of the gaussian packet
};

struct OscillatorInit {
    enum class Kind { vacuum, coherent, squeezed } kind = Kind::vacuum;
    cd beta = 0.0;    // coherent amplitude
    double r = 0.0;   // squeezing magnitude
    double phi = 0.0;  // squeezing angle
};

// Oscillator-side Fock coefficients of the requested initial state.
Vec oscillator_coefficients(const OscillatorInit& init, int n_cut);

// Ground state of the trap by imaginary-time relaxation (any potential kind),
// returning the normalized wave function and its energy.
struct GroundState {
    Eigen::VectorXcd psi;
    double energy = 0.0;
    int iterations = 0;
};
GroundState relax_ground_state(const SpatialGrid& grid, const PotentialSpec& potential,
                               double mass = 1.0, double stop_tol = 1e-10);

// Analytic harmonic ground state (for cross-checks).
Eigen::VectorXcd harmonic_ground_state(const SpatialGrid& grid, double omega_trap, double mass = 1.0);

// Normalized product state particle ⊗ oscillator. The potential is required
// when the particle initializer asks for the trap ground state.
CompositeState prepare_state(const SpatialGrid& grid, const FockSpace& fock,
                             const ParticleInit& particle, const OscillatorInit& oscillator,
                             const PotentialSpec* potential = nullptr, double mass = 1.0);

// --------------------------------------------------------------------------
// Expectation values

// Factorized operator O = particle_part ⊗ osc. Missing parts mean identity;
// the particle part may be a diagonal (function of x) or a dense matrix.
struct OperatorSpec {
    std::optional<Mat> osc;
    std::optional<Eigen::VectorXd> particle_diag;
    std::optional<Eigen::MatrixXcd> particle_dense;
};

cd expectation(const CompositeState& state, const OperatorSpec& op);

cd expectation_osc(const CompositeState& state, const Mat& osc_matrix);
double expectation_x(const CompositeState& state);
double expectation_x2(const CompositeState& state);
double expectation_p(const CompositeState& state);
double expectation_kinetic(const CompositeState& state, double mass = 1.0);
double expectation_potential_diag(const CompositeState& state, const std::vector<double>& v);

// Reduced oscillator density matrix (n_cut x n_cut), trace = |psi|^2.
Mat reduced_oscillator(const CompositeState& state);

// Reduced particle density matrix is usually too large to be useful; the
// fidelity of the particle marginal against a pure reference covers the tests.
double particle_fidelity_against_pure(const CompositeState& state, const Eigen::VectorXcd& pure);

// --------------------------------------------------------------------------
// Binary snapshots: "QKH1", u32 n_points, u32 n_cut, f64 x_min, f64 x_max,
// then grid-major interleaved (re, im) f64 pairs.

void save_snapshot(const CompositeState& state, const std::string& path);
CompositeState load_snapshot(const std::string& path);

}  // namespace qkh

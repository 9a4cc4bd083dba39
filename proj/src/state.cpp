#include "qkh/state.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>

#include "qkh/constants.hpp"
#include "qkh/spectral.hpp"

namespace qkh {

CompositeState::CompositeState(const SpatialGrid& g, int fock_dim) : grid(g), n_cut(fock_dim) {
    if (n_cut < 1) throw validation_error("CompositeState: n_cut must be >= 1");
    amplitudes = Eigen::MatrixXcd::Zero(grid.n_points, n_cut);
}

void CompositeState::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw validation_error("CompositeState: cannot normalize a zero state");
    amplitudes /= n;
}

double CompositeState::top_level_population() const {
    const double total = amplitudes.squaredNorm();
    if (total == 0.0) return 0.0;
    return amplitudes.col(n_cut - 1).squaredNorm() / total;
}

void CompositeState::require_finite() const {
    if (!amplitudes.allFinite()) throw stability_error("CompositeState: non-finite amplitudes");
}

// --------------------------------------------------------------------------

Vec oscillator_coefficients(const OscillatorInit& init, int n_cut) {
    Vec c = Vec::Zero(n_cut);
    switch (init.kind) {
        case OscillatorInit::Kind::vacuum:
            c(0) = 1.0;
            break;
        case OscillatorInit::Kind::coherent: {
            const double nbar = std::norm(init.beta);
            if (nbar > double(n_cut) / 4.0)
                throw truncation_error(
                    "coherent state: |beta|^2 exceeds n_cut/4, truncation leakage above 1e-8");
            c(0) = std::exp(-0.5 * nbar);
            for (int n = 1; n < n_cut; ++n) c(n) = c(n - 1) * init.beta / std::sqrt(double(n));
            break;
        }
        case OscillatorInit::Kind::squeezed: {
            // Even-level expansion of squeezed vacuum.
            const double th = std::tanh(init.r);
            const cd z = -std::exp(cd(0.0, init.phi)) * th;
            c(0) = std::sqrt(1.0 / std::cosh(init.r));
            for (int k = 1; 2 * k < n_cut; ++k)
                c(2 * k) = c(2 * k - 2) * z * std::sqrt(double(2 * k) * (2 * k - 1)) / (2.0 * k);
            break;
        }
    }
    return c;
}

Eigen::VectorXcd harmonic_ground_state(const SpatialGrid& grid, double omega_trap, double mass) {
    Eigen::VectorXcd psi(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        psi(i) = std::exp(-0.5 * mass * omega_trap * x * x);
    }
    psi /= std::sqrt(grid.spacing()) * psi.norm();
    return psi;
}

namespace {

double particle_energy(const SpatialGrid& grid, const SpectralWorkspace& ws,
                       const Eigen::VectorXcd& psi, const std::vector<double>& v, double mass) {
    const double dx = grid.spacing();
    double pot = 0.0;
    for (int i = 0; i < grid.n_points; ++i) pot += v[i] * std::norm(psi(i)) * dx;
    Eigen::MatrixXcd tmp = psi;
    ws.to_momentum(tmp);
    double kin = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        const double k = grid.k(j);
        kin += 0.5 * k * k / mass * std::norm(tmp(j, 0));
    }
    kin *= dx / double(grid.n_points);  // Parseval for the unnormalized DFT
    const double nrm = dx * psi.squaredNorm();
    return (pot + kin) / nrm;
}

}  // namespace

GroundState relax_ground_state(const SpatialGrid& grid, const PotentialSpec& potential, double mass,
                               double stop_tol) {
    grid.require_spectral();
    const SpectralWorkspace ws(grid.n_points, 1);
    const std::vector<double> v = potential.values(grid);
    const double dx = grid.spacing();

    // Imaginary-time step sized against the energy scale of the potential range.
    double v_span = 0.0;
    for (double vi : v) v_span = std::max(v_span, std::abs(vi));
    const double dtau = 0.05 / std::max(1.0, v_span);

    Eigen::VectorXcd half_kin(grid.n_points), full_pot(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double k = grid.k(j);
        half_kin(j) = std::exp(-0.5 * dtau * 0.5 * k * k / mass);
    }
    for (int i = 0; i < grid.n_points; ++i) full_pot(i) = std::exp(-dtau * v[i]);

    // A mildly offset gaussian seed overlaps the ground state for every kind.
    Eigen::VectorXcd psi(grid.n_points);
    const double w = 0.25 * (grid.x_max - grid.x_min);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        psi(i) = std::exp(-x * x / (2.0 * w * w)) * (1.0 + 0.01 * std::cos(3.0 * x / w));
    }
    psi /= std::sqrt(dx) * psi.norm();

    Eigen::MatrixXcd buf(grid.n_points, 1);
    double e_prev2 = 0.0, e_prev = 0.0;
    double energy = particle_energy(grid, ws, psi, v, mass);
    int iter = 0;
    const int max_iter = 200000;
    for (; iter < max_iter; ++iter) {
        buf.col(0) = psi;
        ws.to_momentum(buf);
        buf.col(0).array() *= half_kin.array();
        ws.to_position(buf);
        buf.col(0).array() *= full_pot.array();
        ws.to_momentum(buf);
        buf.col(0).array() *= half_kin.array();
        ws.to_position(buf);
        psi = buf.col(0);
        psi /= std::sqrt(dx) * psi.norm();

        if (iter % 8 == 7) {
            e_prev2 = e_prev;
            e_prev = energy;
            energy = particle_energy(grid, ws, psi, v, mass);
            // Aitken-extrapolated limit; stop when the geometric tail is resolved.
            const double d1 = energy - e_prev, d2 = e_prev - e_prev2;
            if (iter > 32 && d2 != d1) {
                const double e_extrap = energy - d1 * d1 / (d1 - d2);
                if (std::abs(e_extrap - energy) < stop_tol * std::max(1.0, std::abs(energy))) {
                    energy = particle_energy(grid, ws, psi, v, mass);
                    return {psi, energy, iter + 1};
                }
            }
        }
    }
    return {psi, particle_energy(grid, ws, psi, v, mass), iter};
}

CompositeState prepare_state(const SpatialGrid& grid, const FockSpace& fock,
                             const ParticleInit& particle, const OscillatorInit& oscillator,
                             const PotentialSpec* potential, double mass) {
    Eigen::VectorXcd phi;
    switch (particle.kind) {
        case ParticleInit::Kind::trap_ground_state: {
            if (!potential)
                throw validation_error("prepare_state: trap ground state requires a potential");
            phi = relax_ground_state(grid, *potential, mass).psi;
            break;
        }
        case ParticleInit::Kind::gaussian_packet: {
            if (!(particle.sigma > 0.0))
                throw validation_error("prepare_state: gaussian packet sigma must be positive");
            phi.resize(grid.n_points);
            for (int i = 0; i < grid.n_points; ++i) {
                const double x = grid.x(i);
                const double arg = -(x - particle.x0) * (x - particle.x0) /
                                   (4.0 * particle.sigma * particle.sigma);
                phi(i) = std::exp(cd(arg, particle.p0 * x));
            }
            phi /= std::sqrt(grid.spacing()) * phi.norm();
            break;
        }
    }

    const Vec c = oscillator_coefficients(oscillator, fock.n_cut);
    CompositeState state(grid, fock.n_cut);
    state.amplitudes = phi * c.transpose();
    state.normalize();
    return state;
}

// --------------------------------------------------------------------------

cd expectation(const CompositeState& state, const OperatorSpec& op) {
    if (op.particle_diag && op.particle_dense)
        throw validation_error("expectation: specify at most one particle part");
    Eigen::MatrixXcd acted = state.amplitudes;
    if (op.osc) {
        if (op.osc->rows() != state.n_cut || op.osc->cols() != state.n_cut)
            throw validation_error("expectation: oscillator operator dimension mismatch");
        acted = acted * op.osc->transpose();
    }
    if (op.particle_diag) {
        if (op.particle_diag->size() != state.grid.n_points)
            throw validation_error("expectation: particle diagonal dimension mismatch");
        acted.array().colwise() *= op.particle_diag->array().cast<cd>();
    } else if (op.particle_dense) {
        if (op.particle_dense->rows() != state.grid.n_points ||
            op.particle_dense->cols() != state.grid.n_points)
            throw validation_error("expectation: particle matrix dimension mismatch");
        acted = (*op.particle_dense) * acted;
    }
    const cd raw = (state.amplitudes.conjugate().cwiseProduct(acted)).sum();
    return raw * state.dx();
}

cd expectation_osc(const CompositeState& state, const Mat& osc_matrix) {
    OperatorSpec op;
    op.osc = osc_matrix;
    return expectation(state, op);
}

double expectation_x(const CompositeState& state) {
    double acc = 0.0;
    for (int i = 0; i < state.grid.n_points; ++i)
        acc += state.grid.x(i) * state.amplitudes.row(i).squaredNorm();
    return acc * state.dx() / state.norm_squared();
}

double expectation_x2(const CompositeState& state) {
    double acc = 0.0;
    for (int i = 0; i < state.grid.n_points; ++i) {
        const double x = state.grid.x(i);
        acc += x * x * state.amplitudes.row(i).squaredNorm();
    }
    return acc * state.dx() / state.norm_squared();
}

namespace {

// <psi| g(k) |psi> evaluated spectrally.
double momentum_space_average(const CompositeState& state, const std::function<double(double)>& g) {
    SpectralWorkspace ws(state.grid.n_points, state.n_cut);
    Eigen::MatrixXcd tmp = state.amplitudes;
    ws.to_momentum(tmp);
    double acc = 0.0;
    for (int j = 0; j < state.grid.n_points; ++j)
        acc += g(state.grid.k(j)) * tmp.row(j).squaredNorm();
    acc *= state.dx() / double(state.grid.n_points);
    return acc / state.norm_squared();
}

}  // namespace

double expectation_p(const CompositeState& state) {
    return momentum_space_average(state, [](double k) { return k; });
}

double expectation_kinetic(const CompositeState& state, double mass) {
    return momentum_space_average(state, [mass](double k) { return 0.5 * k * k / mass; });
}

double expectation_potential_diag(const CompositeState& state, const std::vector<double>& v) {
    if (int(v.size()) != state.grid.n_points)
        throw validation_error("expectation_potential_diag: dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < state.grid.n_points; ++i)
        acc += v[i] * state.amplitudes.row(i).squaredNorm();
    return acc * state.dx() / state.norm_squared();
}

Mat reduced_oscillator(const CompositeState& state) {
    // rho(m, n) = dx * sum_g psi(g, m) conj(psi(g, n))
    return state.dx() * (state.amplitudes.transpose() * state.amplitudes.conjugate());
}

double particle_fidelity_against_pure(const CompositeState& state, const Eigen::VectorXcd& pure) {
    if (pure.size() != state.grid.n_points)
        throw validation_error("particle_fidelity_against_pure: dimension mismatch");
    // <phi| rho_particle |phi> with rho the particle marginal.
    const Eigen::VectorXcd overlaps = state.dx() * (pure.adjoint() * state.amplitudes).transpose();
    const double phi_norm = state.dx() * pure.squaredNorm();
    return overlaps.squaredNorm() / (phi_norm * state.norm_squared());
}

// --------------------------------------------------------------------------

void save_snapshot(const CompositeState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("save_snapshot: cannot open " + path);
    out.write("QKH1", 4);
    const std::uint32_t np = std::uint32_t(state.grid.n_points), nc = std::uint32_t(state.n_cut);
    out.write(reinterpret_cast<const char*>(&np), 4);
    out.write(reinterpret_cast<const char*>(&nc), 4);
    out.write(reinterpret_cast<const char*>(&state.grid.x_min), 8);
    out.write(reinterpret_cast<const char*>(&state.grid.x_max), 8);
    for (int g = 0; g < state.grid.n_points; ++g)
        for (int n = 0; n < state.n_cut; ++n) {
            const double re = state.amplitudes(g, n).real(), im = state.amplitudes(g, n).imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
    if (!out) throw validation_error("save_snapshot: write failed for " + path);
}

CompositeState load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("load_snapshot: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "QKH1", 4) != 0)
        throw validation_error("load_snapshot: bad magic in " + path);
    std::uint32_t np = 0, nc = 0;
    double x_min = 0.0, x_max = 0.0;
    in.read(reinterpret_cast<char*>(&np), 4);
    in.read(reinterpret_cast<char*>(&nc), 4);
    in.read(reinterpret_cast<char*>(&x_min), 8);
    in.read(reinterpret_cast<char*>(&x_max), 8);
    if (!in) throw validation_error("load_snapshot: truncated header in " + path);
    CompositeState state(SpatialGrid(int(np), x_min, x_max), int(nc));
    for (int g = 0; g < state.grid.n_points; ++g)
        for (int n = 0; n < state.n_cut; ++n) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            state.amplitudes(g, n) = cd(re, im);
        }
    if (!in) throw validation_error("load_snapshot: truncated payload in " + path);
    return state;
}

}  // namespace qkh

#include "qkh/bath.hpp"

#include <algorithm>
#include <cmath>

#include "qkh/constants.hpp"
#include "qkh/errors.hpp"

namespace qkh {

double CouplingDensity::value(double omega) const {
    switch (kind) {
        case DensityKind::flat:
            return amplitude;
        case DensityKind::gaussian:
            return amplitude * std::exp(-(omega - center) * (omega - center) / (2.0 * width * width));
        case DensityKind::table: {
            if (table_omega.empty()) return 0.0;
            if (omega <= table_omega.front()) return table_value.front();
            if (omega >= table_omega.back()) return table_value.back();
            const auto it = std::upper_bound(table_omega.begin(), table_omega.end(), omega);
            const std::size_t hi = std::size_t(it - table_omega.begin());
            const double w0 = table_omega[hi - 1], w1 = table_omega[hi];
            const double u = (omega - w0) / (w1 - w0);
            return (1.0 - u) * table_value[hi - 1] + u * table_value[hi];
        }
    }
    return 0.0;
}

void CouplingDensity::validate() const {
    if (amplitude < 0.0) throw validation_error("CouplingDensity: amplitude must be non-negative");
    if (kind == DensityKind::gaussian && !(width > 0.0))
        throw validation_error("CouplingDensity: gaussian width must be positive");
    if (kind == DensityKind::table) {
        if (table_omega.size() != table_value.size() || table_omega.size() < 2)
            throw validation_error("CouplingDensity: table needs matching omega/value arrays (>= 2)");
        if (!std::is_sorted(table_omega.begin(), table_omega.end()))
            throw validation_error("CouplingDensity: table omegas must be sorted");
        for (double v : table_value)
            if (!std::isfinite(v) || v < 0.0)
                throw validation_error("CouplingDensity: table values must be finite and >= 0");
    }
}

long BathSpec::total_dim() const {
    long d = 1;
    for (const auto& m : modes) d *= m.n_levels;
    return d;
}

std::vector<int> BathSpec::dims() const {
    std::vector<int> d;
    d.reserve(modes.size());
    for (const auto& m : modes) d.push_back(m.n_levels);
    return d;
}

void BathSpec::validate() const {
    if (modes.empty()) throw validation_error("BathSpec: need at least one mode");
    for (const auto& m : modes) {
        if (!(m.omega > 0.0)) throw validation_error("BathSpec: mode frequencies must be positive");
        if (m.coupling < 0.0) throw validation_error("BathSpec: couplings must be non-negative");
        if (m.n_levels < 2) throw validation_error("BathSpec: per-mode truncation must be >= 2");
    }
}

BathSpec discretize(const CouplingDensity& density, double omega_min, double omega_max, int n_modes,
                    int n_levels_per_mode) {
    density.validate();
    if (n_modes < 1) throw validation_error("discretize: need at least one mode");
    if (!(omega_max > omega_min) || !(omega_min > 0.0))
        throw validation_error("discretize: need 0 < omega_min < omega_max");
    BathSpec bath;
    bath.delta_omega = (omega_max - omega_min) / n_modes;
    for (int k = 0; k < n_modes; ++k) {
        BathMode mode;
        mode.omega = omega_min + (k + 0.5) * bath.delta_omega;
        const double dens = density.value(mode.omega);
        if (!std::isfinite(dens)) throw validation_error("discretize: non-finite coupling density");
        mode.coupling = dens * std::sqrt(bath.delta_omega);
        mode.n_levels = n_levels_per_mode;
        bath.modes.push_back(mode);
    }
    bath.validate();
    return bath;
}

namespace {

// Kronecker embedding of a single-mode matrix; mode 0 carries stride 1.
Mat embed_mode(const BathSpec& bath, int mode, const Mat& m) {
    const std::vector<int> dims = bath.dims();
    const long total = bath.total_dim();
    long stride = 1;
    for (int j = 0; j < mode; ++j) stride *= dims[j];
    const int d = dims[mode];
    Mat out = Mat::Zero(total, total);
    for (long outer = 0; outer < total / (stride * d); ++outer)
        for (long inner = 0; inner < stride; ++inner)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    const long row = inner + stride * (r + long(d) * outer);
                    const long col = inner + stride * (c + long(d) * outer);
                    out(row, col) = m(r, c);
                }
    return out;
}

}  // namespace

Mat alpha_i_bath(const BathSpec& bath, double t) {
    bath.validate();
    if (bath.total_dim() > 4096)
        throw validation_error("alpha_i_bath: dense product-space matrix limited to dim 4096");
    const long total = bath.total_dim();
    Mat out = Mat::Zero(total, total);
    for (int m = 0; m < bath.mode_count(); ++m) {
        const BathMode& mode = bath.modes[m];
        const Mat a = make_annihilation(mode.n_levels);
        const cd phase = std::exp(cd(0.0, -mode.omega * t));
        out += embed_mode(bath, m, mode.coupling * (phase * a + std::conj(phase) * a.adjoint()));
    }
    return out;
}

cd alpha_i_bath_mean(const BathSpec& bath, double t) {
    cd acc = 0.0;
    for (const auto& mode : bath.modes)
        acc += mode.coupling * 2.0 * std::real(mode.beta * std::exp(cd(0.0, -mode.omega * t)));
    return acc;
}

cd f_kernel_continuum(const BathSpec& bath, double t_prime, double t) {
    bath.validate();
    double acc = 0.0;
    for (const auto& mode : bath.modes)
        acc += mode.coupling * mode.coupling * mode.omega * mode.omega *
               std::sin(mode.omega * (t_prime - t));
    return cd(0.0, -2.0 * acc);
}

PulseDesign pulse_from_wavepacket(const BathSpec& bath, double t_lo, double t_hi, int samples,
                                  double edge_tol) {
    bath.validate();
    if (!(t_hi > t_lo) || samples < 2)
        throw validation_error("pulse_from_wavepacket: bad window");
    PulseDesign design;
    design.times.resize(samples);
    design.alpha.resize(samples);
    for (int i = 0; i < samples; ++i) {
        design.times[i] = t_lo + (t_hi - t_lo) * i / (samples - 1);
        design.alpha[i] = alpha_i_bath_mean(bath, design.times[i]).real();
        design.peak = std::max(design.peak, std::abs(design.alpha[i]));
    }
    if (design.peak > 0.0) {
        const double edge = std::max(std::abs(design.alpha.front()), std::abs(design.alpha.back()));
        if (edge > edge_tol * design.peak)
            throw validation_error(
                "pulse_from_wavepacket: wave packet does not interfere destructively at the window "
                "edges; widen the window or rephase the amplitudes");
    }
    return design;
}

void assign_gaussian_wavepacket(BathSpec& bath, double amplitude, double omega_center,
                                double sigma_omega, double t_arrival) {
    if (!(sigma_omega > 0.0))
        throw validation_error("assign_gaussian_wavepacket: sigma_omega must be positive");
    for (auto& mode : bath.modes) {
        const double detuning = mode.omega - omega_center;
        mode.beta = amplitude * std::exp(-detuning * detuning / (4.0 * sigma_omega * sigma_omega)) *
                    std::exp(cd(0.0, mode.omega * t_arrival));
    }
}

CompositeState prepare_continuum_state(const SpatialGrid& grid, const BathSpec& bath,
                                       const ParticleInit& particle, const PotentialSpec* potential,
                                       double mass) {
    bath.validate();
    const long total = bath.total_dim();
    std::vector<Vec> mode_coeff;
    for (const auto& mode : bath.modes) {
        OscillatorInit init;
        init.kind = OscillatorInit::Kind::coherent;
        init.beta = mode.beta;
        mode_coeff.push_back(oscillator_coefficients(init, mode.n_levels));
    }
    // Flattened product of per-mode coherent coefficients; mode 0 is fastest.
    Vec fock_coeff = Vec::Ones(total);
    for (long n = 0; n < total; ++n) {
        long rem = n;
        for (int m = 0; m < bath.mode_count(); ++m) {
            const int k = int(rem % bath.modes[m].n_levels);
            rem /= bath.modes[m].n_levels;
            fock_coeff(n) *= mode_coeff[m](k);
        }
    }

    ParticleInit pinit = particle;
    Eigen::VectorXcd phi;
    if (pinit.kind == ParticleInit::Kind::trap_ground_state) {
        if (!potential)
            throw validation_error("prepare_continuum_state: ground state requires a potential");
        phi = relax_ground_state(grid, *potential, mass).psi;
    } else {
        // Reuse the single-mode preparation path for the packet.
        const FockSpace dummy(2);
        OscillatorInit vac;
        const CompositeState tmp = prepare_state(grid, dummy, pinit, vac, potential, mass);
        phi = tmp.amplitudes.col(0);
    }

    CompositeState state(grid, int(total));
    state.amplitudes = phi * fock_coeff.transpose();
    state.normalize();
    return state;
}

std::string to_string(DensityKind kind) {
    switch (kind) {
        case DensityKind::flat:
            return "flat";
        case DensityKind::gaussian:
            return "gaussian";
        case DensityKind::table:
            return "table";
    }
    return "unknown";
}

DensityKind density_kind_from_string(const std::string& name) {
    if (name == "flat") return DensityKind::flat;
    if (name == "gaussian") return DensityKind::gaussian;
    if (name == "table") return DensityKind::table;
    throw validation_error("unknown density kind: " + name);
}

}  // namespace qkh

// bath.hpp — Discretized continuum of oscillator modes: coupling densities,
// midpoint mode grids, initial wave packets, and the continuum commutator
// kernel.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qkh/constants.hpp"
#include "qkh/fock.hpp"
#include "qkh/state.hpp"

namespace qkh {

enum class DensityKind { flat, gaussian, table };

// Coupling density ell_w (length per unit frequency).
struct CouplingDensity {
    DensityKind kind = DensityKind::flat;
    double amplitude = 0.0;  // flat value / gaussian peak
    double center = 1.0;     // gaussian center
    double width = 0.1;      // gaussian standard deviation
    std::vector<double> table_omega;  // table kind: sorted nodes
    std::vector<double> table_value;  // linear interpolation between nodes

    double value(double omega) const;
    void validate() const;
};

struct BathMode {
    double omega = 1.0;
    double coupling = 0.0;  // effective per-mode coupling, ell_w sqrt(dw)
    int n_levels = 4;
    cd beta = 0.0;  // initial coherent amplitude
};

struct BathSpec {
    std::vector<BathMode> modes;
    double delta_omega = 0.0;

    int mode_count() const { return int(modes.size()); }
    long total_dim() const;
    std::vector<int> dims() const;

    void validate() const;
};

// Midpoint-rule discretization of the density over [omega_min, omega_max].
BathSpec discretize(const CouplingDensity& density, double omega_min, double omega_max, int n_modes,
                    int n_levels_per_mode = 4);

// Interaction-picture trap position over the mode product space, as a dense
// matrix (small mode counts only).
Mat alpha_i_bath(const BathSpec& bath, double t);

// Expected trap trajectory of a coherent mode wave packet.
cd alpha_i_bath_mean(const BathSpec& bath, double t);

// Continuum commutator kernel, quadrature over the mode grid:
// F(t', t) = -2i sum_k coupling_k^2 w_k^2 sin[w_k (t' - t)].
cd f_kernel_continuum(const BathSpec& bath, double t_prime, double t);

// Classical pulse shape generated by the initial wave packet. Construction
// verifies destructive interference at the window edges:
// |alpha| < edge_tol * peak, else a pulse-design error is thrown.
struct PulseDesign {
    std::vector<double> times;
    std::vector<double> alpha;
    double peak = 0.0;
};
PulseDesign pulse_from_wavepacket(const BathSpec& bath, double t_lo, double t_hi, int samples = 1024,
                                  double edge_tol = 1e-3);

// Gaussian spectral packet amplitudes beta_w ~ b exp(-(w - wc)^2 / (4 sw^2))
// with arrival-time phase e^{i w t0}, assigned mode by mode.
void assign_gaussian_wavepacket(BathSpec& bath, double amplitude, double omega_center,
                                double sigma_omega, double t_arrival);

// Particle ⊗ product of per-mode coherent states over the flattened mode index.
CompositeState prepare_continuum_state(const SpatialGrid& grid, const BathSpec& bath,
                                       const ParticleInit& particle,
                                       const PotentialSpec* potential = nullptr, double mass = 1.0);

std::string to_string(DensityKind kind);
DensityKind density_kind_from_string(const std::string& name);

}  // namespace qkh
